"""Analytic data of generalized sine-kernel operators and the built-in families.

A kernel is described by phi = gamma * F (the two never appear separately),
the phase correction g, the half-width ``a`` of the analyticity strip and the
simple poles of phi inside it.  The operator acts on the real line with

    gamma V(l, m) = sqrt(phi(l) phi(m)) [e+(l) e-(m) - e-(l) e+(m)] / (2 i pi (l - m)),
    e+-(l) = exp(+-(i x l + g(l)) / 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import loggamma

from .errors import AdmissibilityError, ConfigurationError, CutoffTooSmallError, DomainError, PoleError

RootGenerator = Callable[[int], tuple[list, list]]

#: |phi| beyond this means we are sitting on a pole (rounding keeps it finite)
POLE_MAGNITUDE = 1e10


def _zero(lam):
    return np.zeros(np.shape(lam), dtype=complex)


@dataclass(frozen=True, eq=False)
class GskKernel:
    phi: Callable
    phi_prime: Callable
    a: float
    g: Callable = _zero
    g_prime: Callable = _zero
    poles_plus: tuple = ()
    poles_minus: tuple = ()
    closed_form_roots: Optional[RootGenerator] = None
    closed_form_alpha_minus: Optional[Callable] = None
    label: str = "custom"
    params: dict = field(default_factory=dict)
    trivial: bool = False

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError(f"strip half-width must be positive, got {self.a}")
        for r in self.poles_plus:
            if not 0 < r.imag < self.a:
                raise ConfigurationError(f"upper pole {r} outside 0 < Im < {self.a}")
        for r in self.poles_minus:
            if not -self.a < r.imag < 0:
                raise ConfigurationError(f"lower pole {r} outside -{self.a} < Im < 0")
        poles = np.array(list(self.poles_plus) + list(self.poles_minus), dtype=complex)
        if len(poles) > 1:
            d = np.abs(poles[:, None] - poles[None, :]) + np.eye(len(poles))
            if d.min() < 1e-12:
                raise ConfigurationError("pole lists must contain distinct simple poles")


def check_admissible(kernel: GskKernel, cutoff: float, samples: int = 4001) -> float:
    """Grid check of sup |phi| < 1 on the real axis; returns the sup."""
    grid = np.linspace(-cutoff, cutoff, samples)
    vals = np.abs(kernel.phi(grid))
    i = int(np.argmax(vals))
    if not np.all(np.isfinite(vals)) or vals[i] >= 1:
        raise AdmissibilityError(
            f"sup |phi| = {vals[i]:.6g} >= 1 at lambda = {grid[i]:.6g} ({kernel.label})", grid[i], vals[i]
        )
    return float(vals[i])


def check_decay(kernel: GskKernel, cutoff: float, tail_tol: float) -> None:
    for end in (-cutoff, cutoff):
        val = abs(kernel.phi(np.array([end]))[0])
        if not val < tail_tol:
            raise CutoffTooSmallError(f"|phi({end:g})| = {val:.3e} exceeds tail tolerance {tail_tol:.1e}")


def check_derivative(kernel: GskKernel, cutoff: float, tol: float = 1e-6) -> float:
    """Compare phi_prime with central differences; returns the max deviation."""
    grid = np.linspace(-0.9 * cutoff, 0.9 * cutoff, 41)
    step = 1e-5
    fd = (kernel.phi(grid + step) - kernel.phi(grid - step)) / (2 * step)
    err = float(np.max(np.abs(fd - kernel.phi_prime(grid))))
    if err > tol:
        raise ConfigurationError(f"phi_prime disagrees with finite differences of phi by {err:.2e}")
    return err


def e_pm(kernel: GskKernel, x: float, lam, sign: int):
    """exp(sign * (i x lam + g(lam)) / 2), defined inside the strip."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(np.abs(lam.imag) >= kernel.a):
        raise DomainError(f"e_pm evaluated outside the strip |Im| < {kernel.a}")
    return np.exp(sign * 0.5 * (1j * x * lam + kernel.g(lam)))


def sine_part(kernel: GskKernel, x: float, lam, mu):
    """[e+(l) e-(m) - e-(l) e+(m)] / (2 i pi (l - m)) with its diagonal limit."""
    lam, mu = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(mu, dtype=complex))
    diff = lam - mu
    diag = diff == 0
    theta = 0.5 * (1j * x * diff + kernel.g(lam) - kernel.g(mu))
    with np.errstate(divide="ignore", invalid="ignore"):
        off = np.sinh(theta) / (1j * np.pi * np.where(diag, 1.0, diff))
    on = (1j * x + kernel.g_prime(lam)) / (2j * np.pi)
    return np.where(diag, on, off)


def kernel_value(kernel: GskKernel, x: float, lam, mu):
    """gamma V(lam, mu), broadcasting over the arguments; exact diagonal limit at lam == mu."""
    lam, mu = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(mu, dtype=complex))
    phl = kernel.phi(lam)
    phm = kernel.phi(mu)
    if not (np.all(np.abs(phl) < POLE_MAGNITUDE) and np.all(np.abs(phm) < POLE_MAGNITUDE)):
        raise PoleError("kernel evaluated at (or numerically on) a pole of phi")
    return np.sqrt(phl) * np.sqrt(phm) * sine_part(kernel, x, lam, mu)


# --------------------------------------------------------------------------
# impenetrable bosons at finite temperature


def boson_kernel(h: float, T: float, beta: complex, n_poles: int = 16, cutoff: float = 8.0) -> GskKernel:
    """phi(l) = (e^beta - 1) / (exp((l^2 - h)/T) + 1), g = 0."""
    if not T > 0:
        raise ConfigurationError(f"temperature must be positive, got {T}")
    beta = complex(beta)
    c = np.exp(beta) - 1

    def phi(lam):
        u = (np.asarray(lam, dtype=complex) ** 2 - h) / T
        s = np.exp(np.where(u.real > 0, -u, u))  # |s| <= 1
        return np.where(u.real > 0, c * s / (1 + s), c / (1 + s))

    def phi_prime(lam):
        lam = np.asarray(lam, dtype=complex)
        u = (lam**2 - h) / T
        s = np.exp(np.where(u.real > 0, -u, u))
        return -c * (2 * lam / T) * s / (1 + s) ** 2

    k = np.arange(n_poles)
    w_up = h + 1j * np.pi * T * (2 * k + 1)
    w_dn = h - 1j * np.pi * T * (2 * k + 1)
    poles_plus = tuple(np.concatenate([np.sqrt(w_up), -np.sqrt(w_dn)]))
    poles_minus = tuple(np.concatenate([np.sqrt(w_dn), -np.sqrt(w_up)]))
    a = float(np.sqrt(h + 2j * np.pi * T * n_poles).imag)

    def roots(count: int):
        if c == 0:
            raise ConfigurationError("beta = 0 gives phi = 0: 1 + phi has no zeros")
        j = np.arange(count)
        up = np.sqrt(h + beta * T + 1j * np.pi * T * (2 * j + 1))
        dn = np.sqrt(h + beta * T - 1j * np.pi * T * (2 * j + 1))
        return [up, -dn], [dn, -up]

    kernel = GskKernel(
        phi=phi,
        phi_prime=phi_prime,
        a=a,
        poles_plus=poles_plus,
        poles_minus=poles_minus,
        closed_form_roots=roots,
        label="boson",
        params={"h": h, "T": T, "beta": beta},
        trivial=(c == 0),
    )
    if abs(c) / (1 + np.exp(-h / T)) >= 1:
        raise AdmissibilityError(
            f"sup |phi| = {abs(c) / (1 + np.exp(-h / T)):.6g} >= 1 at lambda = 0 (boson h={h}, T={T}, beta={beta})",
            0.0,
            abs(c) / (1 + np.exp(-h / T)),
        )
    check_admissible(kernel, cutoff)
    return kernel


# --------------------------------------------------------------------------
# XXZ normalization factor


def xxz_phi(zeta: float):
    c = np.pi / 2 - zeta
    f0 = 1 - 2 * zeta / np.pi

    def phi(lam):
        lam = np.asarray(lam, dtype=complex)
        flip = lam.real < 0
        z = np.where(flip, -lam, lam)  # phi is even
        small = np.abs(z) < 1e-300
        zz = np.where(small, 1.0, z)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.exp(-zeta * zz) * np.expm1(-2 * c * zz) / np.expm1(-np.pi * zz)
        return np.where(small, f0, out)

    def phi_prime(lam):
        lam = np.asarray(lam, dtype=complex)
        small = np.abs(lam) < 1e-3
        zz = np.where(small, 1.0, lam)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if c == 0:
                big = np.zeros_like(zz)
            else:
                big = phi(zz) * (c / np.tanh(c * zz) - (np.pi / 2) / np.tanh(np.pi * zz / 2))
        # Taylor series of F' at the origin: F(l) = f0 (1 + (c^2 - pi^2/4) l^2 / 6 + ...)
        series = f0 * (c**2 - np.pi**2 / 4) * lam / 3
        return np.where(small, series, big)

    return phi, phi_prime


def xxz_alpha_minus(zeta: float):
    """Gamma-function closed form of alpha_- for the XXZ kernel."""

    def alpha_minus(lam):
        lam = np.asarray(lam, dtype=complex)
        p = np.pi - zeta
        log_a = (
            0.5 * np.log(2 * p)
            - 1j * lam * zeta / (2 * np.pi) * np.log(np.pi / zeta)
            - 1j * lam * p / (2 * np.pi) * np.log(np.pi / p)
            + loggamma(1 + 1j * lam / 2)
            - loggamma(0.5 + 1j * lam * zeta / (2 * np.pi))
            - loggamma(1 + 1j * lam * p / (2 * np.pi))
        )
        return np.exp(log_a)

    return alpha_minus


def xxz_kernel(zeta: float, n_poles: int = 16, cutoff: float = 40.0) -> GskKernel:
    """phi(l) = sinh(l (pi/2 - zeta)) / sinh(l pi / 2) with gamma = 1, g = 0."""
    if not 0 < zeta < np.pi:
        raise DomainError(f"zeta must lie in (0, pi), got {zeta}")
    phi, phi_prime = xxz_phi(zeta)
    k = np.arange(1, n_poles + 1)
    # poles of 1/sinh(l pi/2) at 2ik, unless the numerator vanishes there too
    keep = np.abs(np.sin(k * (np.pi - 2 * zeta))) > 1e-10
    poles_plus = tuple(2j * k[keep].astype(complex))
    poles_minus = tuple(-2j * k[keep].astype(complex))
    a = 2.0 * n_poles + 1.0

    def roots(count: int):
        j = np.arange(4 * count + 8)
        series = []
        for s in (2j * np.pi * (j + 1) / (np.pi - zeta), 1j * np.pi * (2 * j + 1) / zeta):
            # rational pi/zeta: points with sinh(pi q / 2) = 0 are removable, not zeros
            series.append(s[np.abs(np.sinh(np.pi * s / 2)) > 1e-10][:count])
        return series, [np.conj(s) for s in series]

    kernel = GskKernel(
        phi=phi,
        phi_prime=phi_prime,
        a=a,
        poles_plus=poles_plus,
        poles_minus=poles_minus,
        closed_form_roots=roots,
        closed_form_alpha_minus=xxz_alpha_minus(zeta),
        label="xxz",
        params={"zeta": zeta},
        trivial=(zeta == np.pi / 2),
    )
    check_admissible(kernel, cutoff)
    return kernel


# --------------------------------------------------------------------------
# pole-free control case


def entire_test_kernel(gamma: complex, width: float = 1.0, cutoff: float = 6.0) -> GskKernel:
    """phi(l) = gamma exp(-(l/width)^2): entire, so no poles and no retained roots."""
    gamma = complex(gamma)
    if not abs(gamma) < 1:
        raise AdmissibilityError(f"|gamma| = {abs(gamma):.6g} must be < 1", 0.0, abs(gamma))
    if not width > 0:
        raise ConfigurationError(f"width must be positive, got {width}")

    def phi(lam):
        lam = np.asarray(lam, dtype=complex)
        return gamma * np.exp(-((lam / width) ** 2))

    def phi_prime(lam):
        lam = np.asarray(lam, dtype=complex)
        return -2 * lam / width**2 * phi(lam)

    if gamma == 0:
        a = 50.0
    else:
        # the strip stops just short of the nearest zero of 1 + phi
        base = np.log(-1 / gamma)
        ims = [abs((width * np.sqrt(base + 2j * np.pi * m)).imag) for m in range(-4, 5)]
        a = 0.99 * min(ims)

    def roots(count: int):
        return [], []

    kernel = GskKernel(
        phi=phi,
        phi_prime=phi_prime,
        a=float(a),
        closed_form_roots=roots,
        label="entire_test",
        params={"gamma": gamma, "width": width},
        trivial=(gamma == 0),
    )
    check_admissible(kernel, cutoff)
    return kernel
