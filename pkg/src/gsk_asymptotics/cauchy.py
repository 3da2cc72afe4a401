"""Scalar Riemann-Hilbert data built from nu = -log(1 + phi) / (2 pi i).

alpha(z) = exp(int nu(m) / (m - z) dm) over the real line; its boundary values
satisfy alpha_-(l) = alpha_+(l) (1 + phi(l)) and alpha(z) ~ 1 + alpha1 / z.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, LogSingularityError
from .kernels import GskKernel
from .quadrature import QuadratureRule, _collides, pv_sum, regularized_double_integral, tail_check

#: alpha_at refuses points closer to the axis than this fraction of the strip half-width
AXIS_PROXIMITY = 1e-3


def _log1p_phi(kernel: GskKernel, lam) -> np.ndarray:
    one_plus = 1 + np.asarray(kernel.phi(lam), dtype=complex)
    if np.any(one_plus == 0):
        raise LogSingularityError("1 + phi vanishes: nu has a logarithmic singularity")
    return np.log(one_plus)


def nu(kernel: GskKernel, lam):
    """Principal-branch nu; continuous on the real axis for admissible kernels."""
    return -_log1p_phi(kernel, lam) / (2j * np.pi)


def nu_prime(kernel: GskKernel, lam):
    lam = np.asarray(lam, dtype=complex)
    return -kernel.phi_prime(lam) / (2j * np.pi * (1 + kernel.phi(lam)))


def unwrap_from_right(log_values: np.ndarray) -> np.ndarray:
    """Phase-unwrap log(1 + phi) sampled on an increasing grid, anchored at the right end."""
    rev = log_values[::-1]
    # np.unwrap keeps the first (rightmost) phase on the principal sheet: nu(+inf) = 0
    phase = np.unwrap(rev.imag)
    return (rev.real + 1j * phase)[::-1]


def _branch_samples(kernel: GskKernel, nodes: np.ndarray) -> np.ndarray:
    return -unwrap_from_right(_log1p_phi(kernel, nodes)) / (2j * np.pi)


@dataclass(frozen=True, eq=False)
class CauchyData:
    kernel: GskKernel
    rule: QuadratureRule
    nu_samples: np.ndarray
    nu_prime_samples: np.ndarray
    alt_rule: QuadratureRule
    alt_nu_samples: np.ndarray
    alt_nu_prime_samples: np.ndarray
    tail_tol: float = 1e-12

    @property
    def alpha1(self) -> complex:
        return alpha1(self)

    def nu(self, lam):
        """nu on the branch fixed by the samples (nearest-node continuation off the grid)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        val = nu(self.kernel, lam)
        idx = np.clip(np.searchsorted(self.rule.nodes, lam.real), 1, len(self.rule) - 1)
        left, right = self.rule.nodes[idx - 1], self.rule.nodes[idx]
        nearest = np.where(np.abs(lam.real - left) <= np.abs(lam.real - right), idx - 1, idx)
        ref = self.nu_samples[nearest]
        val = val + np.round((ref - val).real)
        on_node = (lam.imag == 0) & (lam.real == self.rule.nodes[nearest])
        return np.where(on_node, ref, val)

    def _pv(self, samples, alt_samples, f0, lam):
        out = np.empty(lam.shape, dtype=complex)
        hit = _collides(self.rule, lam)
        if np.any(~hit):
            out[~hit] = pv_sum(self.rule, samples, f0[~hit], lam[~hit])
        if np.any(hit):
            out[hit] = pv_sum(self.alt_rule, alt_samples, f0[hit], lam[hit])
        return out

    def pv_nu(self, lam) -> np.ndarray:
        """PV of int nu(m) / (m - lam) dm at real points."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return self._pv(self.nu_samples, self.alt_nu_samples, self.nu(lam), lam)

    def pv_nu_prime(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return self._pv(self.nu_prime_samples, self.alt_nu_prime_samples, nu_prime(self.kernel, lam), lam)

    @cached_property
    def functional_constant(self) -> complex:
        """x-independent part of the leading exponent: -int g' nu + regularized double integral."""
        first = -self.rule.integrate(self.kernel.g_prime(self.rule.nodes) * self.nu_samples)
        return first + regularized_double_integral(self.nu, lambda l: nu_prime(self.kernel, l), self.rule, self.tail_tol)


def build_cauchy_data(kernel: GskKernel, rule: QuadratureRule, tail_tol: float = 1e-12) -> CauchyData:
    samples = _branch_samples(kernel, rule.nodes)
    tail_check((samples[0], samples[-1]), tail_tol)
    alt = rule.shifted()
    if np.any(_collides(alt, rule.nodes)):
        alt = alt.shifted()
    return CauchyData(
        kernel=kernel,
        rule=rule,
        nu_samples=samples,
        nu_prime_samples=nu_prime(kernel, rule.nodes),
        alt_rule=alt,
        alt_nu_samples=_branch_samples(kernel, alt.nodes),
        alt_nu_prime_samples=nu_prime(kernel, alt.nodes),
        tail_tol=tail_tol,
    )


def log_alpha_at(data: CauchyData, z):
    """int nu(m) / (m - z) dm for z off the real axis."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z.imag) < AXIS_PROXIMITY * data.kernel.a):
        raise DomainError("alpha_at is too close to the real axis; use alpha_pm for boundary values")
    rule = data.rule
    out = np.empty(z.shape, dtype=complex)
    near = np.abs(z.imag) < rule.panel_width
    far = ~near
    if np.any(far):
        out[far] = (data.nu_samples[None, :] / (rule.nodes[None, :] - z[far, None])) @ rule.weights
    if np.any(near):
        zn = z[near]
        nz = data.nu(zn)
        quotient = (data.nu_samples[None, :] - nz[:, None]) / (rule.nodes[None, :] - zn[:, None])
        out[near] = quotient @ rule.weights + nz * (np.log(rule.hi - zn) - np.log(rule.lo - zn))
    return out


def alpha_at(data: CauchyData, z):
    """alpha(z); for Im z > 0 this continues alpha_+, for Im z < 0 alpha_-."""
    scalar = np.ndim(z) == 0
    out = np.exp(log_alpha_at(data, z))
    return out[0] if scalar else out


def log_alpha_pm(data: CauchyData, lam, side: int):
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return data.pv_nu(lam) + side * 1j * np.pi * data.nu(lam)


def alpha_pm(data: CauchyData, lam, side: int):
    """Boundary value alpha_+ (side=+1) or alpha_- (side=-1) on the real axis (Sokhotski-Plemelj)."""
    scalar = np.ndim(lam) == 0
    out = np.exp(log_alpha_pm(data, lam, side))
    return out[0] if scalar else out


def dlog_alpha_pm(data: CauchyData, lam, side: int):
    """d/dl log alpha_+-(l); the Cauchy transform commutes with differentiation."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return data.pv_nu_prime(lam) + side * 1j * np.pi * nu_prime(data.kernel, lam)


def alpha1(data: CauchyData) -> complex:
    """Coefficient of 1/z in alpha(z) at infinity: -int nu."""
    return -data.rule.integrate(data.nu_samples)


def jump_residual(data: CauchyData, lam=None) -> float:
    """max |alpha_-/alpha_+ - (1 + phi)| at the quadrature nodes (or the given points)."""
    lam = data.rule.nodes if lam is None else np.atleast_1d(np.asarray(lam, dtype=float))
    inner = (lam > data.rule.lo) & (lam < data.rule.hi)
    lam = lam[inner]
    ratio = np.exp(log_alpha_pm(data, lam, -1) - log_alpha_pm(data, lam, +1))
    return float(np.max(np.abs(ratio - (1 + data.kernel.phi(lam)))))
