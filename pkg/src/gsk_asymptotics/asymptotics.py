"""Asymptotic formulas: the matrices built from the zeros of 1 + phi, the
resolvent functions f+-, the leading exponent and the two determinant formulas
(correction by det(I - A), and the sum over deformed contours)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np
import scipy.linalg

from .cauchy import CauchyData, alpha_at, alpha_pm, dlog_alpha_pm
from .errors import CombinatorialLimitError, ConfigurationError, RootError, SingularSystemError
from .kernels import GskKernel, e_pm
from .oracle import logdet_lu
from .roots import RootSet

#: |phi'(q)| below this is treated as a multiple root
DEGENERATE_TOL = 1e-10
#: contour sums are refused above this many retained roots in the smaller half-plane
MAX_CONTOUR_ROOTS = 12
#: |l - m| below which the resolvent switches to its diagonal formula
DIAGONAL_GAP = 1e-6


@dataclass(frozen=True)
class ContourIndex:
    """Choice of n zeros above (J) and n below (K) the axis; 0-based, sorted."""

    J: tuple = ()
    K: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(int(j) for j in self.J))
        object.__setattr__(self, "K", tuple(int(k) for k in self.K))
        if len(self.J) != len(self.K):
            raise ConfigurationError(f"|J| = {len(self.J)} and |K| = {len(self.K)} must agree")
        for s in (self.J, self.K):
            if any(b <= a for a, b in zip(s, s[1:])) or any(v < 0 for v in s):
                raise ConfigurationError(f"index set {s} must be strictly increasing and non-negative")

    @property
    def n(self) -> int:
        return len(self.J)

    def validate(self, n_plus: int, n_minus: int) -> None:
        if (self.J and self.J[-1] >= n_plus) or (self.K and self.K[-1] >= n_minus):
            raise ConfigurationError(f"contour index {self} out of range for N+ = {n_plus}, N- = {n_minus}")


def all_contours(n_plus: int, n_minus: int):
    """Every ContourIndex, by increasing n."""
    for n in range(min(n_plus, n_minus) + 1):
        for J in combinations(range(n_plus), n):
            for K in combinations(range(n_minus), n):
                yield ContourIndex(J, K)


@dataclass(frozen=True, eq=False)
class AsymptoticModel:
    x: float
    kernel: GskKernel
    data: CauchyData
    roots: RootSet
    h_plus: np.ndarray
    h_minus: np.ndarray
    e2_plus: np.ndarray
    e2_minus: np.ndarray
    A_minus: np.ndarray
    A_plus: np.ndarray
    A: np.ndarray
    A_tilde: np.ndarray
    C_plus: np.ndarray
    D_plus: np.ndarray
    C_minus: np.ndarray
    D_minus: np.ndarray
    leading: complex
    logdet_correction: complex
    cd_residual: float

    @property
    def q_plus(self) -> np.ndarray:
        return self.roots.q_plus

    @property
    def q_minus(self) -> np.ndarray:
        return self.roots.q_minus


def build_h(data: CauchyData, roots: RootSet, kernel: GskKernel):
    """h+_k = -alpha(q+_k)^-2 / phi'(q+_k),  h-_k = -alpha(q-_k)^2 / phi'(q-_k)."""
    out = []
    for q, power in ((roots.q_plus, -2), (roots.q_minus, 2)):
        if len(q) == 0:
            out.append(np.zeros(0, complex))
            continue
        dphi = kernel.phi_prime(q)
        bad = np.abs(dphi) < DEGENERATE_TOL
        if np.any(bad):
            raise RootError(f"degenerate (multiple) root at {q[bad][0]:.6g}: |phi'| = {abs(dphi[bad][0]):.2e}")
        out.append(-alpha_at(data, q) ** power / dphi)
    return out[0], out[1]


def build_A_matrices(q_plus, q_minus, h_plus, h_minus, e2_plus, e2_minus):
    """A-_{jk} = h-_k e-^2(q-_k) / (q+_j - q-_k),  A+_{jk} = h+_k e+^2(q+_k) / (q-_j - q+_k)."""
    A_minus = (h_minus * e2_minus)[None, :] / (q_plus[:, None] - q_minus[None, :])
    A_plus = (h_plus * e2_plus)[None, :] / (q_minus[:, None] - q_plus[None, :])
    return A_minus, A_plus, A_minus @ A_plus, A_plus @ A_minus


def _solve_ones(M: np.ndarray, x: float) -> np.ndarray:
    n = M.shape[0]
    if n == 0:
        return np.zeros(0, complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(np.eye(n) - M)
    if np.min(np.abs(np.diag(lu))) < 1e-13:
        raise SingularSystemError(f"I - A is singular at x = {x:g}: increase x or lower N")
    return scipy.linalg.lu_solve((lu, piv), np.ones(n, complex))


def solve_CD(A, A_tilde, A_minus, A_plus, x: float = float("nan")):
    """(I - A) C+ = 1, D+ = A+ C+;  (I - A~) C- = 1, D- = A- C-."""
    C_plus = _solve_ones(A, x)
    C_minus = _solve_ones(A_tilde, x)
    return C_plus, A_plus @ C_plus, C_minus, A_minus @ C_minus


def functional_A(data: CauchyData, x: float) -> complex:
    """Leading exponent on the real axis: i x alpha1 plus its x = 0 value."""
    return complex(1j * x * data.alpha1 + data.functional_constant)


def build_model(kernel: GskKernel, data: CauchyData, roots: RootSet, x: float) -> AsymptoticModel:
    if not x > 0:
        raise ConfigurationError(f"x must be positive, got {x}")
    h_plus, h_minus = build_h(data, roots, kernel)
    qp, qm = roots.q_plus, roots.q_minus
    e2p = e_pm(kernel, x, qp, +1) ** 2 if len(qp) else np.zeros(0, complex)
    e2m = e_pm(kernel, x, qm, -1) ** 2 if len(qm) else np.zeros(0, complex)
    A_minus, A_plus, A, A_tilde = build_A_matrices(qp, qm, h_plus, h_minus, e2p, e2m)
    C_plus, D_plus, C_minus, D_minus = solve_CD(A, A_tilde, A_minus, A_plus, x)
    res = 0.0
    if len(qp):
        res = max(res, float(np.max(np.abs(C_plus - A @ C_plus - 1))))
    if len(qm):
        res = max(res, float(np.max(np.abs(C_minus - A_tilde @ C_minus - 1))))
    return AsymptoticModel(
        x=float(x),
        kernel=kernel,
        data=data,
        roots=roots,
        h_plus=h_plus,
        h_minus=h_minus,
        e2_plus=e2p,
        e2_minus=e2m,
        A_minus=A_minus,
        A_plus=A_plus,
        A=A,
        A_tilde=A_tilde,
        C_plus=C_plus,
        D_plus=D_plus,
        C_minus=C_minus,
        D_minus=D_minus,
        leading=functional_A(data, x),
        logdet_correction=logdet_lu(np.eye(len(qp)) - A),
        cd_residual=res,
    )


# --------------------------------------------------------------------------
# determinant


def logdet_thm2(model: AsymptoticModel, tilde: bool = False) -> complex:
    """Leading exponent plus log det(I - A) (or log det(I - A~))."""
    if tilde:
        return model.leading + logdet_lu(np.eye(len(model.q_minus)) - model.A_tilde)
    return model.leading + model.logdet_correction


def cauchy_determinant(xs, ys) -> complex:
    """det[1 / (x_a - y_b)] by the closed product formula."""
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    n = len(xs)
    if n == 0:
        return 1.0 + 0j
    iu = np.triu_indices(n, 1)
    num = np.prod((xs[None, :] - xs[:, None])[iu]) * np.prod((ys[:, None] - ys[None, :])[iu])
    return complex(num / np.prod(xs[:, None] - ys[None, :]))


def _pair_factors(model: AsymptoticModel):
    """Per-root factors (alpha_-(q-)/alpha_+(q+))^2 e+^2 e-^2 / (phi' phi'), split by half-plane."""
    return model.h_plus * model.e2_plus, model.h_minus * model.e2_minus


def contour_weight(model: AsymptoticModel, idx: ContourIndex) -> complex:
    """exp(A_Gamma - A_R) for the contour crossing q+_J and q-_K.

    The square of the Cauchy determinant times one factor per crossed root;
    h+_j h-_k carries alpha(q-)^2 / (alpha(q+)^2 phi'(q+) phi'(q-)).
    """
    idx.validate(len(model.q_plus), len(model.q_minus))
    if idx.n == 0:
        return 1.0 + 0j
    up, dn = _pair_factors(model)
    J, K = list(idx.J), list(idx.K)
    cd = cauchy_determinant(model.q_plus[J], model.q_minus[K])
    return complex(cd**2 * np.prod(up[J]) * np.prod(dn[K]))


def contour_term_count(n_plus: int, n_minus: int) -> int:
    return sum(comb(n_plus, n) * comb(n_minus, n) for n in range(min(n_plus, n_minus) + 1))


def contour_sum(model: AsymptoticModel) -> complex:
    n_plus, n_minus = len(model.q_plus), len(model.q_minus)
    if min(n_plus, n_minus) > MAX_CONTOUR_ROOTS:
        count = contour_term_count(n_plus, n_minus)
        raise CombinatorialLimitError(
            f"contour sum over N+ = {n_plus}, N- = {n_minus} roots has {count} terms; limit is "
            f"min(N+, N-) <= {MAX_CONTOUR_ROOTS}",
            count,
        )
    return complex(sum(contour_weight(model, idx) for idx in all_contours(n_plus, n_minus)))


def logdet_thm3(model: AsymptoticModel) -> complex:
    """Leading exponent plus log of the sum of all contour weights."""
    total = contour_sum(model)
    if total == 0:
        raise SingularSystemError(f"contour sum vanishes at x = {model.x:g}")
    # keep the branch of the det(I - A) route so the two formulas are comparable
    branch = np.round((model.logdet_correction - np.log(total)).imag / (2 * np.pi))
    return complex(model.leading + np.log(total) + 2j * np.pi * branch)


# --------------------------------------------------------------------------
# resolvent


def _f_parts(model: AsymptoticModel, lam: np.ndarray, sign: int, derivative: bool):
    """f_sign and, optionally, its derivative at real points."""
    kernel, data, x = model.kernel, model.data, model.x
    if sign > 0:
        side_first, pow_first = -1, -1  # alpha_-^-1 e+
        q_D, h_D, e2_D, D = model.q_minus, model.h_minus, model.e2_minus, model.D_plus
        q_C, h_C, e2_C, C = model.q_plus, model.h_plus, model.e2_plus, model.C_plus
    else:
        side_first, pow_first = +1, +1  # alpha_+ e-
        q_D, h_D, e2_D, D = model.q_plus, model.h_plus, model.e2_plus, model.D_minus
        q_C, h_C, e2_C, C = model.q_minus, model.h_minus, model.e2_minus, model.C_minus
    side_second = -side_first
    pow_second = -pow_first

    def prefactor(side, power, e_sign):
        val = alpha_pm(data, lam, side) ** power * e_pm(kernel, x, lam, e_sign)
        if not derivative:
            return val, None
        dlog = power * dlog_alpha_pm(data, lam, side) + e_sign * 0.5 * (1j * x + kernel.g_prime(lam))
        return val, val * dlog

    def pole_sum(q, coef):
        if len(q) == 0:
            z = np.zeros(lam.shape, complex)
            return z, z
        d = lam[:, None] - q[None, :]
        return (coef[None, :] / d).sum(axis=1), -(coef[None, :] / d**2).sum(axis=1)

    p1, dp1 = prefactor(side_first, pow_first, sign)
    p2, dp2 = prefactor(side_second, pow_second, -sign)
    s1, ds1 = pole_sum(q_D, D * h_D * e2_D)
    s2, ds2 = pole_sum(q_C, C * h_C * e2_C)
    f = p1 * (1 + s1) + p2 * s2
    if not derivative:
        return f, None
    return f, dp1 * (1 + s1) + p1 * ds1 + dp2 * s2 + p2 * ds2


def f_pm_asym(model: AsymptoticModel, lam, sign: int):
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    f, _ = _f_parts(model, lam, sign, False)
    return f[0] if scalar else f


def f_pm_derivative(model: AsymptoticModel, lam, sign: int):
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    _, df = _f_parts(model, lam, sign, True)
    return df[0] if scalar else df


def resolvent_asym(model: AsymptoticModel, lam, mu):
    """gamma R(lam, mu) from f+-; broadcasts over lam and mu."""
    lam, mu = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(mu, dtype=float))
    shape = lam.shape
    lam, mu = lam.ravel(), mu.ravel()
    fp_l, fm_l = f_pm_asym(model, lam, +1), f_pm_asym(model, lam, -1)
    fp_m, fm_m = f_pm_asym(model, mu, +1), f_pm_asym(model, mu, -1)
    phi = model.kernel.phi
    root = np.sqrt(phi(lam)) * np.sqrt(phi(mu))
    near = np.abs(lam - mu) < DIAGONAL_GAP
    with np.errstate(divide="ignore", invalid="ignore"):
        out = root * (fp_l * fm_m - fm_l * fp_m) / (2j * np.pi * (lam - mu))
    if np.any(near):
        c = 0.5 * (lam[near] + mu[near])
        dfp, dfm = f_pm_derivative(model, c, +1), f_pm_derivative(model, c, -1)
        fp, fm = f_pm_asym(model, c, +1), f_pm_asym(model, c, -1)
        out[near] = phi(c) * (dfp * fm - dfm * fp) / (2j * np.pi)
    return out.reshape(shape)


# --------------------------------------------------------------------------
# x-derivative


def x_derivative_asym(model: AsymptoticModel) -> complex:
    """(1 / 2 pi) int f+ e- phi by quadrature on the Cauchy-data rule."""
    rule = model.data.rule
    lam = rule.nodes
    vals = f_pm_asym(model, lam, +1) * e_pm(model.kernel, model.x, lam, -1) * model.kernel.phi(lam)
    return complex(rule.integrate(vals) / (2 * np.pi))


def A_x_derivative(model: AsymptoticModel) -> np.ndarray:
    """d/dx of A = A- A+ (each e+-^2(q) contributes a factor +-i q)."""
    dAm = model.A_minus * (-1j * model.q_minus)[None, :]
    dAp = model.A_plus * (1j * model.q_plus)[None, :]
    return dAm @ model.A_plus + model.A_minus @ dAp


def x_derivative_closed(model: AsymptoticModel) -> complex:
    """i alpha1 - sum_j A'_jj C+_j."""
    dA = A_x_derivative(model)
    return complex(1j * model.data.alpha1 - np.sum(np.diag(dA) * model.C_plus))


def x_derivative_logdet_correction(model: AsymptoticModel) -> complex:
    """i alpha1 + d/dx log det(I - A) = i alpha1 - tr((I - A)^-1 A')."""
    n = len(model.q_plus)
    if n == 0:
        return complex(1j * model.data.alpha1)
    dA = A_x_derivative(model)
    return complex(1j * model.data.alpha1 - np.trace(np.linalg.solve(np.eye(n) - model.A, dA)))


def integral_equation_f(model: AsymptoticModel, sign: int):
    """Callable f_sign for the oracle's integral-equation residual."""
    return lambda lam: f_pm_asym(model, np.asarray(lam, dtype=float), sign)


def reality_defect(model: AsymptoticModel, thm2: Optional[complex] = None) -> float:
    """|Im exp(logdet)| / |exp(logdet)|; small for real phi with conjugate-symmetric roots."""
    v = np.exp(logdet_thm2(model) if thm2 is None else thm2)
    return float(abs(v.imag) / abs(v))
