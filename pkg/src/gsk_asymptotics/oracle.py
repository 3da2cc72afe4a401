"""Ground truth by Nystrom discretization: log-determinants, discrete resolvents,
the finite-interval Wiener-Hopf determinant and integral-equation residuals."""

from __future__ import annotations

import warnings
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, DomainError, NyquistError, SingularSystemError
from .kernels import GskKernel, e_pm, kernel_value, sine_part
from .quadrature import QuadratureRule, composite_rule

EPS = np.finfo(float).eps


def logdet_lu(matrix, return_error: bool = False):
    """log det by LU with partial pivoting: sum of pivot logs plus i pi per odd permutation.

    The error estimate is n * eps * (pivot growth factor), a backward-error bound
    expressed on the log scale.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigurationError(f"logdet_lu needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return (0j, 0.0) if return_error else 0j
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularSystemError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=True)
    pivots = np.diag(lu)
    if np.any(pivots == 0):
        raise SingularSystemError("exact zero pivot: matrix is singular")
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    value = np.sum(np.log(pivots)) + 1j * np.pi * (swaps % 2)
    if not return_error:
        return complex(value)
    growth = np.abs(np.triu(lu)).max() / max(np.abs(m).max(), np.finfo(float).tiny)
    return complex(value), float(n * EPS * growth)


def nyquist_nodes(x: float, rule: QuadratureRule) -> int:
    """Minimal node count for the oscillation of the kernel at this x."""
    return int(np.ceil(4 * x * (rule.hi - rule.lo) / 2 / (2 * np.pi)))


def _guard(x: float, rule: QuadratureRule) -> None:
    need = nyquist_nodes(x, rule)
    if len(rule) < need:
        raise NyquistError(f"rule has {len(rule)} nodes, x = {x:g} needs at least {need}", need)


def kernel_matrix(kernel: GskKernel, x: float, rule: QuadratureRule) -> np.ndarray:
    """gamma V at all node pairs (diagonal from the analytic limit)."""
    return kernel_value(kernel, x, rule.nodes[:, None], rule.nodes[None, :])


def nystrom_matrix(kernel: GskKernel, x: float, rule: QuadratureRule) -> np.ndarray:
    """I + sqrt(w_i w_j) gamma V(l_i, l_j): symmetric discretization of I + gamma V."""
    _guard(x, rule)
    sw = np.sqrt(rule.weights)
    return np.eye(len(rule)) + sw[:, None] * kernel_matrix(kernel, x, rule) * sw[None, :]


def nystrom_logdet(kernel: GskKernel, x: float, rule: QuadratureRule) -> complex:
    """log det(I + gamma V) on the truncated line."""
    if kernel.trivial:
        return 0j
    return logdet_lu(nystrom_matrix(kernel, x, rule))


def nystrom_logdet_refined(kernel: GskKernel, x: float, rule: QuadratureRule) -> tuple[complex, float]:
    """Value on the rule with doubled panels, and its change from the base rule as error estimate."""
    base = nystrom_logdet(kernel, x, rule)
    fine = nystrom_logdet(kernel, x, composite_rule(rule.lo, rule.hi, 2 * rule.panels, rule.order))
    return fine, abs(fine - base)


def nystrom_resolvent(kernel: GskKernel, x: float, rule: QuadratureRule) -> np.ndarray:
    """gamma R at node pairs from (I + gamma V W) R = gamma V, solved in symmetrized form."""
    _guard(x, rule)
    K = kernel_matrix(kernel, x, rule)
    sw = np.sqrt(rule.weights)
    S = sw[:, None] * K * sw[None, :]
    M = np.eye(len(rule)) + S
    try:
        lu = scipy.linalg.lu_factor(M)
    except (ValueError, np.linalg.LinAlgError) as exc:  # pragma: no cover
        raise SingularSystemError(str(exc)) from exc
    if np.min(np.abs(np.diag(lu[0]))) < 1e-14:
        raise SingularSystemError("discretized operator I + gamma V is numerically singular")
    X = scipy.linalg.lu_solve(lu, S)
    return X / sw[:, None] / sw[None, :]


def resolvent_interpolant(kernel: GskKernel, x: float, rule: QuadratureRule, R: np.ndarray) -> Callable:
    """Nystrom interpolation of the node resolvent to arbitrary real points.

    Uses gamma R(l, m) = gamma V(l, m) - int gamma V(l, s) gamma R(s, m) ds twice,
    together with the symmetry of R.
    """
    nodes, w = rule.nodes, rule.weights

    def evaluate(lam, mu):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        K_nm = kernel_value(kernel, x, nodes[:, None], mu[None, :])
        R_nm = K_nm - R.T @ (w[:, None] * K_nm)
        K_ln = kernel_value(kernel, x, lam[:, None], nodes[None, :])
        return kernel_value(kernel, x, lam[:, None], mu[None, :]) - (K_ln * w[None, :]) @ R_nm

    return evaluate


def resolvent_identity_residual(kernel: GskKernel, x: float, rule: QuadratureRule, R: np.ndarray) -> float:
    """max |R + gamma V W R - gamma V| at the nodes."""
    K = kernel_matrix(kernel, x, rule)
    return float(np.max(np.abs(R + (K * rule.weights[None, :]) @ R - K)))


def trace_V(kernel: GskKernel, x: float, rule: QuadratureRule) -> complex:
    """int gamma V(l, l) dl by quadrature of the diagonal limit."""
    diag = kernel_value(kernel, x, rule.nodes, rule.nodes)
    return complex(rule.integrate(diag))


def integral_equation_residual(kernel: GskKernel, x: float, rule: QuadratureRule, f: Callable, sign: int) -> float:
    """max over nodes of |f(l) + int S(l, m) phi(m) f(m) dm - e_sign(l)|.

    S is the bare sine part [e+(l)e-(m) - e-(l)e+(m)] / (2 i pi (l - m)); this is
    the integral equation solved by the functions f+- of the resolvent.
    """
    nodes = rule.nodes
    fv = np.asarray(f(nodes), dtype=complex)
    S = sine_part(kernel, x, nodes[:, None], nodes[None, :])
    lhs = fv + S @ (rule.weights * kernel.phi(nodes) * fv)
    return float(np.max(np.abs(lhs - e_pm(kernel, x, nodes, sign))))


def wiener_hopf_kernel(zeta: float, t):
    """K(t) = sin 2z / (2 pi sinh(t - iz) sinh(t + iz)) = sin 2z / (2 pi (sinh^2 t + sin^2 z))."""
    t = np.asarray(t, dtype=float)
    return np.sin(2 * zeta) / (2 * np.pi * (np.sinh(t) ** 2 + np.sin(zeta) ** 2))


def wiener_hopf_logdet(zeta: float, x: float, rule: Optional[QuadratureRule] = None, order: int = 20) -> complex:
    """log det(I + K) of the truncated Wiener-Hopf operator on [-x/2, x/2]."""
    if not 0 < zeta < np.pi:
        raise DomainError(f"zeta must lie in (0, pi), got {zeta}")
    if x < 0:
        raise DomainError(f"interval length must be non-negative, got {x}")
    if x == 0:
        return 0j
    if rule is None:
        rule = composite_rule(-x / 2, x / 2, max(2, int(np.ceil(2 * x))), order)
    t = rule.nodes
    sw = np.sqrt(rule.weights)
    M = np.eye(len(t)) + sw[:, None] * wiener_hopf_kernel(zeta, t[:, None] - t[None, :]) * sw[None, :]
    return logdet_lu(M)
