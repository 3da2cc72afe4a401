"""Gauss-Legendre quadrature on truncated lines, principal values and the
regularized double integral of the leading determinant exponent."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigurationError, CutoffTooSmallError

MAX_ORDER = 512
#: distance below which a principal-value pole is considered to sit on a node
NODE_COLLISION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Composite Gauss-Legendre rule on ``[lo, hi]``."""

    nodes: np.ndarray
    weights: np.ndarray
    lo: float
    hi: float
    panels: int
    order: int

    @property
    def domain(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def panel_width(self) -> float:
        return (self.hi - self.lo) / self.panels

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> complex:
        return np.sum(self.weights * np.asarray(values))

    def shifted(self) -> "QuadratureRule":
        """Same domain and order, one more panel: no node survives the re-offset
        except possibly the midpoint, which callers check for."""
        return composite_rule(self.lo, self.hi, self.panels + 1, self.order)


@lru_cache(maxsize=64)
def _leggauss(order: int):
    t, w = leggauss(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point Gauss-Legendre rule on [-1, 1]."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise ConfigurationError(f"Gauss-Legendre order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    return _leggauss(int(order))


def composite_rule(lo: float, hi: float, panels: int, order: int) -> QuadratureRule:
    if not hi > lo:
        raise ConfigurationError(f"empty quadrature domain [{lo}, {hi}]")
    if panels < 1:
        raise ConfigurationError(f"panels must be >= 1, got {panels}")
    t, w = gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, float(lo), float(hi), int(panels), int(order))


def truncated_line_rule(cutoff: float, panels: int, order: int) -> QuadratureRule:
    """Composite rule on ``[-cutoff, cutoff]`` standing in for the real line."""
    if not cutoff > 0:
        raise ConfigurationError(f"cutoff must be positive, got {cutoff}")
    return composite_rule(-cutoff, cutoff, panels, order)


def _collides(rule: QuadratureRule, lam0: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(rule.nodes, lam0)
    left = np.abs(lam0 - rule.nodes[np.clip(idx - 1, 0, len(rule) - 1)])
    right = np.abs(lam0 - rule.nodes[np.clip(idx, 0, len(rule) - 1)])
    return np.minimum(left, right) < NODE_COLLISION_TOL


def pv_sum(rule: QuadratureRule, fvals: np.ndarray, f0: np.ndarray, lam0: np.ndarray) -> np.ndarray:
    """Singularity-subtracted principal value from precomputed samples.

    ``fvals`` are f at ``rule.nodes``, ``f0`` is f at the (real) poles ``lam0``.
    No pole may sit on a node; see :func:`pv_line_integral` for the fallback.
    """
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))
    f0 = np.atleast_1d(np.asarray(f0))
    d = rule.nodes[None, :] - lam0[:, None]
    quotient = (fvals[None, :] - f0[:, None]) / d
    log_term = np.log((rule.hi - lam0) / (lam0 - rule.lo))
    return quotient @ rule.weights + f0 * log_term


def pv_line_integral(f: Callable, lam0, rule: QuadratureRule):
    """PV of the integral of f(mu)/(mu - lam0) over ``rule.domain``.

    Poles that land within ``NODE_COLLISION_TOL`` of a node are evaluated on
    the node-shifted rule instead.
    """
    scalar = np.ndim(lam0) == 0
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))
    if np.any((lam0 <= rule.lo) | (lam0 >= rule.hi)):
        raise ConfigurationError("principal-value pole must lie strictly inside the quadrature domain")
    f0 = np.asarray(f(lam0), dtype=complex) * np.ones(lam0.shape)
    out = np.empty(lam0.shape, dtype=complex)
    todo = np.ones(lam0.shape, dtype=bool)
    current = rule
    for _ in range(8):
        hit = _collides(current, lam0)
        use = todo & ~hit
        if np.any(use):
            fvals = np.asarray(f(current.nodes), dtype=complex) * np.ones(len(current))
            out[use] = pv_sum(current, fvals, f0[use], lam0[use])
            todo &= ~use
        if not np.any(todo):
            break
        current = current.shifted()
    else:  # pragma: no cover - would need eight consecutive collisions
        raise ConfigurationError("could not re-offset quadrature panels away from the pole")
    return out[0] if scalar else out


def tail_check(values_at_ends, tail_tol: float, what: str = "nu") -> None:
    lo_val, hi_val = values_at_ends
    for side, val in (("-cutoff", lo_val), ("+cutoff", hi_val)):
        if not abs(val) < tail_tol:
            raise CutoffTooSmallError(
                f"|{what}({side})| = {abs(val):.3e} exceeds tail tolerance {tail_tol:.1e}; increase the cutoff"
            )


def regularized_double_integral(nu: Callable, nu_prime: Callable, rule: QuadratureRule, tail_tol: float = 1e-12) -> complex:
    """Double integral of nu(l) nu(m) / (l - m - i0)^2 over the truncated line.

    Integration by parts in ``l`` turns the double pole into
    ``PV int int nu'(l) nu(m) / (l - m) + i pi int nu'(l) nu(l)``; the boundary
    term is dropped after the tail check.
    """
    tail_check((nu(rule.lo), nu(rule.hi)), tail_tol)
    inner = rule.shifted()
    if np.any(_collides(inner, rule.nodes)):
        inner = inner.shifted()
    nu_vals = np.asarray(nu(rule.nodes), dtype=complex) * np.ones(len(rule))
    dnu_vals = np.asarray(nu_prime(rule.nodes), dtype=complex) * np.ones(len(rule))
    dnu_inner = np.asarray(nu_prime(inner.nodes), dtype=complex) * np.ones(len(inner))
    hilbert = pv_sum(inner, dnu_inner, dnu_vals, rule.nodes)
    return rule.integrate(nu_vals * hilbert) + 1j * np.pi * rule.integrate(dnu_vals * nu_vals)
