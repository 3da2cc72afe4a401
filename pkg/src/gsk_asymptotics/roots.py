"""Zeros of 1 + phi inside the analyticity strip, paired with the poles they sit next to."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigurationError, RootError
from .kernels import GskKernel

log = logging.getLogger(__name__)

DISTINCT_TOL = 1e-8
SLOW_NEWTON_STEPS = 12


@dataclass(frozen=True, eq=False)
class RootSet:
    """Retained zeros q+ (upper half-plane) and q- (lower), sorted by |Im|.

    ``N`` is the truncation order the set was built for.  For closed-form
    kernels it counts roots per series (so each half-plane holds one root per
    series and index j < N); ``series_plus``/``series_minus`` keep each series
    up to index N so the first dropped roots are known.  Generic kernels fill
    ``dropped_plus``/``dropped_minus`` instead.
    """

    q_plus: np.ndarray
    q_minus: np.ndarray
    N: int
    strip: float
    residual_tol: float = 1e-12
    series_plus: Optional[list] = None
    series_minus: Optional[list] = None
    dropped_plus: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    dropped_minus: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    pairing: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    iterations: list = field(default_factory=list)

    @property
    def n_plus(self) -> int:
        return len(self.q_plus)

    @property
    def n_minus(self) -> int:
        return len(self.q_minus)

    def residuals(self, kernel: GskKernel) -> np.ndarray:
        q = np.concatenate([self.q_plus, self.q_minus])
        return np.abs(1 + kernel.phi(q))


def _sort_by_height(q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    return q[np.lexsort((q.real, np.round(np.abs(q.imag), 12)))]


def _dedupe(q: np.ndarray, notes: list) -> np.ndarray:
    kept: list[complex] = []
    for z in q:
        if any(abs(z - k) < DISTINCT_TOL for k in kept):
            notes.append(f"root {z:.6g} generated twice (double root); kept once")
            continue
        kept.append(complex(z))
    return np.array(kept, dtype=complex)


def pair_with_poles(roots: np.ndarray, poles, side: str) -> dict:
    """Bijective nearest pairing (minimal total distance) of roots to poles."""
    poles = np.asarray(poles, dtype=complex)
    if len(roots) == 0 or len(poles) == 0:
        return {}
    cost = np.abs(roots[:, None] - poles[None, :])
    r_idx, p_idx = linear_sum_assignment(cost)
    return {(side, int(i)): int(j) for i, j in zip(r_idx, p_idx)}


def _check_roots(kernel: GskKernel, roots: RootSet) -> None:
    if roots.n_plus and np.any(roots.q_plus.imag <= 0):
        raise RootError("a q+ root is not in the upper half-plane")
    if roots.n_minus and np.any(roots.q_minus.imag >= 0):
        raise RootError("a q- root is not in the lower half-plane")
    q = np.concatenate([roots.q_plus, roots.q_minus])
    if np.any(np.abs(q.imag) >= kernel.a):
        raise RootError(f"retained roots leave the strip |Im| < {kernel.a}")
    res = roots.residuals(kernel)
    if len(res) and res.max() >= roots.residual_tol:
        raise RootError(f"root residual |1 + phi(q)| = {res.max():.3e} exceeds {roots.residual_tol:.1e}")
    if len(q) > 1:
        d = np.abs(q[:, None] - q[None, :]) + np.eye(len(q))
        if d.min() <= DISTINCT_TOL:
            raise RootError("retained roots are not pairwise distinct")


def closed_form_roots(kernel: GskKernel, N: int, residual_tol: float = 1e-12) -> RootSet:
    """Roots from the kernel's closed-form series: index j < N of every series."""
    if kernel.closed_form_roots is None:
        raise ConfigurationError(f"kernel {kernel.label!r} has no closed-form root generator")
    if N < 0:
        raise ConfigurationError(f"N must be >= 0, got {N}")
    # generate a little past N so omissions and the first dropped root are covered
    plus, minus = kernel.closed_form_roots(N + 1)
    notes: list[str] = []
    q_plus = _sort_by_height(_dedupe(np.concatenate([s[:N] for s in plus]) if plus else np.zeros(0), notes))
    q_minus = _sort_by_height(_dedupe(np.concatenate([s[:N] for s in minus]) if minus else np.zeros(0), notes))
    if any(np.abs(q.imag).max(initial=0) >= kernel.a for q in (q_plus, q_minus)):
        keep_p = np.abs(q_plus.imag) < kernel.a
        keep_m = np.abs(q_minus.imag) < kernel.a
        notes.append(f"truncated to strip |Im| < {kernel.a}: dropped {np.sum(~keep_p) + np.sum(~keep_m)} roots")
        log.warning(notes[-1])
        q_plus, q_minus = q_plus[keep_p], q_minus[keep_m]
    pairing = pair_with_poles(q_plus, kernel.poles_plus, "+")
    pairing.update(pair_with_poles(q_minus, kernel.poles_minus, "-"))
    roots = RootSet(
        q_plus=q_plus,
        q_minus=q_minus,
        N=N,
        strip=kernel.a,
        residual_tol=residual_tol,
        series_plus=[np.asarray(s) for s in plus],
        series_minus=[np.asarray(s) for s in minus],
        pairing=pairing,
        notes=notes,
    )
    _check_roots(kernel, roots)
    return roots


def _newton_one(kernel: GskKernel, seed: complex, tol: float, max_iter: int):
    """Newton on psi = 1 + 1/phi, which is regular at the seed pole; polished on 1 + phi."""
    z = complex(seed)
    ph = complex(kernel.phi(np.array([z]))[0])
    if not np.isfinite(ph):
        z += 1e-8 * (1 + 1j) * max(1.0, abs(z))
    for it in range(1, max_iter + 1):
        ph = complex(kernel.phi(np.array([z]))[0])
        dph = complex(kernel.phi_prime(np.array([z]))[0])
        if abs(ph) > 1:
            step = (1 + 1 / ph) / (-dph / ph**2)
        else:
            step = (1 + ph) / dph
        if not np.isfinite(step):
            return z, it, False
        z -= step
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, it, True
    return z, max_iter, False


def newton_roots(
    kernel: GskKernel,
    seeds,
    tol: float = 1e-14,
    residual_tol: float = 1e-12,
    max_iter: int = 100,
    trust_radius: Optional[float] = None,
) -> RootSet:
    """Refine each seed (a pole or a root guess) to a zero of 1 + phi.

    Failures (no convergence, escape from the strip, root outside the trust
    radius of its seed) are recorded, never silently dropped.
    """
    seeds = np.asarray(list(seeds), dtype=complex)
    found_p, found_m, failures, notes, iters = [], [], [], [], []
    pairing = {}
    for k, seed in enumerate(seeds):
        others = np.delete(seeds, k)
        radius = trust_radius
        if radius is None:
            radius = 0.5 * np.abs(others - seed).min() if len(others) else 0.5 * abs(seed.imag)
        z, it, ok = _newton_one(kernel, seed, tol, max_iter)
        iters.append(it)
        if not ok:
            failures.append(f"seed {seed:.6g}: no convergence after {it} iterations")
            continue
        if abs(z.imag) >= kernel.a or z.imag == 0:
            failures.append(f"seed {seed:.6g}: root {z:.6g} escaped the strip")
            continue
        if abs(z - seed) > radius:
            failures.append(f"seed {seed:.6g}: root {z:.6g} outside trust radius {radius:.3g}")
            continue
        if it > SLOW_NEWTON_STEPS:
            notes.append(f"seed {seed:.6g}: slow convergence ({it} steps), possible multiple root")
        bucket, side = (found_p, "+") if z.imag > 0 else (found_m, "-")
        if any(abs(z - w) < DISTINCT_TOL for w in bucket):
            failures.append(f"seed {seed:.6g}: converged to an already-found root {z:.6g}")
            continue
        pairing[(side, len(bucket))] = k
        bucket.append(z)
    for f in failures:
        log.warning(f)
    order_p = np.argsort(np.abs(np.imag(found_p)), kind="stable") if found_p else np.zeros(0, int)
    order_m = np.argsort(np.abs(np.imag(found_m)), kind="stable") if found_m else np.zeros(0, int)
    remap = {}
    for side, order in (("+", order_p), ("-", order_m)):
        for new, old in enumerate(order):
            remap[(side, new)] = pairing[(side, int(old))]
    roots = RootSet(
        q_plus=np.asarray(found_p, dtype=complex)[order_p],
        q_minus=np.asarray(found_m, dtype=complex)[order_m],
        N=max(len(found_p), len(found_m)),
        strip=kernel.a,
        residual_tol=residual_tol,
        pairing=remap,
        failures=failures,
        notes=notes,
        iterations=iters,
    )
    _check_roots(kernel, roots)
    return roots


def retain(roots: RootSet, n: int) -> RootSet:
    """Keep the n roots of smallest |Im| per half-plane; the rest become the dropped set."""
    keep_p = {("+", i): v for (s, i), v in roots.pairing.items() if s == "+" and i < n}
    keep_m = {("-", i): v for (s, i), v in roots.pairing.items() if s == "-" and i < n}
    return RootSet(
        q_plus=roots.q_plus[:n],
        q_minus=roots.q_minus[:n],
        N=n,
        strip=roots.strip,
        residual_tol=roots.residual_tol,
        dropped_plus=roots.q_plus[n:],
        dropped_minus=roots.q_minus[n:],
        pairing={**keep_p, **keep_m},
        failures=list(roots.failures),
        notes=list(roots.notes),
        iterations=list(roots.iterations),
    )


def find_roots(kernel: GskKernel, N: int, residual_tol: float = 1e-12) -> RootSet:
    """Closed-form roots when the kernel has a generator, pole-seeded Newton otherwise."""
    if kernel.trivial:
        return RootSet(np.zeros(0, complex), np.zeros(0, complex), N=N, strip=kernel.a, residual_tol=residual_tol)
    if kernel.closed_form_roots is not None:
        return closed_form_roots(kernel, N, residual_tol)
    seeds = list(kernel.poles_plus) + list(kernel.poles_minus)
    return retain(newton_roots(kernel, seeds, residual_tol=residual_tol), N)


def remainder_scale(roots: RootSet, N: Optional[int] = None) -> float:
    """Decay rate a of the O(exp(-a x)) remainder of the determinant after truncation.

    The first neglected correction couples the lowest dropped root in one
    half-plane with the root closest to the axis in the other one.
    """
    N = roots.N if N is None else N
    if roots.series_plus is not None:
        if not roots.series_plus:
            # no zeros anywhere in the strip: corrections start beyond it
            return 2.0 * roots.strip
        for s in roots.series_plus + roots.series_minus:
            if len(s) < N + 1:
                raise RootError(f"remainder scale needs N + 1 = {N + 1} roots per series, got {len(s)}")
        up_next = min(s[N].imag for s in roots.series_plus)
        dn_next = min(-s[N].imag for s in roots.series_minus)
        up_first = min(s[0].imag for s in roots.series_plus)
        dn_first = min(-s[0].imag for s in roots.series_minus)
    else:
        all_p = np.concatenate([roots.q_plus, roots.dropped_plus])
        all_m = np.concatenate([roots.q_minus, roots.dropped_minus])
        if len(all_p) == 0 and len(all_m) == 0:
            return 2.0 * roots.strip
        if len(roots.dropped_plus) == 0 and len(roots.dropped_minus) == 0:
            raise RootError("remainder scale needs at least one root beyond the retained ones")
        up_next = roots.dropped_plus.imag.min() if len(roots.dropped_plus) else roots.strip
        dn_next = (-roots.dropped_minus.imag).min() if len(roots.dropped_minus) else roots.strip
        up_first = all_p.imag.min() if len(all_p) else roots.strip
        dn_first = (-all_m.imag).min() if len(all_m) else roots.strip
    return float(min(up_next + dn_first, up_first + dn_next))


def strip_scale(roots: RootSet, N: Optional[int] = None) -> float:
    """Distance from the axis to the nearest neglected root.

    This is the decay rate of the neglected terms in the resolvent (a single
    oscillating factor e+-^2(q) per term), as opposed to the determinant.
    """
    N = roots.N if N is None else N
    if roots.series_plus is not None:
        if not roots.series_plus:
            return roots.strip
        return float(min(min(s[N].imag for s in roots.series_plus), min(-s[N].imag for s in roots.series_minus)))
    cands = [roots.strip]
    if len(roots.dropped_plus):
        cands.append(roots.dropped_plus.imag.min())
    if len(roots.dropped_minus):
        cands.append((-roots.dropped_minus.imag).min())
    return float(min(cands))
