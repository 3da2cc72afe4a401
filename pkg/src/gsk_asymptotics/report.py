"""Comparison sweeps (asymptotics against the Nystrom oracle), the verification
suite and CSV serialization."""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .asymptotics import (
    build_model,
    contour_weight,
    logdet_lu,
    logdet_thm2,
    logdet_thm3,
    resolvent_asym,
    x_derivative_asym,
    x_derivative_closed,
    x_derivative_logdet_correction,
    A_x_derivative,
    integral_equation_f,
    ContourIndex,
)
from .cauchy import CauchyData, alpha_at, alpha_pm, build_cauchy_data, jump_residual
from .config import RunConfig
from .errors import ConfigurationError, GskError
from .kernels import GskKernel
from .oracle import (
    integral_equation_residual,
    nystrom_logdet,
    nystrom_resolvent,
    resolvent_interpolant,
    wiener_hopf_logdet,
)
from .quadrature import QuadratureRule, truncated_line_rule
from .roots import RootSet, find_roots, remainder_scale, strip_scale

CSV_COLUMNS = (
    "x",
    "logdet_oracle_re",
    "logdet_oracle_im",
    "logdet_thm2_re",
    "logdet_thm2_im",
    "logdet_thm3_re",
    "logdet_thm3_im",
    "abs_err_thm2",
    "thm2_thm3_gap",
    "resolvent_sup_err",
    "xder_gap",
)
XDER_STEP = 1e-3


def mod_2pi_i(z: complex) -> float:
    """|z| after removing whole multiples of 2 pi i (log-determinant branch ambiguity)."""
    z = complex(z)
    return abs(z - 2j * np.pi * np.round(z.imag / (2 * np.pi)))


@dataclass
class Setup:
    config: RunConfig
    kernel: GskKernel
    rule: QuadratureRule
    oracle_rule: QuadratureRule
    data: CauchyData
    roots: RootSet

    @property
    def remainder_scale(self) -> float:
        return remainder_scale(self.roots)


def prepare(config: RunConfig) -> Setup:
    kernel = config.make_kernel()
    rule = truncated_line_rule(config.cutoff, config.panels, config.order)
    oracle_rule = truncated_line_rule(config.cutoff, config.oracle_panels, config.order)
    data = build_cauchy_data(kernel, rule, config.tail_tol)
    roots = find_roots(kernel, config.N, config.root_tol)
    return Setup(config, kernel, rule, oracle_rule, data, roots)


@dataclass
class Row:
    x: float
    logdet_oracle: complex
    logdet_thm2: complex
    logdet_thm3: complex
    abs_err_thm2: float
    thm2_thm3_gap: float
    resolvent_sup_err: float
    xder_gap: float

    def fields(self) -> list[float]:
        return [
            self.x,
            self.logdet_oracle.real,
            self.logdet_oracle.imag,
            self.logdet_thm2.real,
            self.logdet_thm2.imag,
            self.logdet_thm3.real,
            self.logdet_thm3.imag,
            self.abs_err_thm2,
            self.thm2_thm3_gap,
            self.resolvent_sup_err,
            self.xder_gap,
        ]


@dataclass
class ComparisonReport:
    header: dict
    rows: list = field(default_factory=list)


def resolvent_grid(setup: Setup) -> np.ndarray:
    c = setup.config
    return np.linspace(-c.resolvent_span, c.resolvent_span, c.resolvent_points)


def resolvent_error(setup: Setup, model, x: float) -> float:
    """sup over the tensor grid of |gamma R_asym - gamma R_nystrom|."""
    grid = resolvent_grid(setup)
    R = nystrom_resolvent(setup.kernel, x, setup.oracle_rule)
    exact = resolvent_interpolant(setup.kernel, x, setup.oracle_rule, R)(grid, grid)
    approx = resolvent_asym(model, grid[:, None], grid[None, :])
    return float(np.max(np.abs(exact - approx)))


def compare_one(setup: Setup, x: float) -> Row:
    try:
        kernel, orule = setup.kernel, setup.oracle_rule
        model = build_model(kernel, setup.data, setup.roots, x)
        oracle = nystrom_logdet(kernel, x, orule)
        t2 = logdet_thm2(model)
        t3 = logdet_thm3(model)
        if kernel.trivial:
            res_err = 0.0
            xder = 0.0
        else:
            res_err = resolvent_error(setup, model, x)
            fd = (nystrom_logdet(kernel, x + XDER_STEP, orule) - nystrom_logdet(kernel, x - XDER_STEP, orule)) / (
                2 * XDER_STEP
            )
            xder = abs(x_derivative_asym(model) - fd)
        return Row(
            x=float(x),
            logdet_oracle=complex(oracle),
            logdet_thm2=complex(t2),
            logdet_thm3=complex(t3),
            abs_err_thm2=mod_2pi_i(oracle - t2),
            thm2_thm3_gap=abs(t2 - t3),
            resolvent_sup_err=res_err,
            xder_gap=float(xder),
        )
    except GskError as exc:
        # keep the exception type (and hence the exit code), annotate the x
        exc.args = (f"x = {x:g}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def worker_count(n_items: int) -> int:
    raw = os.environ.get("GSK_THREADS")
    cap = os.cpu_count() or 1
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigurationError(f"GSK_THREADS must be a positive integer, got {raw!r}") from exc
        if cap < 1:
            raise ConfigurationError(f"GSK_THREADS must be a positive integer, got {raw!r}")
    return max(1, min(cap, n_items))


def report_header(setup: Setup) -> dict:
    c = setup.config
    return {
        "tool": "gsk-asymptotics",
        "version": __version__,
        "kernel": c.kernel_name,
        "params": {k: (v if isinstance(v, float) else [v.real, v.imag]) for k, v in sorted(c.kernel_params.items())},
        "N": c.N,
        "N_plus": setup.roots.n_plus,
        "N_minus": setup.roots.n_minus,
        "remainder_scale": setup.remainder_scale,
        "quadrature": {"cutoff": c.cutoff, "panels": c.panels, "order": c.order, "oracle_panels": c.oracle_panels},
    }


def run_compare(config: RunConfig, setup: Setup | None = None) -> ComparisonReport:
    setup = setup or prepare(config)
    xs = list(config.x_grid)
    report = ComparisonReport(header=report_header(setup))
    if not xs:
        return report
    workers = worker_count(len(xs))
    if workers == 1:
        report.rows = [compare_one(setup, x) for x in xs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            report.rows = list(pool.map(lambda x: compare_one(setup, x), xs))
    return report


# --------------------------------------------------------------------------
# CSV


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def emit_csv(report: ComparisonReport, path=None) -> str:
    """Write (and return) the CSV text: '#' metadata lines, the header, one line per x."""
    buf = io.StringIO()
    for key, val in report.header.items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in report.rows:
        buf.write(",".join(_fmt(v) for v in row.fields()) + "\n")
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def parse_csv(text: str) -> tuple[dict, list[list[float]]]:
    header: dict = {}
    rows: list[list[float]] = []
    seen_columns = False
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            header[key] = json.loads(val)
        elif not seen_columns:
            if tuple(line.split(",")) != CSV_COLUMNS:
                raise ConfigurationError(f"unexpected CSV header {line!r}")
            seen_columns = True
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return header, rows


def data_section(text: str) -> str:
    return "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))


# --------------------------------------------------------------------------
# verification suite


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(np.isfinite(self.value) and self.value < self.threshold)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} < {self.threshold:.1e}"


@dataclass
class VerifyRecord:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def break_branch(data: CauchyData) -> CauchyData:
    """Fault injection: shift nu by 1/2 on the right half-line, as a wrong unwrap would."""
    bad = data.nu_samples + 0.5 * (data.rule.nodes > 0)
    return replace(data, nu_samples=bad)


def run_verify(config: RunConfig, fault: str | None = None) -> VerifyRecord:
    setup = prepare(config)
    kernel, data, roots = setup.kernel, setup.data, setup.roots
    if fault == "branch":
        data = break_branch(data)
    elif fault is not None:
        raise ConfigurationError(f"unknown fault {fault!r}")
    checks = [Check("jump alpha_-/alpha_+ = 1 + phi", jump_residual(data), config.jump_tol)]
    if roots.n_plus + roots.n_minus:
        checks.append(Check("root residual |1 + phi(q)|", float(roots.residuals(kernel).max()), config.root_tol))
    if kernel.trivial:
        for x in config.x_grid:
            checks.append(Check(f"x={x:g} oracle log det", abs(nystrom_logdet(kernel, x, setup.oracle_rule)), 1e-13))
        return VerifyRecord(checks)
    a = strip_scale(roots)
    for x in config.x_grid:
        m = build_model(kernel, data, roots, x)
        d1 = np.exp(m.logdet_correction)
        d2 = np.exp(logdet_lu(np.eye(roots.n_minus) - m.A_tilde))
        t2 = logdet_thm2(m)
        checks += [
            Check(f"x={x:g} det(I-A) = det(I-A~)", abs(d1 - d2) / (1 + abs(d1)), 1e-12),
            Check(f"x={x:g} C/D system residual", m.cd_residual, 1e-12),
            Check(f"x={x:g} thm2 = thm3", abs(t2 - logdet_thm3(m)) / (1 + abs(t2)), 1e-10),
            Check(f"x={x:g} x-derivative closed form", abs(x_derivative_closed(m) - x_derivative_logdet_correction(m)), 1e-10),
            # the quadrature route uses the truncated f+, so it only agrees up to the remainder
            Check(
                f"x={x:g} x-derivative by quadrature",
                abs(x_derivative_asym(m) - x_derivative_closed(m)),
                max(10 * np.exp(-a * x), 1e-10),
            ),
        ]
        if roots.n_plus and roots.n_minus:
            w = contour_weight(m, ContourIndex((0,), (0,)))
            checks.append(Check(f"x={x:g} single-crossing weight", abs(w + m.A_minus[0, 0] * m.A_plus[0, 0]), 1e-12 * (1 + abs(w))))
        dA = A_x_derivative(m)
        if roots.n_plus > 1:
            # A'_jj - A'_lj - i (q_l - q_j) A_lj vanishes for every l, j
            q = m.q_plus
            ident = np.diag(dA)[None, :] - dA - 1j * (q[:, None] - q[None, :]) * m.A
            checks.append(Check(f"x={x:g} diagonal x-derivative identity", float(np.abs(ident).max()), 1e-12))
    x_ie = config.x_grid[len(config.x_grid) // 2]
    m = build_model(kernel, data, roots, x_ie)
    bound = 10 * np.exp(-a * x_ie)
    for sign, label in ((+1, "f+"), (-1, "f-")):
        r = integral_equation_residual(kernel, x_ie, setup.rule, integral_equation_f(m, sign), sign)
        checks.append(Check(f"x={x_ie:g} integral equation residual of {label}", r, max(bound, 1e-12)))
    if config.kernel_name == "xxz":
        checks += _xxz_checks(config, setup, data)
    return VerifyRecord(checks)


def _xxz_checks(config: RunConfig, setup: Setup, data: CauchyData) -> list:
    kernel = setup.kernel
    closed = kernel.closed_form_alpha_minus
    pts = np.linspace(-4, 4, 25)
    on_axis = np.max(np.abs(alpha_pm(data, pts, -1) / closed(pts) - 1))
    off = np.linspace(-3, 3, 10) - 0.5j
    off_axis = np.max(np.abs(alpha_at(data, off) / closed(off) - 1))
    x = config.x_grid[0]
    wh = wiener_hopf_logdet(kernel.params["zeta"], x)
    gsk = nystrom_logdet(kernel, x, setup.oracle_rule)
    return [
        Check("alpha_- against its Gamma-function form (real axis)", float(on_axis), 1e-7),
        Check("alpha_- against its Gamma-function form (lower half-plane)", float(off_axis), 1e-7),
        Check(f"x={x:g} Wiener-Hopf determinant = GSK determinant", mod_2pi_i(wh - gsk), 1e-6),
    ]
