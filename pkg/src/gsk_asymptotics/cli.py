"""Command line: gsk {compare,verify,roots,det,resolvent}.

Exit codes: 0 ok, 1 a check failed, 2 configuration error, 3 numerical failure.
Any ``--section.key=value`` flag overrides the JSON config (e.g. ``--kernel.params.T=0.5``).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .asymptotics import build_model, logdet_thm2, logdet_thm3, resolvent_asym
from .config import load_config
from .errors import ConfigurationError, NumericalError
from .oracle import nystrom_logdet, nystrom_resolvent, resolvent_interpolant
from .report import emit_csv, prepare, resolvent_grid, run_compare, run_verify
from .roots import remainder_scale, strip_scale

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsk", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-c", "--config", help="JSON configuration file")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compare", help="oracle vs asymptotic sweep over the x grid, as CSV")
    c.add_argument("-o", "--output", help="CSV path (default: outputs.csv_path, else stdout)")

    v = sub.add_parser("verify", help="run the identity and residual checks")
    v.add_argument("--fault", choices=["branch"], help="inject a fault to see the suite catch it")

    sub.add_parser("roots", help="print the retained zeros of 1 + phi")

    d = sub.add_parser("det", help="log-determinant at one x")
    d.add_argument("--x", type=float, required=True)
    d.add_argument("--method", choices=["thm2", "thm3", "oracle"], default="thm2")

    r = sub.add_parser("resolvent", help="dump the asymptotic resolvent on the configured grid")
    r.add_argument("--x", type=float, required=True)
    r.add_argument("--oracle", action="store_true", help="add the Nystrom resolvent columns")
    return p


def _split_overrides(extra: list[str]) -> list[str]:
    out = []
    for item in extra:
        if not item.startswith("--") or "=" not in item:
            raise ConfigurationError(f"unrecognized argument {item!r} (overrides look like --section.key=value or --N=2)")
        out.append(item)
    return out


def _cmd_compare(cfg, args) -> int:
    report = run_compare(cfg)
    path = args.output or cfg.csv_path
    text = emit_csv(report, path)
    if path is None:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_verify(cfg, args) -> int:
    record = run_verify(cfg, fault=args.fault)
    for check in record.checks:
        print(check.line())
    print("all checks passed" if record.passed else "some checks FAILED")
    return EXIT_OK if record.passed else EXIT_CHECK


def _cmd_roots(cfg, args) -> int:
    setup = prepare(cfg)
    roots = setup.roots
    print(f"# kernel {cfg.kernel_name}, N = {cfg.N}, strip half-width {roots.strip:.6g}")
    for side, qs in (("+", roots.q_plus), ("-", roots.q_minus)):
        for j, q in enumerate(qs):
            print(f"q{side}[{j}] = {q.real:.17g} {q.imag:+.17g}i")
    if roots.n_plus + roots.n_minus:
        print(f"# max |1 + phi(q)| = {roots.residuals(setup.kernel).max():.3e}")
    print(f"# remainder scale (determinant) = {remainder_scale(roots):.17g}")
    print(f"# remainder scale (resolvent)   = {strip_scale(roots):.17g}")
    for note in roots.notes:
        print(f"# note: {note}")
    return EXIT_OK


def _cmd_det(cfg, args) -> int:
    setup = prepare(cfg)
    if args.method == "oracle":
        val = nystrom_logdet(setup.kernel, args.x, setup.oracle_rule)
    else:
        model = build_model(setup.kernel, setup.data, setup.roots, args.x)
        val = logdet_thm2(model) if args.method == "thm2" else logdet_thm3(model)
    print(f"{args.x:.17g},{val.real:.17g},{val.imag:.17g}")
    return EXIT_OK


def _cmd_resolvent(cfg, args) -> int:
    setup = prepare(cfg)
    grid = resolvent_grid(setup)
    model = build_model(setup.kernel, setup.data, setup.roots, args.x)
    approx = resolvent_asym(model, grid[:, None], grid[None, :])
    cols = ["lambda", "mu", "asym_re", "asym_im"]
    exact = None
    if args.oracle:
        R = nystrom_resolvent(setup.kernel, args.x, setup.oracle_rule)
        exact = resolvent_interpolant(setup.kernel, args.x, setup.oracle_rule, R)(grid, grid)
        cols += ["oracle_re", "oracle_im"]
    print(",".join(cols))
    for i, lam in enumerate(grid):
        for j, mu in enumerate(grid):
            vals = [lam, mu, approx[i, j].real, approx[i, j].imag]
            if exact is not None:
                vals += [exact[i, j].real, exact[i, j].imag]
            print(",".join(format(float(v), ".17g") for v in vals))
    return EXIT_OK


COMMANDS = {
    "compare": _cmd_compare,
    "verify": _cmd_verify,
    "roots": _cmd_roots,
    "det": _cmd_det,
    "resolvent": _cmd_resolvent,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, _split_overrides(extra))
        return COMMANDS[args.command](cfg, args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
