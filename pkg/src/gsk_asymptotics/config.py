"""JSON run configuration with dotted-path overrides."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigurationError
from .kernels import GskKernel, boson_kernel, entire_test_kernel, xxz_kernel

DEFAULT_CONFIG: dict = {
    "kernel": {"name": "boson", "params": {"h": 1.0, "T": 1.0, "beta": 0.5}},
    "x_grid": [4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0],
    "N": 3,
    "quadrature": {"cutoff": 8.0, "panels": 32, "order": 20, "oracle_panels": 64},
    "tolerances": {"root_tol": 1e-12, "jump_tol": 1e-9, "tail_tol": 1e-12},
    "resolvent": {"points": 101, "span": 4.0},
    "outputs": {"csv_path": None, "verbosity": 0},
}

# quadrature defaults per kernel (the XXZ weight decays only like exp(-min(zeta, pi - zeta) |l|))
KERNEL_QUADRATURE = {
    "boson": {"cutoff": 8.0, "panels": 32, "order": 20, "oracle_panels": 64},
    "xxz": {"cutoff": 40.0, "panels": 48, "order": 20, "oracle_panels": 96},
    "entire_test": {"cutoff": 6.0, "panels": 24, "order": 20, "oracle_panels": 48},
}

KERNEL_PARAMS = {
    "boson": {"h", "T", "beta"},
    "xxz": {"zeta"},
    "entire_test": {"gamma", "width"},
}


def _number(value, path: str):
    """Real number, or complex from a [re, im] pair."""
    if isinstance(value, bool):
        raise ConfigurationError(f"{path}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigurationError(f"{path}: expected a number or [re, im] pair, got {value!r}")


def _expand_grid(spec) -> list[float]:
    if isinstance(spec, dict):
        try:
            lo, hi, steps = float(spec["min"]), float(spec["max"]), int(spec["steps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"x_grid range needs min, max, steps: {exc}") from exc
        if steps < 1:
            raise ConfigurationError("x_grid steps must be >= 1")
        return [lo] if steps == 1 else [float(v) for v in np.linspace(lo, hi, steps)]
    if isinstance(spec, (list, tuple)):
        xs = [_number(v, "x_grid") for v in spec]
        if any(isinstance(v, complex) for v in xs):
            raise ConfigurationError(f"x_grid entries must be real, got {spec!r}")
        return xs
    raise ConfigurationError(f"x_grid must be a list or a {{min, max, steps}} object, got {spec!r}")


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        where = f"{path}{key}"
        if key not in out and path != "kernel.params.":
            raise ConfigurationError(f"unknown config key {where!r}")
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key != "params":
            out[key] = _merge(out[key], val, where + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def parse_override(text: str) -> tuple[list[str], Any]:
    """'kernel.params.T=0.5' -> (['kernel', 'params', 'T'], 0.5); values are parsed as JSON when possible."""
    if "=" not in text:
        raise ConfigurationError(f"override {text!r} must look like key.path=value")
    key, raw = text.split("=", 1)
    key = key.lstrip("-")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(raw: dict, overrides) -> dict:
    out = copy.deepcopy(raw)
    for text in overrides:
        path, value = parse_override(text)
        node = out
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                if part == "params" or part not in node:
                    node[part] = {}
                else:
                    raise ConfigurationError(f"override {text!r}: {part!r} is not a section")
            node = node[part]
        node[path[-1]] = value
    return out


@dataclass(frozen=True)
class RunConfig:
    kernel_name: str
    kernel_params: dict
    x_grid: tuple
    N: int
    cutoff: float
    panels: int
    order: int
    oracle_panels: int
    root_tol: float
    jump_tol: float
    tail_tol: float
    resolvent_points: int
    resolvent_span: float
    csv_path: Any
    verbosity: int
    raw: dict

    def make_kernel(self) -> GskKernel:
        p = self.kernel_params
        if self.kernel_name == "boson":
            return boson_kernel(p.get("h", 1.0), p.get("T", 1.0), p.get("beta", 0.5), cutoff=self.cutoff)
        if self.kernel_name == "xxz":
            return xxz_kernel(float(np.real(p.get("zeta", np.pi / 3))), cutoff=self.cutoff)
        return entire_test_kernel(p.get("gamma", 0.5), float(np.real(p.get("width", 1.0))), cutoff=self.cutoff)

    def to_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True, indent=2)


def validate(raw: dict) -> RunConfig:
    base = copy.deepcopy(DEFAULT_CONFIG)
    name = raw.get("kernel", {}).get("name", base["kernel"]["name"]) if isinstance(raw.get("kernel"), dict) else None
    if name in KERNEL_QUADRATURE:
        base["quadrature"] = dict(KERNEL_QUADRATURE[name])
    cfg = _merge(base, raw)
    if raw.get("kernel", {}).get("name") not in (None, DEFAULT_CONFIG["kernel"]["name"]) and "params" not in raw.get(
        "kernel", {}
    ):
        # another kernel without params: don't inherit the boson ones
        cfg["kernel"]["params"] = {}
    name = cfg["kernel"]["name"]
    if name not in KERNEL_PARAMS:
        raise ConfigurationError(f"unknown kernel {name!r}; choose from {sorted(KERNEL_PARAMS)}")
    params = {}
    for key, val in cfg["kernel"]["params"].items():
        if key not in KERNEL_PARAMS[name]:
            raise ConfigurationError(f"kernel {name!r} has no parameter {key!r}")
        params[key] = _number(val, f"kernel.params.{key}")
    xs = _expand_grid(cfg["x_grid"])
    if any(x <= 0 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ConfigurationError(f"x_grid must be strictly increasing and positive, got {xs}")
    N = cfg["N"]
    if isinstance(N, bool) or not isinstance(N, int) or N < 0:
        raise ConfigurationError(f"N must be a non-negative integer, got {N!r}")
    q = cfg["quadrature"]
    tol = cfg["tolerances"]
    for key, val in tol.items():
        if not isinstance(val, (int, float)) or not val > 0:
            raise ConfigurationError(f"tolerances.{key} must be positive, got {val!r}")
    try:
        cutoff = float(q["cutoff"])
        panels, order, oracle_panels = int(q["panels"]), int(q["order"]), int(q["oracle_panels"])
        points, span = int(cfg["resolvent"]["points"]), float(cfg["resolvent"]["span"])
        verbosity = int(cfg["outputs"]["verbosity"])
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad numeric setting: {exc}") from exc
    if cutoff <= 0 or panels < 1 or oracle_panels < 1 or not 1 <= order <= 512:
        raise ConfigurationError("quadrature needs cutoff > 0, panels >= 1 and 1 <= order <= 512")
    if points < 2 or not 0 < span <= cutoff:
        raise ConfigurationError("resolvent grid needs points >= 2 and 0 < span <= cutoff")
    return RunConfig(
        kernel_name=name,
        kernel_params=params,
        x_grid=tuple(xs),
        N=N,
        cutoff=cutoff,
        panels=panels,
        order=order,
        oracle_panels=oracle_panels,
        root_tol=float(tol["root_tol"]),
        jump_tol=float(tol["jump_tol"]),
        tail_tol=float(tol["tail_tol"]),
        resolvent_points=points,
        resolvent_span=span,
        csv_path=cfg["outputs"]["csv_path"],
        verbosity=verbosity,
        raw=cfg,
    )


def load_config(path=None, overrides=()) -> RunConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path}: top level must be an object")
    return validate(apply_overrides(raw, overrides))
