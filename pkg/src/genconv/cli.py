"""Command-line front end: ``genconv <command> ...``.

Exit status is 0 on success, 1 when a check fails (or a computation breaks
down), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .families import (UnsupportedFamilyError, delta_conv, is_monotonic, lom_residual,
                       monotonicity_witness)
from .kernels import (FAMILY_PARAMS, KernelError, KernelSpec, kernel_eval, polya_check,
                      product_formula_residual)
from .measures import MeasureError, MixtureMeasure, QuadratureError, cdf
from .samplers import make_rng, sample_family
from .stats import ks_one_sample, ks_two_sample
from .suites import SUITES, max_representation, run_suite
from .williamson import kendall_convolve, kendall_pair_of

OPERATIONS = ("conv", "sample", "cdf-grid", "kernel", "kendall", "check", "suite")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    operation: str
    family: str | None = None
    params: dict = field(default_factory=dict)
    action: str | None = None
    x: float | None = None
    y: float | None = None
    inputs: tuple[str, ...] = ()
    n: int = 100_000
    seed: int = 0
    grid: tuple[float, float, int] | None = None
    output: str | None = None
    format: str = "json"
    suite: str | None = None
    significance: float = 0.01

    def validate(self) -> None:
        if self.operation not in OPERATIONS:
            raise UsageError(f"unknown operation {self.operation!r}")
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if self.seed < 0:
            raise UsageError("seed must be >= 0")
        if self.grid is not None and self.grid[2] < 2:
            raise UsageError("a grid needs at least 2 points")
        for path in self.inputs:
            if not Path(path).exists():
                raise UsageError(f"no such file: {path}")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")

    def family_spec(self) -> KernelSpec:
        if self.family is None:
            raise UsageError("--family is required")
        if self.family not in FAMILY_PARAMS:
            raise UsageError(f"unknown family {self.family!r}; choose from {', '.join(FAMILY_PARAMS)}")
        names = FAMILY_PARAMS[self.family]
        missing = [p for p in names if p not in self.params]
        if missing:
            raise UsageError(f"{self.family} needs parameters: {', '.join(missing)}")
        try:
            return KernelSpec(self.family, {k: self.params[k] for k in names})
        except KernelError as exc:
            raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output helpers

def fmt(v: float) -> str:
    """Shortest string that round-trips to the same double."""
    return repr(float(v))


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(descriptor: dict, rows) -> str:
    lines = [f"# genconv v1 {json.dumps(descriptor, sort_keys=True, separators=(',', ':'))}"]
    for row in rows:
        lines.append(",".join(fmt(v) for v in np.atleast_1d(row)))
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(cfg: ExperimentConfig, default=(0.0, 5.0, 101)) -> np.ndarray:
    a, b, k = cfg.grid or default
    return np.linspace(a, b, int(k))


def read_measure(path: str) -> MixtureMeasure:
    try:
        return MixtureMeasure.from_json(Path(path).read_text())
    except (ValueError, MeasureError) as exc:
        raise UsageError(f"malformed measure file {path}: {exc}") from exc


def read_batch(path: str) -> np.ndarray:
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    try:
        return np.array([float(r.split(",")[0]) for r in rows])
    except ValueError as exc:
        raise UsageError(f"malformed batch file {path}: {exc}") from exc


def _need_xy(cfg: ExperimentConfig) -> tuple[float, float]:
    if cfg.x is None or cfg.y is None:
        raise UsageError("--x and --y (or --theta1 and --theta2) are required")
    return cfg.x, cfg.y


# ---------------------------------------------------------------------------
# operations

def _conv(cfg):
    fam = cfg.family_spec()
    x, y = _need_xy(cfg)
    _emit(delta_conv(fam, x, y).to_json() + "\n", cfg.output)
    return EXIT_OK


def _sample(cfg):
    fam = cfg.family_spec()
    x, y = _need_xy(cfg)
    draws = np.atleast_1d(sample_family(fam, x, y, make_rng(cfg.seed), size=cfg.n))
    desc = {"family": fam.to_dict(), "theta1": x, "theta2": y, "n": cfg.n, "seed": cfg.seed}
    _emit(_csv(desc, draws), cfg.output)
    return EXIT_OK


def _cdf_grid(cfg):
    if len(cfg.inputs) != 1:
        raise UsageError("cdf-grid needs --measure FILE")
    m = read_measure(cfg.inputs[0])
    ts = _grid(cfg)
    rows = np.column_stack([ts, cdf(m, ts)])
    _emit(_csv({"measure": Path(cfg.inputs[0]).name}, rows), cfg.output)
    return EXIT_OK


def _kernel(cfg):
    fam = cfg.family_spec()
    if cfg.action == "eval":
        ts = _grid(cfg)
        _emit(_csv({"family": fam.to_dict()}, np.column_stack([ts, kernel_eval(fam, ts)])),
              cfg.output)
        return EXIT_OK
    if cfg.action == "polya":
        grid = _grid(cfg) if cfg.grid else None
        res = polya_check(fam, grid)
        _emit(_dump_json({"family": fam.to_dict(), **res.to_dict()}), cfg.output)
        return EXIT_OK
    if cfg.action == "product-residual":
        x, y = _need_xy(cfg)
        rep = product_formula_residual(fam, x, y, _grid(cfg) if cfg.grid else None)
        _emit(_dump_json(rep.to_dict()), cfg.output)
        return EXIT_OK
    raise UsageError("kernel needs one of: eval, polya, product-residual")


def _kendall(cfg):
    if cfg.action != "cdf":
        raise UsageError("kendall supports: cdf")
    alpha = cfg.params.get("alpha")
    if alpha is None or len(cfg.inputs) != 2:
        raise UsageError("kendall cdf needs --alpha, --lhs and --rhs")
    p1 = kendall_pair_of(read_measure(cfg.inputs[0]), alpha)
    p2 = kendall_pair_of(read_measure(cfg.inputs[1]), alpha)
    pair = kendall_convolve(p1, p2)
    ts = _grid(cfg)
    rows = np.column_stack([ts, pair.F(ts), pair.G(ts)])
    desc = {"alpha": alpha, "lhs": Path(cfg.inputs[0]).name, "rhs": Path(cfg.inputs[1]).name}
    _emit(_csv(desc, rows), cfg.output)
    return EXIT_OK


def _check(cfg):
    if cfg.action == "ks":
        if len(cfg.inputs) != 2:
            raise UsageError("check ks needs --lhs BATCH and --rhs (BATCH|MEASURE.json)")
        lhs = read_batch(cfg.inputs[0])
        rhs = cfg.inputs[1]
        if rhs.endswith(".json"):
            rep = ks_one_sample(lhs, read_measure(rhs), cfg.significance)
        else:
            rep = ks_two_sample(lhs, read_batch(rhs), cfg.significance)
        _emit(_dump_json(rep.to_dict()), cfg.output)
        return EXIT_OK if rep.passed else EXIT_FAIL
    fam = cfg.family_spec()
    head = {"family": fam.family, "params": dict(fam.params)}
    if cfg.action == "lom":
        x, y = _need_xy(cfg)
        thr = 4.0 / np.sqrt(cfg.n)
        r = lom_residual(fam, x, y, cfg.n, cfg.seed)
        out = {**head, "x": x, "y": y, "statistic": r, "threshold": thr, "pass": bool(r < thr)}
    elif cfg.action == "monotone":
        x, y = _need_xy(cfg)
        frac = monotonicity_witness(fam, x, y, cfg.n, cfg.seed)
        expected = is_monotonic(fam)
        # a non-monotonic family is allowed any fraction below the max
        out = {**head, "x": x, "y": y, "statistic": frac, "threshold": 0.0 if expected else 1.0,
               "monotonic": expected, "pass": (frac == 0.0) if expected else True}
    elif cfg.action == "maxrep":
        rep = max_representation(fam, make_rng(cfg.seed), cfg.n)
        out = {**head, "statistic": rep.statistic, "threshold": rep.critical_value,
               "n": rep.n, "m": rep.m, "significance": rep.significance, "pass": rep.passed}
    else:
        raise UsageError("check needs one of: lom, monotone, maxrep, ks")
    _emit(_dump_json(out), cfg.output)
    return EXIT_OK if out["pass"] else EXIT_FAIL


def _suite(cfg):
    if cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    fams = [cfg.family_spec()] if cfg.family else None
    rep = run_suite(cfg.suite, fams, cfg.seed, cfg.n)
    _emit(_dump_json(rep), cfg.output)
    if not rep["pass"]:
        failing = [c["id"] for c in rep["cases"] if not c["pass"]]
        print(f"genconv: failing cases: {', '.join(failing)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


HANDLERS = {"conv": _conv, "sample": _sample, "cdf-grid": _cdf_grid, "kernel": _kernel,
            "kendall": _kendall, "check": _check, "suite": _suite}


def run(cfg: ExperimentConfig) -> int:
    """Execute one configured operation and return its exit status."""
    try:
        cfg.validate()
        return HANDLERS[cfg.operation](cfg)
    except UsageError as exc:
        print(f"genconv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedFamilyError as exc:
        print(f"genconv: families: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"genconv: quadrature failure in measures: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (KernelError, MeasureError) as exc:
        origin = "kernels" if isinstance(exc, KernelError) else "measures"
        print(f"genconv: {origin}: {exc}", file=sys.stderr)
        return EXIT_USAGE


# ---------------------------------------------------------------------------
# argument parsing

def _grid_arg(text: str) -> tuple[float, float, int]:
    try:
        a, b, k = text.split(":")
        return float(a), float(b), int(k)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("grid must look like start:stop:points") from exc


def _param_arg(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("parameters look like name=value")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value in {text!r}") from exc


def _family_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family")
    g.add_argument("--family", choices=sorted(FAMILY_PARAMS), help="convolution family")
    for flag in ("alpha", "a", "r", "p", "c", "s"):
        g.add_argument(f"--{flag}", type=float, help=f"family parameter {flag}")
    g.add_argument("--params", type=_param_arg, nargs="*", default=[], metavar="NAME=VALUE",
                   help="other parameters, e.g. n=2 for ku")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genconv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"genconv {__version__}")
    sub = parser.add_subparsers(dest="operation", required=True)

    p = sub.add_parser("conv", help="write the measure delta_x <> delta_y as JSON")
    _family_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("sample", help="draw from delta_theta1 <> delta_theta2 (CSV)")
    _family_flags(p)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("cdf-grid", help="tabulate the distribution function of a measure file")
    p.add_argument("--measure", required=True)
    p.add_argument("--grid", type=_grid_arg, default=None, help="start:stop:points")
    p.add_argument("--out")

    p = sub.add_parser("kernel", help="kernel evaluation, Polya check, product formula")
    p.add_argument("action", choices=("eval", "polya", "product-residual"))
    _family_flags(p)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--grid", type=_grid_arg, default=None, help="start:stop:points")
    p.add_argument("--out")

    p = sub.add_parser("kendall", help="exact Kendall convolution of two measure files")
    p.add_argument("action", choices=("cdf",))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--grid", type=_grid_arg, default=None, help="start:stop:points")
    p.add_argument("--out")

    p = sub.add_parser("check", help="single property checks")
    p.add_argument("action", choices=("lom", "monotone", "maxrep", "ks"))
    _family_flags(p)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--lhs")
    p.add_argument("--rhs")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--significance", type=float, default=0.01)
    p.add_argument("--out")

    p = sub.add_parser("suite", help="run a named property suite")
    p.add_argument("--name", required=True, choices=SUITES)
    _family_flags(p)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    params = {k: getattr(ns, k) for k in ("alpha", "a", "r", "p", "c", "s")
              if getattr(ns, k, None) is not None}
    params.update(dict(getattr(ns, "params", None) or []))
    op = ns.operation
    inputs: list[str] = []
    if op == "cdf-grid":
        inputs = [ns.measure]
    elif op in ("kendall", "check"):
        inputs = [v for v in (ns.lhs, ns.rhs) if v]
    x = getattr(ns, "x", None)
    y = getattr(ns, "y", None)
    if op == "sample":
        x, y = ns.theta1, ns.theta2
    return ExperimentConfig(
        operation=op, family=getattr(ns, "family", None), params=params,
        action=getattr(ns, "action", None), x=x, y=y, inputs=tuple(inputs),
        n=getattr(ns, "n", 100_000), seed=getattr(ns, "seed", 0),
        grid=getattr(ns, "grid", None), output=getattr(ns, "out", None),
        format="csv" if op in ("sample", "cdf-grid", "kendall") else "json",
        suite=getattr(ns, "name", None), significance=getattr(ns, "significance", 0.01),
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
