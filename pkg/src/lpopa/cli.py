"""Command-line front end.

Subcommands: ``compute`` (one approximant as JSON), ``sweep`` (decay CSV),
``closed-form`` (exact 1 - z^d formulas), ``classify`` (cyclicity verdict)
and ``verify`` (cross-oracle battery).  The ``OPA_LOG`` environment variable
sets diagnostic verbosity (debug/info/warning).  Exit codes: 0 success,
2 invalid configuration, 3 solver non-convergence (partial artifacts are
still written), 4 internal inconsistency.

Given identical configuration the emitted JSON/CSV is byte-identical apart
from the wall-clock timing column of sweeps.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (IllConditionedError, InternalConsistencyError, LpopaError,
                     SweepError, UnsupportedExponentError)
from .opa import OpaResult, SolverOpts, closed_form_one_minus_zd
from .poly import CircleZeroSpec, Poly, expand, parse_angle, poly_from_config
from .rates import (SOLVER_CHOICES, classify, fit_rates, geometric_grid,
                    log_band_ratio, lower_bound, run_sweep, _dispatch)
from .space import SpaceParams
from .verification import run_verification
from .weights import power_weight, weight_from_config

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# Deterministic serialization (floats with 17 significant digits)
# --------------------------------------------------------------------------

def render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True or obj is False:
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(f"{pad}  {json.dumps(str(k))}: {render_json(v, indent + 1)}"
                           for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [render_json(v, indent + 1) for v in obj]
        if sum(len(s) for s in items) < 60 and all("\n" not in s for s in items):
            return "[" + ", ".join(items) + "]"
        inner = ",\n".join(pad + "  " + s for s in items)
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _pairs(p: Poly) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in p.coeffs]


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf"
        return format(v, ".17g")
    return str(v)


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    problem: Poly | CircleZeroSpec | None
    space: SpaceParams
    solver: str
    opts: SolverOpts
    n: int | None = None
    n_grid: list[int] | None = None
    d: int | None = None
    out: str | None = None


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    p = float(text)
    if p < 1:
        raise ValueError("p must be >= 1")
    return p


def _parse_roots(text: str) -> CircleZeroSpec:
    """Parse "angle:mult,angle:mult,..." into a spec normalized to f(0) = 1.

    Angles are rational multiples of pi (e.g. ``0``, ``pi/2``, ``3pi/4``).
    The polynomial is prod (1 - exp(-i theta) z)^mult so that f(0) = 1; this
    keeps every zero exactly on the unit circle.
    """
    roots = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            angle_s, mult_s = part.rsplit(":", 1)
            mult = int(mult_s)
        else:
            angle_s, mult = part, 1
        roots.append((parse_angle(angle_s), mult))
    if not roots:
        raise ValueError("empty root list")
    lead = 1.0 + 0j
    for angle, mult in roots:
        lead *= (-np.exp(-1j * angle)) ** mult
    return CircleZeroSpec(tuple(roots), leading_coefficient=lead)


def _parse_coeffs(text: str) -> Poly:
    try:
        return Poly([complex(tok.strip().replace("i", "j"))
                     for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise ValueError(f"cannot parse coefficients {text!r}: {exc}") from None


def _parse_n_range(text: str) -> list[int]:
    lo, _, hi = text.partition("..")
    if not _:
        raise ValueError("sweep range must look like 64..1024")
    return geometric_grid(int(lo), int(hi))


def _space_from_args(args) -> SpaceParams:
    p = _parse_p(args.p)
    if getattr(args, "weight_file", None):
        with open(args.weight_file, encoding="utf-8") as fh:
            w = weight_from_config(json.load(fh))
    else:
        w = power_weight(args.alpha)
    return SpaceParams(p, w)


def _problem_from_args(args):
    sources = [s for s in (args.roots, args.coeffs, getattr(args, "config", None))
               if s]
    if len(sources) != 1:
        raise ValueError("exactly one of --roots / --coeffs / --config is required")
    if args.roots:
        return _parse_roots(args.roots)
    if args.coeffs:
        return _parse_coeffs(args.coeffs)
    with open(args.config, encoding="utf-8") as fh:
        return poly_from_config(json.load(fh))


def _opts_from_args(args, sp: SpaceParams) -> SolverOpts:
    opts = SolverOpts()
    if getattr(args, "max_iters", None):
        opts.max_iters = args.max_iters
    if getattr(args, "tol", None):
        if sp.is_flat:
            opts.flat_tol = args.tol
        else:
            opts.grad_tol = args.tol
    return opts


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _weight_payload(sp: SpaceParams, args) -> dict:
    if getattr(args, "weight_file", None):
        return {"kind": "file", "path": args.weight_file}
    return {"kind": "power", "alpha": float(args.alpha)}


def _result_payload(cfg_cmd: str, f: Poly, res: OpaResult, sp: SpaceParams,
                    args, n: int) -> dict:
    try:
        bound = lower_bound(f, n, sp)
    except (ValueError, UnsupportedExponentError):
        bound = None
    p_out = "inf" if sp.p == math.inf else sp.p
    npow = res.optimal_norm if sp.p == math.inf else res.optimal_norm ** sp.p
    return {
        "command": cfg_cmd,
        "p": p_out,
        "weight": _weight_payload(sp, args),
        "n": n,
        "f": _pairs(f),
        "solver": res.solver,
        "coefficients": _pairs(res.approximant),
        "residual": _pairs(res.residual),
        "optimal_norm": res.optimal_norm,
        "norm_power": npow,
        "ortho_residual_max": res.ortho_residual_max,
        "lower_bound": bound,
        "iterations": res.iterations,
        "converged": res.converged,
    }


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _cmd_compute(args) -> int:
    sp = _space_from_args(args)
    problem = _problem_from_args(args)
    opts = _opts_from_args(args, sp)
    f = expand(problem) if isinstance(problem, CircleZeroSpec) else problem
    res = _dispatch(problem, args.n, sp, args.solver, opts)
    payload = _result_payload("compute", f, res, sp, args, args.n)
    _emit(render_json(payload) + "\n", args.out)
    return 0 if res.converged else 3


def _cmd_closed_form(args) -> int:
    sp = _space_from_args(args)
    res = closed_form_one_minus_zd(args.d, args.n, sp)
    f = Poly(np.concatenate([[1.0], np.zeros(args.d - 1), [-1.0]]))
    payload = _result_payload("closed-form", f, res, sp, args, args.n)
    payload["d"] = args.d
    _emit(render_json(payload) + "\n", args.out)
    return 0


def _cmd_classify(args) -> int:
    pred = classify(_parse_p(args.p), args.alpha)
    print("cyclic" if pred.cyclic else "not cyclic")
    scope = "norm" if _parse_p(args.p) == math.inf else "norm^p"
    if pred.regime == "power":
        print(f"regime: power decay of {scope}, exponent {pred.exponent:g}")
    elif pred.regime == "log":
        print(f"regime: logarithmic decay of {scope}, exponent {pred.exponent:g}")
    else:
        print(f"regime: stagnation of {scope}")
    if pred.note:
        print(f"note: {pred.note}")
    return 0


_CSV_COLUMNS = ["n", "d", "p", "alpha", "optimal_norm", "norm_p_power",
                "lower_bound", "predicted_value", "solver", "converged",
                "iterations", "wall_ms"]


def _cmd_sweep(args) -> int:
    sp = _space_from_args(args)
    problem = _problem_from_args(args)
    opts = _opts_from_args(args, sp)
    grid = _parse_n_range(args.n)
    code = 0
    try:
        points = run_sweep(problem, sp, grid, solver=args.solver, opts=opts)
    except SweepError as exc:
        log.warning("sweep: %s", exc)
        points = None
        raise
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for pt in points:
        writer.writerow([_fmt_cell(getattr(pt, col)) for col in _CSV_COLUMNS])
    _emit(buf.getvalue(), args.out)
    try:
        fit = fit_rates(points, sp, fit_min_n=args.fit_min_n)
        print(f"fitted exponent: {fit.fitted_exponent:.6f} "
              f"(r^2 = {fit.r_squared:.6f})", file=sys.stderr)
        alpha = points[0].alpha
        if not math.isnan(alpha) and classify(sp.p, alpha).regime == "log":
            print(f"log-regime band ratio: "
                  f"{log_band_ratio(points, sp, args.fit_min_n):.4f}",
                  file=sys.stderr)
    except ValueError as exc:
        print(f"fit skipped: {exc}", file=sys.stderr)
    return code


def _cmd_verify(args) -> int:
    results = run_verification(seed=args.seed, quick=args.quick)
    all_pass = True
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_pass &= r.passed
        detail = f" ({r.detail})" if r.detail else ""
        line = f"{status}  {r.name}: max deviation {r.max_dev:.3e}, tol {r.tol:g}{detail}"
        lines.append(line)
        print(line)
    print(("all checks passed" if all_pass else "SOME CHECKS FAILED"))
    if args.out:
        payload = {"passed": all_pass,
                   "checks": [{"name": r.name, "passed": r.passed,
                               "max_dev": r.max_dev, "tol": r.tol,
                               "detail": r.detail} for r in results]}
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(render_json(payload) + "\n")
    return 0 if all_pass else 4


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def _add_space_args(sub, with_weight_file: bool = True) -> None:
    sub.add_argument("--p", required=True,
                     help="exponent p in [1, inf]; use 'inf' for the sup norm")
    sub.add_argument("--alpha", type=float, default=0.0,
                     help="power-weight exponent (w_k = (k+1)^alpha)")
    if with_weight_file:
        sub.add_argument("--weight-file", help="JSON weight spec overriding --alpha")


def _add_problem_args(sub) -> None:
    sub.add_argument("--roots",
                     help="circle zeros 'angle:mult,...' with angles as rational "
                          "multiples of pi; builds f with f(0) = 1")
    sub.add_argument("--coeffs", help="comma-separated complex coefficients of f")
    sub.add_argument("--config", help="JSON problem spec (coeffs or circle_roots)")


def _add_solver_args(sub) -> None:
    sub.add_argument("--solver", default="auto", choices=SOLVER_CHOICES)
    sub.add_argument("--tol", type=float,
                     help="gradient tolerance (objective tolerance at p in {1, inf})")
    sub.add_argument("--max-iters", type=int, dest="max_iters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpopa",
        description="Optimal polynomial approximants in weighted l^p spaces")
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("compute", help="compute one approximant, emit JSON")
    _add_space_args(sc)
    _add_problem_args(sc)
    _add_solver_args(sc)
    sc.add_argument("--n", type=int, required=True, help="approximant order")
    sc.add_argument("--out", help="output path (stdout when omitted)")
    sc.set_defaults(func=_cmd_compute)

    sw = subs.add_parser("sweep", help="sweep orders and emit a decay CSV")
    _add_space_args(sw)
    _add_problem_args(sw)
    _add_solver_args(sw)
    sw.add_argument("--n", required=True,
                    help="order range a..b, expanded to the doubling grid a,2a,...,b")
    sw.add_argument("--fit-min-n", type=int, default=32, dest="fit_min_n")
    sw.add_argument("--out", help="CSV path (stdout when omitted)")
    sw.set_defaults(func=_cmd_sweep)

    cf = subs.add_parser("closed-form", help="exact approximant for f = 1 - z^d")
    _add_space_args(cf)
    cf.add_argument("--d", type=int, required=True)
    cf.add_argument("--n", type=int, required=True)
    cf.add_argument("--out")
    cf.set_defaults(func=_cmd_closed_form)

    cl = subs.add_parser("classify", help="cyclicity / decay-regime verdict")
    _add_space_args(cl, with_weight_file=False)
    cl.set_defaults(func=_cmd_classify)

    vf = subs.add_parser("verify", help="run the cross-oracle verification battery")
    vf.add_argument("--seed", type=int, default=0,
                    help="seed for the randomized property checks")
    vf.add_argument("--quick", action="store_true", help="reduced trial counts")
    vf.add_argument("--out", help="optional JSON report path")
    vf.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("OPA_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IllConditionedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InternalConsistencyError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, UnsupportedExponentError, OSError, json.JSONDecodeError,
            LpopaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
