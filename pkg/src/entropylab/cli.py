"""Command-line front end.

Output contract
  entropy   JSON {value, lower, upper, method, depth, converged}
  sweep     CSV  param, entropy, lower, upper, depth_used, error
  st        JSON {d, shape, zeta, errors}
  deform    CSV  time, zeta_1..zeta_d, event_kind
  verify    one PASS/FAIL line per property

Floats carry 17 significant digits and exact rationals print as p/q.
Exit codes: 0 success, 1 bracket wider than --tol, 2 unreadable input,
3 precondition failure, 4 structure undecided within --budget.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import deformations as dfm
from .correspondence import st_report
from .entropy.bracket import entropy_lap, entropy_poly
from .errors import (DescriptionError, EntropyLabError, NoConvergence, PreconditionError,
                     UnknownStructure)
from .io import dumps, parse_map, to_csv
from .maps import StuntedParams, build_stunted, family_member, family_parameter
from .numbers import as_fraction
from .verify import DEFAULT_SEED, SUITES

DEFAULT_BUDGET = 10_000
FLOWS = ("gamma", "Gamma", "delta", "hatdelta", "beta", "retract0")


def default_budget() -> int:
    raw = os.environ.get("ENTROPYLAB_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise DescriptionError(f"ENTROPYLAB_BUDGET must be an integer, got {raw!r}") from None


def _emit(text: str, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- entropy

def estimate_map(obj, depth=None, tol=1e-6):
    """Entropy estimate for stunted parameters or a polynomial; may raise NoConvergence."""
    if isinstance(obj, StuntedParams):
        return entropy_lap(build_stunted(obj), n_max=depth or 20, tol=tol)
    return entropy_poly(obj, depth=depth or 30, tol=tol)


def _record(est, converged):
    rec = est.as_record()
    rec["converged"] = converged
    return rec


def cmd_entropy(args) -> int:
    obj = parse_map(args.map)
    try:
        est, code = estimate_map(obj, args.depth, args.tol), 0
    except NoConvergence as exc:
        est, code = exc.estimate, 1
    _emit(dumps(_record(est, code == 0)) + "\n", args.output)
    return code


# ------------------------------------------------------------------ sweep

SWEEP_HEADER = ("param", "entropy", "lower", "upper", "depth_used", "error")


def sweep_row(family, name, value, depth, tol):
    try:
        f = family_member(family, {name: value})
        est = estimate_map(f, depth, tol)
        return (value, est.value, est.lower, est.upper, est.depth, "")
    except NoConvergence as exc:
        est = exc.estimate
        return (value, est.value, est.lower, est.upper, est.depth, "NoConvergence")
    except EntropyLabError as exc:
        return (value, None, None, None, None, f"{type(exc).__name__}: {exc}")


def sweep(family, lo, hi, steps, depth=None, tol=1e-3, jobs=1):
    """Rows for evenly spaced parameters in ascending order."""
    if not lo < hi:
        raise DescriptionError("sweep needs lo < hi")
    if steps < 2:
        raise DescriptionError("sweep needs at least 2 steps")
    if tol <= 0:
        raise DescriptionError("tol must be positive")
    name = family_parameter(family)
    if name is None:
        raise DescriptionError(f"family {family!r} has no sweep parameter")
    values = [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]
    args = [(family, name, v, depth, tol) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, *zip(*args)))
    else:
        rows = [sweep_row(*a) for a in args]
    return sorted(rows, key=lambda r: r[0])


def cmd_sweep(args) -> int:
    rows = sweep(args.family, args.lo, args.hi, args.steps, args.depth, args.tol, args.jobs)
    _emit(to_csv(SWEEP_HEADER, rows), args.output)
    return 0


# --------------------------------------------------------------------- st

def cmd_st(args) -> int:
    obj = parse_map(args.map)
    if isinstance(obj, StuntedParams):
        raise DescriptionError("st needs a polynomial or family description")
    rep = st_report(obj, args.depth or 30)
    rec = {"d": rep.params.d, "shape": str(rep.params.geometry.shape),
           "zeta": list(rep.params.zeta), "errors": [float(e) for e in rep.errors]}
    _emit(dumps(rec) + "\n", args.output)
    return 0


# ----------------------------------------------------------------- deform

def _two_point(start, end, t):
    knots = ((Fraction(0), start.zeta),) if t == 0 else ((Fraction(0), start.zeta), (t, end.zeta))
    return dfm.FlowTrace(start, knots, (), t)


def retract_zero_trace(p, t, budget):
    """R_s for s in [0, t]: δ̂ at double speed, then the straight slide to T_0."""
    dfm.retract_zero(p, 0, budget=budget)
    first = dfm.hat_delta_flow(p, min(2 * t, 1))
    knots = [(s / 2, z) for s, z in first.knots]
    events = [dfm.FlowEvent(ev.time / 2, ev.kind, ev.indices) for ev in first.events]
    if t > Fraction(1, 2):
        if knots[-1][0] != Fraction(1, 2):
            knots.append((Fraction(1, 2), first.end.zeta))
        knots.append((t, dfm.sigma_retract(first.end, 2 * t - 1).zeta))
    return dfm.FlowTrace(p, tuple(knots), tuple(events), t)


def deform_trace(p, flow, t, h0=None, budget=DEFAULT_BUDGET):
    if not isinstance(p, StuntedParams):
        raise PreconditionError("deformations act on stunted descriptions")
    t = as_fraction(t)
    if flow == "gamma":
        return _two_point(p, dfm.gamma(p, t), t)
    if flow == "Gamma":
        if h0 is None:
            raise PreconditionError("Gamma needs --h0")
        return _two_point(p, dfm.Gamma(p, t, h0).params, t)
    if flow == "delta":
        return dfm.delta_flow(p, t)
    if flow == "hatdelta":
        return dfm.hat_delta_flow(p, t)
    if flow == "beta":
        return dfm.beta_flow(p, t, budget=min(budget, 2000))
    if flow == "retract0":
        if not 0 <= t <= 1:
            raise PreconditionError("t must lie in [0, 1]")
        return retract_zero_trace(p, t, budget)
    raise DescriptionError(f"unknown flow {flow!r}")


def trace_csv(trace) -> str:
    header = ("time", *(f"zeta_{i + 1}" for i in range(trace.start.d)), "event_kind")
    return to_csv(header, trace.rows())


def cmd_deform(args) -> int:
    p = parse_map(args.map)
    trace = deform_trace(p, args.flow, args.t, args.h0, args.budget)
    _emit(trace_csv(trace), args.output)
    return 0


# ----------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    checks = SUITES[args.suite](seed=args.seed)
    _emit("".join(c.line() + "\n" for c in checks), args.output)
    return 0 if all(c.ok for c in checks) else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropylab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=None):
        p.add_argument("--depth", type=int, default=None, help="census or kneading depth")
        if tol is not None:
            p.add_argument("--tol", type=float, default=tol, help="bracket width target")
        p.add_argument("--budget", type=int, default=None,
                       help="iteration budget (default $ENTROPYLAB_BUDGET or 10000)")
        p.add_argument("--output", default=None, help="write to this path instead of stdout")

    p = sub.add_parser("entropy", help="entropy bracket of one map")
    p.add_argument("map", help="JSON description or path to one")
    common(p, 1e-6)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("sweep", help="entropy along a one-parameter family, as CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    common(p, 1e-3)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("st", help="stunted sawtooth map with the kneading of a polynomial")
    p.add_argument("map")
    common(p)
    p.set_defaults(func=cmd_st)

    p = sub.add_parser("deform", help="parameter flow trace, as CSV")
    p.add_argument("map")
    p.add_argument("flow", choices=FLOWS)
    p.add_argument("t", help="flow time, e.g. 1/2")
    p.add_argument("--h0", type=float, default=None, help="target entropy for Gamma")
    common(p)
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "budget") and args.budget is None:
            args.budget = default_budget()
        return args.func(args)
    except DescriptionError as exc:
        print(f"entropylab: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"entropylab: precondition failed: {exc}", file=sys.stderr)
        return 3
    except UnknownStructure as exc:
        print(f"entropylab: undecided within budget: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
