"""Command-line entry point.  Every command prints one JSON report.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import format_poly
from .groebner import (Budget, BudgetExceeded, InfiniteRank, buchberger, is_groebner, leading_term,
                       standard_monomials)
from .numeric import (EvalPoint, QuadratureError, annihilation_residual,
                      build_pfaffian, check_flatness, initial_vector, integrate_pfaffian, quadrature_Z)
from .orders import make_grlex_order, make_h_order, make_prop2_order, make_weight
from .proofcheck import CHECK_IDS, MUTATIONS, ledger, run_all, run_check, run_mutation
from .systems import make_system
from .weyl import dmono_text, initial_form_weight

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
SYSTEMS = ("I", "It", "Ip", "Itp", "Iph")


class UsageError(ValueError):
    pass


def _budget(args) -> Budget:
    return Budget(args.budget)


def _system(args, mode=None):
    try:
        return make_system(args.system, args.n, args.slack, mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _order(U, mode: str, preset: str):
    if preset == "default":
        preset = "h" if mode == "Dh" else "prop2"
    if preset == "h":
        if mode != "Dh":
            raise UsageError("the h order is for the homogenized system")
        return make_h_order(U)
    if mode == "Dh":
        raise UsageError("only the h order applies to the homogenized system")
    return make_prop2_order(U) if preset == "prop2" else make_grlex_order(U)


def _gb_mode(args) -> str:
    return "Dh" if args.system == "Iph" else "R"


def _mono(U, e) -> str:
    return dmono_text(U, e) or "1"


# ---------------------------------------------------------------- commands

def cmd_build(args):
    mode = "Dh" if args.system == "Iph" else args.mode
    sd = _system(args, mode)
    return EXIT_OK, sd.as_dict()


def cmd_gb(args):
    mode = _gb_mode(args)
    sd = _system(args, mode)
    order = _order(sd.U, mode, args.order)
    gb = buchberger(sd.ops, order, budget=_budget(args))
    report = is_groebner(gb.generators, order, budget=_budget(args))
    names = [f"g{k}" for k in range(len(gb.generators))]
    payload = {"system": sd.name, "n": sd.n, "mode": mode, "order": order.describe(),
               "generators": [{"name": s, "text": g.to_str(order)} for s, g in zip(names, gb.generators)],
               "stats": gb.stats, "s_pairs": report.as_dict(names)}
    if mode == "R":
        try:
            std = standard_monomials(gb, order)
            payload["standard_monomials"] = [_mono(sd.U, e) for e in std]
            payload["rank"] = len(std)
        except InfiniteRank:
            payload["rank"] = "infinite"
    return (EXIT_OK if report.ok else EXIT_FAIL), payload


def cmd_rank(args):
    if args.system == "Iph":
        raise UsageError("rank is defined over the rational Weyl algebra; use I, It, Ip or Itp")
    sd = _system(args, "R")
    order = _order(sd.U, "R", args.order)
    gb = buchberger(sd.ops, order, budget=_budget(args))
    try:
        std = standard_monomials(gb, order)
    except InfiniteRank as exc:
        return EXIT_FAIL, {"system": sd.name, "n": sd.n, "rank": "infinite", "reason": str(exc)}
    return EXIT_OK, {"system": sd.name, "n": sd.n, "order": order.describe(), "rank": len(std),
                     "standard_monomials": [_mono(sd.U, e) for e in std],
                     "basis_size": len(gb.generators)}


def cmd_initial(args):
    mode = "Dh" if args.system == "Iph" else "D"
    sd = _system(args, mode)
    U = sd.U
    w = make_weight(U)
    order = make_h_order(U) if U.slack and U.homogenized else None
    rows = []
    for s, g in sd.generators:
        row = {"name": s, "weight_initial_form": initial_form_weight(g, w).to_str()}
        if order is not None:
            full = leading_term(g, order)[0]
            parts = [format_poly(U, U.ctx.from_dict({full[:U.ncoeff]: 1})), dmono_text(U, full[U.ncoeff:])]
            row["initial_monomial"] = "*".join(q for q in parts if q and q != "1") or "1"
        rows.append(row)
    return EXIT_OK, {"system": sd.name, "n": sd.n, "weight": {k: v for k, v in w.full_weights().items() if v},
                     "order": order.describe() if order else None, "generators": rows}


def cmd_check(args):
    if args.id not in CHECK_IDS:
        raise UsageError(f"unknown check id {args.id!r}; choose from {', '.join(CHECK_IDS)}")
    if args.mutation:
        res = run_mutation(args.id, args.n, args.seed)
        payload = {"mutation": MUTATIONS[args.id][0]}
    else:
        res = run_check(args.id, args.n, args.seed)
        payload = {}
    payload["ledger"] = ledger([res], with_time=not args.no_timing)
    return _ledger_exit([res]), payload


def cmd_check_all(args):
    results = run_all(args.n, seed=args.seed, jobs=args.jobs)
    rows = ledger(results, with_time=not args.no_timing)
    counts = {}
    for r in results:
        counts[r.status] = counts.get(r.status, 0) + 1
    return _ledger_exit(results), {"ledger": rows, "summary": counts}


def _ledger_exit(results) -> int:
    if any(r.status == "fail" for r in results):
        return EXIT_FAIL
    if any(r.status.startswith("skipped") for r in results):
        return EXIT_BUDGET
    return EXIT_OK


def _point(path: str, n: int) -> EvalPoint:
    try:
        p = EvalPoint.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError, ArithmeticError) as exc:
        raise UsageError(f"bad point file {path}: {exc}") from None
    if p.n != n:
        raise UsageError(f"point file is for n={p.n}, not n={n}")
    return p


def cmd_zeval(args):
    p = _point(args.point, args.n)
    payload = {"n": args.n, "point": json.loads(p.to_json()), "Z": quadrature_Z(p, tol=args.tol)}
    if args.op:
        sd = _system(args, "D")
        try:
            op = sd[args.op]
        except KeyError:
            raise UsageError(f"no generator {args.op!r} in {sd.name}; have {', '.join(sd.names)}") from None
        payload["operator"] = {"name": args.op, "text": op.to_str()}
        payload["residual"] = annihilation_residual(op, p, args.tol)
    return EXIT_OK, payload


def cmd_pfaffian(args):
    P = build_pfaffian(args.n)
    flat = check_flatness(P)
    bad = {k: v for k, v in flat.items() if v is not True}
    payload = {"n": args.n, "size": P.size, "standard_monomials": P.monomial_names(),
               "variables": P.variables, "flat": not bad, "flatness_failures": bad,
               "singular_locus": [str(d) for d in P.denominators()]}
    if args.export:
        Path(args.export).write_text(json.dumps(P.export(), indent=1, sort_keys=True))
        payload["exported_to"] = args.export
    return (EXIT_FAIL if bad else EXIT_OK), payload


def cmd_transport(args):
    a, b = _point(getattr(args, "from"), args.n), _point(args.to, args.n)
    P = build_pfaffian(args.n)
    try:
        F = integrate_pfaffian(P, a, b, steps=args.steps)
    except ValueError as exc:  # off-diagonal point or a path through the singular locus
        raise UsageError(str(exc)) from None
    ref = initial_vector(P, b)
    err = float(np.max(np.abs(F - ref)) / np.max(np.abs(ref)))
    return EXIT_OK, {"n": args.n, "steps": args.steps, "standard_monomials": P.monomial_names(),
                     "transported": F.tolist(), "quadrature": ref.tolist(), "relative_error": err}


# ---------------------------------------------------------------- parser

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fbrank", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fbrank {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True)
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--budget", type=int, help="reduction step budget (default: $FBRANK_BUDGET)")
    common.add_argument("--no-timing", action="store_true", help="omit wall-times from the report")
    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--system", choices=SYSTEMS, default="I")
    system.add_argument("--slack", default="sym", help="sym, zero or random:SEED")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common, system], help="print a system's generators")
    p.add_argument("--mode", choices=("D", "R"), default="D")
    p.set_defaults(fn=cmd_build)
    for name, fn, hlp in (("gb", cmd_gb, "compute and certify a Groebner basis"),
                          ("rank", cmd_rank, "holonomic rank and standard monomials")):
        p = sub.add_parser(name, parents=[common, system], help=hlp)
        p.add_argument("--order", choices=("default", "prop2", "grlex", "h"), default="default")
        p.set_defaults(fn=fn)
    p = sub.add_parser("initial", parents=[common, system], help="initial forms of the generators")
    p.set_defaults(fn=cmd_initial)
    p = sub.add_parser("check", parents=[common], help="replay one proof step")
    p.add_argument("--id", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutation", action="store_true", help="run the check's documented negative control")
    p.set_defaults(fn=cmd_check)
    p = sub.add_parser("check-all", parents=[common], help="replay every proof step")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_check_all)
    p = sub.add_parser("zeval", parents=[common, system], help="evaluate Z and a residual at a point")
    p.add_argument("--point", required=True, metavar="FILE")
    p.add_argument("--op", help="generator name, e.g. B or C12")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=cmd_zeval)
    p = sub.add_parser("pfaffian", parents=[common], help="build and check the Pfaffian system")
    p.add_argument("--export", metavar="PATH")
    p.set_defaults(fn=cmd_pfaffian)
    p = sub.add_parser("transport", parents=[common], help="integrate the Pfaffian system along a segment")
    p.add_argument("--from", required=True, metavar="FILE")
    p.add_argument("--to", required=True, metavar="FILE")
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(fn=cmd_transport)
    return ap


def _strip_times(obj):
    if isinstance(obj, dict):
        return {k: _strip_times(v) for k, v in obj.items() if k not in ("wall-time", "wall_time")}
    if isinstance(obj, list):
        return [_strip_times(v) for v in obj]
    return obj


def _execute(argv):
    args = _parser().parse_args(argv)
    saved = os.environ.get("FBRANK_BUDGET")
    if args.budget is not None:
        # the proof checks build their own budgets from the environment
        os.environ["FBRANK_BUDGET"] = str(args.budget)
    t0 = time.perf_counter()
    try:
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        code, payload = args.fn(args)
    except UsageError as exc:
        code, payload = EXIT_USAGE, {"error": str(exc)}
    except BudgetExceeded as exc:
        code, payload = EXIT_BUDGET, {"error": f"budget exhausted: {exc}"}
    except QuadratureError as exc:
        code, payload = EXIT_FAIL, {"error": str(exc)}
    finally:
        if saved is None:
            os.environ.pop("FBRANK_BUDGET", None)
        else:
            os.environ["FBRANK_BUDGET"] = saved
    report = {"tool": "fbrank", "version": __version__, "invocation": argv,
              "command": args.command, "exit": code, "payload": payload,
              "wall-time": round(time.perf_counter() - t0, 3)}
    if args.no_timing:
        report = _strip_times(report)
    return code, report, args


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command, and return (exit code, report)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report, _ = _execute(argv)
    return code, report


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report, args = _execute(argv)
    text = json.dumps(report, indent=1, sort_keys=True, default=str)
    if args.json:
        Path(args.json).write_text(text + "\n")
        print(f"{args.command}: exit {code}, report written to {args.json}")
    else:
        print(text)
    if code == EXIT_USAGE:
        print(f"fbrank: error: {report['payload']['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
