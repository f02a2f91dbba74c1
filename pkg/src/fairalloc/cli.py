"""Command-line frontend: solve, check, gen, bench, compare.

Exit codes: 0 success (and every checked property holds), 1 some checked
property fails, 2 validation or parse failure, 3 infeasible constraints,
4 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bench
from .lp import solve_ceei, utilization_lp, welfare_lp
from .model import (
    ConvergenceError,
    InfeasibleError,
    InvalidInstanceError,
    allocation_to_json,
    instance_to_json,
    load_instance,
    make_allocation,
)
from .properties import check_bbf, check_ef, check_pe, check_si

EXIT_OK = 0
EXIT_PROPERTY_FAILED = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_NO_CONVERGENCE = 4

_CHECKS = {"pe": check_pe, "si": check_si, "ef": check_ef, "bbf": check_bbf}


def _parse_p(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_p_sweep(text: str) -> list[float]:
    """Either 'lo:hi' (integer orders, inclusive) or a comma list like '1,2,inf'."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return [float(v) for v in range(int(lo), int(hi) + 1)]
    return [_parse_p(tok) for tok in text.split(",") if tok]


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solve_with(mechanism: str, inst):
    if mechanism == "welfare-lp":
        return welfare_lp(inst).allocation
    if mechanism == "util-lp":
        return utilization_lp(inst).allocation
    if mechanism == "ceei":
        return solve_ceei(inst)
    return bench.MECHANISMS[mechanism](inst)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance, p_override=args.p)
    alloc = _solve_with(args.mechanism, inst)
    _emit(allocation_to_json(inst, alloc, mechanism=args.mechanism), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = load_instance(args.instance, p_override=args.p)
    with open(args.allocation) as fh:
        data = json.load(fh)
    if "tasks" not in data:
        raise InvalidInstanceError(["allocation file is missing 'tasks'"])
    try:
        alloc = make_allocation(inst, data["tasks"])
    except ValueError as exc:
        raise InvalidInstanceError([str(exc)]) from exc
    wanted = [name.strip() for name in args.properties.split(",") if name.strip()]
    unknown = [name for name in wanted if name not in _CHECKS]
    if unknown:
        raise InvalidInstanceError([f"unknown properties: {', '.join(unknown)}"])
    reports = [_CHECKS[name](inst, alloc) for name in wanted]
    _emit([r.to_json() for r in reports], args.out)
    return EXIT_OK if all(r.holds for r in reports) else EXIT_PROPERTY_FAILED


def cmd_gen(args) -> int:
    cfg = bench.GenConfig(
        n_users=args.n, n_resources=args.m, p=args.p, seed=args.seed, trials=max(args.trial + 1, 1)
    )
    inst = bench.gen_instance(cfg, args.trial)
    _emit(instance_to_json(inst), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = bench.GenConfig(
        n_users=args.n, n_resources=args.m, p=math.inf, seed=args.seed, trials=args.trials
    )
    sweep = _parse_p_sweep(args.p_sweep) if args.p_sweep else [cfg.p]
    records, excluded = bench.run_quality_sweep(
        cfg, args.mechanism, args.objective, oracle_variant=args.oracle, p_sweep=sweep
    )
    if args.csv:
        with open(args.csv, "w") as fh:
            bench.write_csv(records, fh)
    means = bench.mean_quality(records)
    for p in sweep:
        print(f"p={bench.format_p(float(p))} mean_quality={means[float(p)]:.6f}")
    if excluded:
        print(f"excluded_trials={excluded}")
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = load_instance(args.instance, p_override=args.p)
    rows = []
    for mechanism in [m.strip() for m in args.mechanisms.split(",") if m.strip()]:
        alloc = _solve_with(mechanism, inst)
        rows.append(
            {
                "mechanism": mechanism,
                "welfare": alloc.welfare,
                "utilization": alloc.utilization,
                "min_normalized_share": float(alloc.normalized_shares.min()),
                "tasks": alloc.tasks.tolist(),
            }
        )
    _emit(rows, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairalloc")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance file")
    solve.add_argument("instance")
    solve.add_argument(
        "--mechanism",
        default="lmmns",
        choices=["lmmns", "modified", "waterfill", "ceei", "welfare-lp", "util-lp"],
    )
    solve.add_argument("--p", type=_parse_p, default=None, help="override the instance norm order")
    solve.add_argument("--out", default=None)
    solve.set_defaults(func=cmd_solve)

    check = sub.add_parser("check", help="check properties of an allocation file")
    check.add_argument("instance")
    check.add_argument("allocation")
    check.add_argument("--properties", default="pe,si,ef,bbf")
    check.add_argument("--p", type=_parse_p, default=None)
    check.add_argument("--out", default=None)
    check.set_defaults(func=cmd_check)

    gen = sub.add_parser("gen", help="generate a random instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--p", type=_parse_p, default=math.inf)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--trial", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    bench_cmd = sub.add_parser("bench", help="run the quality benchmark")
    bench_cmd.add_argument("--n", type=int, default=100)
    bench_cmd.add_argument("--m", type=int, default=2)
    bench_cmd.add_argument("--p-sweep", default=None, help="'1:40' or comma list like '1,2,inf'")
    bench_cmd.add_argument("--seed", type=int, default=0)
    bench_cmd.add_argument("--trials", type=int, default=50)
    bench_cmd.add_argument("--objective", default="welfare", choices=["welfare", "utilization"])
    bench_cmd.add_argument("--oracle", default="plain", choices=["plain", "si"])
    bench_cmd.add_argument("--mechanism", default="lmmns", choices=sorted(bench.MECHANISMS))
    bench_cmd.add_argument("--csv", default=None)
    bench_cmd.set_defaults(func=cmd_bench)

    compare = sub.add_parser("compare", help="run several mechanisms on one instance")
    compare.add_argument("instance")
    compare.add_argument("--mechanisms", default="lmmns,modified,waterfill,ceei")
    compare.add_argument("--p", type=_parse_p, default=None)
    compare.add_argument("--out", default=None)
    compare.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc} (residual={exc.residual})", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
