"""Command-line entry point.

Subcommands::

    compose A.json B.json [--keep v1,v2] [-o OUT.json]
    quotient TOP.json PART.json [-o OUT.json]
    merge A.json B.json [-o OUT.json]
    refines A.json B.json
    bounds C.json --var v
    optimize C.json --expr "..." (--max | --min)
    mission sweep CONFIG.json [--out DIR] [--jobs N] [--seed N]
    aircraft explore CONFIG.json [--out DIR]
    aircraft optimize CONFIG.json [--out FILE]
    serve [--port N]

Contract results are printed in the InVars/OutVars/A/G block format (numbers
display-rounded to six significant digits) and written as full-precision
JSON with ``-o``.  Exit codes: 0 success, 1 usage/parse/infeasible errors,
2 incompatibility diagnostics.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as cfg
from .contract_io import contract_to_dict, format_block, load_contract, save_contract
from .contracts import compose, get_variable_bounds, merge, optimize, quotient, refines
from .errors import ContractForgeError, IncompatibilityError, InfeasibleRegion, ParseError
from .lp import Direction
from .parser import format_number

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCOMPATIBLE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contract-forge", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--tol", type=float, default=None, help="numeric tolerance override")
    sub = parser.add_subparsers(dest="command", required=True)

    def contract_pair(p):
        p.add_argument("first")
        p.add_argument("second")
        p.add_argument("-o", "--out", default=None, help="write the result contract as JSON")

    p = sub.add_parser("compose", help="compose two contracts")
    contract_pair(p)
    p.add_argument("--keep", default="", help="comma-separated internal variables to keep")

    contract_pair(sub.add_parser("quotient", help="specification of the missing part"))
    contract_pair(sub.add_parser("merge", help="fuse two viewpoints"))

    p = sub.add_parser("refines", help="does the first contract refine the second?")
    p.add_argument("first")
    p.add_argument("second")

    p = sub.add_parser("bounds", help="variable range over assumptions plus guarantees")
    p.add_argument("contract")
    p.add_argument("--var", required=True)

    p = sub.add_parser("optimize", help="optimize a linear expression over a contract")
    p.add_argument("contract")
    p.add_argument("--expr", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--max", action="store_true")
    group.add_argument("--min", action="store_true")

    p = sub.add_parser("mission", help="spacecraft mission lab")
    msub = p.add_subparsers(dest="mission_command", required=True)
    ps = msub.add_parser("sweep", help="schedulability sweep")
    ps.add_argument("config")
    ps.add_argument("--out", default="mission_out")
    ps.add_argument("--jobs", type=int, default=None)
    ps.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("aircraft", help="fuel/thermal system lab")
    asub = p.add_subparsers(dest="aircraft_command", required=True)
    pe = asub.add_parser("explore", help="operating-point grid exploration")
    pe.add_argument("config")
    pe.add_argument("--out", default="aircraft_out")
    po = asub.add_parser("optimize", help="tolerance optimization")
    po.add_argument("config")
    po.add_argument("--out", default="optimize.json")

    p = sub.add_parser("serve", help="run the JSON service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None,
                   help="directory of UI assets to serve at / (default: ./frontend/dist if present)")
    return parser


def _emit_contract(result, out_path) -> None:
    print(format_block(result))
    if out_path:
        save_contract(result, out_path)


def _dispatch(args) -> int:
    if args.command == "compose":
        keep = [v for v in args.keep.split(",") if v] or None
        result = compose(load_contract(args.first), load_contract(args.second), keep)
        _emit_contract(result, args.out)
        return EXIT_OK
    if args.command == "quotient":
        result = quotient(load_contract(args.first), load_contract(args.second))
        _emit_contract(result, args.out)
        return EXIT_OK
    if args.command == "merge":
        result = merge(load_contract(args.first), load_contract(args.second))
        if not result.compatible:
            print("warning: merged assumptions are unsatisfiable (incompatible viewpoints)", file=sys.stderr)
        _emit_contract(result, args.out)
        return EXIT_OK
    if args.command == "refines":
        outcome = refines(load_contract(args.first), load_contract(args.second))
        payload = {
            "refines": outcome.ok,
            "violated_assumptions": [str(t) for t in outcome.violated_assumptions],
            "violated_guarantees": [str(t) for t in outcome.violated_guarantees],
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK if outcome.ok else EXIT_ERROR
    if args.command == "bounds":
        c = load_contract(args.contract)
        lo, hi = get_variable_bounds(c, args.var)
        print(json.dumps({"var": args.var, "lower": lo, "upper": hi}))
        return EXIT_OK
    if args.command == "optimize":
        c = load_contract(args.contract)
        direction = Direction.MAX if args.max else Direction.MIN
        value = optimize(c, args.expr, direction)
        print(json.dumps({"expr": args.expr, "direction": direction.value, "value": value}))
        return EXIT_OK
    if args.command == "mission":
        from .mission import SweepConfig, run_sweep

        config = SweepConfig.load(args.config)
        if args.jobs is not None:
            config.jobs = args.jobs
        if args.seed is not None:
            config.seed = args.seed
        summary = run_sweep(config, args.out)
        print(json.dumps(summary, indent=2))
        return EXIT_OK
    if args.command == "aircraft":
        if args.aircraft_command == "explore":
            from .aircraft import ExploreConfig, explore_grid

            results = explore_grid(ExploreConfig.load(args.config), args.out)
            valid = sum(1 for r in results if r.valid)
            print(json.dumps({"instances": len(results), "valid": valid,
                              "explore_csv": str(Path(args.out) / "explore.csv")}, indent=2))
            return EXIT_OK
        from .aircraft import OptimizeConfig, optimize_tolerances

        payload = optimize_tolerances(OptimizeConfig.load(args.config), args.out)
        print(json.dumps({k: payload[k] for k in
                          ("start_cost", "final_cost", "final_eps", "violates_spec", "evaluations")}, indent=2))
        return EXIT_OK
    if args.command == "serve":
        import os

        import uvicorn

        from .service import create_app

        port = args.port if args.port is not None else int(os.environ.get("PORT", "8000"))
        static = args.static
        if static is None and Path("frontend/dist").is_dir():
            static = "frontend/dist"
        uvicorn.run(create_app(static_dir=static), host=args.host, port=port)
        return EXIT_OK
    raise AssertionError(f"unhandled command {args.command}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    cfg.load_tolerance_from_env()
    if args.tol is not None:
        cfg.set_tolerance(args.tol)
    try:
        return _dispatch(args)
    except IncompatibilityError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except InfeasibleRegion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ParseError, ContractForgeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
