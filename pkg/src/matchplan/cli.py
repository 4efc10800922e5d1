"""Command-line interface.

Subcommands mirror the library: ``generate`` draws a random instance,
``plan`` builds menus, ``eval`` scores menus (exactly or by Monte Carlo),
``bounds`` prints allocation upper bounds, ``oracle`` brute-forces small
instances, ``buckets`` shows the low-value bucket table, and ``table`` runs
the ratio-table experiment to CSV.  Instances and menus travel as JSON:

    {"m": 3, "suppliers": [{"v": 0.5, "q": 2.0}, ...]}
    {"menus": [[0, 2], [], [1]]}
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .buckets import build_buckets, cap_high_q, clamp_low_q
from .combined import plan as plan_dispatch
from .evaluate import exact_expected_matches, monte_carlo_expected_matches
from .harness import GenConfig, generate_instance, rows_to_csv, run_table
from .highvalue import allocation_upper_bound
from .market import (
    MarketInstance,
    instance_from_dict,
    instance_to_dict,
    menus_from_dict,
    menus_to_dict,
)
from .oracle import brute_force_optimal


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_json(data: dict, path: str | None) -> None:
    text = json.dumps(data, indent=2)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _load_instance(path: str) -> MarketInstance:
    return instance_from_dict(_read_json(path))


def _cmd_generate(args: argparse.Namespace) -> int:
    cfg = GenConfig(n=args.n, m=args.m, lambda_v=args.lambda_v,
                    lambda_o=args.lambda_o, seed=args.seed)
    _write_json(instance_to_dict(generate_instance(cfg)), args.out)
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    menus, diagnostics = plan_dispatch(
        instance,
        regime=args.regime,
        cap_exponent=args.cap_exponent,
        high_method="waterfill" if args.half_approx else "greedy",
    )
    _write_json(menus_to_dict(menus), args.out)
    if args.diag is not None:
        _write_json(diagnostics, args.diag)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    menus = menus_from_dict(_read_json(args.menus))
    if args.mc is None:
        result = exact_expected_matches(instance, menus)
        payload = {
            "expected_matches": result.expected_matches,
            "per_supplier": result.per_supplier.tolist(),
        }
    else:
        result = monte_carlo_expected_matches(
            instance, menus, trials=args.mc, seed=args.seed, raw=args.raw
        )
        payload = {
            "expected_matches": result.expected_matches,
            "per_supplier": result.per_supplier.tolist(),
            "std_error": result.std_error,
            "trials": result.trials,
        }
    _write_json(payload, args.out)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    _, q = instance.score_arrays()
    ub = allocation_upper_bound(q, instance.m, kind=args.kind)
    _write_json({"kind": args.kind, "upper_bound": ub}, args.out)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    menus, value = brute_force_optimal(instance, max_cost=args.max_cost)
    payload = menus_to_dict(menus)
    payload["value"] = value
    _write_json(payload, args.out)
    return 0


def _cmd_buckets(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    for j, s in enumerate(instance.suppliers):
        if s.v > 1.0:
            raise ValueError(f"supplier {j} has v={s.v} > 1; buckets cover the low-value regime")
    cap_exponent = args.cap_exponent
    if cap_exponent is None:
        cap_exponent = min(max(instance.m, 1), 40)
    clamped_instance, clamped = clamp_low_q(instance)
    capped, survivors = cap_high_q(clamped_instance, cap_exponent)
    payload: dict = {
        "cap_exponent": cap_exponent,
        "clamped": clamped,
        "dropped": sorted(set(range(instance.n)) - set(survivors)),
        "buckets": [],
    }
    if capped is not None:
        table = build_buckets(capped)
        payload["buckets"] = [
            {
                "k1": k.k1,
                "k2": k.k2,
                "w": k.w,
                "q_rep": k.q_rep,
                "suppliers": [survivors[j] for j in table.buckets[k]],
            }
            for k in table.order()
        ]
    _write_json(payload, args.out)
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    rows_spec = _read_json(args.rows)
    rows = [(int(r[0]), float(r[1]), float(r[2])) for r in rows_spec]
    table = run_table(
        rows,
        n=args.n,
        instances_per_row=args.instances,
        sims_per_instance=args.sims,
        seed=args.seed,
        exact=args.exact,
    )
    text = rows_to_csv(table)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchplan",
        description="Menu planning and evaluation for two-sided MNL matching markets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a random instance to JSON")
    p.add_argument("--n", type=int, required=True, help="supplier count")
    p.add_argument("--m", type=int, required=True, help="customer count")
    p.add_argument("--lambda-v", type=float, required=True, dest="lambda_v")
    p.add_argument("--lambda-o", type=float, required=True, dest="lambda_o")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("plan", help="build menus for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--regime", choices=["auto", "low", "high"], default="auto")
    p.add_argument("--cap-exponent", type=int, default=None, dest="cap_exponent")
    p.add_argument("--half-approx", action="store_true",
                   help="use the water-filling construction on the high side instead of exact greedy")
    p.add_argument("--out", default=None)
    p.add_argument("--diag", default=None, help="also write planner diagnostics JSON")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("eval", help="score menus against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--menus", required=True)
    p.add_argument("--mc", type=int, default=None,
                   help="Monte Carlo trial count (default: exact evaluation)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--raw", action="store_true",
                   help="simulate supplier acceptances instead of integrating them out")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("bounds", help="allocation upper bound on any menu set")
    p.add_argument("--instance", required=True)
    p.add_argument("--kind", choices=["integer", "continuous"], default="integer")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("oracle", help="brute-force the optimal menus (small instances)")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-cost", type=int, default=10**6, dest="max_cost")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("buckets", help="show the low-value bucket table")
    p.add_argument("--instance", required=True)
    p.add_argument("--cap-exponent", type=int, default=None, dest="cap_exponent")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_buckets)

    p = sub.add_parser("table", help="run the ratio-table experiment to CSV")
    p.add_argument("--rows", required=True,
                   help="JSON list of [m, lambda_v, lambda_o] rows")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--instances", type=int, default=25)
    p.add_argument("--sims", type=int, default=30)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exact", action="store_true",
                   help="exact evaluation instead of Monte Carlo where feasible")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
