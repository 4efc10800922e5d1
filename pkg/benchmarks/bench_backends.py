#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Runs the four kernel groups on representative workloads and prints a table
of per-call times and speedups.  Exits with a note instead of a comparison
when the compiled backend is unavailable (pure-Python install).

Usage:
    python benchmarks/bench_backends.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from matchplan import _core_py
from matchplan.evaluate import _menu_arrays
from matchplan.harness import GenConfig, generate_instance
from matchplan.lowvalue import plan_low_value

try:
    from matchplan import _core
except ImportError:
    _core = None


def _best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads():
    rng = np.random.default_rng(2024)

    probs = rng.random(400)
    yield "poisson_binomial_pmf (n=400)", lambda mod: mod.poisson_binomial_pmf(probs)

    # exact evaluation shape: per-supplier chooser slices from a planned
    # m=200, n=100 market
    inst = generate_instance(GenConfig(n=100, m=200, lambda_v=1.0, lambda_o=1.0, seed=7))
    menus, _ = plan_low_value(inst)
    v, q = inst.score_arrays()
    per_supplier: list[list[float]] = [[] for _ in range(inst.n)]
    for i, menu in enumerate(menus.menus):
        mass = 1.0 + sum(v[j] for j in menu)
        for j in menu:
            per_supplier[j].append(v[j] / mass)
    flat = np.array([p for row in per_supplier for p in row])
    offs = np.zeros(inst.n + 1, dtype=np.int64)
    np.cumsum([len(row) for row in per_supplier], out=offs[1:])
    yield "match_expectations (m=200, n=100)", lambda mod: mod.match_expectations(flat, offs, q)

    cum_flat, ids_flat, offsets, _ = _menu_arrays(inst, menus)
    u = rng.random((512, inst.m))
    yield "mc_accumulate (512 trials, m=200)", lambda mod: mod.mc_accumulate(
        cum_flat, ids_flat, offsets, inst.n, q, u
    )

    n_small = 6
    v_small = 0.2 + rng.random(n_small)
    q_small = rng.random(n_small) * 3
    masks = np.arange(1 << n_small)
    member = ((masks[:, None] >> np.arange(n_small)) & 1).astype(np.float64)
    mass = member @ v_small
    pmat = member * v_small / (1.0 + mass)[:, None]
    yield "oracle_scan (m=3, n=6: 262k profiles)", lambda mod: mod.oracle_scan(pmat, q_small, 3)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="take the best of N runs")
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not built; nothing to compare")
        return 1

    header = f"{'kernel':<40} {'compiled':>12} {'python':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in _workloads():
        t_c = _best_of(lambda: call(_core), args.repeat)
        t_p = _best_of(lambda: call(_core_py), args.repeat)
        print(f"{name:<40} {t_c * 1e3:>10.3f}ms {t_p * 1e3:>10.3f}ms {t_p / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
