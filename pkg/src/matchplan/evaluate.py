"""Expected-match evaluation: exact supplier-wise computation and Monte Carlo.

Exact path: by the two-stage model, supplier ``j``'s pick count ``X_j`` is a
Poisson-binomial sum of the independent pick indicators of the customers whose
menu contains ``j``, and suppliers resolve independently given pick counts, so

    E[matches] = sum_j E[X_j / (X_j + q_j)]      (term is 0 at X_j = 0)

computed per supplier from the exact pick-count PMF.  Cost is O(n * m^2) at
worst; intended for it to be exact, not fast, at scale.

Monte Carlo path: samples every customer's pick per trial and, by default,
replaces the supplier acceptance coin flips with their conditional expectation
``X_j/(X_j+q_j)`` (Rao-Blackwellization; strictly lower variance, identical
mean).  ``raw=True`` keeps the coin flips and returns integer match counts per
trial.  Both are deterministic given ``seed``: uniforms come from a Philox
counter-based generator, drawn trial-major in fixed-size blocks whose size
depends only on the trial and customer counts.  Parallel callers should derive
independent streams via ``numpy.random.SeedSequence(seed, spawn_key=(lane,))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .market import MarketInstance, MenuSet, validate

__all__ = [
    "EvalResult",
    "MCResult",
    "poisson_binomial",
    "exact_expected_matches",
    "monte_carlo_expected_matches",
]

# Uniform blocks are drawn (block, m) at a time; the block size is a fixed
# function of (trials, m) so a given seed always yields the same stream.
_BLOCK_BUDGET = 1 << 18


@dataclass(frozen=True)
class EvalResult:
    """Exact evaluation: total expected matches and the per-supplier split."""

    expected_matches: float
    per_supplier: np.ndarray


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo estimate: mean, standard error, per-supplier means."""

    expected_matches: float
    std_error: float
    per_supplier: np.ndarray
    trials: int


def poisson_binomial(probs) -> np.ndarray:
    """Exact PMF of a sum of independent Bernoulli trials.

    ``probs`` holds the success probabilities; the result has length
    ``len(probs) + 1`` with entry ``t`` the probability of ``t`` successes.
    Raises ``ValueError`` if any probability is outside [0, 1].
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1:
        raise ValueError("probs must be one-dimensional")
    if probs.size and (np.any(probs < 0.0) or np.any(probs > 1.0) or np.any(np.isnan(probs))):
        raise ValueError("probabilities must lie in [0, 1]")
    return _kernels.poisson_binomial_pmf(probs)


def _check_menus(instance: MarketInstance, menu_set: MenuSet) -> None:
    errors = validate(instance, menu_set)
    if errors:
        raise ValueError("invalid menu set: " + "; ".join(errors))


def _menu_arrays(instance: MarketInstance, menu_set: MenuSet):
    """Flatten menus into the layout shared by both kernel backends."""
    v, q = instance.score_arrays()
    ids: list[np.ndarray] = []
    cums: list[np.ndarray] = []
    offsets = np.zeros(instance.m + 1, dtype=np.int64)
    for i, menu in enumerate(menu_set.menus):
        menu_ids = np.array(sorted(menu), dtype=np.int64)
        denom = 1.0 + v[menu_ids].sum()
        cums.append(np.cumsum(v[menu_ids] / denom))
        ids.append(menu_ids)
        offsets[i + 1] = offsets[i] + menu_ids.size
    ids_flat = np.concatenate(ids) if ids else np.zeros(0, dtype=np.int64)
    cum_flat = np.concatenate(cums) if cums else np.zeros(0, dtype=np.float64)
    return cum_flat, ids_flat, offsets, q


def exact_expected_matches(instance: MarketInstance, menu_set: MenuSet) -> EvalResult:
    """Exact expected match count under the two-stage choice model."""
    _check_menus(instance, menu_set)
    v, q = instance.score_arrays()

    probs_by_supplier: list[list[float]] = [[] for _ in range(instance.n)]
    for menu in menu_set.menus:
        menu_ids = sorted(menu)
        denom = 1.0 + sum(v[j] for j in menu_ids)
        for j in menu_ids:
            probs_by_supplier[j].append(v[j] / denom)

    offsets = np.zeros(instance.n + 1, dtype=np.int64)
    for j in range(instance.n):
        offsets[j + 1] = offsets[j] + len(probs_by_supplier[j])
    flat = np.array(
        [p for plist in probs_by_supplier for p in plist], dtype=np.float64
    )
    per_supplier = _kernels.match_expectations(flat, offsets, q)
    return EvalResult(expected_matches=float(per_supplier.sum()), per_supplier=per_supplier)


def monte_carlo_expected_matches(
    instance: MarketInstance,
    menu_set: MenuSet,
    trials: int,
    seed: int,
    raw: bool = False,
) -> MCResult:
    """Monte Carlo estimate of the expected match count.

    Deterministic given ``seed``.  The default estimator is
    Rao-Blackwellized; ``raw=True`` simulates the supplier acceptance stage
    explicitly (two-stage sampler), consuming one extra uniform per supplier
    per trial at a fixed position in the stream.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    _check_menus(instance, menu_set)
    cum_flat, ids_flat, offsets, q = _menu_arrays(instance, menu_set)
    n, m = instance.n, instance.m

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    block = min(trials, max(1, _BLOCK_BUDGET // max(1, m)))

    totals = np.empty(trials, dtype=np.float64)
    supplier_acc = np.zeros(n, dtype=np.float64)
    done = 0
    while done < trials:
        size = min(block, trials - done)
        u = rng.random((size, m))
        if raw:
            u2 = rng.random((size, n))
            block_totals, block_sup = _kernels.mc_accumulate_raw(
                cum_flat, ids_flat, offsets, n, q, u, u2
            )
        else:
            block_totals, block_sup = _kernels.mc_accumulate(
                cum_flat, ids_flat, offsets, n, q, u
            )
        totals[done : done + size] = block_totals
        supplier_acc += block_sup
        done += size

    mean = float(totals.mean()) if trials else 0.0
    std_error = float(totals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return MCResult(
        expected_matches=mean,
        std_error=std_error,
        per_supplier=supplier_acc / trials,
        trials=trials,
    )
