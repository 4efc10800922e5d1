"""Pure-NumPy kernels: the fallback backend and the reference semantics.

The compiled backend (``matchplan._core``) implements the same functions with
the same contracts; ``matchplan._kernels`` picks one at import time.  Keep the
two in lockstep: these functions define the behaviour the compiled versions
must reproduce (up to floating-point summation order).

Shared data layout for menu-dependent kernels (built by the evaluator):

- ``ids_flat``   int64, customer menus concatenated, each menu sorted ascending
- ``cum_flat``   float64, per-customer cumulative pick probabilities aligned
                 with ``ids_flat`` (last entry of a segment is the total menu
                 mass / (1 + mass), strictly below 1)
- ``offsets``    int64, length m+1; customer i owns ``[offsets[i], offsets[i+1])``

Sampling semantics: a uniform ``u`` picks the first menu position whose
cumulative probability exceeds ``u`` (``searchsorted(..., side="right")``);
if no position qualifies the customer goes outside.  Every customer consumes
exactly one uniform per trial whether or not their menu is empty, so the
uniform stream layout is independent of the menus.
"""

from __future__ import annotations

import numpy as np


def poisson_binomial_pmf(probs: np.ndarray) -> np.ndarray:
    """PMF of a sum of independent Bernoulli(p_k), by sequential convolution.

    Returns an array of length ``len(probs) + 1``; entry ``t`` is the
    probability of exactly ``t`` successes.  O(len^2) time, exact up to
    float rounding.  Inputs are trusted to lie in [0, 1].
    """
    probs = np.asarray(probs, dtype=np.float64)
    pmf = np.zeros(probs.size + 1, dtype=np.float64)
    pmf[0] = 1.0
    for k in range(probs.size):
        p = probs[k]
        pmf[1 : k + 2] = pmf[1 : k + 2] * (1.0 - p) + pmf[: k + 1] * p
        pmf[0] *= 1.0 - p
    return pmf


def match_expectations(flat_probs: np.ndarray, offsets: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Expected match probability per supplier from per-chooser pick probs.

    Supplier ``j`` owns the slice ``flat_probs[offsets[j]:offsets[j+1]]``: the
    pick probabilities of the customers whose menu contains ``j``.  Its pick
    count is Poisson-binomial over that slice, and the expected match is
    ``sum_t P(count = t) * t / (t + q_j)`` (the t = 0 term is zero).
    """
    n = q.size
    out = np.zeros(n, dtype=np.float64)
    for j in range(n):
        lo, hi = int(offsets[j]), int(offsets[j + 1])
        if hi == lo:
            continue
        pmf = poisson_binomial_pmf(flat_probs[lo:hi])
        t = np.arange(1, hi - lo + 1, dtype=np.float64)
        out[j] = float(np.sum(pmf[1:] * (t / (t + q[j]))))
    return out


def _pick_counts(
    cum_flat: np.ndarray,
    ids_flat: np.ndarray,
    offsets: np.ndarray,
    n: int,
    u: np.ndarray,
) -> np.ndarray:
    """Per-trial supplier pick counts for a block of uniforms ``u (trials, m)``."""
    trials, m = u.shape
    counts = np.zeros((trials, n), dtype=np.int64)
    rows = np.arange(trials)
    for i in range(m):
        lo, hi = int(offsets[i]), int(offsets[i + 1])
        if hi == lo:
            continue
        idx = np.searchsorted(cum_flat[lo:hi], u[:, i], side="right")
        picked = idx < (hi - lo)
        if picked.any():
            chosen = ids_flat[lo + idx[picked]]
            np.add.at(counts, (rows[picked], chosen), 1)
    return counts


def _match_ratios(counts: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Elementwise ``X/(X+q)`` with the 0-picks-never-match convention."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(counts > 0, counts / (counts + q), 0.0)


def mc_accumulate(
    cum_flat: np.ndarray,
    ids_flat: np.ndarray,
    offsets: np.ndarray,
    n: int,
    q: np.ndarray,
    u: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Rao-Blackwellized Monte Carlo block: sample picks, integrate acceptances.

    For each trial (row of ``u``) samples every customer's pick and returns
    ``(totals, per_supplier)`` where ``totals[t] = sum_j X_j/(X_j+q_j)`` for
    trial ``t`` and ``per_supplier[j]`` is that ratio summed over trials.
    """
    counts = _pick_counts(cum_flat, ids_flat, offsets, n, u)
    ratios = _match_ratios(counts, q)
    return ratios.sum(axis=1), ratios.sum(axis=0)


def mc_accumulate_raw(
    cum_flat: np.ndarray,
    ids_flat: np.ndarray,
    offsets: np.ndarray,
    n: int,
    q: np.ndarray,
    u: np.ndarray,
    u2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Two-stage Monte Carlo block: also flip the supplier acceptance coins.

    ``u2 (trials, n)`` supplies one uniform per supplier per trial (always
    consumed, picked or not, so the stream layout is fixed).  Supplier ``j``
    matches in a trial when it was picked ``X_j > 0`` times and
    ``u2 < X_j/(X_j+q_j)``.  Returns integer match totals (as floats) and the
    per-supplier match counts summed over trials.
    """
    counts = _pick_counts(cum_flat, ids_flat, offsets, n, u)
    matched = u2 < _match_ratios(counts, q)
    return matched.sum(axis=1).astype(np.float64), matched.sum(axis=0).astype(np.float64)


def oracle_scan(pmat: np.ndarray, q: np.ndarray, m: int) -> tuple[float, np.ndarray]:
    """Exhaustive scan over all menu profiles; returns (best value, profile).

    ``pmat[b, j]`` is the probability that a customer shown the menu with
    bitmask ``b`` picks supplier ``j`` (0 when ``j`` is not in ``b``).  The
    scan enumerates all ``pmat.shape[0] ** m`` profiles in lexicographic order
    (customer 0 most significant) and keeps the first profile whose value is
    within ``1e-12 * max(1, m)`` of the running maximum, i.e. the
    lexicographically smallest argmax up to that tolerance.  The tolerance
    absorbs summation-order noise so that profiles tied by symmetry resolve
    the same way in every backend; profiles with genuinely distinct values
    are separated by far more than it in practice.

    The innermost customer is evaluated in closed form: given the pick-count
    PMF of the other customers, the value of menu ``b`` for the last customer
    is ``base + sum_j pmat[b, j] * gain_j``, which vectorises over ``b``.
    """
    nmenus, n = pmat.shape
    if m == 0:
        return 0.0, np.zeros(0, dtype=np.int64)

    t = np.arange(m + 1, dtype=np.float64)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(t > 0, t / (t + q[None, :]), 0.0)  # (m+1, n)
    gain = ratio[1:] - ratio[:-1]  # (m, n): marginal value of one more pick

    tie_eps = 1e-12 * max(1.0, float(m))
    best_val = -np.inf
    best_profile: list[int] = []
    digits = [0] * (m - 1)
    n_prefix = nmenus ** (m - 1)
    for L in range(n_prefix):
        rem = L
        for pos in range(m - 2, -1, -1):
            digits[pos] = rem % nmenus
            rem //= nmenus

        # Poisson-binomial PMF of pick counts per supplier over the prefix.
        dp = np.zeros((m, n), dtype=np.float64)
        dp[0] = 1.0
        for pos in range(m - 1):
            p = pmat[digits[pos]]
            dp[1:] = dp[1:] * (1.0 - p) + dp[:-1] * p
            dp[0] *= 1.0 - p

        base = float(np.sum(dp * ratio[:m]))
        bvec = (dp * gain).sum(axis=0)
        evec = base + pmat @ bvec
        b_last = int(np.argmax(evec > float(evec.max()) - tie_eps))
        val = float(evec[b_last])
        if val > best_val + tie_eps:
            best_val = val
            best_profile = digits + [b_last]
    return best_val, np.array(best_profile, dtype=np.int64)
