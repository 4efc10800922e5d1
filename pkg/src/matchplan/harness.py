"""Reproducible experiment harness: instance generation and ratio tables.

Instances are drawn from a two-parameter family: supplier scores
``v_j = 1/(1+z_j)`` with ``z_j`` exponential of mean ``lambda_v`` (so every
score lies in (0, 1] and larger ``lambda_v`` pushes scores toward 0) and
outside options ``q_j = 1 + w_j`` with ``w_j`` exponential of mean
``lambda_o``.  Exponentials are sampled by inverse CDF,
``-lambda * ln(U)`` with ``U`` uniform on (0, 1], from a Philox
counter-based 64-bit generator, so draws are bit-exact across platforms.  A
config's stream is ``Philox(SeedSequence(seed))`` and consumes the ``n``
score uniforms first, then the ``n`` outside-option uniforms.

``run_table`` evaluates the low-value planner against the continuous
allocation upper bound over a grid of (m, lambda_v, lambda_o) rows.  Row
``r``, instance ``t`` derives its generation seed from
``SeedSequence([master, r, t, 0])`` and its simulation seed from
``SeedSequence([master, r, t, 1])``, making every cell reproducible in
isolation.  Each instance is planned once, evaluated by Monte Carlo
(``sims`` trials; or exactly with ``exact=True`` when ``n*m <= 1e5``), and
divided by the upper bound computed on the raw instance.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields

import numpy as np

from .evaluate import exact_expected_matches, monte_carlo_expected_matches
from .highvalue import allocation_upper_bound
from .lowvalue import plan_low_value
from .market import MarketInstance, Supplier

__all__ = [
    "GenConfig",
    "TableRow",
    "generate_instance",
    "run_table",
    "rows_to_csv",
    "rows_from_csv",
]

_EXACT_CELL_LIMIT = 100_000


@dataclass(frozen=True)
class GenConfig:
    """Parameters of one random instance draw."""

    n: int
    m: int
    lambda_v: float
    lambda_o: float
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if not self.lambda_v > 0 or not self.lambda_o > 0:
            raise ValueError("rate parameters must be positive")


@dataclass(frozen=True)
class TableRow:
    """Aggregates for one (m, lambda_v, lambda_o) grid row."""

    m: int
    lambda_v: float
    lambda_o: float
    avg_alg: float
    avg_ub: float
    ratio_mean: float
    ratio_min: float
    ratio_median: float


def generate_instance(cfg: GenConfig) -> MarketInstance:
    """Draw one instance; deterministic given ``cfg.seed``."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed)))
    u_v = 1.0 - rng.random(cfg.n)  # uniform on (0, 1]: keeps ln well-defined
    z = -cfg.lambda_v * np.log(u_v)
    v = 1.0 / (1.0 + z)
    u_o = 1.0 - rng.random(cfg.n)
    w = -cfg.lambda_o * np.log(u_o)
    q = 1.0 + w
    suppliers = tuple(Supplier(v=float(vj), q=float(qj)) for vj, qj in zip(v, q))
    return MarketInstance(m=cfg.m, suppliers=suppliers)


def _cell_seed(master: int, row: int, instance: int, stream: int) -> int:
    ss = np.random.SeedSequence([master, row, instance, stream])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_table(
    rows: list[tuple[int, float, float]],
    n: int,
    instances_per_row: int,
    sims_per_instance: int,
    seed: int,
    exact: bool = False,
) -> list[TableRow]:
    """Compute planner-vs-bound ratios over a grid of rows.

    Each row is ``(m, lambda_v, lambda_o)``.  Per instance: generate, plan
    with the low-value pipeline, estimate the plan's expected matches
    (Monte Carlo with ``sims_per_instance`` trials, or exactly when
    ``exact=True`` and ``n*m`` is small enough), and compute the continuous
    allocation upper bound on the raw instance.  Row aggregates average the
    per-instance values and summarise the per-instance ratios.
    """
    if instances_per_row < 1 or sims_per_instance < 1:
        raise ValueError("instances_per_row and sims_per_instance must be >= 1")
    out: list[TableRow] = []
    for r, (m, lambda_v, lambda_o) in enumerate(rows):
        algs = np.empty(instances_per_row)
        ubs = np.empty(instances_per_row)
        for t in range(instances_per_row):
            cfg = GenConfig(
                n=n, m=m, lambda_v=lambda_v, lambda_o=lambda_o,
                seed=_cell_seed(seed, r, t, 0),
            )
            instance = generate_instance(cfg)
            menus, _ = plan_low_value(instance)
            use_exact = exact and instance.n * max(instance.m, 1) <= _EXACT_CELL_LIMIT
            if use_exact:
                alg = exact_expected_matches(instance, menus).expected_matches
            else:
                alg = monte_carlo_expected_matches(
                    instance, menus, trials=sims_per_instance,
                    seed=_cell_seed(seed, r, t, 1),
                ).expected_matches
            _, q = instance.score_arrays()
            ub = allocation_upper_bound(q, m, kind="continuous")
            algs[t] = alg
            ubs[t] = ub
        ratios = algs / ubs
        out.append(
            TableRow(
                m=m,
                lambda_v=lambda_v,
                lambda_o=lambda_o,
                avg_alg=float(algs.mean()),
                avg_ub=float(ubs.mean()),
                ratio_mean=float(ratios.mean()),
                ratio_min=float(ratios.min()),
                ratio_median=float(np.median(ratios)),
            )
        )
    return out


_CSV_COLUMNS = [f.name for f in fields(TableRow)]


def rows_to_csv(rows: list[TableRow]) -> str:
    """Serialise rows with full float precision (round-trips exactly)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in rows:
        writer.writerow([repr(getattr(row, c)) for c in _CSV_COLUMNS])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[TableRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != _CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    out = []
    for record in reader:
        if not record:
            continue
        values = dict(zip(_CSV_COLUMNS, record))
        out.append(
            TableRow(
                m=int(values["m"]),
                **{c: float(values[c]) for c in _CSV_COLUMNS if c != "m"},
            )
        )
    return out
