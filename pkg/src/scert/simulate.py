"""Seeded Monte Carlo harness for random-simplex ensemble statistics.

Each draw samples N member classifiers uniformly from the probability
simplex, forms their uniform-weight and gap-optimal ensembles, and records
the gap regime together with the closed-form gap bound.  Per-draw random
streams are derived from (seed, N, draw index), so draws are
order-independent and can be distributed across workers; merging records in
draw-index order reproduces the serial run bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import ClassifierAtPoint, gaps
from .ensemble import EnsembleSpec, gap_gain_bound, optimize_weights

GAP_TOL = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    k: int = 4
    member_counts: tuple[int, ...] = (2, 3, 4)
    draws: int = 1000
    seed: int = 0
    weight_policy: str = "uniform"  # weights behind the recorded gap regime
    resolution: int | None = None   # optimizer grid steps (None: per-N default)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("at least two classes are required")
        if self.draws < 1:
            raise ValueError("at least one draw is required")
        if self.weight_policy not in ("uniform", "optimized"):
            raise ValueError("weight policy must be 'uniform' or 'optimized'")
        object.__setattr__(self, "member_counts", tuple(self.member_counts))


@dataclass(frozen=True)
class DrawRecord:
    n_members: int
    draw_index: int
    member_logits: tuple[tuple[float, ...], ...]
    gap_best: float
    gap_worst: float
    gap_uniform: float
    gap_optimized: float
    gap_regime: str
    same_top: bool
    bound: float
    slack: float


def draw_classifier(k: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the probability simplex (normalized unit-rate
    exponential variates)."""
    e = rng.standard_exponential(k)
    return e / e.sum()


def _runner_up_gap(logits: np.ndarray) -> float:
    c_a, c_b, r = gaps(logits)
    return float(r[c_b])


def evaluate_draw(member_logits: np.ndarray, n: int, index: int,
                  weight_policy: str = "uniform",
                  resolution: int | None = None) -> DrawRecord:
    """Build the record for one draw from its member logits (n, k)."""
    member_logits = np.asarray(member_logits, dtype=float)
    k = member_logits.shape[1]
    member_gaps = np.array([_runner_up_gap(row) for row in member_logits])
    tops = np.array([int(np.argmax(row)) for row in member_logits])
    gap_best = float(member_gaps.max())
    gap_worst = float(member_gaps.min())
    gap_uniform = _runner_up_gap(member_logits.mean(axis=0))
    spec = EnsembleSpec(tuple(ClassifierAtPoint(row) for row in member_logits))
    _, gap_optimized = optimize_weights(spec, resolution)
    governing = gap_uniform if weight_policy == "uniform" else gap_optimized
    if governing > gap_best + GAP_TOL:
        regime = "gain"
    elif governing < gap_worst - GAP_TOL:
        regime = "loss"
    else:
        regime = "inconclusive"
    bound = gap_gain_bound(gap_best, k)
    slack = bound - max(gap_uniform, gap_optimized)
    return DrawRecord(
        n_members=n,
        draw_index=index,
        member_logits=tuple(tuple(float(v) for v in row) for row in member_logits),
        gap_best=gap_best,
        gap_worst=gap_worst,
        gap_uniform=float(gap_uniform),
        gap_optimized=float(gap_optimized),
        gap_regime=regime,
        same_top=bool(np.all(tops == tops[0])),
        bound=float(bound),
        slack=float(slack),
    )


def run_experiment(config: ExperimentConfig) -> list[DrawRecord]:
    """All draws for every member count, deterministic for a fixed seed."""
    records = []
    for n in config.member_counts:
        if n < 2:
            raise ValueError("ensembles need at least two members")
        for index in range(config.draws):
            rng = np.random.default_rng((config.seed, n, index))
            members = np.stack([draw_classifier(config.k, rng) for _ in range(n)])
            records.append(evaluate_draw(members, n, index,
                                         config.weight_policy, config.resolution))
    return records


@dataclass(frozen=True)
class SimulationSummary:
    n_records: int
    fraction_gain: float
    fraction_inconclusive: float
    fraction_loss: float
    zero_gap_draws: int
    fraction_optimized_above_best: float
    mean_gap_best: float
    mean_gap_worst: float
    mean_gap_uniform: float
    bound_violations: int


def summarize(records: list[DrawRecord]) -> SimulationSummary:
    """Gap-regime fractions under uniform weights, the optimized-weights
    improvement fraction, and population means.

    The loss fraction counts strict losses (gap below the worst member by
    more than 1e-9); draws whose uniform-weight gap is itself ~0 are counted
    separately in ``zero_gap_draws``.
    """
    if not records:
        raise ValueError("no records to summarize")
    n = len(records)
    uniform = np.array([rec.gap_uniform for rec in records])
    best = np.array([rec.gap_best for rec in records])
    worst = np.array([rec.gap_worst for rec in records])
    optimized = np.array([rec.gap_optimized for rec in records])
    slack = np.array([rec.slack for rec in records])
    gain = np.count_nonzero(uniform > best + GAP_TOL)
    loss = np.count_nonzero(uniform < worst - GAP_TOL)
    return SimulationSummary(
        n_records=n,
        fraction_gain=gain / n,
        fraction_inconclusive=(n - gain - loss) / n,
        fraction_loss=loss / n,
        zero_gap_draws=int(np.count_nonzero(uniform <= GAP_TOL)),
        fraction_optimized_above_best=float(
            np.count_nonzero(optimized > best + GAP_TOL) / n),
        mean_gap_best=float(best.mean()),
        mean_gap_worst=float(worst.mean()),
        mean_gap_uniform=float(uniform.mean()),
        bound_violations=int(np.count_nonzero(slack < -1e-12)),
    )
