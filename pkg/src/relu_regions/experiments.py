"""Experiment harnesses: skip-vs-no-skip region counts, cache hit rates.

The skip comparison initializes ``trials`` network pairs; the pair for
trial i uses seed ``base_seed + i``, so results do not depend on execution
order.  Both variants of a pair share the same weight draw (skips change
the wiring, not the parameter shapes), and the one-tailed U test asks
whether the no-skip counts sit below the skip counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cache import cached_fraction, warm_cache
from .network import NetworkSpec, init_kaiming, phi_dataset
from .regions import enumerate_regions
from .stats import A_LESS_THAN_B, UTestResult, mann_whitney_one_tailed, summarize

__all__ = ["TrialRecord", "SkipComparison", "compare_skips", "comparison_csv",
           "cache_grid_stats"]

SIGNIFICANCE_LEVEL = 0.05
COMPARISON_BOX_HALF_WIDTH = 8.0  # default counting box for the skip comparison


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    variant: str  # "with_skips" | "without_skips"
    seed: int
    region_count: int
    wall_ms: float


@dataclass(frozen=True)
class SkipComparison:
    records: tuple[TrialRecord, ...]
    with_skips: dict
    without_skips: dict
    u_test: Optional[UTestResult]
    reject_null: Optional[bool]  # None when no decision can be made
    warning: Optional[str]


def _count_regions(net: NetworkSpec, box, parallel: bool, threads) -> tuple[int, float]:
    start = time.perf_counter()
    region_set = enumerate_regions(net, bounding_box=box, parallel=parallel,
                                   threads=threads)
    return len(region_set), (time.perf_counter() - start) * 1000.0


def compare_skips(num_layers: int, width: int, skips: Sequence[tuple[int, int]],
                  trials: int, seed: int, input_dim: int = 2,
                  output_dim: int = 1, bounding_box="default",
                  parallel: bool = False, threads=None) -> SkipComparison:
    """Region counts for ``trials`` paired random networks, with and without
    the skip wiring, plus the one-tailed U test (no-skip mean < skip mean).

    Counting is restricted to ``bounding_box`` (pass None for global
    counts).  The skip surplus is a property of the region structure near
    the origin; far from it the picture reverses, so the comparison uses a
    moderate box by default.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if not skips:
        raise ValueError("skip list must be nonempty; the no-skip variant is derived")
    if bounding_box == "default":
        b = COMPARISON_BOX_HALF_WIDTH
        bounding_box = ((-b, b),) * input_dim
    widths = [width] * num_layers
    records: list[TrialRecord] = []
    skip_counts: list[int] = []
    plain_counts: list[int] = []
    for trial in range(trials):
        trial_seed = seed + trial
        net_skip = init_kaiming(widths, input_dim, output_dim, skips, trial_seed)
        net_plain = net_skip.without_skips()
        count, ms = _count_regions(net_skip, bounding_box, parallel, threads)
        skip_counts.append(count)
        records.append(TrialRecord(trial, "with_skips", trial_seed, count, ms))
        count, ms = _count_regions(net_plain, bounding_box, parallel, threads)
        plain_counts.append(count)
        records.append(TrialRecord(trial, "without_skips", trial_seed, count, ms))

    u_test = None
    reject = None
    warning = None
    if trials < 2:
        warning = "single trial: no test decision"
    else:
        u_test = mann_whitney_one_tailed(plain_counts, skip_counts, A_LESS_THAN_B)
        if u_test.degenerate:
            warning = "degenerate samples: no test decision"
        else:
            reject = u_test.p_value < SIGNIFICANCE_LEVEL
    return SkipComparison(tuple(records), summarize(skip_counts),
                          summarize(plain_counts), u_test, reject, warning)


def comparison_csv(result: SkipComparison) -> str:
    lines = ["trial,variant,seed,region_count,wall_ms"]
    for r in result.records:
        lines.append(f"{r.trial},{r.variant},{r.seed},{r.region_count},{r.wall_ms:.3f}")
    return "\n".join(lines) + "\n"


def cache_grid_stats(net: NetworkSpec, train_fn: int, grid_start: float,
                     grid_step: float, grid_len: int, offset: float) -> dict:
    """Warm the cache on a function grid, then probe with the offset grid."""
    train = [p for p, _ in phi_dataset(train_fn, grid_start, grid_step, grid_len)]
    test = [p for p, _ in phi_dataset(train_fn, grid_start + offset, grid_step, grid_len)]
    cache = warm_cache(net, np.asarray(train))
    rate = cached_fraction(net, cache, np.asarray(test))
    return {
        "train_points": len(train),
        "test_points": len(test),
        "cached_regions": len(cache),
        "hit_rate": rate,
    }
