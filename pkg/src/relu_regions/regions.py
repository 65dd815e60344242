"""Linear-region extraction and enumeration for ReLU networks.

Every assignment of active/inactive to the hidden neurons indexes one
(possibly empty) candidate region: the intersection of one half-space per
neuron, built layer by layer from the tropical decomposition.  A region
counts as nonempty when it is full-dimensional (a ball of positive radius
fits inside); lower-dimensional cells are seams between regions.

``enumerate_regions`` walks the assignment tree one layer at a time and
prunes a whole subtree as soon as the accumulated intersection stops being
full-dimensional, which is sound because deeper layers only add
half-spaces.  ``brute_force_enumerate`` evaluates every pattern
independently and serves as the testing oracle.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .geometry import (DEGENERATE_ROW_TOL, RADIUS_CAP, Feasibility,
                       FeasibilityStatus, feasible_arrays)
from .network import ActivationPattern, NetworkSpec, activation_pattern
from .tropical import TropicalLayerState, initial_state, propagate, select_numerator

__all__ = [
    "EnumerationGuardError",
    "HalfSpace",
    "LinearRegion",
    "InfeasibleRegion",
    "RegionOutcome",
    "TraversalStats",
    "RegionSet",
    "find_linear_region",
    "enumerate_regions",
    "brute_force_enumerate",
    "locate_region",
    "region_set_to_dict",
    "region_set_to_csv",
]

BRUTE_FORCE_NEURON_LIMIT = 16


class EnumerationGuardError(ValueError):
    """Refusal to enumerate a network above the neuron guard."""

    def __init__(self, total_neurons: int, guard: int):
        super().__init__(
            f"network has {total_neurons} hidden neurons (guard {guard}); "
            f"up to 2^{total_neurons} = {2 ** total_neurons} patterns would be visited")
        self.total_neurons = total_neurons
        self.estimate = 2 ** total_neurons


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space {x : alpha . x + beta <= 0}.

    A zero-normal row is degenerate: trivially true when beta <= tol,
    infeasible otherwise.
    """

    alpha: np.ndarray
    beta: float
    degenerate: bool = field(init=False)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64).reshape(-1)
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", float(self.beta))
        if not (np.isfinite(alpha).all() and np.isfinite(self.beta)):
            raise ValueError("half-space entries must be finite")
        object.__setattr__(
            self, "degenerate", bool(np.abs(alpha).max(initial=0.0) <= DEGENERATE_ROW_TOL))

    def evaluate(self, x) -> float:
        return float(self.alpha @ np.asarray(x, dtype=np.float64) + self.beta)


@dataclass(frozen=True)
class LinearRegion:
    """A full-dimensional cell with its bounding half-spaces and affine map.

    ``halfspaces`` holds one entry per hidden neuron in layer-major order
    (degenerate ones retained, flagged).  On the region the network computes
    ``matrix @ x + offset``.
    """

    pattern: ActivationPattern
    halfspaces: tuple[HalfSpace, ...]
    matrix: np.ndarray
    offset: np.ndarray
    interior_point: np.ndarray
    chebyshev_radius: float

    @property
    def affine_map(self) -> tuple[np.ndarray, np.ndarray]:
        return self.matrix, self.offset

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.float64) + self.offset

    def contains(self, x, tol: float = 0.0) -> bool:
        return all(hs.degenerate and hs.beta <= DEGENERATE_ROW_TOL
                   or hs.evaluate(x) <= tol for hs in self.halfspaces)


@dataclass(frozen=True)
class InfeasibleRegion:
    """Pattern whose cell lost full-dimensionality at ``failure_layer``."""

    pattern: ActivationPattern
    failure_layer: int


RegionOutcome = Union[LinearRegion, InfeasibleRegion]


@dataclass
class TraversalStats:
    patterns_visited: int = 0
    patterns_pruned_subtrees: int = 0
    lp_calls: int = 0
    wall_time: float = 0.0

    def merge(self, other: "TraversalStats"):
        self.patterns_visited += other.patterns_visited
        self.patterns_pruned_subtrees += other.patterns_pruned_subtrees
        self.lp_calls += other.lp_calls


@dataclass(frozen=True)
class RegionSet:
    """All full-dimensional regions of a network, sorted by pattern text."""

    regions: tuple[LinearRegion, ...]
    stats: TraversalStats

    def __len__(self) -> int:
        return len(self.regions)

    @property
    def pattern_texts(self) -> tuple[str, ...]:
        return tuple(r.pattern.text for r in self.regions)

    def find(self, pattern_text: str) -> Optional[LinearRegion]:
        for r in self.regions:
            if r.pattern.text == pattern_text:
                return r
        return None


@lru_cache(maxsize=None)
def _bit_table(width: int) -> np.ndarray:
    """All bit vectors of a layer, lexicographic, all-inactive first."""
    codes = np.arange(2 ** width, dtype=np.uint32)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint32)
    return ((codes[:, None] >> shifts) & 1).astype(bool)


def _layer_offsets(net: NetworkSpec) -> list[int]:
    offsets = [0]
    for w in net.widths:
        offsets.append(offsets[-1] + w)
    return offsets


class _Walker:
    """Shared per-branch state: tropical states plus the half-space buffer."""

    def __init__(self, net: NetworkSpec, box):
        self.net = net
        self.box = box
        n = net.input_dim
        total = net.total_neurons
        self.offsets = _layer_offsets(net)
        self.alphas = np.empty((total, n), dtype=np.float64)
        self.betas = np.empty(total, dtype=np.float64)
        self.states: list[TropicalLayerState] = [initial_state(n)]

    def clone(self) -> "_Walker":
        other = _Walker.__new__(_Walker)
        other.net = self.net
        other.box = self.box
        other.offsets = self.offsets
        other.alphas = self.alphas.copy()
        other.betas = self.betas.copy()
        other.states = list(self.states)
        return other

    def advance(self, depth: int, bits: np.ndarray, stats: TraversalStats,
                check: bool = True) -> Optional[Feasibility]:
        """Apply layer ``depth`` (1-based) under ``bits``; None skips the LP.

        Leaves ``self.states`` truncated to ``depth`` entries with the new
        state appended, and the half-space buffer filled through this layer.
        """
        net = self.net
        layer = net.hidden_layers[depth - 1]
        del self.states[depth:]
        upd = propagate(self.states[-1], layer.weights, layer.bias,
                        [self.states[s] for s in net.skip_sources(depth)])
        num_coef, num_bias, alphas, betas = select_numerator(upd, bits)
        self.states.append(TropicalLayerState(
            num_coef, upd.den_coef, upd.pre_coef,
            num_bias, upd.den_bias, upd.pre_bias, depth))
        lo, hi = self.offsets[depth - 1], self.offsets[depth]
        self.alphas[lo:hi] = alphas
        self.betas[lo:hi] = betas
        if not check:
            return None
        stats.lp_calls += 1
        return feasible_arrays(self.alphas[:hi], self.betas[:hi], self.box)

    def build_region(self, pattern: ActivationPattern, fe: Feasibility) -> LinearRegion:
        net = self.net
        last = self.states[-1]
        head = net.output_head
        matrix = head.weights @ (last.num_coef - last.den_coef)
        offset = head.weights @ (last.num_bias - last.den_bias) + head.bias
        total = net.total_neurons
        halfspaces = tuple(HalfSpace(self.alphas[i].copy(), self.betas[i])
                           for i in range(total))
        return LinearRegion(pattern, halfspaces, matrix, offset,
                            np.asarray(fe.witness), float(fe.radius))


def _whole_space(net: NetworkSpec) -> Feasibility:
    return Feasibility(FeasibilityStatus.FULL_DIM,
                       np.zeros(net.input_dim), RADIUS_CAP)


def find_linear_region(net: NetworkSpec, pattern: ActivationPattern,
                       bounding_box=None,
                       _stats: Optional[TraversalStats] = None) -> RegionOutcome:
    """Region for one activation pattern, or the layer where it became thin.

    Builds the tropical states layer by layer along the pattern, collecting
    one half-space per neuron, and checks full-dimensional feasibility after
    each layer; the affine map on the region is the output head composed
    with the selected numerator/denominator difference.
    """
    if pattern.widths != net.widths:
        raise ValueError(f"pattern widths {pattern.widths} do not match "
                         f"network widths {net.widths}")
    stats = _stats if _stats is not None else TraversalStats()
    walker = _Walker(net, bounding_box)
    fe = _whole_space(net)
    for depth in range(1, net.num_hidden_layers + 1):
        fe = walker.advance(depth, pattern.layer_array(depth - 1), stats)
        if not fe.is_full_dim:
            return InfeasibleRegion(pattern, depth)
    return walker.build_region(pattern, fe)


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("RELU_REGIONS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def enumerate_regions(net: NetworkSpec, *, bounding_box=None,
                      max_neurons_guard: int = 40, parallel: bool = False,
                      threads: Optional[int] = None,
                      prune: bool = True) -> RegionSet:
    """All full-dimensional regions (within the box, when one is given).

    Depth-per-layer tree traversal: layer assignments are extended in
    lexicographic order (all-inactive first) and a subtree is pruned as soon
    as the partial intersection stops being full-dimensional.  ``prune=False``
    visits every complete pattern and decides each one with a single LP on
    the full half-space set (testing hook for the pruning-soundness check).
    The result is independent of traversal order and of ``parallel``.
    """
    total = net.total_neurons
    if total > max_neurons_guard:
        raise EnumerationGuardError(total, max_neurons_guard)
    start = time.perf_counter()
    num_layers = net.num_hidden_layers
    tables = [_bit_table(w) for w in net.widths]
    stats = TraversalStats()
    regions: list[LinearRegion] = []

    if num_layers == 0:
        walker = _Walker(net, bounding_box)
        regions.append(walker.build_region(ActivationPattern(()), _whole_space(net)))
    else:
        def expand(walker: _Walker, depth: int, prefix: tuple,
                   regions_out: list, st: TraversalStats):
            leaf = depth == num_layers
            for bits in tables[depth - 1]:
                fe = walker.advance(depth, bits, st, check=prune or leaf)
                chosen = prefix + (tuple(map(bool, bits)),)
                if leaf:
                    st.patterns_visited += 1
                    if fe.is_full_dim:
                        regions_out.append(
                            walker.build_region(ActivationPattern(chosen), fe))
                elif prune and not fe.is_full_dim:
                    st.patterns_pruned_subtrees += 1
                else:
                    expand(walker, depth + 1, chosen, regions_out, st)

        n_threads = _resolve_threads(threads) if parallel else 1
        if parallel and n_threads > 1 and num_layers > 1:
            root = _Walker(net, bounding_box)
            tasks = []
            for bits in tables[0]:
                branch = root.clone()
                fe = branch.advance(1, bits, stats, check=prune)
                tasks.append((branch, (tuple(map(bool, bits)),), fe))

            def run_branch(task):
                branch, prefix, fe = task
                st = TraversalStats()
                out: list[LinearRegion] = []
                if prune and fe is not None and not fe.is_full_dim:
                    st.patterns_pruned_subtrees += 1
                else:
                    expand(branch, 2, prefix, out, st)
                return out, st

            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                for out, st in pool.map(run_branch, tasks):
                    regions.extend(out)
                    stats.merge(st)
        else:
            expand(_Walker(net, bounding_box), 1, (), regions, stats)

    regions.sort(key=lambda r: r.pattern.text)
    stats.wall_time = time.perf_counter() - start
    return RegionSet(tuple(regions), stats)


def brute_force_enumerate(net: NetworkSpec, *, bounding_box=None,
                          max_neurons_guard: int = BRUTE_FORCE_NEURON_LIMIT
                          ) -> RegionSet:
    """Oracle enumeration: every pattern evaluated independently."""
    total = net.total_neurons
    if total > max_neurons_guard:
        raise EnumerationGuardError(total, max_neurons_guard)
    start = time.perf_counter()
    stats = TraversalStats()
    regions = []
    widths = net.widths
    codes = [range(2 ** w) for w in widths]

    def pattern_of(combo) -> ActivationPattern:
        return ActivationPattern(tuple(
            tuple(map(bool, _bit_table(w)[code])) for w, code in zip(widths, combo)))

    for combo in itertools.product(*codes):
        pattern = pattern_of(combo)
        stats.patterns_visited += 1
        outcome = find_linear_region(net, pattern, bounding_box, _stats=stats)
        if isinstance(outcome, LinearRegion):
            regions.append(outcome)
    regions.sort(key=lambda r: r.pattern.text)
    stats.wall_time = time.perf_counter() - start
    return RegionSet(tuple(regions), stats)


def locate_region(net: NetworkSpec, x, bounding_box=None) -> LinearRegion:
    """Region whose closure contains ``x`` (exact zeros resolve to active).

    Raises ValueError in the measure-zero case where the tie-broken pattern
    indexes a lower-dimensional cell.
    """
    outcome = find_linear_region(net, activation_pattern(net, x), bounding_box)
    if isinstance(outcome, InfeasibleRegion):
        raise ValueError(
            f"input lies on a degenerate cell (pattern {outcome.pattern.text!r} "
            f"thin at layer {outcome.failure_layer})")
    return outcome


def region_set_to_dict(region_set: RegionSet) -> dict:
    """JSON-ready dict: regions plus traversal statistics."""
    return {
        "regions": [
            {
                "pattern": r.pattern.text,
                "halfspaces": [
                    {"alpha": hs.alpha.tolist(), "beta": hs.beta,
                     "degenerate": hs.degenerate}
                    for hs in r.halfspaces
                ],
                "affine": {"M": r.matrix.tolist(), "c": r.offset.tolist()},
                "interior_point": r.interior_point.tolist(),
                "radius": r.chebyshev_radius,
            }
            for r in region_set.regions
        ],
        "stats": {
            "patterns_visited": region_set.stats.patterns_visited,
            "patterns_pruned_subtrees": region_set.stats.patterns_pruned_subtrees,
            "lp_calls": region_set.stats.lp_calls,
            "wall_time": region_set.stats.wall_time,
        },
    }


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(values).reshape(-1))


def region_set_to_csv(region_set: RegionSet) -> str:
    """One row per region; array columns are space-separated, row-major."""
    lines = ["pattern,chebyshev_radius,interior_point,affine_matrix,affine_offset"]
    for r in region_set.regions:
        lines.append(",".join([
            r.pattern.text,
            repr(float(r.chebyshev_radius)),
            _floats(r.interior_point),
            _floats(r.matrix),
            _floats(r.offset),
        ]))
    return "\n".join(lines) + "\n"
