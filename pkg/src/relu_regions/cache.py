"""Per-region affine-map caching for fast prediction.

A query point certifies that its own region is nonempty, so deriving the
affine map for a new pattern needs only the tropical recurrences along that
pattern -- no feasibility LP.  Cache keys are canonical pattern strings
('1' = positive pre-activation).

Concurrent use is safe: values for a key are identical (re-derivation is
deterministic), so last-write-wins inserts are harmless; hit/miss counters
are monotonic and may undercount under races.
"""

from __future__ import annotations

import json

import numpy as np

from .network import (ActivationPattern, NetworkSpec, activation_pattern,
                      batch_pre_activations)
from .tropical import (TropicalLayerState, initial_state, propagate,
                       select_numerator)

__all__ = [
    "CacheCapacityError",
    "RegionCache",
    "affine_map_for_pattern",
    "predict",
    "warm_cache",
    "cached_fraction",
    "hit_rate",
    "save_cache",
    "load_cache",
]


class CacheCapacityError(RuntimeError):
    """Raised instead of evicting when a max-entries guard is set."""


class RegionCache:
    """Map from pattern text to the (matrix, offset) affine map."""

    def __init__(self, max_entries: int | None = None):
        self._entries: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, pattern_text: str) -> bool:
        return pattern_text in self._entries

    def get(self, pattern_text: str):
        return self._entries.get(pattern_text)

    def insert(self, pattern_text: str, matrix: np.ndarray, offset: np.ndarray):
        if (self.max_entries is not None and pattern_text not in self._entries
                and len(self._entries) >= self.max_entries):
            raise CacheCapacityError(
                f"cache holds {len(self._entries)} entries (limit {self.max_entries})")
        self._entries[pattern_text] = (matrix, offset)

    def items(self):
        return self._entries.items()


def affine_map_for_pattern(net: NetworkSpec, pattern: ActivationPattern
                           ) -> tuple[np.ndarray, np.ndarray]:
    """End-to-end affine map on the pattern's cell, no feasibility check."""
    if pattern.widths != net.widths:
        raise ValueError(f"pattern widths {pattern.widths} do not match "
                         f"network widths {net.widths}")
    states = [initial_state(net.input_dim)]
    for depth, layer in enumerate(net.hidden_layers, start=1):
        upd = propagate(states[-1], layer.weights, layer.bias,
                        [states[s] for s in net.skip_sources(depth)])
        num_coef, num_bias, _, _ = select_numerator(upd, pattern.layer_array(depth - 1))
        states.append(TropicalLayerState(num_coef, upd.den_coef, upd.pre_coef,
                                         num_bias, upd.den_bias, upd.pre_bias, depth))
    last = states[-1]
    head = net.output_head
    matrix = head.weights @ (last.num_coef - last.den_coef)
    offset = head.weights @ (last.num_bias - last.den_bias) + head.bias
    return matrix, offset


def predict(net: NetworkSpec, cache: RegionCache, x) -> np.ndarray:
    """Network output at ``x`` via the cached affine map of its region."""
    pattern = activation_pattern(net, x)
    entry = cache.get(pattern.text)
    if entry is None:
        cache.misses += 1
        entry = affine_map_for_pattern(net, pattern)
        cache.insert(pattern.text, *entry)
    else:
        cache.hits += 1
    matrix, offset = entry
    return matrix @ np.asarray(x, dtype=np.float64) + offset


def _pattern_texts(net: NetworkSpec, points) -> list[str]:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, net.input_dim)
    if pts.shape[0] == 0:
        return []
    layer_strings = []
    for pre in batch_pre_activations(net, pts):
        chars = np.where(pre >= 0.0, "1", "0")
        layer_strings.append(["".join(row) for row in chars])
    return ["|".join(layers) for layers in zip(*layer_strings)]


def warm_cache(net: NetworkSpec, points) -> RegionCache:
    """Cache keyed by every distinct activation pattern among ``points``."""
    cache = RegionCache()
    for text in _pattern_texts(net, points):
        if text not in cache:
            pattern = ActivationPattern.from_text(text)
            cache.insert(text, *affine_map_for_pattern(net, pattern))
    return cache


def cached_fraction(net: NetworkSpec, cache: RegionCache, points) -> float:
    """Fraction of ``points`` whose activation pattern is already cached."""
    texts = _pattern_texts(net, points)
    if not texts:
        return 0.0
    return sum(1 for t in texts if t in cache) / len(texts)


def hit_rate(net: NetworkSpec, train_points, test_points) -> float:
    """Fraction of test points whose region was seen among the train points."""
    return cached_fraction(net, warm_cache(net, train_points), test_points)


def save_cache(cache: RegionCache) -> str:
    """JSON text: {pattern: {"M": [[..]], "c": [..]}}."""
    doc = {text: {"M": m.tolist(), "c": c.tolist()}
           for text, (m, c) in sorted(cache.items())}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_cache(text: str) -> RegionCache:
    doc = json.loads(text)
    cache = RegionCache()
    for pattern_text, entry in doc.items():
        cache.insert(pattern_text,
                     np.asarray(entry["M"], dtype=np.float64),
                     np.asarray(entry["c"], dtype=np.float64))
    return cache
