"""ReLU MLP data model: construction, forward evaluation, serialization.

A network is a chain of dense ReLU layers followed by an affine output head
(no activation).  Skip connections add the post-activation output of an
earlier layer to the *input* of a later hidden layer; sources and
destinations are 1-based hidden-layer indices with dst >= src + 2, and the
source width must match the destination's input width.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "NetworkValidationError",
    "DenseLayer",
    "NetworkSpec",
    "ActivationPattern",
    "ForwardTrace",
    "init_kaiming",
    "forward",
    "activation_pattern",
    "batch_pre_activations",
    "load_network",
    "loads_network",
    "save_network",
    "phi_function",
    "phi_dataset",
]

PHI_LOG_CLAMP = 1e-6  # |coordinate| floor for the log-based test function


class NetworkValidationError(ValueError):
    """Invalid network structure; ``field`` names the offending part."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DenseLayer:
    """One affine layer: ``weights @ x + bias`` (weights shape out x in)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(np.atleast_2d(self.weights)))
        object.__setattr__(self, "bias", _readonly(np.atleast_1d(self.bias)))
        if self.weights.ndim != 2:
            raise NetworkValidationError("weights", "must be a 2-D matrix")
        if self.bias.shape != (self.weights.shape[0],):
            raise NetworkValidationError(
                "bias", f"length {self.bias.shape[0]} does not match "
                f"{self.weights.shape[0]} output rows")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise NetworkValidationError("weights", "entries must be finite")

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable ReLU network: hidden layers, affine output head, skips.

    ``skips`` holds (src, dst) pairs: the post-activation output of hidden
    layer ``src`` is added to the input of hidden layer ``dst``.
    """

    input_dim: int
    hidden_layers: tuple[DenseLayer, ...]
    output_head: DenseLayer
    skips: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.input_dim < 1:
            raise NetworkValidationError("input_dim", "must be positive")
        object.__setattr__(self, "hidden_layers", tuple(self.hidden_layers))
        widths = self.widths
        prev = self.input_dim
        for i, layer in enumerate(self.hidden_layers, start=1):
            if layer.in_dim != prev:
                raise NetworkValidationError(
                    f"hidden_layers[{i}]",
                    f"expects input width {layer.in_dim}, previous layer produces {prev}")
            prev = layer.out_dim
        if self.output_head.in_dim != prev:
            raise NetworkValidationError(
                "output", f"expects input width {self.output_head.in_dim}, "
                f"last hidden layer produces {prev}")
        skips = tuple(sorted((int(s), int(d)) for s, d in self.skips))
        object.__setattr__(self, "skips", skips)
        seen = set()
        for src, dst in skips:
            name = f"skips[{src}->{dst}]"
            if (src, dst) in seen:
                raise NetworkValidationError(name, "duplicate skip pair")
            seen.add((src, dst))
            if not (1 <= src <= dst - 2):
                raise NetworkValidationError(
                    name, "requires 1 <= src <= dst - 2")
            if dst > len(self.hidden_layers):
                raise NetworkValidationError(
                    name, f"destination exceeds the {len(self.hidden_layers)} hidden layers")
            if widths[src - 1] != widths[dst - 2]:
                raise NetworkValidationError(
                    name, f"source width {widths[src - 1]} does not match "
                    f"destination input width {widths[dst - 2]}")

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(layer.out_dim for layer in self.hidden_layers)

    @property
    def num_hidden_layers(self) -> int:
        return len(self.hidden_layers)

    @property
    def total_neurons(self) -> int:
        return sum(self.widths)

    def skip_sources(self, dst: int) -> tuple[int, ...]:
        """Hidden layers whose output feeds the input of layer ``dst``."""
        return tuple(s for s, d in self.skips if d == dst)

    def without_skips(self) -> "NetworkSpec":
        return NetworkSpec(self.input_dim, self.hidden_layers, self.output_head, ())


@dataclass(frozen=True)
class ActivationPattern:
    """One active/inactive bit per hidden neuron (active = pre-activation >= 0).

    Canonical text form: per-layer bit strings ('1' = active) joined by '|',
    e.g. ``"11|01"``.
    """

    layer_bits: tuple[tuple[bool, ...], ...]
    text: str = field(init=False)

    def __post_init__(self):
        layers = tuple(tuple(bool(b) for b in layer) for layer in self.layer_bits)
        object.__setattr__(self, "layer_bits", layers)
        object.__setattr__(
            self, "text",
            "|".join("".join("1" if b else "0" for b in layer) for layer in layers))

    @classmethod
    def from_text(cls, text: str) -> "ActivationPattern":
        layers = []
        for chunk in text.split("|"):
            if chunk == "" or set(chunk) - {"0", "1"}:
                raise ValueError(f"malformed pattern text {text!r}")
            layers.append(tuple(c == "1" for c in chunk))
        return cls(tuple(layers))

    def layer_array(self, i: int) -> np.ndarray:
        return np.asarray(self.layer_bits[i], dtype=bool)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layer_bits)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class ForwardTrace:
    """Per-layer pre/post activation vectors plus the head output."""

    pre_activations: tuple[np.ndarray, ...]
    post_activations: tuple[np.ndarray, ...]
    output: np.ndarray


def init_kaiming(layer_widths: Sequence[int], input_dim: int, output_dim: int,
                 skips: Sequence[tuple[int, int]] = (), seed: int = 0) -> NetworkSpec:
    """Random network with fan-in scaled uniform init, reproducible per seed.

    Weights and biases are uniform on [-1/sqrt(fan_in), +1/sqrt(fan_in)],
    the standard dense-layer default.  The same seed always produces a
    bit-identical network.  This scale matters: the measured skip-connection
    region surplus only appears when deep-layer signals stay comparable to
    the biases; a sqrt(2)-gain init washes it out entirely.
    """
    if input_dim < 1 or output_dim < 1:
        raise NetworkValidationError("input_dim", "dimensions must be positive")
    if any(w < 1 for w in layer_widths):
        raise NetworkValidationError("layer_widths", "widths must be positive")
    rng = np.random.default_rng(seed)
    layers = []
    fan_in = input_dim
    for width in layer_widths:
        bound = 1.0 / math.sqrt(fan_in)
        weights = rng.uniform(-bound, bound, size=(width, fan_in))
        bias = rng.uniform(-bound, bound, size=width)
        layers.append(DenseLayer(weights, bias))
        fan_in = width
    bound = 1.0 / math.sqrt(fan_in)
    head = DenseLayer(rng.uniform(-bound, bound, size=(output_dim, fan_in)),
                      rng.uniform(-bound, bound, size=output_dim))
    return NetworkSpec(input_dim, tuple(layers), head, tuple(skips))


def _check_input(net: NetworkSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape != (net.input_dim,):
        raise ValueError(f"input has dimension {x.shape[0]}, expected {net.input_dim}")
    return x


def forward(net: NetworkSpec, x) -> ForwardTrace:
    """Reference forward pass; the ground-truth oracle for the whole package."""
    x = _check_input(net, x)
    pres: list[np.ndarray] = []
    posts: list[np.ndarray] = []
    for idx, layer in enumerate(net.hidden_layers, start=1):
        inp = posts[idx - 2] if idx > 1 else x
        for src in net.skip_sources(idx):
            inp = inp + posts[src - 1]
        pre = layer.weights @ inp + layer.bias
        pres.append(pre)
        posts.append(np.maximum(pre, 0.0))
    out = net.output_head.weights @ (posts[-1] if posts else x) + net.output_head.bias
    return ForwardTrace(tuple(pres), tuple(posts), out)


def activation_pattern(net: NetworkSpec, x) -> ActivationPattern:
    """Pattern of signs of the pre-activations at ``x`` (0 counts as active)."""
    trace = forward(net, x)
    return ActivationPattern(tuple(tuple(bool(v) for v in pre >= 0.0)
                                   for pre in trace.pre_activations))


def batch_pre_activations(net: NetworkSpec, xs: np.ndarray) -> list[np.ndarray]:
    """Pre-activations for a batch of inputs (rows of ``xs``), per layer.

    Vectorized companion of :func:`forward` for grid experiments; returns one
    (num_points, width) array per hidden layer.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != net.input_dim:
        raise ValueError(f"batch must have shape (*, {net.input_dim})")
    pres: list[np.ndarray] = []
    posts: list[np.ndarray] = []
    for idx, layer in enumerate(net.hidden_layers, start=1):
        inp = posts[idx - 2] if idx > 1 else xs
        for src in net.skip_sources(idx):
            inp = inp + posts[src - 1]
        pre = inp @ layer.weights.T + layer.bias
        pres.append(pre)
        posts.append(np.maximum(pre, 0.0))
    return pres


def _layer_to_doc(layer: DenseLayer) -> dict:
    return {"weights": layer.weights.tolist(), "bias": layer.bias.tolist()}


def save_network(net: NetworkSpec) -> str:
    """Canonical JSON document for a network (stable key order, sorted skips)."""
    doc = {
        "input_dim": net.input_dim,
        "hidden_layers": [_layer_to_doc(layer) for layer in net.hidden_layers],
        "output": _layer_to_doc(net.output_head),
        "skips": [{"from": s, "to": d} for s, d in net.skips],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _layer_from_doc(doc, field_name: str) -> DenseLayer:
    if not isinstance(doc, dict) or "weights" not in doc or "bias" not in doc:
        raise NetworkValidationError(field_name, "must contain 'weights' and 'bias'")
    try:
        return DenseLayer(np.asarray(doc["weights"], dtype=np.float64),
                          np.asarray(doc["bias"], dtype=np.float64))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NetworkValidationError):
            raise NetworkValidationError(f"{field_name}.{exc.field}", str(exc)) from exc
        raise NetworkValidationError(field_name, f"malformed matrix data: {exc}") from exc


def loads_network(text: str) -> NetworkSpec:
    """Parse and validate a network document; see :func:`save_network`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkValidationError("document", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkValidationError("document", "top level must be an object")
    for key in ("input_dim", "hidden_layers", "output"):
        if key not in doc:
            raise NetworkValidationError(key, "missing required field")
    if not isinstance(doc["input_dim"], int):
        raise NetworkValidationError("input_dim", "must be an integer")
    layers = tuple(_layer_from_doc(d, f"hidden_layers[{i}]")
                   for i, d in enumerate(doc["hidden_layers"], start=1))
    head = _layer_from_doc(doc["output"], "output")
    skips = []
    for i, entry in enumerate(doc.get("skips", [])):
        if not isinstance(entry, dict) or "from" not in entry or "to" not in entry:
            raise NetworkValidationError(f"skips[{i}]", "must contain 'from' and 'to'")
        skips.append((entry["from"], entry["to"]))
    return NetworkSpec(doc["input_dim"], layers, head, tuple(skips))


def load_network(path) -> NetworkSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_network(fh.read())


def phi_function(which: int):
    """Synthetic 2-D regression targets used by the grid experiments."""
    if which == 1:
        def phi1(x: float, y: float) -> float:
            ax = max(abs(x), PHI_LOG_CLAMP)
            ay = max(abs(y), PHI_LOG_CLAMP)
            return math.sin(math.log(ax) + math.log(ay))
        return phi1
    if which == 2:
        def phi2(x: float, y: float) -> float:
            r = math.hypot(x, y)
            return math.sin(r) / r if r > 0.0 else 1.0
        return phi2
    if which == 3:
        return lambda x, y: math.sin(math.cos(x / 2.0)) * math.sin(math.cos(y / 2.0))
    if which == 4:
        return lambda x, y: math.sin(math.tan(x / 2.0)) * math.sin(math.tan(y / 2.0))
    raise ValueError(f"unknown function index {which}; expected 1..4")


def phi_dataset(which: int, grid_start: float, grid_step: float,
                grid_len: int) -> list[tuple[tuple[float, float], float]]:
    """Samples ((x, y), z) of the selected function on a uniform square grid.

    Points are ordered row-major: x varies in the outer loop, y in the inner.
    """
    if not (math.isfinite(grid_start) and math.isfinite(grid_step)):
        raise ValueError("grid parameters must be finite")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if grid_len < 1:
        raise ValueError("grid_len must be positive")
    fn = phi_function(which)
    coords = [grid_start + i * grid_step for i in range(grid_len)]
    return [((x, y), fn(x, y)) for x in coords for y in coords]
