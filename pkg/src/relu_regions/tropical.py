"""Tropical-rational decomposition of ReLU layers.

Every layer output is a tropical rational function: post-activation
``nu = num - den`` where, restricted to one activation cell, ``num``,
``den`` and the pre-activation numerator ``pre`` are affine in the network
input x.  Each is stored in coefficient form, e.g. ``num_coef @ x +
num_bias``.  Two facts drive everything downstream:

* ``pre - den`` equals the layer's pre-activation, so the hyperplanes
  ``(pre_coef - den_coef) x + (pre_bias - den_bias) = 0`` are exactly the
  neuron boundaries given the upstream cell choice;
* picking ``num`` row-wise from ``pre`` (active neuron) or ``den``
  (inactive neuron) restricts ``max(pre, den)`` to the chosen cell.

Skip connections add the source layers' post-activation maps
(``num - den`` of each source) to a layer's input, which contributes
through the positive/negative split of the weight matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "SignedSplit",
    "TropicalLayerState",
    "LayerUpdate",
    "split_pos_neg",
    "initial_state",
    "propagate",
    "select_numerator",
]


@dataclass(frozen=True)
class SignedSplit:
    """Decomposition A = plus - minus with disjoint nonnegative parts."""

    plus: np.ndarray
    minus: np.ndarray


def split_pos_neg(a: np.ndarray) -> SignedSplit:
    a = np.asarray(a, dtype=np.float64)
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return SignedSplit(np.maximum(a, 0.0), np.maximum(-a, 0.0))


@dataclass(frozen=True)
class TropicalLayerState:
    """Affine coefficients of num/den/pre for one layer along a cell choice.

    Shapes: coefficient matrices are (layer_width, input_dim), bias vectors
    (layer_width,).  ``layer_index`` 0 is the identity state for the input
    itself (num = pre = x, den = 0).
    """

    num_coef: np.ndarray
    den_coef: np.ndarray
    pre_coef: np.ndarray
    num_bias: np.ndarray
    den_bias: np.ndarray
    pre_bias: np.ndarray
    layer_index: int

    def post_activation_at(self, x: np.ndarray) -> np.ndarray:
        """num - den evaluated at x; equals the layer output on the cell."""
        return (self.num_coef - self.den_coef) @ x + (self.num_bias - self.den_bias)

    def pre_activation_at(self, x: np.ndarray) -> np.ndarray:
        """pre - den evaluated at x; equals the layer pre-activation on the cell."""
        return (self.pre_coef - self.den_coef) @ x + (self.pre_bias - self.den_bias)


class LayerUpdate(NamedTuple):
    """den/pre parts of the next layer, before the cell choice is made."""

    den_coef: np.ndarray
    pre_coef: np.ndarray
    den_bias: np.ndarray
    pre_bias: np.ndarray


def initial_state(input_dim: int) -> TropicalLayerState:
    """Identity state: the 'layer 0' output is the input itself."""
    if input_dim < 1:
        raise ValueError("input_dim must be positive")
    eye = np.eye(input_dim)
    zero_m = np.zeros((input_dim, input_dim))
    zero_v = np.zeros(input_dim)
    return TropicalLayerState(eye, zero_m, eye, zero_v, zero_v, zero_v, 0)


def propagate(prev: TropicalLayerState, weights: np.ndarray, bias: np.ndarray,
              skip_states: Sequence[TropicalLayerState] = ()) -> LayerUpdate:
    """Advance den/pre one layer through ``weights @ (.) + bias``.

    ``skip_states`` are the states of the layers whose post-activation output
    is added to this layer's input; an empty list gives the plain recurrence:

        den' = A+ @ den + A- @ num        pre' = A+ @ num + A- @ den + b

    and each skip source contributes its post-activation map (num - den)
    through A- into den' and through A+ into pre'.
    """
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    n = prev.num_coef.shape[0]
    if weights.ndim != 2 or weights.shape[1] != n:
        raise ValueError(f"weights expect input width {weights.shape[-1]}, "
                         f"state provides {n}")
    split = split_pos_neg(weights)
    ap, am = split.plus, split.minus

    den_coef = ap @ prev.den_coef + am @ prev.num_coef
    pre_coef = ap @ prev.num_coef + am @ prev.den_coef
    den_bias = ap @ prev.den_bias + am @ prev.num_bias
    pre_bias = ap @ prev.num_bias + am @ prev.den_bias + bias

    if skip_states:
        post_coef = sum(s.num_coef - s.den_coef for s in skip_states)
        post_bias = sum(s.num_bias - s.den_bias for s in skip_states)
        den_coef = den_coef + am @ post_coef
        pre_coef = pre_coef + ap @ post_coef
        den_bias = den_bias + am @ post_bias
        pre_bias = pre_bias + ap @ post_bias

    return LayerUpdate(den_coef, pre_coef, den_bias, pre_bias)


def select_numerator(update: LayerUpdate, active_bits: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Restrict the layer to one activation cell.

    Returns (num_coef, num_bias, alphas, betas): the numerator rows picked
    per neuron (pre row if active, den row if inactive) and the bounding
    half-spaces ``alphas[i] . x + betas[i] <= 0`` that carve out the cell.
    An active neuron contributes -(pre - den) <= 0, an inactive one
    (pre - den) <= 0.
    """
    bits = np.asarray(active_bits, dtype=bool)
    if bits.shape != (update.den_coef.shape[0],):
        raise ValueError(f"expected {update.den_coef.shape[0]} bits, got {bits.shape}")
    boundary_coef = update.pre_coef - update.den_coef
    boundary_bias = update.pre_bias - update.den_bias
    sign = np.where(bits, -1.0, 1.0)
    alphas = sign[:, None] * boundary_coef
    betas = sign * boundary_bias
    num_coef = np.where(bits[:, None], update.pre_coef, update.den_coef)
    num_bias = np.where(bits, update.pre_bias, update.den_bias)
    return num_coef, num_bias, alphas, betas
