import numpy as np
import pytest

from relu_regions import DenseLayer, NetworkSpec, init_kaiming


@pytest.fixture
def demo_net() -> NetworkSpec:
    """2-2-2-1 network with hand-verified region structure.

    At x = (0.4, 0.2): layer-1 output (0.6, 1.2), layer-2 pre-activations
    (-5.2, 3.55), pattern "11|01", and the region of that pattern is bounded
    by 4x-y<=2, 4x+y<=3, 20x-11y<=11, -2x+10y<=4.75.
    """
    return NetworkSpec(
        input_dim=2,
        hidden_layers=(
            DenseLayer([[-4.0, 1.0], [-4.0, -1.0]], [2.0, 3.0]),
            DenseLayer([[-8.0, 3.0], [-21.0 / 4.0, 19.0 / 4.0]], [-4.0, 1.0]),
        ),
        output_head=DenseLayer([[1.0, 1.0]], [0.0]),
    )


def random_networks(count: int, seed0: int = 500, with_skips: bool = True):
    """Small random nets (first layer >= 3 wide) for property batteries."""
    configs = [
        ([3, 2], ()), ([3, 3], ()), ([4, 3], ()), ([4, 4], ()),
        ([3, 3, 2], ()), ([4, 4, 4], ()), ([4, 3, 2], ()),
    ]
    if with_skips:
        configs += [([3, 3, 2], ((1, 3),)), ([4, 4, 4], ((1, 3),)),
                    ([3, 3, 3], ((1, 3),)), ([4, 4, 2], ((1, 3),))]
    nets = []
    for i in range(count):
        widths, skips = configs[i % len(configs)]
        nets.append(init_kaiming(widths, 2, 1, skips, seed0 + i))
    return nets


def rel_err(actual, expected) -> float:
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    denom = 1.0 + np.abs(expected)
    return float(np.max(np.abs(actual - expected) / denom)) if actual.size else 0.0
