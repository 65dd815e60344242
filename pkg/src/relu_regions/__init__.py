"""Exact linear-region analysis of ReLU networks with skip connections.

The package enumerates every linear region of a ReLU feed-forward network
(optionally with additive skip connections), extracts each region's
bounding half-spaces and affine map, caches per-region maps for fast
prediction, and ships the region-count experiment harness and SVG plots.
"""

from .cache import RegionCache, hit_rate, predict, warm_cache
from .geometry import (Feasibility, FeasibilityStatus, LpInconclusiveError,
                       clip_to_polygon, feasible, lp_backend_name, polygon_area)
from .network import (ActivationPattern, DenseLayer, ForwardTrace, NetworkSpec,
                      NetworkValidationError, activation_pattern, forward,
                      init_kaiming, load_network, loads_network, phi_dataset,
                      save_network)
from .regions import (EnumerationGuardError, HalfSpace, InfeasibleRegion,
                      LinearRegion, RegionSet, brute_force_enumerate,
                      enumerate_regions, find_linear_region, locate_region)
from .stats import UTestResult, mann_whitney_one_tailed, summarize
from .tropical import (SignedSplit, TropicalLayerState, initial_state,
                       propagate, select_numerator, split_pos_neg)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ActivationPattern", "DenseLayer", "ForwardTrace", "NetworkSpec",
    "NetworkValidationError", "activation_pattern", "forward", "init_kaiming",
    "load_network", "loads_network", "phi_dataset", "save_network",
    "SignedSplit", "TropicalLayerState", "initial_state", "propagate",
    "select_numerator", "split_pos_neg",
    "Feasibility", "FeasibilityStatus", "LpInconclusiveError", "clip_to_polygon",
    "feasible", "lp_backend_name", "polygon_area",
    "EnumerationGuardError", "HalfSpace", "InfeasibleRegion", "LinearRegion",
    "RegionSet", "brute_force_enumerate", "enumerate_regions",
    "find_linear_region", "locate_region",
    "RegionCache", "hit_rate", "predict", "warm_cache",
    "UTestResult", "mann_whitney_one_tailed", "summarize",
]
