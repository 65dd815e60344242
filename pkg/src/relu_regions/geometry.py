"""Polyhedron feasibility and 2-D polygon extraction.

Feasibility is decided by the capped Chebyshev-center LP: a region is
full-dimensional exactly when a ball of radius > FEASIBILITY_TOL fits
inside it.  The LP runs on the compiled kernel when the extension built,
otherwise on the pure-Python twin; set RELU_REGIONS_PURE_LP=1 to force the
fallback.

All numeric policy constants of the package live here.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "FEASIBILITY_TOL",
    "DEGENERATE_ROW_TOL",
    "EQUALITY_TOL",
    "RADIUS_CAP",
    "LpInconclusiveError",
    "FeasibilityStatus",
    "Feasibility",
    "lp_backend_name",
    "feasible",
    "feasible_arrays",
    "clip_to_polygon",
    "polygon_area",
]

FEASIBILITY_TOL = 1e-7     # Chebyshev radius above which a cell is full-dim
DEGENERATE_ROW_TOL = 1e-12  # ||alpha||_inf below which a half-space is degenerate
EQUALITY_TOL = 1e-9        # relative tolerance for affine-map comparisons
RADIUS_CAP = 1.0           # cap on the certified radius (regions may be unbounded)

if os.environ.get("RELU_REGIONS_PURE_LP"):
    from . import _feaslp_py as _lp
else:
    try:
        from . import _feaslp as _lp  # type: ignore[attr-defined]
    except ImportError:
        from . import _feaslp_py as _lp


def lp_backend_name() -> str:
    """'compiled' or 'pure-python', as selected at import time."""
    return _lp.BACKEND_NAME


class LpInconclusiveError(RuntimeError):
    """The LP stalled or failed verification; feasibility is unknown."""


class FeasibilityStatus(enum.Enum):
    FULL_DIM = "full_dim"
    DEGENERATE = "degenerate"
    EMPTY = "empty"


@dataclass(frozen=True)
class Feasibility:
    """Outcome of a feasibility query.

    For FULL_DIM the witness strictly satisfies every non-degenerate
    half-space with margin at least radius * ||alpha||_2 (up to 1e-9).
    """

    status: FeasibilityStatus
    witness: Optional[np.ndarray]
    radius: Optional[float]

    @property
    def is_full_dim(self) -> bool:
        return self.status is FeasibilityStatus.FULL_DIM


def _coerce_halfspaces(halfspaces: Sequence) -> tuple[np.ndarray, np.ndarray]:
    alphas = []
    betas = []
    for hs in halfspaces:
        if hasattr(hs, "alpha"):
            alphas.append(np.asarray(hs.alpha, dtype=np.float64))
            betas.append(float(hs.beta))
        else:
            alpha, beta = hs
            alphas.append(np.asarray(alpha, dtype=np.float64))
            betas.append(float(beta))
    if not alphas:
        raise ValueError("cannot infer dimension from an empty half-space list; "
                         "use feasible_arrays with an explicit width")
    return np.vstack(alphas), np.asarray(betas)


def _coerce_box(bounding_box, n: int):
    if bounding_box is None:
        return None, None
    box = [(float(lo), float(hi)) for lo, hi in bounding_box]
    if len(box) != n:
        raise ValueError(f"bounding box has {len(box)} dimensions, expected {n}")
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    if not (lo < hi).all():
        raise ValueError("bounding box must satisfy lo < hi in every dimension")
    return lo, hi


def feasible_arrays(alphas: np.ndarray, betas: np.ndarray,
                    bounding_box=None) -> Feasibility:
    """Array fast path: rows of ``alphas`` with matching ``betas``."""
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    lo, hi = _coerce_box(bounding_box, alphas.shape[1])
    code, t_star, witness, _ = _lp.solve_chebyshev(
        alphas, betas, lo, hi, DEGENERATE_ROW_TOL, RADIUS_CAP)
    if code == 1:
        return Feasibility(FeasibilityStatus.EMPTY, None, None)
    if code == 2:
        raise LpInconclusiveError(
            "feasibility LP hit its iteration cap; result would be unreliable")
    if code == 3:
        raise LpInconclusiveError(
            "feasibility LP solution failed verification; result would be unreliable")
    if t_star > FEASIBILITY_TOL:
        return Feasibility(FeasibilityStatus.FULL_DIM, np.asarray(witness),
                           float(t_star))
    if t_star < -FEASIBILITY_TOL:
        return Feasibility(FeasibilityStatus.EMPTY, None, None)
    return Feasibility(FeasibilityStatus.DEGENERATE, np.asarray(witness),
                       max(float(t_star), 0.0))


def feasible(halfspaces: Sequence, bounding_box=None) -> Feasibility:
    """Classify the intersection of half-spaces ``alpha . x + beta <= 0``.

    ``halfspaces`` may hold objects with ``.alpha``/``.beta`` or plain
    (alpha, beta) pairs.  ``bounding_box`` is a per-dimension (lo, hi)
    sequence whose 2n face constraints join every feasibility check.
    """
    alphas, betas = _coerce_halfspaces(halfspaces)
    return feasible_arrays(alphas, betas, bounding_box)


def _clip_by_halfplane(poly: list[np.ndarray], alpha: np.ndarray,
                       beta: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    k = len(poly)
    for i in range(k):
        p = poly[i]
        q = poly[(i + 1) % k]
        fp = float(alpha @ p + beta)
        fq = float(alpha @ q + beta)
        p_in = fp <= 0.0
        q_in = fq <= 0.0
        if p_in:
            out.append(p)
        if p_in != q_in:
            s = fp / (fp - fq)
            out.append(p + s * (q - p))
    return out


def clip_to_polygon(halfspaces: Sequence, box) -> list[tuple[float, float]]:
    """Intersect 2-D half-spaces with a rectangle; CCW vertices, or [] if flat.

    ``box`` is ((xlo, xhi), (ylo, yhi)).  Uses successive half-plane clipping
    of the rectangle, so the result is a convex polygon.
    """
    (xlo, xhi), (ylo, yhi) = box
    poly = [np.array(p, dtype=np.float64)
            for p in ((xlo, ylo), (xhi, ylo), (xhi, yhi), (xlo, yhi))]
    if halfspaces:
        alphas, betas = _coerce_halfspaces(halfspaces)
        if alphas.shape[1] != 2:
            raise ValueError("polygon clipping requires 2-D half-spaces")
        for alpha, beta in zip(alphas, betas):
            if np.abs(alpha).max() <= DEGENERATE_ROW_TOL:
                if beta > DEGENERATE_ROW_TOL:
                    return []
                continue
            poly = _clip_by_halfplane(poly, alpha, float(beta))
            if len(poly) < 3:
                return []
    # A cut through an existing vertex emits it twice; drop near-duplicates.
    tol = 1e-12 * max(xhi - xlo, yhi - ylo)
    deduped: list[np.ndarray] = []
    for p in poly:
        if not deduped or np.abs(p - deduped[-1]).max() > tol:
            deduped.append(p)
    while len(deduped) > 1 and np.abs(deduped[0] - deduped[-1]).max() <= tol:
        deduped.pop()
    verts = [(float(p[0]), float(p[1])) for p in deduped]
    if len(verts) < 3 or polygon_area(verts) <= 1e-12 * (xhi - xlo) * (yhi - ylo):
        return []
    return verts


def polygon_area(vertices: Sequence[tuple[float, float]]) -> float:
    """Shoelace area of a simple polygon (nonnegative)."""
    if len(vertices) < 3:
        return 0.0
    total = 0.0
    k = len(vertices)
    for i in range(k):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % k]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0
