"""Pure-Python (numpy) feasibility-LP kernel.

Solves, for half-spaces ``alpha_j . x + beta_j <= 0`` and an optional box,

    maximize t  s.t.  alpha_j . x + beta_j + t * ||alpha_j||_2 <= 0,
                      box rows,  t <= radius_cap

i.e. the Chebyshev-center program with the radius capped so that unbounded
regions still yield a finite certificate.  t* > 0 gives an interior ball of
radius t*; t* <= 0 means the region is thin or empty.

The program is always feasible (t -> -inf works once zero rows are
stripped), so we solve its dual -- ``min h'y : G'y = c, y >= 0`` with only
n+1 equality rows -- by a two-phase tableau simplex.  The optimal primal
point (x*, t*) is recovered from the simplex multipliers, read off the
artificial columns of the final objective row.  Dantzig pricing switches to
Bland's rule after a fixed number of pivots so degenerate instances cannot
cycle.

The compiled kernel in ``_feaslp.pyx`` implements the same algorithm with
the same pivot choices and tolerances; keep the two in sync.

Return codes (shared with the compiled kernel):
    0  solved: (t, witness) valid
    1  empty by an infeasible zero-normal row (no LP run)
    2  inconclusive: iteration cap hit
    3  inconclusive: solution failed verification
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure-python"

_PIVOT_EPS = 1e-10
_COST_EPS = 1e-9
_VERIFY_TOL = 1e-8
_PHASE1_TOL = 1e-7


def solve_chebyshev(alphas: np.ndarray, betas: np.ndarray,
                    box_lo=None, box_hi=None,
                    degen_tol: float = 1e-12, radius_cap: float = 1.0):
    """Returns (code, t, witness, lp_pivots); see module docstring."""
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    if alphas.ndim != 2:
        raise ValueError("alphas must be 2-D")
    m, n = alphas.shape
    if betas.shape != (m,):
        raise ValueError("betas length does not match alphas rows")

    # Zero-normal rows: trivially true if beta <= tol, otherwise the whole
    # intersection is empty and no LP is needed.
    if m:
        inf_norms = np.abs(alphas).max(axis=1)
        degenerate = inf_norms <= degen_tol
        if degenerate.any() and (betas[degenerate] > degen_tol).any():
            return 1, -np.inf, None, 0
        keep = ~degenerate
        a = alphas[keep]
        b = betas[keep]
        norms = np.sqrt(np.einsum("ij,ij->i", a, a))
        a = a / norms[:, None]
        b = b / norms
    else:
        a = np.zeros((0, n))
        b = np.zeros(0)

    # Primal rows G @ (x, t) <= h in R^{n+1}.
    blocks_g = [np.hstack([a, np.ones((a.shape[0], 1))])]
    blocks_h = [-b]
    if box_lo is not None:
        eye = np.eye(n)
        ones = np.ones((n, 1))
        blocks_g.append(np.hstack([eye, ones]))
        blocks_h.append(np.asarray(box_hi, dtype=np.float64))
        blocks_g.append(np.hstack([-eye, ones]))
        blocks_h.append(-np.asarray(box_lo, dtype=np.float64))
    cap_row = np.zeros((1, n + 1))
    cap_row[0, n] = 1.0
    blocks_g.append(cap_row)
    blocks_h.append(np.array([radius_cap]))
    g = np.vstack(blocks_g)
    h = np.concatenate(blocks_h)
    mp = g.shape[0]

    scale = max(1.0, float(np.abs(h).max()))
    cost_eps = _COST_EPS * scale

    # Dual tableau: rows 0..n are the n+1 equality constraints G'y = e_t,
    # row n+1 the phase-2 reduced costs, row n+2 the phase-1 reduced costs.
    nrows = n + 1
    zrow2 = nrows
    zrow1 = nrows + 1
    ncols = mp + nrows + 1
    t = np.zeros((nrows + 2, ncols))
    t[:nrows, :mp] = g.T
    t[:nrows, mp:mp + nrows] = np.eye(nrows)
    t[n, -1] = 1.0
    t[zrow2, :mp] = h
    t[zrow1, :mp] = -g.T.sum(axis=0)
    t[zrow1, -1] = -1.0

    basis = np.arange(mp, mp + nrows)
    dantzig_limit = 100 + 10 * (mp + nrows)
    iter_limit = 1000 + 100 * (mp + nrows)
    pivots = 0

    def pivot(pr: int, pc: int):
        t[pr, :] *= 1.0 / t[pr, pc]  # reciprocal-multiply, as in the C kernel
        col = t[:, pc].copy()
        col[pr] = 0.0
        t[:, :] -= np.outer(col, t[pr, :])
        basis[pr] = pc

    def ratio_row(pc: int):
        best = -1
        best_ratio = 0.0
        for i in range(nrows):
            coeff = t[i, pc]
            if coeff <= _PIVOT_EPS:
                continue
            ratio = t[i, -1] / coeff
            if best < 0 or ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15 and basis[i] < basis[best]):
                best = i
                best_ratio = ratio
        return best

    def run_phase(zrow: int) -> int:
        nonlocal pivots
        while True:
            if pivots >= iter_limit:
                return 2
            bland = pivots >= dantzig_limit
            pc = -1
            best_cost = -cost_eps
            for j in range(mp):
                rj = t[zrow, j]
                if rj < best_cost:
                    pc = j
                    if bland:
                        break
                    best_cost = rj
            if pc < 0:
                return 0
            pr = ratio_row(pc)
            if pr < 0:
                return 2  # unbounded: cannot happen for well-posed input
            pivot(pr, pc)
            pivots += 1

    status = run_phase(zrow1)
    if status:
        return status, np.nan, None, pivots
    if abs(t[zrow1, -1]) > _PHASE1_TOL * scale:
        return 2, np.nan, None, pivots

    # Drive leftover artificials out of the basis; rows whose structural
    # entries are all zero are redundant equations and stay inert.
    for i in range(nrows):
        if basis[i] >= mp:
            for j in range(mp):
                if abs(t[i, j]) > _PIVOT_EPS:
                    pivot(i, j)
                    pivots += 1
                    break

    status = run_phase(zrow2)
    if status:
        return status, np.nan, None, pivots

    multipliers = -t[zrow2, mp:mp + nrows]
    t_star = multipliers[n]
    witness = multipliers[:n].copy()

    objective = -t[zrow2, -1]
    if abs(t_star - objective) > 1e-6 * scale:
        return 3, t_star, witness, pivots
    residual = g @ multipliers - h
    if residual.size and residual.max() > _VERIFY_TOL * scale:
        return 3, t_star, witness, pivots
    return 0, float(t_star), witness, pivots
