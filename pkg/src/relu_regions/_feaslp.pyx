# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled feasibility-LP kernel.

Hand-typed translation of ``_feaslp_py.solve_chebyshev``: same tableau
layout, pivot rules, tolerances and return codes.  Any change here must be
mirrored in the pure backend (the test suite cross-checks the two on random
batteries).
"""

from libc.math cimport fabs, sqrt, INFINITY, NAN

import numpy as np

BACKEND_NAME = "compiled"

cdef double _PIVOT_EPS = 1e-10
cdef double _COST_EPS = 1e-9
cdef double _VERIFY_TOL = 1e-8
cdef double _PHASE1_TOL = 1e-7


cdef void _pivot(double[:, ::1] t, Py_ssize_t[::1] basis, Py_ssize_t nrows2,
                 Py_ssize_t ncols, Py_ssize_t pr, Py_ssize_t pc) noexcept nogil:
    cdef Py_ssize_t r, j
    cdef double inv = 1.0 / t[pr, pc]
    cdef double factor
    for j in range(ncols):
        t[pr, j] = t[pr, j] * inv
    for r in range(nrows2):
        if r == pr:
            continue
        factor = t[r, pc]
        if factor == 0.0:
            continue
        for j in range(ncols):
            t[r, j] = t[r, j] - factor * t[pr, j]
    basis[pr] = pc


cdef Py_ssize_t _ratio_row(double[:, ::1] t, Py_ssize_t[::1] basis,
                           Py_ssize_t nrows, Py_ssize_t ncols,
                           Py_ssize_t pc) noexcept nogil:
    cdef Py_ssize_t i, best = -1
    cdef double coeff, ratio, best_ratio = 0.0
    for i in range(nrows):
        coeff = t[i, pc]
        if coeff <= _PIVOT_EPS:
            continue
        ratio = t[i, ncols - 1] / coeff
        if best < 0 or ratio < best_ratio - 1e-15 or (
                fabs(ratio - best_ratio) <= 1e-15 and basis[i] < basis[best]):
            best = i
            best_ratio = ratio
    return best


cdef int _run_phase(double[:, ::1] t, Py_ssize_t[::1] basis,
                    Py_ssize_t nrows, Py_ssize_t ncols, Py_ssize_t mp,
                    Py_ssize_t zrow, double cost_eps,
                    Py_ssize_t dantzig_limit, Py_ssize_t iter_limit,
                    Py_ssize_t *pivots) noexcept nogil:
    cdef Py_ssize_t pc, pr, j
    cdef double best_cost, rj
    cdef bint bland
    while True:
        if pivots[0] >= iter_limit:
            return 2
        bland = pivots[0] >= dantzig_limit
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
        pr = _ratio_row(t, basis, nrows, ncols, pc)
        if pr < 0:
            return 2
        _pivot(t, basis, nrows + 2, ncols, pr, pc)
        pivots[0] += 1


def solve_chebyshev(alphas, betas, box_lo=None, box_hi=None,
                    double degen_tol=1e-12, double radius_cap=1.0):
    """Returns (code, t, witness, lp_pivots); see the pure backend docstring."""
    cdef double[:, ::1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(betas, dtype=np.float64)
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    if b.shape[0] != m:
        raise ValueError("betas length does not match alphas rows")

    cdef Py_ssize_t i, j, kept = 0
    cdef double inf_norm, v
    for i in range(m):
        inf_norm = 0.0
        for j in range(n):
            v = fabs(a[i, j])
            if v > inf_norm:
                inf_norm = v
        if inf_norm <= degen_tol:
            if b[i] > degen_tol:
                return 1, -INFINITY, None, 0
        else:
            kept += 1

    cdef bint has_box = box_lo is not None
    cdef double[::1] lo, hi
    if has_box:
        lo = np.ascontiguousarray(box_lo, dtype=np.float64)
        hi = np.ascontiguousarray(box_hi, dtype=np.float64)

    cdef Py_ssize_t mp = kept + (2 * n if has_box else 0) + 1
    cdef Py_ssize_t nrows = n + 1
    cdef Py_ssize_t zrow2 = nrows
    cdef Py_ssize_t zrow1 = nrows + 1
    cdef Py_ssize_t ncols = mp + nrows + 1

    t_arr = np.zeros((nrows + 2, ncols), dtype=np.float64)
    g_arr = np.zeros((mp, nrows), dtype=np.float64)
    h_arr = np.zeros(mp, dtype=np.float64)
    basis_arr = np.empty(nrows, dtype=np.intp)
    cdef double[:, ::1] t = t_arr
    cdef double[:, ::1] g0 = g_arr
    cdef double[::1] h0 = h_arr
    cdef Py_ssize_t[::1] basis = basis_arr

    # Tableau columns are primal rows: kept half-spaces (unit normal),
    # box rows, radius cap; then artificial columns, then the RHS e_t.
    cdef Py_ssize_t k = 0
    cdef double norm, scale = 1.0
    for i in range(m):
        inf_norm = 0.0
        for j in range(n):
            v = fabs(a[i, j])
            if v > inf_norm:
                inf_norm = v
        if inf_norm <= degen_tol:
            continue
        norm = 0.0
        for j in range(n):
            norm += a[i, j] * a[i, j]
        norm = sqrt(norm)
        for j in range(n):
            v = a[i, j] / norm
            t[j, k] = v
            g0[k, j] = v
        t[n, k] = 1.0
        g0[k, n] = 1.0
        v = -b[i] / norm
        h0[k] = v
        t[zrow2, k] = v
        if fabs(v) > scale:
            scale = fabs(v)
        k += 1
    if has_box:
        for i in range(n):
            t[i, k] = 1.0
            t[n, k] = 1.0
            g0[k, i] = 1.0
            g0[k, n] = 1.0
            h0[k] = hi[i]
            t[zrow2, k] = hi[i]
            if fabs(hi[i]) > scale:
                scale = fabs(hi[i])
            k += 1
            t[i, k] = -1.0
            t[n, k] = 1.0
            g0[k, i] = -1.0
            g0[k, n] = 1.0
            h0[k] = -lo[i]
            t[zrow2, k] = -lo[i]
            if fabs(lo[i]) > scale:
                scale = fabs(lo[i])
            k += 1
    t[n, k] = 1.0
    g0[k, n] = 1.0
    h0[k] = radius_cap
    t[zrow2, k] = radius_cap
    if fabs(radius_cap) > scale:
        scale = fabs(radius_cap)

    for i in range(nrows):
        t[i, mp + i] = 1.0
        basis[i] = mp + i
    t[n, ncols - 1] = 1.0
    for j in range(mp):
        v = 0.0
        for i in range(nrows):
            v += t[i, j]
        t[zrow1, j] = -v
    t[zrow1, ncols - 1] = -1.0

    cdef double cost_eps = _COST_EPS * scale
    cdef Py_ssize_t dantzig_limit = 100 + 10 * (mp + nrows)
    cdef Py_ssize_t iter_limit = 1000 + 100 * (mp + nrows)
    cdef Py_ssize_t pivots = 0
    cdef int status
    cdef double t_star, objective, residual, row_val

    with nogil:
        status = _run_phase(t, basis, nrows, ncols, mp, zrow1, cost_eps,
                            dantzig_limit, iter_limit, &pivots)
    if status:
        return status, NAN, None, pivots
    if fabs(t[zrow1, ncols - 1]) > _PHASE1_TOL * scale:
        return 2, NAN, None, pivots

    with nogil:
        for i in range(nrows):
            if basis[i] >= mp:
                for j in range(mp):
                    if fabs(t[i, j]) > _PIVOT_EPS:
                        _pivot(t, basis, nrows + 2, ncols, i, j)
                        pivots += 1
                        break
        status = _run_phase(t, basis, nrows, ncols, mp, zrow2, cost_eps,
                            dantzig_limit, iter_limit, &pivots)
    if status:
        return status, NAN, None, pivots

    witness_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] witness = witness_arr
    cdef double[::1] multipliers = np.empty(nrows, dtype=np.float64)
    for i in range(nrows):
        multipliers[i] = -t[zrow2, mp + i]
    for i in range(n):
        witness[i] = multipliers[i]
    t_star = multipliers[n]

    objective = -t[zrow2, ncols - 1]
    if fabs(t_star - objective) > 1e-6 * scale:
        return 3, t_star, witness_arr, pivots
    residual = -INFINITY
    for i in range(mp):
        row_val = -h0[i]
        for j in range(nrows):
            row_val += g0[i, j] * multipliers[j]
        if row_val > residual:
            residual = row_val
    if residual > _VERIFY_TOL * scale:
        return 3, t_star, witness_arr, pivots
    return 0, t_star, witness_arr, pivots
