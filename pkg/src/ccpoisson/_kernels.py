"""Compiled inner loops (numba).

Fields are flat float64 arrays in axis-0-fastest (Fortran) order; ``shape``
and ``strides`` are int64 arrays describing the grid.  Everything here is
deterministic and single-threaded so repeated runs are bit-identical.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_TINY_PIVOT = 1e-30


@njit(cache=True)
def gs_sweep(phi, rhs, inv_diag, am, ap, shape, strides, reverse):
    """One Gauss-Seidel sweep over all interior nodes, in place.

    ``am[d, i]`` / ``ap[d, i]`` weight the left/right neighbor along axis d
    at axis-index i; ``inv_diag`` is 1/a_p per node; ``rhs`` holds the full
    source (forcing plus any correction term).  Nodes are visited in flat
    (lexicographic) order, reversed when ``reverse`` is true.  Returns the
    sum of |update| over interior nodes: each update equals the equation
    residual at that node scaled by 1/a_p, so the mean of these is the
    stopping metric.
    """
    ndim = shape.shape[0]
    mi = np.empty(ndim, dtype=np.int64)
    count = 1
    flat = 0
    for d in range(ndim):
        count *= shape[d] - 2
        if reverse:
            mi[d] = shape[d] - 2
            flat += (shape[d] - 2) * strides[d]
        else:
            mi[d] = 1
            flat += strides[d]
    total = 0.0
    for _ in range(count):
        acc = rhs[flat]
        for d in range(ndim):
            acc += am[d, mi[d]] * phi[flat - strides[d]] + ap[d, mi[d]] * phi[flat + strides[d]]
        new = acc * inv_diag[flat]
        total += abs(new - phi[flat])
        phi[flat] = new
        if reverse:
            d = 0
            while d < ndim:
                mi[d] -= 1
                flat -= strides[d]
                if mi[d] >= 1:
                    break
                mi[d] = shape[d] - 2
                flat += (shape[d] - 2) * strides[d]
                d += 1
        else:
            d = 0
            while d < ndim:
                mi[d] += 1
                flat += strides[d]
                if mi[d] <= shape[d] - 2:
                    break
                mi[d] = 1
                flat -= (shape[d] - 2) * strides[d]
                d += 1
    return total


@njit(cache=True)
def tdma(lower, diag, upper, rhs, out):
    """Thomas algorithm for a tridiagonal system; returns -1 or the row of a
    vanishing pivot.  ``lower``/``upper`` have length n-1; all inputs are
    left untouched.
    """
    n = diag.shape[0]
    cp = np.empty(n - 1)
    dp = np.empty(n)
    piv = diag[0]
    if abs(piv) < _TINY_PIVOT:
        return 0
    cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if abs(piv) < _TINY_PIVOT:
            return i
        if i < n - 1:
            cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return -1


@njit(cache=True)
def axis_low(phi, out, shape, strides, axis, cl_a, cl_b, cl_c):
    """Explicit 3-point second derivative along ``axis`` for every pencil.

    Writes interior pencil entries of ``out``; entries at pencil endpoints
    are zero sentinels.
    """
    ndim = shape.shape[0]
    n = shape[axis]
    step = strides[axis]
    npencil = 1
    for d in range(ndim):
        if d != axis:
            npencil *= shape[d]
    mi = np.zeros(ndim, dtype=np.int64)
    base = 0
    for _ in range(npencil):
        out[base] = 0.0
        out[base + (n - 1) * step] = 0.0
        for j in range(1, n - 1):
            f = base + j * step
            out[f] = cl_a[j] * phi[f - step] + cl_b[j] * phi[f] + cl_c[j] * phi[f + step]
        d = 0
        while d < ndim:
            if d == axis:
                d += 1
                continue
            mi[d] += 1
            base += strides[d]
            if mi[d] <= shape[d] - 1:
                break
            mi[d] = 0
            base -= shape[d] * strides[d]
            d += 1
    return 0


@njit(cache=True)
def axis_high(
    phi, out, shape, strides, axis, alpha, beta, ca, cb, cc, bl_beta, bl_w, br_beta, br_w
):
    """Compact second derivative along ``axis`` for every pencil.

    Assembles the tridiagonal system (boundary closure rows at both ends,
    interior rows in between) and solves it per pencil; writes derivative
    values at every pencil node.  Returns -1 on success, else the in-pencil
    row index of a vanishing pivot.
    """
    ndim = shape.shape[0]
    n = shape[axis]
    step = strides[axis]
    npencil = 1
    for d in range(ndim):
        if d != axis:
            npencil *= shape[d]
    lo = np.empty(n - 1)
    di = np.empty(n)
    up = np.empty(n - 1)
    rh = np.empty(n)
    sol = np.empty(n)
    u = np.empty(n)
    di[:] = 1.0
    up[0] = bl_beta
    lo[n - 2] = br_beta
    for j in range(1, n - 1):
        lo[j - 1] = alpha[j]
        if j < n - 1:
            up[j] = beta[j]
    mi = np.zeros(ndim, dtype=np.int64)
    base = 0
    for _ in range(npencil):
        for j in range(n):
            u[j] = phi[base + j * step]
        rh[0] = bl_w[0] * u[0] + bl_w[1] * u[1] + bl_w[2] * u[2] + bl_w[3] * u[3]
        for j in range(1, n - 1):
            rh[j] = ca[j] * u[j - 1] + cb[j] * u[j] + cc[j] * u[j + 1]
        rh[n - 1] = (
            br_w[0] * u[n - 1] + br_w[1] * u[n - 2] + br_w[2] * u[n - 3] + br_w[3] * u[n - 4]
        )
        bad = tdma(lo, di, up, rh, sol)
        if bad >= 0:
            return bad
        for j in range(n):
            out[base + j * step] = sol[j]
        d = 0
        while d < ndim:
            if d == axis:
                d += 1
                continue
            mi[d] += 1
            base += strides[d]
            if mi[d] <= shape[d] - 1:
                break
            mi[d] = 0
            base -= shape[d] * strides[d]
            d += 1
    return -1
