"""Jitted inner loops.

The dual-coordinate sweeps are Gauss-Seidel recurrences: every scalar update
feeds the next one, so they cannot be vectorized without changing the
algorithm. numba keeps them at C speed while the drivers stay in Python.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def fw_relax(mat):
    """In-place all-pairs shortest-path relaxation; +inf marks absent edges."""
    n = mat.shape[0]
    for k in range(n):
        for i in range(n):
            if i == k:
                continue
            dik = mat[i, k]
            if dik == np.inf:
                continue
            for j in range(n):
                if j == i or j == k:
                    continue
                alt = dik + mat[k, j]
                if alt < mat[i, j]:
                    mat[i, j] = alt


@njit(cache=True)
def triangle_pass(e, z, b, qinv, triples):
    """One lexicographic sweep of triangle-constraint dual updates.

    Each row of `triples` holds flat pair ids (ij, ik, kj); the constraint is
    e_ij - e_ik - e_kj <= b. The correction is clamped so z stays >= 0.
    """
    for t in range(triples.shape[0]):
        ij = triples[t, 0]
        ik = triples[t, 1]
        kj = triples[t, 2]
        denom = qinv[ij] + qinv[ik] + qinv[kj]
        theta = (e[ij] - e[ik] - e[kj] - b[t]) / denom
        if theta < -z[t]:
            theta = -z[t]
        e[ij] -= qinv[ij] * theta
        e[ik] += qinv[ik] * theta
        e[kj] += qinv[kj] * theta
        z[t] += theta


@njit(cache=True)
def box_pass(e, x, y, dprime, q, qinv, r, act):
    """One sweep of lower/upper box dual updates over the active pairs.

    Lower face: -e_p <= d'_p (dual x); upper face: e_p <= r - d'_p (dual y).
    """
    for a in range(act.shape[0]):
        p = act[a]
        theta = q[p] * (-dprime[p] - e[p])
        if theta < -x[p]:
            theta = -x[p]
        e[p] += qinv[p] * theta
        x[p] += theta
        theta = q[p] * (e[p] + dprime[p] - r)
        if theta < -y[p]:
            theta = -y[p]
        e[p] -= qinv[p] * theta
        y[p] += theta


@njit(cache=True)
def dykstra_halfspaces(x, qinv, indptr, idx, coef, b, tol, max_cycles):
    """Cyclic Dykstra over half-spaces a'x <= b in the Q-weighted norm.

    Sparse rows in CSR form; one scalar correction magnitude per row. Stops
    when the Q-norm change across a full cycle drops below tol. Returns
    (cycles, converged); x is updated in place.
    """
    m = b.shape[0]
    lam = np.zeros(m)
    denom = np.empty(m)
    for c in range(m):
        s = 0.0
        for p in range(indptr[c], indptr[c + 1]):
            s += coef[p] * coef[p] * qinv[idx[p]]
        denom[c] = s
    prev = x.copy()
    for cycle in range(1, max_cycles + 1):
        for c in range(m):
            if lam[c] != 0.0:
                for p in range(indptr[c], indptr[c + 1]):
                    x[idx[p]] += lam[c] * coef[p] * qinv[idx[p]]
            resid = -b[c]
            for p in range(indptr[c], indptr[c + 1]):
                resid += coef[p] * x[idx[p]]
            nu = resid / denom[c]
            if nu < 0.0:
                nu = 0.0
            elif nu != 0.0:
                for p in range(indptr[c], indptr[c + 1]):
                    x[idx[p]] -= nu * coef[p] * qinv[idx[p]]
            lam[c] = nu
        change = 0.0
        for t in range(x.shape[0]):
            diff = x[t] - prev[t]
            change += diff * diff / qinv[t]
        if np.sqrt(change) < tol:
            return cycle, True
        prev[:] = x
    return max_cycles, False
