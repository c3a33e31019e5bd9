"""Weighted approximate projection onto bounded hemimetric cones.

The feasible set over ordered-pair values d_ij (i != j over n items) is
0 <= d_ij <= r together with d_ij <= d_ik + d_kj for every distinct triple.
The projector minimizes sum q_ij (d_ij - d'_ij)^2 by cyclic dual-coordinate
ascent: each triangle constraint and each box face is visited in a fixed
lexicographic order and its multiplier updated in closed form, clamped at
zero. Writing d = d' + e, the running perturbation e always equals
-Q^{-1} A' lambda for the current multipliers, so the dual value

    DUAL = -||e||_q^2 - 2 (x . v_x + y . v_y + z . v_z)

is a true Lagrangian dual value and PRIMAL - DUAL upper-bounds the
suboptimality of any feasible point with objective PRIMAL. After every sweep
the iterate is repaired into the feasible set by a shortest-path relaxation
clipped into [0, r]; the loop stops once the repaired point's certificate
PRIMAL - DUAL falls below the requested gap.

A pair mask restricts the objective to a subset of pairs (used for
zero-weight coordinates): masked-out pairs enter the repair as +inf, so the
repair still enforces every multi-hop path constraint among the active
pairs, and inactive entries come back as min(r, shortest active path), the
largest feasible completion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .core import items_from_task_count, n_pair_tasks, pair_index

# A gap request of exactly zero stops once the certificate is numerically
# indistinguishable from zero at double precision.
EXACT_GAP_FLOOR = 1e-12
# Consecutive sweeps without gap progress before declaring a stall; only
# reachable when the single-triangle duals cannot certify a binding
# multi-hop constraint of a masked subproblem.
STALL_SWEEPS = 5


@lru_cache(maxsize=None)
def _all_triples(n: int) -> np.ndarray:
    rows = []
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                rows.append(
                    (pair_index(i, j, n), pair_index(i, k, n), pair_index(k, j, n))
                )
    return np.array(rows, dtype=np.int64).reshape(-1, 3)


def triples_for(n: int, mask: np.ndarray | None = None) -> np.ndarray:
    """Ordered distinct triples as flat pair-id rows (ij, ik, kj).

    With a mask, only triples whose three edges are all active are kept.
    """
    tri = _all_triples(n)
    if mask is None:
        return tri
    keep = mask[tri[:, 0]] & mask[tri[:, 1]] & mask[tri[:, 2]]
    return tri[keep]


@dataclass(frozen=True)
class HemimetricInstance:
    """Problem shape: n items, bound r, flat ordered-pair layout."""

    n: int
    r: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two items")
        if self.r <= 0:
            raise ValueError("r must be positive")

    @property
    def k(self) -> int:
        return n_pair_tasks(self.n)

    @property
    def triples(self) -> np.ndarray:
        return triples_for(self.n)


@lru_cache(maxsize=None)
def _pair_coords(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    cols = []
    for i in range(n):
        for j in range(n):
            if i != j:
                rows.append(i)
                cols.append(j)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)


def _to_matrix(d: np.ndarray, n: int, mask: np.ndarray | None) -> np.ndarray:
    rows, cols = _pair_coords(n)
    mat = np.zeros((n, n))
    mat[rows, cols] = d if mask is None else np.where(mask, d, np.inf)
    return mat


def _from_matrix(mat: np.ndarray, n: int) -> np.ndarray:
    rows, cols = _pair_coords(n)
    return mat[rows, cols]


def floyd_warshall_clip(
    d: np.ndarray, r: float, mask: np.ndarray | None = None
) -> np.ndarray:
    """Downward repair onto the feasible set: shortest paths, then clip to [0, r].

    Negative entries are lifted to 0 before the relaxation (negative edges
    could otherwise hide negative cycles, for which a single relaxation pass
    does not guarantee triangle feasibility). Masked-out entries take no part
    in the relaxation and come back as min(r, shortest active path).
    """
    d = np.asarray(d, dtype=float)
    n = items_from_task_count(d.shape[0])
    mat = _to_matrix(d, n, mask)
    np.maximum(mat, 0.0, out=mat)
    _kernels.fw_relax(mat)
    np.minimum(mat, r, out=mat)
    return _from_matrix(mat, n)


@dataclass
class HemimetricDualState:
    """Perturbation e with multipliers and constraint constants.

    x, y are the lower/upper box duals, z the triangle duals (aligned with
    `triples`). v_x = d', v_y = r - d' and v_z[t] = d'_ik + d'_kj - d'_ij are
    the constraint right-hand sides entering the dual value.
    """

    e: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    v_x: np.ndarray
    v_y: np.ndarray
    v_z: np.ndarray
    active: np.ndarray
    triples: np.ndarray


def init_state(
    dprime: np.ndarray, r: float, mask: np.ndarray | None = None
) -> HemimetricDualState:
    dprime = np.asarray(dprime, dtype=float)
    k = dprime.shape[0]
    n = items_from_task_count(k)
    active = np.ones(k, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    tri = triples_for(n, None if mask is None else active)
    v_z = dprime[tri[:, 1]] + dprime[tri[:, 2]] - dprime[tri[:, 0]]
    return HemimetricDualState(
        e=np.zeros(k),
        x=np.zeros(k),
        y=np.zeros(k),
        z=np.zeros(tri.shape[0]),
        v_x=dprime.copy(),
        v_y=r - dprime,
        v_z=v_z,
        active=active,
        triples=tri,
    )


def triangle_fix_sweep(
    state: HemimetricDualState, dprime: np.ndarray, q: np.ndarray, r: float
) -> HemimetricDualState:
    """One full pass: every triangle correction, then every box correction."""
    qinv = np.zeros_like(q)
    qinv[state.active] = 1.0 / q[state.active]
    _kernels.triangle_pass(state.e, state.z, state.v_z, qinv, state.triples)
    act_ids = np.flatnonzero(state.active)
    _kernels.box_pass(state.e, state.x, state.y, dprime, q, qinv, r, act_ids)
    return state


def duality_gap(
    state: HemimetricDualState,
    dprime: np.ndarray,
    q: np.ndarray,
    d_repaired: np.ndarray,
) -> tuple[float, float]:
    """(primal, dual) for the repaired point under the current multipliers."""
    a = state.active
    diff = d_repaired[a] - dprime[a]
    primal = float(np.dot(q[a], diff * diff))
    dual = float(
        -np.dot(q[a], state.e[a] * state.e[a])
        - 2.0
        * (
            np.dot(state.x[a], state.v_x[a])
            + np.dot(state.y[a], state.v_y[a])
            + np.dot(state.z, state.v_z)
        )
    )
    return primal, dual


@dataclass
class HemiProjection:
    d: np.ndarray
    gap: float
    sweeps: int
    converged: bool
    primal: float
    dual: float
    history: list[tuple[float, float]] | None = None


def hemimetric_project(
    dprime: np.ndarray,
    q: np.ndarray,
    r: float,
    delta: float,
    *,
    mask: np.ndarray | None = None,
    max_sweeps: int | None = None,
    record_history: bool = False,
) -> HemiProjection:
    """Approximate weighted projection with a duality-gap certificate.

    Sweeps triangle and box corrections, repairs the iterate after every
    sweep, and stops once primal - dual <= delta. The returned point is
    feasible unconditionally (it is the repaired point); `gap` bounds its
    objective suboptimality. Hitting the sweep cap (default 10 n^3) or a
    gap stall returns the best repaired iterate with converged=False.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    dprime = np.asarray(dprime, dtype=float)
    q = np.asarray(q, dtype=float)
    if q.shape != dprime.shape:
        raise ValueError("weights and input must have equal length")
    n = items_from_task_count(dprime.shape[0])
    state = init_state(dprime, r, mask)
    if np.any(q[state.active] <= 0):
        raise ValueError("active weights must be positive")
    cap = max_sweeps if max_sweeps is not None else 10 * n**3
    history: list[tuple[float, float]] | None = [] if record_history else None

    # the loop tests the certificate before any sweep: an input whose raw
    # repair is already within budget returns untouched (zero sweeps)
    d_rep = floyd_warshall_clip(dprime + state.e, r, mask)
    primal, dual = duality_gap(state, dprime, q, d_rep)
    gap = primal - dual
    if history is not None:
        history.append((primal, dual))
    delta_eff = delta if delta > 0.0 else EXACT_GAP_FLOOR * max(1.0, primal)
    best = (gap, d_rep, primal, dual)
    prev_gap = gap
    stall = 0
    sweeps = 0
    while gap > delta_eff and sweeps < cap:
        sweeps += 1
        triangle_fix_sweep(state, dprime, q, r)
        d_rep = floyd_warshall_clip(dprime + state.e, r, mask)
        primal, dual = duality_gap(state, dprime, q, d_rep)
        gap = primal - dual
        if history is not None:
            history.append((primal, dual))
        if gap < best[0]:
            best = (gap, d_rep, primal, dual)
        if gap >= prev_gap - 1e-13 * max(1.0, abs(prev_gap)):
            stall += 1
            if stall >= STALL_SWEEPS:
                break
        else:
            stall = 0
        prev_gap = gap
    if gap <= delta_eff:
        return HemiProjection(d_rep, gap, sweeps, True, primal, dual, history)
    gap, d_rep, primal, dual = best
    return HemiProjection(d_rep, gap, sweeps, False, primal, dual, history)
