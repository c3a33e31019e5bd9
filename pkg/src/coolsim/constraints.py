"""Structural constraint sets: membership, fast projectors, and a test oracle.

The structure variants couple the per-task weight blocks of a joint vector:
nothing (unrelated), full or prefix equality (shared parameters), or the
bounded hemimetric cone over ordered item pairs. `weighted_project`
dispatches to the closed form where one exists and to the triangle-fixing
projector for hemimetrics; `dykstra_oracle` is an independent cyclic-Dykstra
reference used as ground truth in tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels, hemiproj
from .core import SolutionBox, WeightMatrix, n_pair_tasks

VALID_KINDS = ("unrelated", "shared", "shared-prefix", "hemimetric")


class ProjectionCapWarning(UserWarning):
    """Raised as a warning when a projection returns without its certificate."""


@dataclass
class StructureSpec:
    """Joint feasible set S* over K tasks of dimension d."""

    kind: str
    d: int
    K: int
    d_prime: int | None = None
    n: int | None = None
    r: float | None = None
    box: SolutionBox | None = None

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown structure kind {self.kind!r}")
        if self.d < 1 or self.K < 1:
            raise ValueError("d and K must be positive")
        if self.kind == "shared-prefix":
            if self.d_prime is None or not (1 <= self.d_prime <= self.d):
                raise ValueError("shared-prefix requires 1 <= d' <= d")
        if self.kind == "hemimetric":
            if self.d != 1:
                raise ValueError("hemimetric structure requires d = 1")
            if self.n is None or self.r is None or self.r <= 0:
                raise ValueError("hemimetric structure requires n and r > 0")
            if self.K != n_pair_tasks(self.n):
                raise ValueError("hemimetric structure requires K = n^2 - n")
            if self.box is None:
                self.box = SolutionBox.interval(0.0, self.r, 1)
        if self.box is not None and self.box.d != self.d:
            raise ValueError("box dimension must equal d")

    @classmethod
    def unrelated(cls, d: int, K: int, box: SolutionBox | None = None) -> "StructureSpec":
        return cls("unrelated", d, K, box=box)

    @classmethod
    def shared_all(cls, d: int, K: int, box: SolutionBox | None = None) -> "StructureSpec":
        return cls("shared", d, K, box=box)

    @classmethod
    def shared_prefix(
        cls, d: int, d_prime: int, K: int, box: SolutionBox | None = None
    ) -> "StructureSpec":
        return cls("shared-prefix", d, K, d_prime=d_prime, box=box)

    @classmethod
    def hemimetric(cls, n: int, r: float) -> "StructureSpec":
        return cls("hemimetric", 1, n_pair_tasks(n), n=n, r=r)

    @property
    def size(self) -> int:
        return self.d * self.K

    @property
    def shared_coords(self) -> int:
        if self.kind == "shared":
            return self.d
        if self.kind == "shared-prefix":
            return self.d_prime  # type: ignore[return-value]
        return 0


def _check_vector(w: np.ndarray, spec: StructureSpec) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (spec.size,):
        raise ValueError(f"expected joint vector of length {spec.size}, got {w.shape}")
    return w


def is_member(w: np.ndarray, spec: StructureSpec, tol: float = 1e-6) -> bool:
    """True iff every defining constraint of S* holds within tol."""
    w = _check_vector(w, spec)
    if spec.box is not None:
        blocks = w.reshape(spec.K, spec.d)
        if not (
            np.all(blocks >= spec.box.lower - tol)
            and np.all(blocks <= spec.box.upper + tol)
        ):
            return False
    if spec.kind in ("shared", "shared-prefix"):
        shared = w.reshape(spec.K, spec.d)[:, : spec.shared_coords]
        spread = shared.max(axis=0) - shared.min(axis=0)
        return bool(np.all(spread <= tol))
    if spec.kind == "hemimetric":
        n = spec.n
        mat = np.zeros((n, n))
        flat = 0
        for i in range(n):
            for j in range(n):
                if i != j:
                    mat[i, j] = w[flat]
                    flat += 1
        for k in range(n):
            if np.any(mat > mat[:, k : k + 1] + mat[k : k + 1, :] + tol):
                return False
    return True


@dataclass
class ProjectionResult:
    w: np.ndarray
    gap: float
    sweeps: int
    converged: bool
    primal: float
    dual: float
    time_us: float = 0.0  # wall time of the projection call, set by callers that time it


def _as_diag(q, size: int) -> np.ndarray:
    diag = q.diagonal if isinstance(q, WeightMatrix) else np.asarray(q, dtype=float)
    if diag.shape != (size,):
        raise ValueError(f"expected weight diagonal of length {size}")
    if np.any(diag < 0):
        raise ValueError("weights must be non-negative")
    return diag


def _project_shared(w: np.ndarray, diag: np.ndarray, spec: StructureSpec) -> np.ndarray:
    blocks = w.reshape(spec.K, spec.d).copy()
    qb = diag.reshape(spec.K, spec.d)
    for kk in range(spec.shared_coords):
        col = blocks[:, kk]
        wts = qb[:, kk]
        total = wts.sum()
        # all-zero weights make every shared value optimal; the plain mean
        # keeps the result deterministic
        v = float(np.dot(wts, col) / total) if total > 0 else float(col.mean())
        if spec.box is not None:
            v = float(np.clip(v, spec.box.lower[kk], spec.box.upper[kk]))
        blocks[:, kk] = v
    if spec.box is not None and spec.shared_coords < spec.d:
        rest = slice(spec.shared_coords, spec.d)
        blocks[:, rest] = np.clip(
            blocks[:, rest], spec.box.lower[rest], spec.box.upper[rest]
        )
    return blocks.reshape(-1)


def _project_hemimetric(
    w: np.ndarray, diag: np.ndarray, spec: StructureSpec, gap: float, free_fill: str
) -> ProjectionResult:
    r = float(spec.r)  # type: ignore[arg-type]
    active = diag > 0
    tri = hemiproj.triples_for(spec.n, active if not active.all() else None)
    sweeps = 0
    converged = True
    if tri.shape[0] == 0:
        # no triangle couples two weighted pairs: the projection separates
        # into per-pair box clips, solved exactly
        d_act = np.clip(w[active], 0.0, r)
        diff = d_act - w[active]
        dual = float(np.dot(diag[active], diff * diff))
    elif active.all():
        res = hemiproj.hemimetric_project(w, diag, r, gap)
        return ProjectionResult(res.d, res.gap, res.sweeps, res.converged, res.primal, res.dual)
    else:
        res = hemiproj.hemimetric_project(w, diag, r, gap, mask=active)
        d_act = res.d[active]
        dual = res.dual
        sweeps = res.sweeps
        converged = res.converged

    if free_fill == "max":
        out = np.full(w.shape, r)
    elif free_fill == "hold":
        out = w.copy()
    else:
        raise ValueError(f"unknown free_fill mode {free_fill!r}")
    out[active] = d_act
    out = hemiproj.floyd_warshall_clip(out, r)
    diff = out[active] - w[active]
    primal = float(np.dot(diag[active], diff * diff))
    return ProjectionResult(out, max(0.0, primal - dual), sweeps, converged, primal, dual)


def weighted_project(
    w: np.ndarray,
    q,
    spec: StructureSpec,
    gap: float,
    *,
    free_fill: str = "max",
) -> ProjectionResult:
    """Point of S* whose weighted objective is within `gap` of the minimum.

    Shared structures and box-only cases are closed form (gap 0); the
    hemimetric cone goes through the triangle-fixing projector. Zero-weight
    coordinates are ignored by the objective; they are post-filled with the
    largest feasible completion (free_fill="max") or held at their incoming
    values and repaired ("hold"). The reported gap is always a weak-duality
    certificate for the returned point.
    """
    w = _check_vector(w, spec)
    if gap < 0:
        raise ValueError("gap must be non-negative")
    diag = _as_diag(q, spec.size)

    if spec.kind == "unrelated":
        out = w.copy()
        if spec.box is not None:
            blocks = out.reshape(spec.K, spec.d)
            np.clip(blocks, spec.box.lower, spec.box.upper, out=blocks)
        return ProjectionResult(out, 0.0, 0, True, 0.0, 0.0)
    if spec.kind in ("shared", "shared-prefix"):
        out = _project_shared(w, diag, spec)
        return ProjectionResult(out, 0.0, 0, True, 0.0, 0.0)
    return _project_hemimetric(w, diag, spec, gap, free_fill)


@dataclass
class DykstraResult:
    w: np.ndarray
    cycles: int
    converged: bool


def _halfspace_rows(spec: StructureSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """CSR rows (indptr, idx, coef, b) listing every half-space of S*."""
    idx: list[int] = []
    coef: list[float] = []
    b: list[float] = []
    indptr = [0]

    def add(ids, cs, rhs):
        idx.extend(ids)
        coef.extend(cs)
        b.append(rhs)
        indptr.append(len(idx))

    if spec.kind == "hemimetric":
        for row in hemiproj.triples_for(spec.n):
            add(row.tolist(), [1.0, -1.0, -1.0], 0.0)
    elif spec.kind in ("shared", "shared-prefix"):
        for z in range(1, spec.K):
            for kk in range(spec.shared_coords):
                a = kk
                c = z * spec.d + kk
                add([a, c], [1.0, -1.0], 0.0)
                add([a, c], [-1.0, 1.0], 0.0)
    if spec.box is not None:
        for z in range(spec.K):
            for kk in range(spec.d):
                p = z * spec.d + kk
                add([p], [-1.0], -float(spec.box.lower[kk]))
                add([p], [1.0], float(spec.box.upper[kk]))
    return (
        np.asarray(indptr, dtype=np.int64),
        np.asarray(idx, dtype=np.int64),
        np.asarray(coef, dtype=float),
        np.asarray(b, dtype=float),
    )


def dykstra_oracle(
    w: np.ndarray,
    q,
    spec: StructureSpec,
    iterations: int = 200_000,
    tol: float = 1e-9,
) -> DykstraResult:
    """Reference projection by cyclic Dykstra over every half-space of S*.

    Ground truth for tests only. Requires strictly positive weights; stops
    when the Q-norm change over a full cycle drops below tol, else returns
    flagged (converged=False) at the iteration cap.
    """
    w = _check_vector(w, spec)
    diag = _as_diag(q, spec.size)
    if np.any(diag <= 0):
        raise ValueError("dykstra_oracle requires strictly positive weights")
    indptr, idx, coef, b = _halfspace_rows(spec)
    x = w.copy()
    cycles, ok = _kernels.dykstra_halfspaces(
        x, 1.0 / diag, indptr, idx, coef, b, tol, iterations
    )
    return DykstraResult(x, int(cycles), bool(ok))


def warn_if_uncertified(result: ProjectionResult, requested_gap: float) -> None:
    """Surface projections whose certificate loop gave up (cap or stall).

    A gap above the request caused by the zero-weight fill policy is reported
    through the result's gap field, not warned about.
    """
    if not result.converged:
        warnings.warn(
            f"projection returned gap {result.gap:.3e} for request {requested_gap:.3e}",
            ProjectionCapWarning,
            stacklevel=2,
        )
