"""Shared domain types: vector layout, counters, diagonal weights.

All joint quantities live in flat numpy arrays of length d*K with a
task-major layout: task z owns the slots [z*d, (z+1)*d). Pairwise tasks
(for hemimetric structures over n items) are numbered lexicographically
over ordered pairs (i, j), i != j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def n_pair_tasks(n: int) -> int:
    """Number of ordered-pair tasks over n items."""
    return n * n - n


def pair_index(i: int, j: int, n: int) -> int:
    """Flat index of the ordered pair (i, j) with i != j, 0-based items."""
    if i == j:
        raise ValueError("pair tasks require i != j")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"pair ({i}, {j}) out of range for n={n}")
    return i * (n - 1) + (j if j < i else j - 1)


def index_pair(z: int, n: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if not (0 <= z < n_pair_tasks(n)):
        raise ValueError(f"task index {z} out of range for n={n}")
    i, rem = divmod(z, n - 1)
    j = rem if rem < i else rem + 1
    return i, j


def items_from_task_count(k: int) -> int:
    """Recover n from K = n^2 - n; raises if K is not of that form."""
    n = int(round((1.0 + np.sqrt(1.0 + 4.0 * k)) / 2.0))
    if n_pair_tasks(n) != k:
        raise ValueError(f"{k} is not n^2 - n for any integer n")
    return n


def task_slice(z: int, d: int) -> slice:
    return slice(z * d, (z + 1) * d)


def get_task(w: np.ndarray, z: int, d: int) -> np.ndarray:
    return w[task_slice(z, d)].copy()


def set_task(w: np.ndarray, z: int, d: int, values: np.ndarray) -> None:
    w[task_slice(z, d)] = values


@dataclass
class SolutionBox:
    """Axis-aligned feasible box for one task's weight vector."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if self.lower.shape != self.upper.shape:
            raise ValueError("box bounds must have equal shapes")
        if np.any(self.lower > self.upper):
            raise ValueError("box lower bound exceeds upper bound")

    @classmethod
    def interval(cls, lo: float, hi: float, d: int = 1) -> "SolutionBox":
        return cls(np.full(d, lo), np.full(d, hi))

    @property
    def d(self) -> int:
        return self.lower.shape[0]

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def midpoint(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    def clamp(self, w: np.ndarray) -> np.ndarray:
        """Euclidean projection onto the box (per-coordinate clip)."""
        return np.clip(w, self.lower, self.upper)

    def contains(self, w: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(w >= self.lower - tol) and np.all(w <= self.upper + tol))


@dataclass
class ObservationCounters:
    """Per-task observation counts tau_z; total is their sum by construction."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @classmethod
    def zeros(cls, k: int) -> "ObservationCounters":
        return cls(np.zeros(k, dtype=np.int64))

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def observe(self, z: int) -> None:
        self.counts[z] += 1


@dataclass
class WeightMatrix:
    """Diagonal of the coordination weight matrix, length d*K."""

    diagonal: np.ndarray

    def __post_init__(self):
        self.diagonal = np.asarray(self.diagonal, dtype=float)
        if np.any(self.diagonal < 0):
            raise ValueError("weight diagonal must be non-negative")

    @classmethod
    def identity(cls, size: int) -> "WeightMatrix":
        return cls(np.ones(size))


def build_weight_matrix(counters: ObservationCounters, d: int) -> WeightMatrix:
    """Diagonal weights sqrt(tau_z), each repeated d times (0 when tau_z = 0)."""
    return WeightMatrix(np.repeat(np.sqrt(counters.counts.astype(float)), d))


def mahalanobis_sq(a: np.ndarray, b: np.ndarray, q) -> float:
    """Weighted squared distance (a-b)' Q (a-b) for diagonal Q."""
    diag = q.diagonal if isinstance(q, WeightMatrix) else np.asarray(q, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape != diag.shape:
        raise ValueError("mahalanobis_sq requires equal-length vectors and weights")
    diff = a - b
    return float(np.dot(diag, diff * diff))


@dataclass
class GradientReport:
    """Subgradient feedback for one task, with its declared norm bound."""

    task: int
    subgradient: np.ndarray
    norm_bound: float

    def __post_init__(self):
        self.subgradient = np.atleast_1d(np.asarray(self.subgradient, dtype=float))
        norm = float(np.linalg.norm(self.subgradient))
        if norm > self.norm_bound + 1e-9:
            raise ValueError(
                f"subgradient norm {norm} exceeds declared bound {self.norm_bound}"
            )
