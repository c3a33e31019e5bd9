"""Task orderings, ground-truth generation, and cost-tuple data handling."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constraints import StructureSpec, is_member
from .core import n_pair_tasks, pair_index

ORDER_KINDS = ("random", "batch", "single", "trace")


@dataclass
class TaskOrder:
    """How task instances arrive: iid uniform, repeated batches, one task, or a replay."""

    kind: str = "random"
    batch: int = 5
    task: int = 0
    trace: np.ndarray | None = None
    _current: int = field(default=-1, repr=False)

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.kind == "batch" and self.batch < 1:
            raise ValueError("batch length must be >= 1")
        if self.kind == "trace":
            if self.trace is None:
                raise ValueError("trace order needs a task sequence")
            self.trace = np.asarray(self.trace, dtype=np.int64)

    @classmethod
    def uniform(cls) -> "TaskOrder":
        return cls("random")

    @classmethod
    def batched(cls, batch: int) -> "TaskOrder":
        return cls("batch", batch=batch)

    @classmethod
    def single(cls, task: int) -> "TaskOrder":
        return cls("single", task=task)

    @classmethod
    def replay(cls, trace) -> "TaskOrder":
        return cls("trace", trace=np.asarray(trace, dtype=np.int64))


def next_task(order: TaskOrder, t: int, rng: np.random.Generator, k: int) -> int:
    """Task for 1-based step t; batch orders redraw every `batch` steps."""
    if t < 1:
        raise ValueError("t is 1-based")
    if order.kind == "random":
        return int(rng.integers(k))
    if order.kind == "batch":
        if (t - 1) % order.batch == 0:
            order._current = int(rng.integers(k))
        if order._current < 0:
            raise ValueError("batch order must start at t = 1")
        return order._current
    if order.kind == "single":
        if not (0 <= order.task < k):
            raise ValueError("single task out of range")
        return order.task
    if t > order.trace.shape[0]:
        raise IndexError(f"trace exhausted at t={t}")
    return int(order.trace[t - 1])


def build_task_trace(
    order: TaskOrder, t_horizon: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Materialize the full task sequence so runs can be replayed and paired."""
    return np.array(
        [next_task(order, t, rng, k) for t in range(1, t_horizon + 1)], dtype=np.int64
    )


@dataclass
class ClusteredHemimetric:
    """Two equal item clusters: distance r_in inside, r_out across."""

    n: int
    r_in: float
    r_out: float

    def __post_init__(self):
        if self.n % 2 != 0:
            raise ValueError("clustered ground truth needs an even n")
        if self.r_in < 0 or self.r_out <= 0:
            raise ValueError("cluster distances must be non-negative, r_out > 0")

    def values(self) -> np.ndarray:
        return clustered_ground_truth(self.n, self.r_in, self.r_out)


def clustered_ground_truth(n: int, r_in: float, r_out: float) -> np.ndarray:
    """Flat ground-truth vector; validated as a member of the r_out-bounded set."""
    if n % 2 != 0:
        raise ValueError("clustered ground truth needs an even n")
    half = n // 2
    out = np.empty(n_pair_tasks(n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            same = (i < half) == (j < half)
            out[pair_index(i, j, n)] = r_in if same else r_out
    spec = StructureSpec.hemimetric(n, r_out)
    if not is_member(out, spec, tol=0.0):
        raise ValueError("generated ground truth is not a valid bounded hemimetric")
    return out


@dataclass(frozen=True)
class CostTuple:
    """Survey row: preferred item i, suggested item j, elicited cost (None = NA)."""

    i: int
    j: int
    cost: float | None

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("cost tuple requires i != j")
        if self.cost is not None and self.cost < 0:
            raise ValueError("cost must be non-negative")

    @property
    def is_na(self) -> bool:
        return self.cost is None


def load_cost_tuples(path) -> list[CostTuple]:
    """Parse `i,j,cost` rows; cost is a non-negative number or the literal NA."""
    out: list[CostTuple] = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return out
        if [h.strip().lower() for h in header] != ["i", "j", "cost"]:
            raise ValueError(f"{path}: expected header 'i,j,cost', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                i = int(row[0])
                j = int(row[1])
                raw = row[2].strip()
                cost = None if raw.upper() == "NA" else float(raw)
                out.append(CostTuple(i, j, cost))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row}: {exc}") from None
    return out


DEFAULT_COST_CATEGORIES = (0.0, 10.0, 20.0, 30.0, 40.0)


def synth_cost_tuples(
    count: int,
    na_rate: float = 0.20,
    cost_categories=None,
    weights=None,
    rng: np.random.Generator | None = None,
    n_items: int = 20,
) -> list[CostTuple]:
    """Synthetic survey stand-in: high-review preferred, low-review suggested.

    Items [0, n/2) are the high-review group and [n/2, n) the low-review
    group; costs are drawn from the given categories (uniform by default)
    and a na_rate fraction of rows carries the NA marker instead.
    """
    if rng is None:
        raise ValueError("synth_cost_tuples needs an explicit rng for reproducibility")
    if not (0.0 <= na_rate <= 1.0):
        raise ValueError("na_rate must lie in [0, 1]")
    cats = np.asarray(
        DEFAULT_COST_CATEGORIES if cost_categories is None else cost_categories,
        dtype=float,
    )
    if weights is None:
        w = np.full(cats.shape[0], 1.0 / cats.shape[0])
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != cats.shape or abs(w.sum() - 1.0) > 1e-9 or np.any(w < 0):
            raise ValueError("weights must be a distribution over the categories")
    half = n_items // 2
    out: list[CostTuple] = []
    for _ in range(count):
        i = int(rng.integers(0, half))
        j = int(rng.integers(half, n_items))
        if rng.random() < na_rate:
            out.append(CostTuple(i, j, None))
        else:
            out.append(CostTuple(i, j, float(cats[rng.choice(cats.shape[0], p=w)])))
    return out
