"""Central coordination round and the closed-form regret bound calculators.

The coordinator runs the gather/project/scatter round: collect every
learner's weight block and observation count, build the diagonal weight
matrix (sqrt of counts, or the identity for the unweighted variant),
project the joint vector onto the structural set with the scheduled
accuracy, and push the blocks back to all learners. Whether a round happens
at time t (xi) and how accurate its projection must be (delta) come from a
schedule; the bounds below are the matching worst-case regret formulas.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .constraints import (
    ProjectionResult,
    StructureSpec,
    warn_if_uncertified,
    weighted_project,
)
from .core import ObservationCounters, WeightMatrix, build_weight_matrix, task_slice
from .learners import LearnerState, LossOracle, gradient_step

XI_KINDS = ("always", "never", "bernoulli", "explicit")
DELTA_KINDS = ("zero", "corollary", "explicit")
WEIGHTING_MODES = ("sqrt-tau", "identity")


@dataclass
class CoordinationSchedule:
    """Sources for the coordination bits xi^t and accuracies delta^t."""

    xi_kind: str = "always"
    alpha: float = 1.0
    xi_seq: np.ndarray | None = None
    delta_kind: str = "zero"
    c_beta: float = 1.0
    beta: float = 1.0
    s_max: float = 0.0
    k: int = 0
    delta_seq: np.ndarray | None = None

    def __post_init__(self):
        if self.xi_kind not in XI_KINDS:
            raise ValueError(f"unknown xi source {self.xi_kind!r}")
        if self.delta_kind not in DELTA_KINDS:
            raise ValueError(f"unknown delta source {self.delta_kind!r}")
        if self.xi_kind == "bernoulli" and not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if self.delta_kind == "corollary":
            if not (0.0 <= self.beta <= 1.0) or self.c_beta < 0:
                raise ValueError("corollary rule needs beta in [0, 1] and c_beta >= 0")
            if self.s_max <= 0 or self.k < 1:
                raise ValueError("corollary rule needs s_max > 0 and k >= 1")

    def xi_at(self, t: int, rng: np.random.Generator | None = None) -> bool:
        if self.xi_kind == "always":
            return True
        if self.xi_kind == "never":
            return False
        if self.xi_kind == "explicit":
            return bool(self.xi_seq[t - 1])
        if rng is None:
            raise ValueError("bernoulli schedule needs the run's rng stream")
        return bool(rng.random() < self.alpha)


def delta_at(schedule: CoordinationSchedule, t: int) -> float:
    """Scheduled projection accuracy delta^t >= 0."""
    if t < 1:
        raise ValueError("t is 1-based")
    if schedule.delta_kind == "zero":
        return 0.0
    if schedule.delta_kind == "explicit":
        return float(schedule.delta_seq[t - 1])
    return (
        schedule.c_beta
        * (1.0 - schedule.beta) ** 2
        * math.sqrt(schedule.k)
        / math.sqrt(t)
        * schedule.s_max**2
    )


def coordinate(
    learners: list[LearnerState],
    counters: ObservationCounters,
    spec: StructureSpec,
    mode: str,
    delta: float,
    *,
    override: dict[int, np.ndarray] | None = None,
    free_fill: str = "max",
) -> ProjectionResult:
    """Gather all blocks, project jointly, scatter the result to every learner.

    `override` substitutes a learner's shared block (the addressed learner
    shares its pre-clip gradient step). Weights are sqrt of the observation
    counts, or all ones in "identity" mode.
    """
    if mode not in WEIGHTING_MODES:
        raise ValueError(f"unknown weighting mode {mode!r}")
    d = spec.d
    joint = np.empty(spec.size)
    for state in learners:
        block = override.get(state.task) if override else None
        joint[task_slice(state.task, d)] = block if block is not None else state.w
    if mode == "sqrt-tau":
        q = build_weight_matrix(counters, d)
    else:
        q = WeightMatrix.identity(spec.size)
    # the runtime accounting clocks the projection call only, not gather/scatter
    tic = time.perf_counter()
    result = weighted_project(joint, q, spec, delta, free_fill=free_fill)
    result.time_us = (time.perf_counter() - tic) * 1e6
    warn_if_uncertified(result, delta)
    for state in learners:
        state.w = result.w[task_slice(state.task, d)].copy()
    return result


@dataclass
class StepRecord:
    t: int
    task: int
    loss: float
    coordinated: bool
    delta: float
    gap: float
    proj_time_us: float
    sweeps: int = 0


def cool_step(
    t: int,
    task: int,
    oracle: LossOracle,
    learners: list[LearnerState],
    counters: ObservationCounters,
    schedule: CoordinationSchedule,
    spec: StructureSpec,
    mode: str = "sqrt-tau",
    xi_rng: np.random.Generator | None = None,
    free_fill: str = "max",
) -> StepRecord:
    """One full round: local gradient step, then the scheduled coordination.

    The addressed learner suffers its loss and takes the gradient step; when
    xi^t fires, the pre-clip step joins the joint projection (all learners
    receive new blocks), otherwise the learner clips locally. A "never"
    schedule therefore reproduces the independent baseline exactly.
    """
    state = learners[task]
    loss, report = oracle(state.w)
    w_tilde = gradient_step(state, report)
    counters.observe(task)
    xi = schedule.xi_at(t, xi_rng)
    if xi:
        delta = delta_at(schedule, t)
        result = coordinate(
            learners,
            counters,
            spec,
            mode,
            delta,
            override={task: w_tilde},
            free_fill=free_fill,
        )
        return StepRecord(
            t, task, loss, True, delta, result.gap, result.time_us, result.sweeps
        )
    state.w = state.box.clamp(w_tilde)
    return StepRecord(t, task, loss, False, 0.0, 0.0, 0.0)


def ocp_regret_bound(t_horizon: int, s_max: float, g_max: float) -> float:
    """Single-task projected-subgradient bound (3/2) sqrt(T) S G."""
    return 1.5 * math.sqrt(t_horizon) * s_max * g_max


def iol_regret_bound(t_horizon: int, k: int, s_max: float, g_max: float) -> float:
    """Independent-ensemble bound (3/2) sqrt(TK) S G."""
    return 1.5 * math.sqrt(t_horizon * k) * s_max * g_max


def cool_regret_bound(
    t_horizon: int,
    k: int,
    s_max: float,
    g_max: float,
    eta: float,
    xi_seq,
    delta_seq,
) -> float:
    """Coordinated bound R1 + R2 + R3 + R4 for realized schedules.

    R1 covers the base learning terms, R2 charges S G per coordination onset
    (xi^0 treated as 0), R3 charges the allowed projection inaccuracy, and
    R4 is the constant remainder.
    """
    xi = np.asarray(xi_seq, dtype=bool)
    delta = np.asarray(delta_seq, dtype=float)
    if xi.shape != (t_horizon,) or delta.shape != (t_horizon,):
        raise ValueError("xi and delta sequences must have length T")
    if np.any(delta < 0):
        raise ValueError("delta values must be non-negative")
    stk = math.sqrt(t_horizon * k)
    r1 = s_max**2 * stk / (2 * eta) + 2 * eta * g_max**2 * stk
    onsets = xi & ~np.concatenate(([False], xi[:-1]))
    r2 = float(onsets.sum()) * s_max * g_max
    tt = np.arange(1, t_horizon + 1, dtype=float)
    noise = delta + np.sqrt(2.0 * delta) * (tt * k) ** 0.25 * s_max
    r3 = float(np.sum(noise[xi])) / eta
    r4 = s_max**2 / (2 * eta) - 2 * eta * g_max**2 * k
    return r1 + r2 + r3 + r4


def cool_expected_regret_bound(
    t_horizon: int,
    k: int,
    s_max: float,
    g_max: float,
    c_alpha: float,
    c_beta: float,
    beta: float,
) -> float:
    """Expected-regret bound for the sporadic/approximate parameterization.

    Holds for xi ~ Bernoulli(c_alpha / sqrt(T)), delta^t by the corollary
    rule, and eta = S / (2G).
    """
    if not (0.0 <= c_alpha <= math.sqrt(t_horizon)):
        raise ValueError("c_alpha must lie in [0, sqrt(T)]")
    if c_beta < 0 or not (0.0 <= beta <= 1.0):
        raise ValueError("c_beta must be >= 0 and beta in [0, 1]")
    lead = 2.0 * math.sqrt(t_horizon * k) * s_max * g_max
    inner = (
        1.0
        + c_alpha / (2.0 * math.sqrt(k)) * (1.0 - c_alpha / math.sqrt(t_horizon))
        + c_alpha * (c_beta + math.sqrt(2.0 * c_beta)) * (1.0 - beta)
    )
    return lead * inner


def required_batch_size(s_max: float, eps: float) -> int:
    """Smallest batch length the batched-repetition bound asks for."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil((s_max / eps + 0.5) ** 2)


def batch_regret_bound(batch: int, s_max: float, g_max: float) -> float:
    """Coordinated bound (3/2) sqrt(B) S G in the batched shared-value setting."""
    return 1.5 * math.sqrt(batch) * s_max * g_max
