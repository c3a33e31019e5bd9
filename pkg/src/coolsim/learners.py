"""Per-task online gradient learners and the independent ensemble baseline.

Each learner follows the projected-subgradient update: after its tau-th
observation it steps by eta/sqrt(tau) along the negative subgradient and
clips back into its box. The independent ensemble (iol) runs one such
learner per task with no coupling; only the addressed learner moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import GradientReport, SolutionBox

# oracle contract: w -> (loss, gradient report)
LossOracle = Callable[[np.ndarray], tuple[float, GradientReport]]


@dataclass
class LearnerState:
    task: int
    w: np.ndarray
    tau: int
    eta: float
    box: SolutionBox

    def __post_init__(self):
        self.w = np.atleast_1d(np.asarray(self.w, dtype=float))


def make_ensemble(
    k: int, eta: float, box: SolutionBox, init: np.ndarray | None = None
) -> list[LearnerState]:
    """One learner per task, started at the box midpoint unless overridden."""
    start = box.midpoint if init is None else np.atleast_1d(np.asarray(init, float))
    return [LearnerState(z, start.copy(), 0, eta, box) for z in range(k)]


def gradient_step(state: LearnerState, g: GradientReport) -> np.ndarray:
    """Count the observation and return the unclipped step w - eta/sqrt(tau) g."""
    if g.task != state.task:
        raise ValueError(f"gradient for task {g.task} sent to learner {state.task}")
    state.tau += 1
    return state.w - (state.eta / np.sqrt(state.tau)) * g.subgradient


def local_update(state: LearnerState, g: GradientReport) -> LearnerState:
    """Full uncoordinated update: gradient step, then box clip."""
    state.w = state.box.clamp(gradient_step(state, g))
    return state


def iol_step(
    learners: list[LearnerState], task: int, oracle: LossOracle
) -> tuple[list[LearnerState], float]:
    """One uncoordinated round: only the addressed learner changes."""
    state = learners[task]
    loss, report = oracle(state.w)
    local_update(state, report)
    return learners, loss
