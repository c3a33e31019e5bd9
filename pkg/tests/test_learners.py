import copy

import numpy as np
import pytest

from coolsim.coordinator import iol_regret_bound, ocp_regret_bound
from coolsim.core import GradientReport, SolutionBox
from coolsim.learners import (
    LearnerState,
    iol_step,
    local_update,
    make_ensemble,
)
from coolsim.losses import absolute_loss_and_grad


def box09():
    return SolutionBox.interval(0.0, 9.0, 1)


def report(z, g):
    return GradientReport(z, np.array([float(g)]), 1.0)


def test_local_update_examples():
    state = LearnerState(0, np.array([0.5]), 0, 9.0, box09())
    local_update(state, report(0, +1))
    assert state.w[0] == 0.0 and state.tau == 1

    state = LearnerState(0, np.array([5.0]), 80, 9.0, box09())
    local_update(state, report(0, -1))
    assert state.w[0] == 6.0 and state.tau == 81

    state = LearnerState(0, np.array([3.3]), 4, 9.0, box09())
    local_update(state, report(0, 0))
    assert state.w[0] == 3.3 and state.tau == 5


def test_local_update_rejects_wrong_task():
    state = LearnerState(0, np.array([1.0]), 0, 9.0, box09())
    with pytest.raises(ValueError):
        local_update(state, report(1, 1))


def test_learning_rate_is_per_visit_regardless_of_interleaving():
    # drive task 0 at irregular global times; its s-th visit must step eta/sqrt(s)
    state = LearnerState(0, np.array([9.0]), 0, 2.0, SolutionBox.interval(-100, 100, 1))
    w_prev = state.w[0]
    for visit in range(1, 20):
        local_update(state, report(0, +1))
        step = w_prev - state.w[0]
        assert step == pytest.approx(2.0 / np.sqrt(visit))
        w_prev = state.w[0]


def make_oracle(target):
    def oracle(w):
        loss, g = absolute_loss_and_grad(float(w[0]), target)
        return loss, None, g

    return oracle


def test_iol_step_touches_only_addressed_learner():
    learners = make_ensemble(3, 9.0, box09())
    frozen = copy.deepcopy(learners[1]), copy.deepcopy(learners[2])

    def oracle(w):
        loss, g = absolute_loss_and_grad(float(w[0]), 7.0)
        return loss, GradientReport(0, np.array([g]), 1.0)

    iol_step(learners, 0, oracle)
    assert np.array_equal(learners[1].w, frozen[0].w) and learners[1].tau == 0
    assert np.array_equal(learners[2].w, frozen[1].w) and learners[2].tau == 0
    assert learners[0].tau == 1


def _run_iol(k, targets, order, eta, seed):
    rng = np.random.default_rng(seed)
    learners = make_ensemble(k, eta, box09())
    losses = []
    for t in range(len(order)):
        z = order[t]

        def oracle(w, z=z):
            loss, g = absolute_loss_and_grad(float(w[0]), targets[z])
            return loss, GradientReport(z, np.array([g]), 1.0)

        _, loss = iol_step(learners, z, oracle)
        losses.append(loss)
    return np.array(losses)


def test_single_task_ensemble_equals_ocp_learner():
    targets = [7.0]
    order = [0] * 50
    a = _run_iol(1, targets, order, 9.0, 0)
    state = LearnerState(0, np.array([4.5]), 0, 9.0, box09())
    b = []
    for _ in range(50):
        loss, g = absolute_loss_and_grad(float(state.w[0]), 7.0)
        local_update(state, GradientReport(0, np.array([g]), 1.0))
        b.append(loss)
    assert np.array_equal(a, np.array(b))


def test_iol_deterministic_replay():
    rng = np.random.default_rng(123)
    order = rng.integers(0, 4, 200)
    targets = rng.uniform(0, 9, 4)
    a = _run_iol(4, targets, order, 9.0, 1)
    b = _run_iol(4, targets, order, 9.0, 1)
    assert np.array_equal(a, b)


def test_ocp_empirical_regret_under_bound():
    # single-task runs with eta = S/G never exceed (3/2) sqrt(T) S G
    rng = np.random.default_rng(31)
    for _ in range(20):
        target = float(rng.uniform(0, 9))
        t_horizon = int(rng.integers(5, 300))
        losses = _run_iol(1, [target], [0] * t_horizon, 9.0, 0)
        assert losses.sum() <= ocp_regret_bound(t_horizon, 9.0, 1.0) + 1e-9


def test_iol_empirical_regret_under_bound():
    rng = np.random.default_rng(32)
    for trial in range(10):
        k = int(rng.integers(2, 8))
        t_horizon = 200
        order = rng.integers(0, k, t_horizon)
        targets = rng.uniform(0, 9, k)
        losses = _run_iol(k, targets, order, 9.0, trial)
        assert losses.sum() <= iol_regret_bound(t_horizon, k, 9.0, 1.0) + 1e-9


def test_make_ensemble_midpoint_init():
    learners = make_ensemble(4, 9.0, box09())
    assert all(s.w[0] == 4.5 for s in learners)
    learners = make_ensemble(2, 9.0, box09(), init=np.array([1.0]))
    assert all(s.w[0] == 1.0 for s in learners)
