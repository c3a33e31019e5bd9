import math

import numpy as np
import pytest

from coolsim.constraints import StructureSpec, is_member
from coolsim.coordinator import (
    CoordinationSchedule,
    batch_regret_bound,
    cool_expected_regret_bound,
    cool_regret_bound,
    cool_step,
    coordinate,
    delta_at,
    iol_regret_bound,
    ocp_regret_bound,
    required_batch_size,
)
from coolsim.core import (
    GradientReport,
    ObservationCounters,
    SolutionBox,
    n_pair_tasks,
    pair_index,
)
from coolsim.hemiproj import floyd_warshall_clip
from coolsim.learners import make_ensemble
from coolsim.losses import absolute_loss_and_grad


def test_delta_at_examples():
    sched = CoordinationSchedule(
        delta_kind="corollary", c_beta=1.0, beta=1.0, s_max=9.0, k=90
    )
    assert delta_at(sched, 10) == 0.0

    sched = CoordinationSchedule(
        delta_kind="corollary", c_beta=1.0, beta=0.9, s_max=9.0, k=90
    )
    assert delta_at(sched, 100) == pytest.approx(0.01 * (math.sqrt(90) / 10) * 81)
    assert delta_at(sched, 100) == pytest.approx(0.768, abs=5e-4)

    assert delta_at(CoordinationSchedule(), 1) == 0.0
    explicit = CoordinationSchedule(delta_kind="explicit", delta_seq=np.array([0.5, 0.25]))
    assert delta_at(explicit, 2) == 0.25
    with pytest.raises(ValueError):
        delta_at(CoordinationSchedule(), 0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        CoordinationSchedule(xi_kind="sometimes")
    with pytest.raises(ValueError):
        CoordinationSchedule(xi_kind="bernoulli", alpha=1.5)
    with pytest.raises(ValueError):
        CoordinationSchedule(delta_kind="corollary", beta=0.5, s_max=0.0, k=3)


def test_schedule_xi_sources():
    assert CoordinationSchedule(xi_kind="always").xi_at(3)
    assert not CoordinationSchedule(xi_kind="never").xi_at(3)
    sched = CoordinationSchedule(xi_kind="explicit", xi_seq=np.array([1, 0, 1]))
    assert sched.xi_at(1) and not sched.xi_at(2)
    rng = np.random.default_rng(0)
    bern = CoordinationSchedule(xi_kind="bernoulli", alpha=1.0)
    assert bern.xi_at(1, rng)
    with pytest.raises(ValueError):
        bern.xi_at(1)


def setup_hemi(n=3, r=9.0, taus=None, weights=None):
    spec = StructureSpec.hemimetric(n, r)
    learners = make_ensemble(spec.K, 9.0, spec.box)
    counters = ObservationCounters.zeros(spec.K)
    if taus is not None:
        counters.counts[:] = taus
    if weights is not None:
        for state, w in zip(learners, weights):
            state.w = np.array([float(w)])
    return spec, learners, counters


def test_coordinate_feasible_joint_is_fixed_point():
    values = floyd_warshall_clip(np.random.default_rng(4).uniform(0, 9, 6), 9.0)
    spec, learners, counters = setup_hemi(taus=np.ones(6, dtype=int), weights=values)
    coordinate(learners, counters, spec, "sqrt-tau", 0.0)
    after = np.array([s.w[0] for s in learners])
    assert np.array_equal(after, values)


def test_coordinate_shared_average_example():
    spec = StructureSpec.shared_all(1, 2, box=SolutionBox.interval(0, 9, 1))
    learners = make_ensemble(2, 9.0, spec.box)
    learners[0].w = np.array([2.0])
    learners[1].w = np.array([5.0])
    counters = ObservationCounters(np.array([4, 1]))
    coordinate(learners, counters, spec, "sqrt-tau", 0.0)
    assert learners[0].w[0] == 3.0 and learners[1].w[0] == 3.0


def test_coordinate_single_task_leaves_observed_weight():
    spec, learners, counters = setup_hemi()
    z = pair_index(0, 1, 3)
    counters.counts[z] = 5
    learners[z].w = np.array([7.3])
    coordinate(learners, counters, spec, "sqrt-tau", 0.0)
    assert learners[z].w[0] == 7.3
    joint = np.array([s.w[0] for s in learners])
    assert is_member(joint, spec, tol=0.0)


def test_any_single_value_completes_with_ceiling_entries():
    # the feasibility argument behind leaving a lone observed pair alone:
    # any v in [0, r] extends to a member with every other entry at r
    spec = StructureSpec.hemimetric(4, 9.0)
    rng = np.random.default_rng(21)
    for _ in range(50):
        joint = np.full(spec.K, 9.0)
        joint[int(rng.integers(spec.K))] = rng.uniform(0.0, 9.0)
        assert is_member(joint, spec, tol=0.0)


def test_coordinate_override_shares_preclip_step():
    spec, learners, counters = setup_hemi()
    z = pair_index(0, 1, 3)
    counters.counts[z] = 1
    coordinate(learners, counters, spec, "sqrt-tau", 0.0, override={z: np.array([-4.0])})
    # the pre-clip share lands below the box and projects back to its floor
    assert learners[z].w[0] == 0.0


def test_cool_step_never_schedule_matches_iol_trajectory():
    spec, learners, counters = setup_hemi()
    learners2 = make_ensemble(spec.K, 9.0, spec.box)
    sched = CoordinationSchedule(xi_kind="never")
    rng = np.random.default_rng(0)
    order = rng.integers(0, spec.K, 100)
    targets = rng.uniform(0, 9, spec.K)
    losses1, losses2 = [], []
    for t, z in enumerate(order, start=1):
        z = int(z)

        def oracle(w, z=z):
            loss, g = absolute_loss_and_grad(float(w[0]), targets[z])
            return loss, GradientReport(z, np.array([g]), 1.0)

        rec = cool_step(t, z, oracle, learners, counters, sched, spec)
        losses1.append(rec.loss)
        from coolsim.learners import iol_step

        _, loss = iol_step(learners2, z, oracle)
        losses2.append(loss)
    assert np.array_equal(np.array(losses1), np.array(losses2))
    assert np.array_equal(
        np.array([s.w[0] for s in learners]), np.array([s.w[0] for s in learners2])
    )


def test_cool_step_records_projection_fields():
    spec, learners, counters = setup_hemi()
    sched = CoordinationSchedule(xi_kind="always", delta_kind="zero")
    z = pair_index(0, 1, 3)

    def oracle(w):
        loss, g = absolute_loss_and_grad(float(w[0]), 9.0)
        return loss, GradientReport(z, np.array([g]), 1.0)

    rec = cool_step(1, z, oracle, learners, counters, sched, spec)
    assert rec.coordinated and rec.proj_time_us > 0.0
    assert counters.counts[z] == 1

    rec2 = cool_step(2, z, oracle, learners, counters, CoordinationSchedule(xi_kind="never"), spec)
    assert not rec2.coordinated and rec2.proj_time_us == 0.0 and rec2.gap == 0.0


def test_feasible_after_every_coordination():
    spec, learners, counters = setup_hemi(n=4)
    sched = CoordinationSchedule(xi_kind="always", delta_kind="zero")
    rng = np.random.default_rng(3)
    targets = rng.uniform(0, 9, spec.K)
    for t in range(1, 60):
        z = int(rng.integers(spec.K))

        def oracle(w, z=z):
            loss, g = absolute_loss_and_grad(float(w[0]), targets[z])
            return loss, GradientReport(z, np.array([g]), 1.0)

        cool_step(t, z, oracle, learners, counters, sched, spec)
        joint = np.array([s.w[0] for s in learners])
        assert is_member(joint, spec, tol=1e-9)


def test_bound_formula_examples():
    # exact coordination with eta = S/(2G): dominant term 2 sqrt(TK) S G
    t_horizon, k, s, g = 500, 90, 9.0, 1.0
    eta = 0.5 * s / g
    xi = np.ones(t_horizon, dtype=bool)
    deltas = np.zeros(t_horizon)
    bound = cool_regret_bound(t_horizon, k, s, g, eta, xi, deltas)
    dominant = 2 * math.sqrt(t_horizon * k) * s * g
    assert dominant == pytest.approx(3818.4, abs=0.1)
    r2 = s * g
    r4 = s**2 / (2 * eta) - 2 * eta * g**2 * k
    assert bound == pytest.approx(dominant + r2 + r4)

    # no coordination: R2 = R3 = 0
    xi0 = np.zeros(t_horizon, dtype=bool)
    bound0 = cool_regret_bound(t_horizon, k, s, g, eta, xi0, deltas)
    r1 = s**2 * math.sqrt(t_horizon * k) / (2 * eta) + 2 * eta * g**2 * math.sqrt(t_horizon * k)
    assert bound0 == pytest.approx(r1 + r4)

    assert iol_regret_bound(500, 90, 9.0, 1.0) == pytest.approx(2863.8, abs=0.05)
    assert ocp_regret_bound(500, 9.0, 1.0) == pytest.approx(1.5 * math.sqrt(500) * 9.0)


def test_bound_onset_counting():
    xi = np.array([0, 1, 1, 0, 1, 0, 0, 1], dtype=bool)
    deltas = np.zeros(8)
    base = cool_regret_bound(8, 2, 1.0, 1.0, 1.0, np.zeros(8, dtype=bool), deltas)
    bound = cool_regret_bound(8, 2, 1.0, 1.0, 1.0, xi, deltas)
    # onsets at t=2, 5, 8
    assert bound - base == pytest.approx(3.0)


def test_bound_r3_term():
    t_horizon, k, s, eta = 4, 9, 2.0, 1.0
    xi = np.array([1, 0, 1, 0], dtype=bool)
    deltas = np.array([0.5, 0.5, 2.0, 2.0])
    expected_r3 = sum(
        deltas[t - 1] + math.sqrt(2 * deltas[t - 1]) * (t * k) ** 0.25 * s
        for t in (1, 3)
    )
    with_noise = cool_regret_bound(t_horizon, k, s, 1.0, eta, xi, deltas)
    without = cool_regret_bound(t_horizon, k, s, 1.0, eta, xi, np.zeros(4))
    assert with_noise - without == pytest.approx(expected_r3)


def test_expected_bound_consistency():
    # c_alpha = sqrt(T) and beta = 1 collapse to the exact-coordination constant
    t_horizon, k, s, g = 400, 16, 3.0, 1.5
    val = cool_expected_regret_bound(t_horizon, k, s, g, math.sqrt(t_horizon), 1.0, 1.0)
    assert val == pytest.approx(2 * math.sqrt(t_horizon * k) * s * g)
    with pytest.raises(ValueError):
        cool_expected_regret_bound(t_horizon, k, s, g, math.sqrt(t_horizon) + 1, 1.0, 1.0)


def test_batch_bound_examples():
    assert required_batch_size(1.0, 0.25) == 21
    assert batch_regret_bound(21, 1.0, 1.0) == pytest.approx(6.874, abs=1e-3)
