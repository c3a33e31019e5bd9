"""Coordinated online multi-task learning with weighted structural projections.

Per-task online gradient learners are periodically coupled by projecting
their concatenated weights onto a convex structural set (shared parameters
or bounded hemimetrics) under observation-count weights. Coordination can be
sporadic (a coin per round) and approximate (a duality-gap budget per
projection); closed-form regret bounds quantify the trade-offs.
"""

from .constraints import (
    DykstraResult,
    ProjectionResult,
    StructureSpec,
    dykstra_oracle,
    is_member,
    weighted_project,
)
from .coordinator import (
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
from .core import (
    GradientReport,
    ObservationCounters,
    SolutionBox,
    WeightMatrix,
    build_weight_matrix,
    mahalanobis_sq,
    pair_index,
    index_pair,
    n_pair_tasks,
)
from .environments import (
    ClusteredHemimetric,
    CostTuple,
    TaskOrder,
    build_task_trace,
    clustered_ground_truth,
    load_cost_tuples,
    next_task,
    synth_cost_tuples,
)
from .harness import (
    AirbnbConfig,
    RunConfig,
    airbnb_experiment,
    cumulative_mean_reward,
    evaluate_bounds,
    run_algorithms,
    run_experiment,
    sweep,
)
from .hemiproj import (
    HemimetricDualState,
    HemimetricInstance,
    HemiProjection,
    duality_gap,
    floyd_warshall_clip,
    hemimetric_project,
    triangle_fix_sweep,
)
from .learners import LearnerState, iol_step, local_update, make_ensemble
from .losses import (
    absolute_loss_and_grad,
    eps_insensitive_loss_and_grad,
    marketplace_reward,
    posted_price_loss_and_grad,
)

__version__ = "0.1.0"
