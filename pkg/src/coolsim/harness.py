"""Run orchestration: experiments, regret/reward accounting, bounds, CSV output.

A run materializes its task trace (and per-step costs for the pricing loss)
up front from a seeded stream, so independent and coordinated algorithms can
consume the identical trace for paired comparisons. Coordination coin flips
draw from a separate stream; replaying a config with the same seed
reproduces every column except the wall-clock projection timings.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .coordinator import (
    CoordinationSchedule,
    batch_regret_bound,
    cool_regret_bound,
    cool_step,
    iol_regret_bound,
    required_batch_size,
)
from .constraints import StructureSpec
from .core import GradientReport, ObservationCounters, SolutionBox, pair_index
from .environments import (
    CostTuple,
    TaskOrder,
    build_task_trace,
    clustered_ground_truth,
    load_cost_tuples,
    synth_cost_tuples,
)
from .learners import make_ensemble
from .losses import (
    absolute_loss_and_grad,
    eps_insensitive_loss_and_grad,
    marketplace_reward,
    posted_price_loss_and_grad,
)

ALGORITHMS = ("iol", "cool", "uw-cool")
LOSSES = ("absolute", "eps-insensitive", "posted-price")

RECORD_HEADER = (
    "run,seed,algorithm,t,task,loss,cum_regret,reward,proj_time_us,coordinated,gap"
)
SWEEP_HEADER = "param,value,mean_final_regret,std_final_regret,mean_total_proj_time_us"


@dataclass
class RunConfig:
    """One experiment cell; see README for the CLI flags mapping onto this."""

    structure: str = "hemimetric"
    n: int = 10
    r: float = 9.0
    r_in: float = 1.0
    r_out: float = 9.0
    d: int = 1
    d_prime: int | None = None
    K: int | None = None
    box_lo: float = 0.0
    box_hi: float = 1.0
    loss: str = "absolute"
    c_star: float = 0.5
    eps: float = 0.25
    u: float = 40.0
    delta_slope: float = 20.0
    order: str = "random"
    batch: int = 5
    single_task: int = 0
    T: int = 500
    algorithm: str = "cool"
    alpha: float = 1.0
    beta: float = 1.0
    c_beta: float = 1.0
    eta: float | None = None
    w_init: float | None = None
    seed: int = 0
    runs: int = 10
    free_fill: str = "max"
    independent_traces: bool = False
    out: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.runs < 1 or self.T < 1:
            raise ValueError("runs and T must be >= 1")
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.d != 1:
            raise ValueError("the harness drives scalar-per-task losses (d = 1)")


@dataclass
class RunRecord:
    run: int
    seed: int
    algorithm: str
    t: int
    task: int
    loss: float
    cum_regret: float
    reward: float
    proj_time_us: float
    coordinated: int
    gap: float


@dataclass
class RunOutput:
    """One run's records plus everything the bound calculators need."""

    algorithm: str
    run: int
    seed: int
    eta: float
    records: list[RunRecord]
    xi: np.ndarray
    deltas: np.ndarray
    total_sweeps: int = 0

    @property
    def final_regret(self) -> float:
        return self.records[-1].cum_regret

    @property
    def total_proj_time_us(self) -> float:
        return sum(r.proj_time_us for r in self.records)

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])

    @property
    def mean_reward(self) -> float:
        return float(np.mean([r.reward for r in self.records]))


@dataclass
class BoundReport:
    algorithm: str
    run: int
    realized: float
    bound: float
    ok: bool


def structure_spec(config: RunConfig) -> StructureSpec:
    if config.structure == "hemimetric":
        return StructureSpec.hemimetric(config.n, config.r)
    box = SolutionBox.interval(config.box_lo, config.box_hi, config.d)
    k = config.K
    if k is None:
        raise ValueError(f"{config.structure} structure needs an explicit K")
    if config.structure == "shared":
        return StructureSpec.shared_all(config.d, k, box=box)
    if config.structure == "shared-prefix":
        return StructureSpec.shared_prefix(config.d, config.d_prime or 1, k, box=box)
    if config.structure == "unrelated":
        return StructureSpec.unrelated(config.d, k, box=box)
    raise ValueError(f"unknown structure {config.structure!r}")


def grad_bound(config: RunConfig) -> float:
    if config.loss == "posted-price":
        return max(1.0, config.u / config.delta_slope)
    return 1.0


def default_eta(config: RunConfig, algorithm: str, s_max: float, g_max: float) -> float:
    """Theorem defaults: S/G for the independent baseline, S/(2G) coordinated."""
    if config.eta is not None:
        return config.eta
    if algorithm == "iol":
        return s_max / g_max
    return 0.5 * s_max / g_max


def _schedule_for(config: RunConfig, algorithm: str, s_max: float, k: int) -> CoordinationSchedule:
    if algorithm == "iol":
        return CoordinationSchedule(xi_kind="never")
    return CoordinationSchedule(
        xi_kind="bernoulli",
        alpha=config.alpha,
        delta_kind="corollary",
        c_beta=config.c_beta,
        beta=config.beta,
        s_max=s_max,
        k=k,
    )


def _env_rng(config: RunConfig, run_idx: int, algorithm: str) -> np.random.Generator:
    if config.independent_traces:
        rank = ALGORITHMS.index(algorithm)
        return np.random.default_rng([config.seed, run_idx, 0, rank])
    return np.random.default_rng([config.seed, run_idx, 0])


def _xi_rng(config: RunConfig, run_idx: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, run_idx, 1])


def _task_order(config: RunConfig) -> TaskOrder:
    if config.order == "random":
        return TaskOrder.uniform()
    if config.order == "batch":
        return TaskOrder.batched(config.batch)
    if config.order == "single":
        return TaskOrder.single(config.single_task)
    raise ValueError(f"unknown order {config.order!r} (trace orders come from data)")


def _ground_truth(config: RunConfig, spec: StructureSpec) -> np.ndarray:
    """Competing weight vector w*, a member of S* by construction."""
    if config.structure == "hemimetric":
        return clustered_ground_truth(config.n, config.r_in, config.r_out)
    return np.full(spec.size, config.c_star)


def _run_one(
    config: RunConfig,
    spec: StructureSpec,
    algorithm: str,
    run_idx: int,
    tasks: np.ndarray,
    costs: np.ndarray | None,
    wstar: np.ndarray,
    pstar: float | None,
) -> RunOutput:
    k = spec.K
    box = spec.box
    s_max = box.diameter
    g_max = grad_bound(config)
    eta = default_eta(config, algorithm, s_max, g_max)
    mode = "identity" if algorithm == "uw-cool" else "sqrt-tau"
    schedule = _schedule_for(config, algorithm, s_max, k)
    xi_rng = _xi_rng(config, run_idx)
    init = None if config.w_init is None else np.full(spec.d, config.w_init)
    learners = make_ensemble(k, eta, box, init=init)
    counters = ObservationCounters.zeros(k)
    t_horizon = tasks.shape[0]
    records: list[RunRecord] = []
    xi_seq = np.zeros(t_horizon, dtype=bool)
    delta_seq = np.zeros(t_horizon)
    cum_regret = 0.0
    total_sweeps = 0

    for t in range(1, t_horizon + 1):
        z = int(tasks[t - 1])
        w_before = float(learners[z].w[0])
        if config.loss == "absolute":
            target = float(wstar[z])
            oracle = _absolute_oracle(z, target, g_max)
            comp_loss = 0.0
            reward = 0.0
        elif config.loss == "eps-insensitive":
            oracle = _eps_oracle(z, config.c_star, config.eps, g_max)
            comp_loss = 0.0
            reward = 0.0
        else:
            c_t = float(costs[t - 1])
            oracle = _price_oracle(z, c_t, config.u, config.delta_slope, g_max)
            comp_loss = posted_price_loss_and_grad(pstar, c_t, config.u, config.delta_slope)[0]
            reward = marketplace_reward(w_before, c_t, config.u)
        rec = cool_step(
            t, z, oracle, learners, counters, schedule, spec, mode, xi_rng,
            free_fill=config.free_fill,
        )
        cum_regret += rec.loss - comp_loss
        xi_seq[t - 1] = rec.coordinated
        delta_seq[t - 1] = rec.delta
        total_sweeps += rec.sweeps
        records.append(
            RunRecord(
                run_idx, config.seed, algorithm, t, z, rec.loss, cum_regret,
                reward, rec.proj_time_us, int(rec.coordinated), rec.gap,
            )
        )
    return RunOutput(
        algorithm, run_idx, config.seed, eta, records, xi_seq, delta_seq, total_sweeps
    )


def _absolute_oracle(z: int, target: float, g_max: float):
    def oracle(w: np.ndarray):
        loss, g = absolute_loss_and_grad(float(w[0]), target)
        return loss, GradientReport(z, np.array([g]), g_max)

    return oracle


def _eps_oracle(z: int, c_star: float, eps: float, g_max: float):
    def oracle(w: np.ndarray):
        loss, g = eps_insensitive_loss_and_grad(float(w[0]), c_star, eps)
        return loss, GradientReport(z, np.array([g]), g_max)

    return oracle


def _price_oracle(z: int, cost: float, u: float, slope: float, g_max: float):
    def oracle(w: np.ndarray):
        loss, g = posted_price_loss_and_grad(float(w[0]), cost, u, slope)
        return loss, GradientReport(z, np.array([g]), g_max)

    return oracle


def run_experiment(config: RunConfig) -> list[RunRecord]:
    """Execute config.runs seeded runs of config.algorithm; emit CSV if asked."""
    outputs = run_algorithms(config, (config.algorithm,))[config.algorithm]
    records = [rec for out in outputs for rec in out.records]
    if config.out:
        write_records_csv(config.out, records)
    return records


def run_algorithms(
    config: RunConfig, algorithms: tuple[str, ...]
) -> dict[str, list[RunOutput]]:
    """Run several algorithms over the same seeded runs (shared traces by default)."""
    if config.loss == "posted-price":
        raise ValueError("posted-price runs go through airbnb_experiment")
    spec = structure_spec(config)
    wstar = _ground_truth(config, spec)
    outputs: dict[str, list[RunOutput]] = {a: [] for a in algorithms}
    for run_idx in range(config.runs):
        shared_tasks: np.ndarray | None = None
        for algorithm in algorithms:
            if config.independent_traces or shared_tasks is None:
                rng = _env_rng(config, run_idx, algorithm)
                tasks = build_task_trace(_task_order(config), config.T, spec.K, rng)
                if not config.independent_traces:
                    shared_tasks = tasks
            else:
                tasks = shared_tasks
            outputs[algorithm].append(
                _run_one(config, spec, algorithm, run_idx, tasks, None, wstar, None)
            )
    return outputs


def evaluate_bounds(
    config: RunConfig, outputs: dict[str, list[RunOutput]]
) -> list[BoundReport]:
    """Closed-form bound per run with a realized <= bound dominance flag.

    Coordinated runs get the realized-schedule bound; when a run's schedule
    and learning rate meet the conditions of a tighter special case (exact
    coordination every round, or the batched shared-value setting), that
    bound applies instead.
    """
    spec = structure_spec(config)
    s_max = spec.box.diameter
    g_max = grad_bound(config)
    reports: list[BoundReport] = []
    for algorithm, outs in outputs.items():
        for out in outs:
            t_horizon = out.xi.shape[0]
            if algorithm == "iol":
                bound = iol_regret_bound(t_horizon, spec.K, s_max, g_max)
            else:
                bound = cool_regret_bound(
                    t_horizon, spec.K, s_max, g_max, out.eta, out.xi, out.deltas
                )
                exact = bool(out.xi.all()) and not out.deltas.any()
                if exact and abs(out.eta - s_max / g_max) < 1e-12:
                    bound = min(bound, 1.5 * math.sqrt(t_horizon * spec.K) * s_max * g_max)
                    if (
                        config.structure == "shared"
                        and config.loss == "eps-insensitive"
                        and config.order == "batch"
                        and config.batch >= required_batch_size(s_max, config.eps)
                    ):
                        bound = min(bound, batch_regret_bound(config.batch, s_max, g_max))
                elif exact and abs(out.eta - 0.5 * s_max / g_max) < 1e-12:
                    bound = min(bound, 2.0 * math.sqrt(t_horizon * spec.K) * s_max * g_max)
            realized = out.final_regret
            reports.append(
                BoundReport(algorithm, out.run, realized, bound, realized <= bound + 1e-9)
            )
    return reports


def sweep(config: RunConfig, param: str, values) -> list[dict]:
    """Grid over alpha or beta; one summary row per value for config.algorithm."""
    if param not in ("alpha", "beta"):
        raise ValueError("sweep parameter must be alpha or beta")
    rows = []
    for v in values:
        cell = replace(config, **{param: float(v), "out": None})
        outs = run_algorithms(cell, (cell.algorithm,))[cell.algorithm]
        finals = np.array([o.final_regret for o in outs])
        times = np.array([o.total_proj_time_us for o in outs])
        rows.append(
            {
                "param": param,
                "value": float(v),
                "mean_final_regret": float(finals.mean()),
                "std_final_regret": float(finals.std(ddof=1)) if len(finals) > 1 else 0.0,
                "mean_total_proj_time_us": float(times.mean()),
            }
        )
    return rows


@dataclass
class AirbnbConfig:
    """Marketplace pricing pipeline over ordered item pairs."""

    data_path: str | None = None
    count: int = 323
    na_rate: float = 0.20
    T: int = 323
    n_items: int = 20
    u: float = 40.0
    delta_slope: float = 20.0
    alpha: float = 1.0
    beta: float = 1.0
    c_beta: float = 1.0
    eta: float | None = None
    seed: int = 0
    runs: int = 10
    shuffle: bool = True
    # never-observed pairs keep their current posted price instead of being
    # pushed to the ceiling: any completion is an optimal projection in the
    # degenerate directions, so the commercially sensible one is chosen
    free_fill: str = "hold"
    out: str | None = None


def _airbnb_stream(cfg: AirbnbConfig, run_idx: int) -> list[CostTuple]:
    """Usable (non-NA) tuples for one run, exactly cfg.T of them when possible."""
    rng = np.random.default_rng([cfg.seed, run_idx, 2])
    if cfg.data_path is not None:
        usable = [t for t in load_cost_tuples(cfg.data_path) if not t.is_na]
        if cfg.shuffle:
            order = rng.permutation(len(usable))
            usable = [usable[i] for i in order]
        return usable[: cfg.T]
    usable = []
    while len(usable) < cfg.T:
        chunk = max(cfg.count, math.ceil(cfg.T / max(1.0 - cfg.na_rate, 0.05)) + 16)
        usable.extend(
            t
            for t in synth_cost_tuples(chunk, cfg.na_rate, rng=rng, n_items=cfg.n_items)
            if not t.is_na
        )
    return usable[: cfg.T]


def airbnb_experiment(cfg: AirbnbConfig) -> dict[str, list[RunOutput]]:
    """Paired pricing runs (independent vs coordinated) on cost-tuple streams.

    Prices live in [0, u]; the structural set is the u-bounded hemimetric
    cone over ordered pairs. Regret is reported against the constant
    competitor at the stream's optimal fixed-price quantile, which is always
    a feasible hemimetric.
    """
    base = RunConfig(
        structure="hemimetric",
        n=cfg.n_items,
        r=cfg.u,
        loss="posted-price",
        u=cfg.u,
        delta_slope=cfg.delta_slope,
        T=cfg.T,
        alpha=cfg.alpha,
        beta=cfg.beta,
        c_beta=cfg.c_beta,
        eta=cfg.eta,
        seed=cfg.seed,
        runs=cfg.runs,
        free_fill=cfg.free_fill,
    )
    spec = structure_spec(base)
    outputs: dict[str, list[RunOutput]] = {"iol": [], "cool": []}
    for run_idx in range(cfg.runs):
        stream = _airbnb_stream(cfg, run_idx)
        tasks = np.array(
            [pair_index(t.i, t.j, cfg.n_items) for t in stream], dtype=np.int64
        )
        costs = np.array([t.cost for t in stream])
        ratio = cfg.u / cfg.delta_slope
        pstar = float(np.quantile(costs, ratio / (1.0 + ratio), method="inverted_cdf"))
        wstar = np.full(spec.size, pstar)
        for algorithm in ("iol", "cool"):
            outputs[algorithm].append(
                _run_one(base, spec, algorithm, run_idx, tasks, costs, wstar, pstar)
            )
    if cfg.out:
        records = [r for outs in outputs.values() for o in outs for r in o.records]
        write_records_csv(cfg.out, records)
    return outputs


def cumulative_mean_reward(out: RunOutput) -> np.ndarray:
    rewards = np.array([r.reward for r in out.records])
    return np.cumsum(rewards) / np.arange(1, rewards.shape[0] + 1)


def write_records_csv(path, records: list[RunRecord]) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER.split(","))
        for r in records:
            writer.writerow(
                [
                    r.run, r.seed, r.algorithm, r.t, r.task, r.loss, r.cum_regret,
                    r.reward, r.proj_time_us, r.coordinated, r.gap,
                ]
            )


def write_sweep_csv(path, rows: list[dict]) -> None:
    cols = SWEEP_HEADER.split(",")
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in rows:
            writer.writerow([row[c] for c in cols])


def load_config(path) -> RunConfig:
    """RunConfig from a JSON object; unknown keys are an error."""
    with open(Path(path)) as fh:
        data = json.load(fh)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**data)
