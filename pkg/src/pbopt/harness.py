"""Experiment engine: seeded multi-run campaigns, convergence statistics
and CSV emission.

A campaign's outputs are a pure function of (config, master seed): run k is
seeded with master_seed + k and every random stream lives inside its
optimizer, so worker counts change wall time only.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .benchmarks import get_problem, normalize_point, problem_names
from .errors import AggregationError, ConfigurationError, EvaluationError
from .es import CmaEs, MuLambdaEs
from .lorenz import write_trajectory_csv
from .pbo import NetworkHyper, PboAgent, PboConfig

OPTIMIZERS = ("pbo", "es", "cmaes")

RUN_CSV_HEADER = "generation,gen_best,best_so_far"
AGGREGATE_CSV_HEADER = "generation,mean_best,min_best,max_best,std_best"

_CONFIG_KEYS = {"problem", "optimizer", "runs", "seed", "generations",
                "out_dir", "workers", "optimizer_params"}
_PBO_KEYS = {"individuals", "alpha", "input_state", "off_policy_importance",
             "adam_beta1", "adam_beta2", "adam_eps", "output_gain",
             "mean", "stddev", "corr"}
_NET_KEYS = {"learning_rate", "history", "epochs", "batches", "hidden"}
_ES_KEYS = {"population", "mu", "step_init", "step_increase", "step_decrease"}
_CMAES_KEYS = {"population", "mu", "step_init"}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    optimizer: str
    runs: int = 10
    seed: int = 0
    generations: int = 100
    out_dir: str = "results"
    workers: int = 1
    optimizer_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(
                f"unknown optimizer {self.optimizer!r}; known: {', '.join(OPTIMIZERS)}")
        get_problem(self.problem)
        if self.runs < 1 or self.generations < 1 or self.workers < 1:
            raise ConfigurationError("runs, generations and workers must be >= 1")
        make_optimizer(self.optimizer, get_problem(self.problem),
                       self.optimizer_params, seed=0)  # validates params early


def _reject_unknown(keys, allowed, where):
    unknown = set(keys) - allowed
    if unknown:
        raise ConfigurationError(
            f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    _reject_unknown(data, _CONFIG_KEYS, "config")
    for required in ("problem", "optimizer"):
        if required not in data:
            raise ConfigurationError(f"config is missing {required!r}")
    return ExperimentConfig(**data)


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def _pbo_config(params):
    _reject_unknown(params, _PBO_KEYS, "pbo")
    kwargs = {k: v for k, v in params.items() if k not in ("mean", "stddev", "corr")}
    if "input_state" in kwargs:
        kwargs["input_state"] = tuple(kwargs["input_state"])
    base = PboConfig(**kwargs)
    for name in ("mean", "stddev", "corr"):
        if name in params:
            _reject_unknown(params[name], _NET_KEYS, f"pbo.{name}")
            net_kwargs = dict(params[name])
            if "hidden" in net_kwargs:
                net_kwargs["hidden"] = tuple(net_kwargs["hidden"])
            defaults = getattr(base, name)
            merged = {k: net_kwargs.get(k, getattr(defaults, k)) for k in
                      ("learning_rate", "history", "epochs", "batches", "hidden")}
            base = replace(base, **{name: NetworkHyper(**merged)})
    return base


def make_optimizer(name, problem, params, seed):
    params = params or {}
    if name == "pbo":
        return PboAgent(problem, _pbo_config(params), seed=seed)
    if name == "es":
        _reject_unknown(params, _ES_KEYS, "es")
        return MuLambdaEs(problem, seed=seed, **params)
    if name == "cmaes":
        _reject_unknown(params, _CMAES_KEYS, "cmaes")
        return CmaEs(problem, seed=seed, **params)
    raise ConfigurationError(f"unknown optimizer {name!r}")


@dataclass
class RunLog:
    """Per-generation traces plus the full individual history of one run."""

    problem: str
    optimizer: str
    seed: int
    gen_best: np.ndarray
    best_so_far: np.ndarray
    actions: list        # per generation: (n_i, d) normalized actions
    points: list         # per generation: (n_i, d) physical points
    costs: list          # per generation: (n_i,) costs
    best_point: np.ndarray
    best_cost: float


def execute_run(problem_name, optimizer_name, optimizer_params, seed,
                generations):
    """One seeded optimization run producing a RunLog."""
    problem = get_problem(problem_name)
    optimizer = make_optimizer(optimizer_name, problem, optimizer_params, seed)
    state = {"generation": 0}

    def evaluator(points):
        try:
            return np.array([problem.cost(p) for p in points], dtype=float)
        except Exception as exc:
            raise EvaluationError(
                f"evaluation failed: problem={problem_name} seed={seed} "
                f"generation={state['generation']}: {exc}") from exc

    gen_best = np.empty(generations)
    best_so_far = np.empty(generations)
    actions, points_log, costs_log = [], [], []
    best_cost = np.inf
    best_point = problem.start.copy()
    for g in range(generations):
        state["generation"] = g
        points, costs = optimizer.step_generation(evaluator)
        k = int(np.argmin(costs))
        gen_best[g] = costs[k]
        if costs[k] < best_cost:
            best_cost = float(costs[k])
            best_point = points[k].copy()
        best_so_far[g] = best_cost
        actions.append(normalize_point(points, problem))
        points_log.append(np.asarray(points))
        costs_log.append(costs)
    return RunLog(problem_name, optimizer_name, seed, gen_best, best_so_far,
                  actions, points_log, costs_log, best_point, best_cost)


def _run_job(args):
    return execute_run(*args)


def aggregate_runs(logs):
    """Across-run statistics of best-so-far per generation.

    Standard deviation is the population one (divide by N), matching the
    whitening convention.
    """
    if not logs:
        raise AggregationError("no runs to aggregate")
    lengths = {log.best_so_far.size for log in logs}
    if len(lengths) > 1:
        raise AggregationError(f"ragged generation counts: {sorted(lengths)}")
    stack = np.vstack([log.best_so_far for log in logs])
    return {
        "generation": np.arange(stack.shape[1]),
        "mean_best": stack.mean(axis=0),
        "min_best": stack.min(axis=0),
        "max_best": stack.max(axis=0),
        "std_best": stack.std(axis=0),
    }


def _fmt(value):
    return repr(float(value))


def write_run_csv(path, log):
    lines = [RUN_CSV_HEADER]
    for g in range(log.gen_best.size):
        lines.append(f"{g},{_fmt(log.gen_best[g])},{_fmt(log.best_so_far[g])}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_aggregate_csv(path, table):
    lines = [AGGREGATE_CSV_HEADER]
    for g in range(table["generation"].size):
        lines.append(",".join([str(int(table["generation"][g]))] + [
            _fmt(table[c][g]) for c in ("mean_best", "min_best", "max_best",
                                        "std_best")]))
    Path(path).write_text("\n".join(lines) + "\n")


def run_experiment(config):
    """Execute the campaign, write per-run and aggregate CSVs, return logs.

    For Lorenz problems each run also exports the trajectory of its best
    parameters as ``*_trajectory.csv``.
    """
    problem = get_problem(config.problem)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(config.problem, config.optimizer, config.optimizer_params,
             config.seed + k, config.generations) for k in range(config.runs)]
    if config.workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            logs = list(pool.map(_run_job, jobs))
    else:
        logs = [_run_job(job) for job in jobs]

    stem = f"{config.problem}_{config.optimizer}"
    for k, log in enumerate(logs):
        write_run_csv(out_dir / f"{stem}_run{k}.csv", log)
        if problem.trajectory is not None:
            write_trajectory_csv(problem.trajectory(log.best_point),
                                 out_dir / f"{stem}_run{k}_trajectory.csv")
    write_aggregate_csv(out_dir / f"{stem}_aggregate.csv", aggregate_runs(logs))
    return logs


def available_problems():
    return problem_names()
