"""Policy-based optimizer.

Three small networks map a constant input state to the mean, standard
deviations and correlative angles of a full-covariance normal search
distribution. Each generation samples a population of actions, evaluates
them, whitens and floors the rewards at zero, and runs a few epochs of Adam
ascent per network on the weighted log-density of the stored actions, with
older generations down-weighted exponentially.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .benchmarks import map_action, normalize_point
from .distribution import (DistributionParams, angle_count, log_density,
                           make_params, sample)
from .errors import ConfigurationError
from .nets import forward, init_network, mlp_spec, set_output_bias

_STDDEV_FLOOR = 1e-6
_ANGLE_MARGIN = 1e-7
# exp() overflows just above 709; importance ratios past this are skipped.
_MAX_LOG_RATIO = 700.0


def population_size(d):
    """Individuals per generation, the usual floor(4 + 3 ln d) rule."""
    if d < 1:
        raise ConfigurationError("dimension must be >= 1")
    return int(math.floor(4.0 + 3.0 * math.log(d)))


def whiten_rewards(rewards):
    """Per-generation standardized rewards, floored at zero.

    Uses the population standard deviation; a (near-)constant generation
    yields all zeros, turning the update into a no-op.
    """
    rewards = np.asarray(rewards, dtype=float)
    std = rewards.std()
    if std < 1e-12:
        return np.zeros_like(rewards)
    return np.maximum((rewards - rewards.mean()) / std, 0.0)


def decay_factor(d, alpha=0.35):
    """Per-generation advantage decay, 1 - exp(-alpha d) in (0, 1)."""
    if d < 1 or not alpha > 0:
        raise ConfigurationError("need d >= 1 and alpha > 0")
    return 1.0 - math.exp(-alpha * d)


def decayed_advantage(age, advantage, eta):
    """Advantage of a record ``age`` generations old (age 0 = newest)."""
    return eta ** age * advantage


def pbo_loss(actions, advantages, policy):
    """Mean of advantage-weighted log-densities; the ascent objective.

    ``advantages`` are the (already decayed) per-action weights, treated as
    constants: the gradient flows only through the log-density.
    """
    log_pdf = log_density(policy, np.atleast_2d(actions))
    return float(np.mean(np.asarray(advantages, dtype=float) * log_pdf))


def off_policy_loss(actions, advantages, behavior_log_prob, policy):
    """Importance-weighted surrogate for samples from an older policy.

    Records whose density ratio overflows contribute zero; returns the loss
    and the number of skipped records. Unstable near optima, which is why
    the decay heuristic is the default instead.
    """
    log_pdf = log_density(policy, np.atleast_2d(actions))
    log_ratio = log_pdf - np.asarray(behavior_log_prob, dtype=float)
    good = np.isfinite(log_ratio) & (log_ratio < _MAX_LOG_RATIO)
    ratio = np.where(good, np.exp(np.where(good, log_ratio, 0.0)), 0.0)
    loss = float(np.mean(ratio * np.asarray(advantages, dtype=float)))
    return loss, int(np.count_nonzero(~good))


@dataclass(frozen=True)
class NetworkHyper:
    """Per-network meta-parameters: learning rate, generations of history,
    epochs, mini-batches per epoch, hidden layer widths."""

    learning_rate: float
    history: int
    epochs: int
    batches: int
    hidden: tuple = (2, 2, 2)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if min(self.history, self.epochs, self.batches) < 1:
            raise ConfigurationError("history, epochs and batches must be >= 1")


@dataclass(frozen=True)
class PboConfig:
    """Reference meta-parameters; every field is overridable."""

    mean: NetworkHyper = NetworkHyper(5e-3, 1, 128, 1)
    stddev: NetworkHyper = NetworkHyper(5e-3, 8, 16, 4)
    corr: NetworkHyper = NetworkHyper(1e-3, 16, 16, 8)
    individuals: int | None = None
    alpha: float = 0.35
    input_state: tuple = (1.0, 1.0)
    off_policy_importance: bool = False
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    output_gain: float = 1e-2

    def __post_init__(self):
        if self.individuals is not None and self.individuals < 1:
            raise ConfigurationError("individuals must be >= 1")
        if not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")


@dataclass(frozen=True)
class PolicyTriple:
    """The mean / standard-deviation / correlation networks. ``corr`` is
    None in one dimension, where there is nothing to correlate."""

    mean: object
    stddev: object
    corr: object


def policy_forward(nets, input_state, stddev_floor=_STDDEV_FLOOR,
                   angle_margin=_ANGLE_MARGIN):
    """Evaluate the three networks into distribution parameters.

    The tanh output is the mean, the sigmoid outputs are the standard
    deviations (floored away from zero) and the angle fractions (mapped to
    [0, pi] with a tiny margin protecting the gradient path at the
    boundary).
    """
    mean = forward(nets.mean, input_state)
    sigma = np.maximum(forward(nets.stddev, input_state), stddev_floor)
    if nets.corr is not None:
        rho = forward(nets.corr, input_state)
        phi = np.clip(np.pi * rho, angle_margin, np.pi - angle_margin)
    else:
        phi = np.zeros(0)
    return make_params(mean, sigma, phi)


@dataclass
class GenerationRecord:
    """Everything one generation leaves behind for later updates."""

    generation: int
    raw: np.ndarray
    clipped: np.ndarray
    rewards: np.ndarray
    advantages: np.ndarray
    log_prob: np.ndarray
    params: DistributionParams


class PboAgent:
    """One optimization run's state: networks, update kernels, history.

    ``step_generation`` advances one generation: sample, evaluate through
    the provided evaluator, whiten, store, then train the stddev,
    correlation and mean networks in that order, each with its own
    meta-parameters. Deterministic given (problem, config, seed).
    """

    _NET_ORDER = ("stddev", "corr", "mean")

    def __init__(self, problem, config=None, seed=0):
        self.problem = problem
        self.config = config or PboConfig()
        d = problem.dim
        self.n_i = self.config.individuals or population_size(d)
        self.eta = decay_factor(d, self.config.alpha)
        self.input_state = np.asarray(self.config.input_state, dtype=float)
        n_in = self.input_state.size

        ss = np.random.SeedSequence(seed)
        seeds = ss.spawn(5)
        self._rng_sample = np.random.default_rng(seeds[3])
        self._rng_shuffle = np.random.default_rng(seeds[4])

        gain = self.config.output_gain
        mean_net = init_network(
            mlp_spec(n_in, self.config.mean.hidden, d, "tanh", gain), seeds[0])
        stddev_net = init_network(
            mlp_spec(n_in, self.config.stddev.hidden, d, "sigmoid", gain), seeds[1])
        n_angles = angle_count(d)
        corr_net = None
        if n_angles:
            corr_net = init_network(
                mlp_spec(n_in, self.config.corr.hidden, n_angles, "sigmoid", gain),
                seeds[2])
        # Start-point injection: with a small output gain the fresh mean is
        # essentially tanh(bias), so the bias atanh(a0) centers the initial
        # distribution on the problem's starting point.
        a0 = np.clip(normalize_point(problem.start, problem), -1 + 1e-12, 1 - 1e-12)
        set_output_bias(mean_net, np.arctanh(a0))
        self.nets = PolicyTriple(mean_net, stddev_net, corr_net)

        def update_kernel(which, net, hyper, out_act):
            sizes = np.array([net.input_size]
                             + [s.output_size for s in net.specs], dtype=np.int64)
            return kernels.PolicyUpdateKernel(
                which, net.params, sizes, out_act, self.input_state, d, n_angles,
                hyper.learning_rate, self.config.adam_beta1,
                self.config.adam_beta2, self.config.adam_eps,
                _STDDEV_FLOOR, _ANGLE_MARGIN)

        self._kernels = {
            "mean": update_kernel(kernels.WHICH_MEAN, mean_net,
                                  self.config.mean, kernels.ACT_TANH),
            "stddev": update_kernel(kernels.WHICH_STDDEV, stddev_net,
                                    self.config.stddev, kernels.ACT_SIGMOID),
            "corr": (update_kernel(kernels.WHICH_CORR, corr_net,
                                   self.config.corr, kernels.ACT_SIGMOID)
                     if corr_net else None),
        }
        max_history = max(self.config.mean.history, self.config.stddev.history,
                          self.config.corr.history)
        self.history = deque(maxlen=max_history)
        self.generation = 0
        self.importance_skips = 0
        self.last_record = None

    def policy(self):
        return policy_forward(self.nets, self.input_state)

    def step_generation(self, evaluator):
        """Run one generation; returns (physical points, costs)."""
        params = self.policy()
        batch = sample(params, self.n_i, self._rng_sample)
        points = map_action(batch.clipped, self.problem)
        costs = np.asarray(evaluator(points), dtype=float)
        advantages = whiten_rewards(-costs)
        record = GenerationRecord(self.generation, batch.raw, batch.clipped,
                                  -costs, advantages, batch.log_prob, params)
        self.history.append(record)
        for name in self._NET_ORDER:
            self._train_network(name)
        self.generation += 1
        self.last_record = record
        return points, costs

    # -- training ----------------------------------------------------------

    def _records_for(self, name):
        """Newest ``history`` generations for the given network."""
        hyper = getattr(self.config, name)
        records = list(self.history)
        return records[-hyper.history:]

    def _frozen_parts(self, name):
        """Outputs of the two networks not being trained right now."""
        mean = sigma = None
        phi = np.zeros(0)
        if name != "mean":
            mean = forward(self.nets.mean, self.input_state)
        if name != "stddev":
            sigma = np.maximum(
                forward(self.nets.stddev, self.input_state), _STDDEV_FLOOR)
        if name != "corr" and self.nets.corr is not None:
            rho = forward(self.nets.corr, self.input_state)
            phi = np.clip(np.pi * rho, _ANGLE_MARGIN, np.pi - _ANGLE_MARGIN)
        return mean, sigma, phi

    def _train_network(self, name):
        kernel = self._kernels[name]
        if kernel is None:
            return
        hyper = getattr(self.config, name)
        records = self._records_for(name)
        newest = records[-1].generation
        actions = np.ascontiguousarray(np.concatenate([r.raw for r in records]))
        raw_adv = np.concatenate([r.advantages for r in records])
        decayed = np.concatenate([
            decayed_advantage(newest - r.generation, r.advantages, self.eta)
            for r in records])
        behavior_lp = np.concatenate([r.log_prob for r in records])

        total = actions.shape[0]
        # Mini-batch sizes are multiples of the population size; leftover
        # records simply sit out the epoch (they re-enter the next shuffle).
        batch_size = max(self.n_i, (total // hyper.batches // self.n_i) * self.n_i)
        n_batches = max(1, min(hyper.batches, total // batch_size))
        kernel.set_frozen(*self._frozen_parts(name))
        off_policy = self.config.off_policy_importance
        for _ in range(hyper.epochs):
            order = self._rng_shuffle.permutation(total)
            for b in range(n_batches):
                idx = order[b * batch_size:(b + 1) * batch_size]
                skips = kernel.update(actions[idx], decayed[idx], raw_adv[idx],
                                      behavior_lp[idx], off_policy)
                if skips > 0:
                    self.importance_skips += skips
