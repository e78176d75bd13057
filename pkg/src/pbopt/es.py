"""Evolution-strategy baselines: an isotropic (mu, lambda)-ES with a
1/5-success-style step rule, and CMA-ES with the standard rank-1 / rank-mu
covariance update, evolution paths and cumulative step-length adaptation.

Both work directly in the physical search box and share the ask/tell shape:
``ask`` draws a population, ``tell`` consumes its costs, ``step`` does both
through an evaluator.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError, InputError
from .pbo import population_size


def cmaes_recombination_weights(mu):
    """Log-rank recombination weights, positive, decreasing, summing to 1."""
    if mu < 1:
        raise ConfigurationError("mu must be >= 1")
    w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    return w / w.sum()


def _initial_step(problem, step_init):
    if step_init is not None:
        return float(step_init)
    return 0.5 * float(np.mean(0.5 * (problem.upper - problem.lower)))


class MuLambdaEs:
    """Isotropic ES: mean of the mu best, multiplicative step adaptation.

    The step grows by ``step_increase`` whenever the best offspring improves
    on the previous generation's best cost (a 1/5-success-rule variant) and
    shrinks by ``step_decrease`` otherwise.
    """

    def __init__(self, problem, population=None, mu=None, step_init=None,
                 step_increase=1.2, step_decrease=0.82, seed=0):
        self.problem = problem
        self.population = population or population_size(problem.dim)
        self.mu = mu or max(1, self.population // 2)
        if not 1 <= self.mu <= self.population:
            raise ConfigurationError("need 1 <= mu <= population")
        self.mean = problem.start.astype(float).copy()
        self.step = _initial_step(problem, step_init)
        self.step_increase = step_increase
        self.step_decrease = step_decrease
        self.parent_cost = math.inf
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def ask(self):
        z = self._rng.standard_normal((self.population, self.problem.dim))
        return np.clip(self.mean + self.step * z,
                       self.problem.lower, self.problem.upper)

    def tell(self, candidates, costs):
        candidates = np.asarray(candidates, dtype=float)
        costs = np.asarray(costs, dtype=float)
        if candidates.shape[0] != costs.size:
            raise InputError("one cost per candidate required")
        order = np.argsort(costs, kind="stable")
        best = float(costs[order[0]])
        self.mean = candidates[order[:self.mu]].mean(axis=0)
        if best < self.parent_cost:
            self.step *= self.step_increase
        else:
            self.step *= self.step_decrease
        self.parent_cost = best

    def step_generation(self, evaluator):
        candidates = self.ask()
        costs = np.asarray(evaluator(candidates), dtype=float)
        self.tell(candidates, costs)
        return candidates, costs


def cmaes_constants(dim, population, mu=None):
    """The standard strategy constants, kept in one table for auditability."""
    d = float(dim)
    mu = mu or max(1, population // 2)
    weights = cmaes_recombination_weights(mu)
    mueff = 1.0 / float(np.sum(weights ** 2))
    c_sigma = (mueff + 2.0) / (d + mueff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mueff - 1.0) / (d + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mueff / d) / (d + 4.0 + 2.0 * mueff / d)
    c_1 = 2.0 / ((d + 1.3) ** 2 + mueff)
    c_mu = min(1.0 - c_1,
               2.0 * (mueff - 2.0 + 1.0 / mueff) / ((d + 2.0) ** 2 + mueff))
    chi_n = math.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d))
    return {"mu": mu, "weights": weights, "mueff": mueff, "c_sigma": c_sigma,
            "d_sigma": d_sigma, "c_c": c_c, "c_1": c_1, "c_mu": c_mu,
            "chi_n": chi_n}


class CmaEs:
    """CMA-ES with rank-1 + rank-mu covariance adaptation.

    The covariance blends a soft copy of itself with the evolution-path
    outer product and the weighted outer products of the best offspring
    directions; the step length adapts from the conjugate path norm.
    """

    def __init__(self, problem, population=None, mu=None, step_init=None,
                 seed=0, c_1=None, c_mu=None):
        self.problem = problem
        d = problem.dim
        self.population = population or population_size(d)
        consts = cmaes_constants(d, self.population, mu)
        if c_1 is not None:
            consts["c_1"] = c_1
        if c_mu is not None:
            consts["c_mu"] = c_mu
        self.consts = consts
        self.mean = problem.start.astype(float).copy()
        self.step = _initial_step(problem, step_init)
        self.cov = np.eye(d)
        self.path_sigma = np.zeros(d)
        self.path_cov = np.zeros(d)
        self.generation = 0
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))

    def _decompose(self):
        # Symmetrize and floor the spectrum: the repair for numerically
        # indefinite covariances.
        self.cov = 0.5 * (self.cov + self.cov.T)
        eigvals, eigvecs = np.linalg.eigh(self.cov)
        eigvals = np.maximum(eigvals, 1e-14)
        return eigvecs, np.sqrt(eigvals)

    def ask(self):
        eigvecs, scale = self._decompose()
        z = self._rng.standard_normal((self.population, self.problem.dim))
        directions = (z * scale) @ eigvecs.T
        return np.clip(self.mean + self.step * directions,
                       self.problem.lower, self.problem.upper)

    def tell(self, candidates, costs):
        candidates = np.asarray(candidates, dtype=float)
        costs = np.asarray(costs, dtype=float)
        if candidates.shape[0] != costs.size:
            raise InputError("one cost per candidate required")
        c = self.consts
        weights, mueff = c["weights"], c["mueff"]
        c_sigma, d_sigma, c_c = c["c_sigma"], c["d_sigma"], c["c_c"]
        c_1, c_mu, chi_n = c["c_1"], c["c_mu"], c["chi_n"]

        eigvecs, scale = self._decompose()
        directions = (candidates - self.mean) / self.step
        order = np.argsort(costs, kind="stable")
        selected = directions[order[:c["mu"]]]
        step_dir = weights @ selected
        self.mean = self.mean + self.step * step_dir

        inv_sqrt = (eigvecs / scale) @ eigvecs.T
        self.generation += 1
        self.path_sigma = ((1.0 - c_sigma) * self.path_sigma
                           + math.sqrt(c_sigma * (2.0 - c_sigma) * mueff)
                           * (inv_sqrt @ step_dir))
        norm_ps = float(np.linalg.norm(self.path_sigma))
        expected = math.sqrt(1.0 - (1.0 - c_sigma) ** (2 * self.generation))
        h_sigma = norm_ps / expected < (1.4 + 2.0 / (self.problem.dim + 1.0)) * chi_n
        self.path_cov = ((1.0 - c_c) * self.path_cov
                         + h_sigma * math.sqrt(c_c * (2.0 - c_c) * mueff) * step_dir)

        rank_one = np.outer(self.path_cov, self.path_cov)
        if not h_sigma:
            rank_one = rank_one + c_c * (2.0 - c_c) * self.cov
        rank_mu = selected.T @ (weights[:, None] * selected)
        self.cov = ((1.0 - c_1 - c_mu) * self.cov
                    + c_1 * rank_one + c_mu * rank_mu)
        self.step *= math.exp(c_sigma / d_sigma * (norm_ps / chi_n - 1.0))

    def step_generation(self, evaluator):
        candidates = self.ask()
        costs = np.asarray(evaluator(candidates), dtype=float)
        self.tell(candidates, costs)
        return candidates, costs
