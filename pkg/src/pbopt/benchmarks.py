"""Analytic test problems, their domains and starting points, plus the
normalized-action to physical-coordinate mapping and the problem registry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, InputError
from .lorenz import (ControlParams, LorenzConfig, integrate,
                     oscillator_reward, stabilizer_reward)


@dataclass(frozen=True)
class Problem:
    """A cost environment: search dimension, box bounds, start, cost."""

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    start: np.ndarray
    cost: Callable[[np.ndarray], float]
    # Optional hook producing the trajectory behind a parameter vector
    # (Lorenz problems only); used by the harness for CSV export.
    trajectory: Optional[Callable] = None


def _problem(name, dim, lower, upper, start, cost, trajectory=None):
    lower = np.full(dim, lower, dtype=float) if np.isscalar(lower) else np.asarray(lower, float)
    upper = np.full(dim, upper, dtype=float) if np.isscalar(upper) else np.asarray(upper, float)
    start = np.asarray(start, dtype=float)
    if not np.all(lower < upper):
        raise ConfigurationError(f"{name}: bounds must satisfy lower < upper")
    if not (np.all(start >= lower) and np.all(start <= upper)):
        raise ConfigurationError(f"{name}: starting point outside bounds")
    return Problem(name, dim, lower, upper, start, cost, trajectory)


def map_action(action, problem):
    """Affine map from the normalized box [-1, 1]^d to the physical domain."""
    action = np.asarray(action, dtype=float)
    if action.shape[-1] != problem.dim:
        raise InputError(f"action dimension {action.shape[-1]} != {problem.dim}")
    if np.any(action < -1.0) or np.any(action > 1.0):
        raise InputError("action outside [-1, 1]")
    return problem.lower + 0.5 * (action + 1.0) * (problem.upper - problem.lower)


def normalize_point(point, problem):
    """Inverse of :func:`map_action` for interior physical points."""
    point = np.asarray(point, dtype=float)
    return 2.0 * (point - problem.lower) / (problem.upper - problem.lower) - 1.0


def parabola(x):
    x = np.asarray(x, dtype=float)
    return float(x[0] * x[0] + x[1] * x[1])


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum((1.0 - x[:-1]) ** 2 + 100.0 * (x[1:] - x[:-1] ** 2) ** 2))


def branin(x):
    x1, x2 = np.asarray(x, dtype=float)[:2]
    return float((x2 - 5.1 / (4.0 * np.pi ** 2) * x1 ** 2 + 5.0 / np.pi * x1 - 6.0) ** 2
                 + 10.0 * (1.0 - 1.0 / (8.0 * np.pi)) * np.cos(x1) + 10.0)


def griewank(x):
    # 2-D variant: the second cosine argument is x2/sqrt(2), not the
    # generic x_i/sqrt(i) form.
    x1, x2 = np.asarray(x, dtype=float)[:2]
    return float(1.0 + (x1 * x1 + x2 * x2) / 4000.0
                 - np.cos(x1) * np.cos(x2 / np.sqrt(2.0)))


def _lorenz_problem(name, reward_of_window):
    config = LorenzConfig()

    def trajectory(v):
        return integrate(config, ControlParams(*np.asarray(v, dtype=float)))

    def cost(v):
        traj = trajectory(v)
        return -reward_of_window(traj.controlled_x)

    # Control parameters are already the native action box; the affine map
    # is the identity and the search starts from the neutral law u ~ tanh(0).
    return _problem(name, 4, -1.0, 1.0, np.zeros(4), cost, trajectory)


def _build_registry():
    problems = [
        _problem("parabola", 2, -5.0, 5.0, (2.5, 2.5), parabola),
        _problem("rosenbrock2", 2, -2.0, 2.0, (-1.0, 0.0), rosenbrock),
        _problem("rosenbrock5", 5, -2.0, 2.0, np.zeros(5), rosenbrock),
        _problem("rosenbrock10", 10, -2.0, 2.0, np.zeros(10), rosenbrock),
        _problem("branin", 2, (0.0, 0.0), (15.0, 15.0), (7.5, 7.5), branin),
        _problem("griewank", 2, -10.0, 10.0, (5.0, 5.0), griewank),
        _lorenz_problem(
            "lorenz_stabilizer",
            lambda xw: stabilizer_reward(xw, LorenzConfig().dt)),
        _lorenz_problem("lorenz_oscillator", oscillator_reward),
    ]
    return {p.name: p for p in problems}


PROBLEMS = _build_registry()


def problem_names():
    return sorted(PROBLEMS)


def get_problem(name):
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown problem {name!r}; known: {', '.join(problem_names())}") from None
