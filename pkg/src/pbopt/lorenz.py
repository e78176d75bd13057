"""Feedback-controlled Lorenz attractor environment.

The system runs control-free for a warmup window, then a scalar feedback
velocity (a tanh neuron of the scaled state derivatives) enters the second
equation for the controlled window. Two objectives are supported: time spent
in the x < 0 lobe, and the number of consecutive-sample sign changes of x.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import tanh

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputError, IntegrationError


@dataclass(frozen=True)
class LorenzConfig:
    """Attractor parameters, time grid, and control-input scaling."""

    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    initial_state: tuple = (10.0, 10.0, 10.0)
    dt: float = 0.01
    warmup_duration: float = 5.0
    control_duration: float = 25.0
    scales: tuple = (15.0, 20.0, 40.0)

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        for name in ("warmup_duration", "control_duration"):
            value = getattr(self, name)
            steps = value / self.dt
            if value <= 0 or abs(steps - round(steps)) > 1e-9:
                raise ConfigurationError(f"{name} must be a positive multiple of dt")
        if any(s <= 0 for s in self.scales):
            raise ConfigurationError("scaling factors must be positive")

    @property
    def warmup_steps(self):
        return round(self.warmup_duration / self.dt)

    @property
    def control_steps(self):
        return round(self.control_duration / self.dt)


@dataclass(frozen=True)
class ControlParams:
    """The four free feedback parameters, each in [-1, 1]."""

    wx: float
    wy: float
    wz: float
    bias: float

    def __post_init__(self):
        for name in ("wx", "wy", "wz", "bias"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise InputError(f"{name}={v} outside [-1, 1]")


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid state and control history; warmup samples come first."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    warmup_steps: int

    @property
    def controlled_x(self):
        """x over the controlled window (sample at t=0 included)."""
        return self.x[self.warmup_steps:]


def lorenz_rhs(state, config, u=0.0):
    """Time derivatives of the (controlled) Lorenz system."""
    x, y, z = state
    return (config.sigma * (y - x),
            x * (config.rho - z) - y + u,
            x * y - config.beta * z)


def control_input(derivatives, params, scales):
    """Feedback velocity: a tanh neuron of the scaled derivatives, so the
    magnitude stays below 1 by construction."""
    dx, dy, dz = derivatives
    xs, ys, zs = scales
    return tanh(params.wx * dx / xs + params.wy * dy / ys
                + params.wz * dz / zs + params.bias)


def integrate(config, params=None):
    """Integrate the trajectory with classical fixed-step RK4.

    The control is computed from the uncontrolled derivative estimate at the
    start of each step and held constant through the four stages; passing
    ``params=None`` keeps u = 0 for the whole horizon.
    """
    n_warm = config.warmup_steps
    n_ctrl = config.control_steps
    n = n_warm + n_ctrl + 1
    out = [np.empty(n) for _ in range(5)]
    if params is None:
        controlled, wx, wy, wz, bias = False, 0.0, 0.0, 0.0, 0.0
    else:
        controlled, wx, wy, wz, bias = True, params.wx, params.wy, params.wz, params.bias
    x0, y0, z0 = config.initial_state
    xs, ys, zs = config.scales
    bad = kernels.lorenz_rk4(
        float(x0), float(y0), float(z0),
        config.sigma, config.rho, config.beta,
        config.dt, n_warm, n_ctrl, controlled,
        wx, wy, wz, bias, xs, ys, zs,
        out[0], out[1], out[2], out[3], out[4])
    if bad >= 0:
        raise IntegrationError(
            f"state diverged at t={(bad - n_warm) * config.dt:.2f}")
    return Trajectory(*out, warmup_steps=n_warm)


def stabilizer_reward(x, dt):
    """dt times the number of samples with x < 0."""
    return float(dt) * int(np.count_nonzero(np.asarray(x) < 0.0))


def oscillator_reward(x):
    """Number of strict sign changes between consecutive samples."""
    x = np.asarray(x)
    return int(np.count_nonzero(x[:-1] * x[1:] < 0.0))


def uncontrolled_rewards(config=None):
    """Reward levels of the u = 0 system over the controlled window."""
    config = config or LorenzConfig()
    xw = integrate(config).controlled_x
    return stabilizer_reward(xw, config.dt), oscillator_reward(xw)


def write_trajectory_csv(trajectory, path):
    """One row per sample, columns t,x,y,z,u."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "y", "z", "u"])
        for row in zip(trajectory.t, trajectory.x, trajectory.y,
                       trajectory.z, trajectory.u):
            writer.writerow([repr(float(v)) for v in row])
