"""Pure-Python twins of the compiled kernels.

The Lorenz integrator is kept line-for-line parallel to _native.pyx —
identical operations in identical order, so the two lanes agree
bit-for-bit. The policy-update twin reuses the vectorized numpy path
(LAPACK solves instead of substitution), matching the compiled kernel to
rounding error.
"""

from math import isfinite, tanh

import numpy as np

from ..distribution import angle_geometry, density_internals, weighted_gradients
from ..errors import ConfigurationError
from ..nets import AdamState, Network, adam_step, backward, forward_with_trace, mlp_spec

WHICH_MEAN = 0
WHICH_STDDEV = 1
WHICH_CORR = 2
ACT_TANH = 0
ACT_SIGMOID = 1

_MAX_LOG_RATIO = 700.0


def lorenz_rk4(x, y, z, sig, rho, beta, dt, n_warm, n_ctrl, controlled,
               wx, wy, wz, bias, xs, ys, zs,
               out_t, out_x, out_y, out_z, out_u):
    n = n_warm + n_ctrl
    half = 0.5 * dt
    dt6 = dt / 6.0
    for i in range(n + 1):
        out_t[i] = (i - n_warm) * dt
        out_x[i] = x
        out_y[i] = y
        out_z[i] = z
        dx0 = sig * (y - x)
        dy0 = x * (rho - z) - y
        dz0 = x * y - beta * z
        if controlled and i >= n_warm:
            u = tanh(wx * dx0 / xs + wy * dy0 / ys + wz * dz0 / zs + bias)
        else:
            u = 0.0
        out_u[i] = u
        if i == n:
            break
        k1x = dx0
        k1y = dy0 + u
        k1z = dz0
        ax = x + half * k1x
        ay = y + half * k1y
        az = z + half * k1z
        k2x = sig * (ay - ax)
        k2y = ax * (rho - az) - ay + u
        k2z = ax * ay - beta * az
        ax = x + half * k2x
        ay = y + half * k2y
        az = z + half * k2z
        k3x = sig * (ay - ax)
        k3y = ax * (rho - az) - ay + u
        k3z = ax * ay - beta * az
        ax = x + dt * k3x
        ay = y + dt * k3y
        az = z + dt * k3z
        k4x = sig * (ay - ax)
        k4y = ax * (rho - az) - ay + u
        k4z = ax * ay - beta * az
        x = x + dt6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        y = y + dt6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        z = z + dt6 * (k1z + 2.0 * (k2z + k3z) + k4z)
        if not (isfinite(x) and isfinite(y) and isfinite(z)):
            return i + 1
    return -1


class PolicyUpdateKernel:
    """One mini-batch ascent step for one policy network.

    Shares the flat parameter buffer with the caller's Network and owns its
    Adam state, mirroring the compiled kernel's interface.
    """

    def __init__(self, which, params, sizes, out_act, x0, dim, n_angles,
                 learning_rate, beta1, beta2, eps, stddev_floor, angle_margin):
        self.which = which
        self.dim = dim
        self.n_angles = n_angles
        self.stddev_floor = stddev_floor
        self.angle_margin = angle_margin
        sizes = list(sizes)
        activation = "tanh" if out_act == ACT_TANH else "sigmoid"
        specs = mlp_spec(sizes[0], sizes[1:-1], sizes[-1], activation)
        self.net = Network(specs, params)  # view, not a copy
        if self.net.parameter_count != np.asarray(params).size:
            raise ConfigurationError("parameter vector does not match layer sizes")
        self.x0 = np.asarray(x0, dtype=float)
        self.adam = AdamState.for_network(self.net, learning_rate, beta1, beta2, eps)
        self._frozen_mean = np.zeros(dim)
        self._frozen_sigma = np.ones(dim)
        self._frozen_phi = np.zeros(n_angles)

    def set_frozen(self, mean, sigma, phi):
        """Store the outputs of the two networks not being trained."""
        if self.which != WHICH_MEAN:
            self._frozen_mean = np.asarray(mean, dtype=float)
        if self.which != WHICH_STDDEV:
            self._frozen_sigma = np.asarray(sigma, dtype=float)
        if self.which != WHICH_CORR:
            self._frozen_phi = np.asarray(phi, dtype=float)

    def update(self, actions, decayed, raw_adv, behavior_lp, off_policy):
        """One Adam ascent step on the weighted log-density objective.

        Returns the number of importance-skipped records, or -1 when every
        weight was zero and the update was a no-op.
        """
        out, trace = forward_with_trace(self.net, self.x0)
        if self.which == WHICH_MEAN:
            mean = out
            sigma, phi = self._frozen_sigma, self._frozen_phi
        elif self.which == WHICH_STDDEV:
            sigma = np.maximum(out, self.stddev_floor)
            mean, phi = self._frozen_mean, self._frozen_phi
        else:
            phi = np.clip(np.pi * out, self.angle_margin, np.pi - self.angle_margin)
            mean, sigma = self._frozen_mean, self._frozen_sigma
        geometry = angle_geometry(phi, self.dim)

        internals = density_internals(mean, sigma, geometry, actions)
        skips = 0
        if off_policy:
            log_ratio = internals[3] - behavior_lp
            good = np.isfinite(log_ratio) & (log_ratio < _MAX_LOG_RATIO)
            skips = int(np.count_nonzero(~good))
            ratio = np.where(good, np.exp(np.where(good, log_ratio, 0.0)), 0.0)
            weights = ratio * raw_adv
        else:
            weights = decayed
        if not np.any(weights):
            return -1 if skips == 0 else skips

        g_mean, g_sigma, g_phi = weighted_gradients(
            mean, sigma, geometry, internals, weights)
        if self.which == WHICH_MEAN:
            out_grad = g_mean
        elif self.which == WHICH_STDDEV:
            out_grad = g_sigma * (out > self.stddev_floor)
        else:
            scaled = np.pi * out
            inside = (scaled > self.angle_margin) & (scaled < np.pi - self.angle_margin)
            out_grad = g_phi * np.pi * inside
        grad = backward(self.net, self.x0, out_grad, trace)
        adam_step(self.net, grad, self.adam)
        return skips
