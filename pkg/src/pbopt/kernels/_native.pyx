# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the Lorenz RK4 loop and the fused policy-update
step (network forward, log-density gradients through the angle matrix,
backprop, Adam). Each has a pure-Python twin in pyfallback.py selected at
import time when this extension is unavailable.

The Lorenz kernel performs the same floating-point operations in the same
order as its twin (the extension is compiled with -ffp-contract=off), so
trajectories are bit-identical across lanes. The update kernel matches its
twin to rounding error only: the twin solves triangular systems through
LAPACK, this one by substitution.
"""

import numpy as np

from libc.math cimport cos, exp, isfinite, log, sin, sqrt, tanh, M_PI

from pbopt.errors import NumericalError

WHICH_MEAN = 0
WHICH_STDDEV = 1
WHICH_CORR = 2
ACT_TANH = 0
ACT_SIGMOID = 1

DEF MAX_LOG_RATIO = 700.0


def lorenz_rk4(double x, double y, double z,
               double sig, double rho, double beta,
               double dt, int n_warm, int n_ctrl, bint controlled,
               double wx, double wy, double wz, double bias,
               double xs, double ys, double zs,
               double[::1] out_t, double[::1] out_x, double[::1] out_y,
               double[::1] out_z, double[::1] out_u):
    """Fixed-step RK4 for the feedback-controlled Lorenz system.

    The control is evaluated once per step from the uncontrolled derivative
    estimate at the step start and held constant through the four stages.
    Fills n_warm + n_ctrl + 1 samples; returns -1, or the sample index at
    which the state stopped being finite.
    """
    cdef int n = n_warm + n_ctrl
    cdef int i
    cdef double half = 0.5 * dt
    cdef double dt6 = dt / 6.0
    cdef double dx0, dy0, dz0, u
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double ax, ay, az

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


cdef class PolicyUpdateKernel:
    """One mini-batch ascent step for one policy network, fused in C.

    Owns the Adam accumulators; shares the flat parameter buffer with the
    Network object, so policy evaluations outside the kernel see every
    update.
    """

    cdef int which, out_act, n_layers, dim, n_angles, out_size, max_width
    cdef long t
    cdef double lr, beta1, beta2, eps, stddev_floor, angle_margin
    cdef double[::1] params, adam_m, adam_v, x0
    cdef long[::1] sizes, w_off, b_off
    cdef double[:, ::1] acts, bmat, gmat, sinm, cosm, prem
    cdef double[::1] grad, delta, delta2
    cdef double[::1] mean_ws, sigma_ws, phi_ws, out_grad
    cdef double[::1] u_ws, w_ws, v_ws, gm_ws, gs_ws, gphi_ws
    cdef object _refs

    def __init__(self, which, params, sizes, out_act, x0, dim, n_angles,
                 learning_rate, beta1, beta2, eps, stddev_floor, angle_margin):
        self.which = which
        self.out_act = out_act
        self.dim = dim
        self.n_angles = n_angles
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.stddev_floor = stddev_floor
        self.angle_margin = angle_margin
        self.t = 0

        params = np.ascontiguousarray(params, dtype=np.float64)
        sizes = np.ascontiguousarray(sizes, dtype=np.int64)
        x0 = np.ascontiguousarray(x0, dtype=np.float64)
        self.n_layers = sizes.shape[0] - 1
        self.out_size = int(sizes[-1])
        self.max_width = int(max(sizes))
        w_off = np.zeros(self.n_layers, dtype=np.int64)
        b_off = np.zeros(self.n_layers, dtype=np.int64)
        off = 0
        for i in range(self.n_layers):
            w_off[i] = off
            off += int(sizes[i + 1] * sizes[i])
            b_off[i] = off
            off += int(sizes[i + 1])
        if off != params.shape[0]:
            raise ValueError("parameter vector does not match layer sizes")

        d = dim
        refs = dict(
            adam_m=np.zeros(off), adam_v=np.zeros(off), grad=np.empty(off),
            acts=np.zeros((self.n_layers + 1, self.max_width)),
            delta=np.zeros(self.max_width), delta2=np.zeros(self.max_width),
            bmat=np.zeros((d, d)), gmat=np.zeros((d, d)),
            sinm=np.zeros((d, d)), cosm=np.zeros((d, d)), prem=np.zeros((d, d)),
            mean_ws=np.zeros(d), sigma_ws=np.zeros(d),
            phi_ws=np.zeros(max(n_angles, 1)),
            out_grad=np.zeros(self.out_size),
            u_ws=np.zeros(d), w_ws=np.zeros(d), v_ws=np.zeros(d),
            gm_ws=np.zeros(d), gs_ws=np.zeros(d),
            gphi_ws=np.zeros(max(n_angles, 1)),
            params=params, sizes=sizes, x0=x0,
            w_off=w_off, b_off=b_off,
        )
        self._refs = refs
        self.params = refs["params"]
        self.sizes = refs["sizes"]
        self.x0 = refs["x0"]
        self.w_off = refs["w_off"]
        self.b_off = refs["b_off"]
        self.adam_m = refs["adam_m"]
        self.adam_v = refs["adam_v"]
        self.grad = refs["grad"]
        self.acts = refs["acts"]
        self.delta = refs["delta"]
        self.delta2 = refs["delta2"]
        self.bmat = refs["bmat"]
        self.gmat = refs["gmat"]
        self.sinm = refs["sinm"]
        self.cosm = refs["cosm"]
        self.prem = refs["prem"]
        self.mean_ws = refs["mean_ws"]
        self.sigma_ws = refs["sigma_ws"]
        self.phi_ws = refs["phi_ws"]
        self.out_grad = refs["out_grad"]
        self.u_ws = refs["u_ws"]
        self.w_ws = refs["w_ws"]
        self.v_ws = refs["v_ws"]
        self.gm_ws = refs["gm_ws"]
        self.gs_ws = refs["gs_ws"]
        self.gphi_ws = refs["gphi_ws"]

    cdef void _forward(self) noexcept:
        cdef int l, i, j, n_in, n_out
        cdef double z
        cdef long wo, bo
        for i in range(self.sizes[0]):
            self.acts[0, i] = self.x0[i]
        for l in range(self.n_layers):
            n_in = <int> self.sizes[l]
            n_out = <int> self.sizes[l + 1]
            wo = self.w_off[l]
            bo = self.b_off[l]
            for i in range(n_out):
                z = self.params[bo + i]
                for j in range(n_in):
                    z += self.params[wo + i * n_in + j] * self.acts[l, j]
                if l < self.n_layers - 1 or self.out_act == 0:
                    self.acts[l + 1, i] = tanh(z)
                else:
                    self.acts[l + 1, i] = 1.0 / (1.0 + exp(-z))

    cdef void _build_angle_matrix(self, double[::1] phi) noexcept:
        # Row i of B is a unit vector in spherical coordinates; cache the
        # sines/cosines and prefix products for the gradient chain.
        cdef int d = self.dim
        cdef int i, j, k
        cdef double pre, a
        for i in range(d):
            for j in range(d):
                self.bmat[i, j] = 0.0
        self.bmat[0, 0] = 1.0
        k = 0
        for i in range(1, d):
            pre = 1.0
            for j in range(i):
                a = phi[k + j]
                self.sinm[i, j] = sin(a)
                self.cosm[i, j] = cos(a)
                self.prem[i, j] = pre
                self.bmat[i, j] = self.cosm[i, j] * pre
                pre *= self.sinm[i, j]
            self.bmat[i, i] = pre
            k += i

    def update(self, double[:, ::1] actions, double[::1] decayed,
               double[::1] raw_adv, double[::1] behavior_lp, bint off_policy):
        """One Adam ascent step on the weighted log-density objective.

        Returns the number of importance-skipped records, or -1 when every
        weight was zero and the update was a no-op.
        """
        cdef int nb = actions.shape[0]
        cdef int d = self.dim
        cdef int i, j, k, rec, l, n_in, n_out, idx
        cdef double acc, s, weight, lp, quad, log_det, ratio
        cdef double mh, vh, g, corr1, corr2
        cdef long wo, bo
        cdef int skips = 0
        cdef bint any_weight = False
        cdef double wsum = 0.0
        cdef double n_inv = 1.0 / nb

        self._forward()

        # Assemble (mean, sigma, phi) from this net's output and the frozen
        # parts already stored in the workspaces by the caller.
        cdef int last = self.n_layers
        if self.which == 0:
            for i in range(d):
                self.mean_ws[i] = self.acts[last, i]
        elif self.which == 1:
            for i in range(d):
                s = self.acts[last, i]
                self.sigma_ws[i] = s if s > self.stddev_floor else self.stddev_floor
        else:
            for i in range(self.n_angles):
                s = M_PI * self.acts[last, i]
                if s < self.angle_margin:
                    s = self.angle_margin
                elif s > M_PI - self.angle_margin:
                    s = M_PI - self.angle_margin
                self.phi_ws[i] = s
        self._build_angle_matrix(self.phi_ws)

        log_det = 0.0
        for i in range(d):
            log_det += log(self.sigma_ws[i]) + log(self.bmat[i, i])
        log_det *= 2.0

        for i in range(d):
            self.gm_ws[i] = 0.0
            self.gs_ws[i] = 0.0
            for j in range(d):
                self.gmat[i, j] = 0.0

        for rec in range(nb):
            # Residual solves through the triangular factor S B.
            for i in range(d):
                self.u_ws[i] = (actions[rec, i] - self.mean_ws[i]) / self.sigma_ws[i]
            for i in range(d):
                acc = self.u_ws[i]
                for j in range(i):
                    acc -= self.bmat[i, j] * self.w_ws[j]
                self.w_ws[i] = acc / self.bmat[i, i]
            for i in range(d - 1, -1, -1):
                acc = self.w_ws[i]
                for j in range(i + 1, d):
                    acc -= self.bmat[j, i] * self.v_ws[j]
                self.v_ws[i] = acc / self.bmat[i, i]

            if off_policy:
                quad = 0.0
                for i in range(d):
                    quad += self.w_ws[i] * self.w_ws[i]
                lp = -0.5 * (d * log(2.0 * M_PI) + log_det + quad)
                s = lp - behavior_lp[rec]
                if not isfinite(s) or s >= MAX_LOG_RATIO:
                    skips += 1
                    continue
                weight = exp(s) * raw_adv[rec]
            else:
                weight = decayed[rec]
            if weight == 0.0:
                continue
            any_weight = True
            wsum += weight
            for i in range(d):
                self.gm_ws[i] += weight * self.v_ws[i]
                self.gs_ws[i] += weight * self.u_ws[i] * self.v_ws[i]
                for j in range(i + 1):
                    self.gmat[i, j] += weight * self.v_ws[i] * self.w_ws[j]

        if not any_weight:
            return -1 if skips == 0 else skips

        for i in range(d):
            self.gm_ws[i] = self.gm_ws[i] / self.sigma_ws[i] * n_inv
            self.gs_ws[i] = (self.gs_ws[i] - wsum) / self.sigma_ws[i] * n_inv
            self.gmat[i, i] -= wsum / self.bmat[i, i]
            for j in range(i + 1):
                self.gmat[i, j] *= n_inv

        # Chain the matrix gradient back to the angles: per row a reverse
        # sweep accumulates sum_{j>t} G_ij B_ij.
        if self.which == 2:
            k = 0
            for i in range(1, d):
                acc = self.gmat[i, i] * self.bmat[i, i]
                for j in range(i - 1, -1, -1):
                    self.gphi_ws[k + j] = (
                        -self.gmat[i, j] * self.sinm[i, j] * self.prem[i, j]
                        + self.cosm[i, j] / self.sinm[i, j] * acc)
                    acc += self.gmat[i, j] * self.bmat[i, j]
                k += i

        # Output gradient with the activation-clamp masks.
        if self.which == 0:
            for i in range(d):
                self.out_grad[i] = self.gm_ws[i]
        elif self.which == 1:
            for i in range(d):
                if self.acts[last, i] > self.stddev_floor:
                    self.out_grad[i] = self.gs_ws[i]
                else:
                    self.out_grad[i] = 0.0
        else:
            for i in range(self.n_angles):
                s = M_PI * self.acts[last, i]
                if self.angle_margin < s < M_PI - self.angle_margin:
                    self.out_grad[i] = self.gphi_ws[i] * M_PI
                else:
                    self.out_grad[i] = 0.0

        # Backprop: delta through post-activation derivatives, layer by layer.
        n_out = <int> self.sizes[last]
        for i in range(n_out):
            s = self.acts[last, i]
            if self.out_act == 0:
                self.delta[i] = self.out_grad[i] * (1.0 - s * s)
            else:
                self.delta[i] = self.out_grad[i] * s * (1.0 - s)
        for l in range(self.n_layers - 1, -1, -1):
            n_in = <int> self.sizes[l]
            n_out = <int> self.sizes[l + 1]
            wo = self.w_off[l]
            bo = self.b_off[l]
            for i in range(n_out):
                self.grad[bo + i] = self.delta[i]
                for j in range(n_in):
                    self.grad[wo + i * n_in + j] = self.delta[i] * self.acts[l, j]
            if l > 0:
                for j in range(n_in):
                    acc = 0.0
                    for i in range(n_out):
                        acc += self.params[wo + i * n_in + j] * self.delta[i]
                    s = self.acts[l, j]
                    self.delta2[j] = acc * (1.0 - s * s)
                for j in range(n_in):
                    self.delta[j] = self.delta2[j]

        for i in range(self.params.shape[0]):
            if not isfinite(self.grad[i]):
                raise NumericalError("non-finite gradient entries; update rejected")

        # Bias-corrected Adam ascent.
        self.t += 1
        corr1 = 1.0 - self.beta1 ** self.t
        corr2 = 1.0 - self.beta2 ** self.t
        for i in range(self.params.shape[0]):
            g = self.grad[i]
            self.adam_m[i] = self.beta1 * self.adam_m[i] + (1.0 - self.beta1) * g
            self.adam_v[i] = self.beta2 * self.adam_v[i] + (1.0 - self.beta2) * g * g
            mh = self.adam_m[i] / corr1
            vh = self.adam_v[i] / corr2
            self.params[i] += self.lr * mh / (sqrt(vh) + self.eps)
        return skips

    def set_frozen(self, mean, sigma, phi):
        """Store the outputs of the two networks not being trained."""
        cdef int i
        if self.which != 0:
            for i in range(self.dim):
                self.mean_ws[i] = mean[i]
        if self.which != 1:
            for i in range(self.dim):
                self.sigma_ws[i] = sigma[i]
        if self.which != 2:
            for i in range(self.n_angles):
                self.phi_ws[i] = phi[i]
