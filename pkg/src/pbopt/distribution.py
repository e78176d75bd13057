"""Full-covariance normal search distribution via hypersphere decomposition.

A vector of correlative angles in [0, pi] parameterizes a lower-triangular
matrix B whose rows are unit vectors in spherical coordinates; B B^t is then
a valid correlation matrix by construction (symmetric, PSD, unit diagonal,
entries in [-1, 1]), with no rejection sampling involved. Scaling by the
standard deviations gives the covariance C = S (B B^t) S.

Angles are stored row-major over the strictly-lower triangle: for dimension
d the D = d(d-1)/2 entries are (2,1), (3,1), (3,2), (4,1), ... in 1-based
row/column order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InputError, NumericalError

# Escalating diagonal jitter used when Cholesky meets a numerically
# semidefinite matrix (angles at 0 or pi give exactly singular C).
_JITTERS = tuple(1e-12 * 10.0 ** k for k in range(7))  # 1e-12 .. 1e-6


def angle_count(d):
    return d * (d - 1) // 2


@lru_cache(maxsize=None)
def _tril(d, k=0):
    return np.tril_indices(d, k=k)


@dataclass(frozen=True)
class AngleGeometry:
    """Cached trigonometry of one angle vector.

    ``packed`` holds the per-row angle lists padded to a square block with
    pi/2 (sin = 1, so cumulative products pass through); ``prefix[r, j]`` is
    the product of the first j sines of row r+1.
    """

    phi: np.ndarray
    dim: int
    sin: np.ndarray
    cos: np.ndarray
    prefix: np.ndarray
    bmatrix: np.ndarray


def angle_geometry(phi, d):
    phi = np.asarray(phi, dtype=float)
    d = int(d)
    if phi.shape != (angle_count(d),):
        raise InputError(f"expected {angle_count(d)} angles for d={d}")
    if phi.size and (phi.min() < 0.0 or phi.max() > np.pi):
        raise DomainError("correlative angles must lie in [0, pi]")
    b = np.zeros((d, d))
    b[0, 0] = 1.0
    if d == 1:
        empty = np.zeros((0, 0))
        return AngleGeometry(phi, d, empty, empty, np.zeros((0, 1)), b)
    packed = np.full((d - 1, d - 1), np.pi / 2)
    packed[_tril(d - 1)] = phi
    sin_p = np.sin(packed)
    cos_p = np.cos(packed)
    prefix = np.empty((d - 1, d))
    prefix[:, 0] = 1.0
    np.cumprod(sin_p, axis=1, out=prefix[:, 1:])
    il, jl = _tril(d, -1)
    b[il, jl] = cos_p[il - 1, jl] * prefix[il - 1, jl]
    rows = np.arange(1, d)
    b[rows, rows] = prefix[rows - 1, rows]
    return AngleGeometry(phi, d, sin_p, cos_p, prefix, b)


def elementary_matrix(phi, d):
    """Lower-triangular matrix with unit-norm rows from correlative angles.

    Row i (0-based) uses angles a_0..a_{i-1}: entry (i, j) is
    cos(a_j) * prod_{k<j} sin(a_k) for j < i and prod_{k<i} sin(a_k) on the
    diagonal.
    """
    return angle_geometry(phi, d).bmatrix


def build_covariance(stddev, phi):
    """Covariance C = S (B B^t) S from standard deviations and angles."""
    stddev = np.asarray(stddev, dtype=float)
    if stddev.ndim != 1:
        raise InputError("stddev must be a vector")
    if np.any(stddev <= 0.0):
        raise DomainError("standard deviations must be positive")
    scaled = stddev[:, None] * elementary_matrix(phi, stddev.size)
    return scaled @ scaled.T


@dataclass(frozen=True)
class DistributionParams:
    """Immutable snapshot of the search distribution.

    ``cov`` is derived from (stddev, angles); keeping it on the snapshot lets
    stored generations re-evaluate their generating density later.
    """

    mean: np.ndarray
    stddev: np.ndarray
    angles: np.ndarray
    cov: np.ndarray

    @property
    def dim(self):
        return self.mean.size


def make_params(mean, stddev, angles):
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if mean.shape != stddev.shape:
        raise InputError("mean and stddev must have the same length")
    cov = build_covariance(stddev, angles)
    return DistributionParams(mean, stddev, angles, cov)


@dataclass(frozen=True)
class ActionBatch:
    """Sampled actions: raw normal draws, their clip to [-1,1]^d, and the
    log-density of each raw draw under the generating distribution."""

    raw: np.ndarray
    clipped: np.ndarray
    log_prob: np.ndarray

    def __len__(self):
        return self.raw.shape[0]


def cholesky_factor(cov):
    """Lower Cholesky factor with escalating diagonal jitter.

    Boundary angles produce exactly singular covariances; rather than
    rejecting and re-drawing, a tiny ridge is added until factorization
    succeeds.
    """
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    eye = np.eye(cov.shape[0])
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(cov + jitter * eye)
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("covariance not factorizable within jitter budget")


def _log_density_from_factor(factor, mean, points):
    d = mean.size
    centered = np.atleast_2d(points) - mean
    white = np.linalg.solve(factor, centered.T)
    log_det = 2.0 * np.sum(np.log(np.diag(factor)))
    quad = np.sum(white * white, axis=0)
    return -0.5 * (d * np.log(2.0 * np.pi) + log_det + quad)


def sample(params, count, rng):
    """Draw ``count`` actions from N(mean, C) via the Cholesky factor.

    Deterministic given the generator state; clipping is componentwise and
    the recorded log-density refers to the raw (unclipped) draw.
    """
    factor = cholesky_factor(params.cov)
    z = rng.standard_normal((int(count), params.dim))
    raw = params.mean + z @ factor.T
    clipped = np.clip(raw, -1.0, 1.0)
    log_prob = _log_density_from_factor(factor, params.mean, raw)
    return ActionBatch(raw, clipped, log_prob)


def log_density(params, point):
    """Exact multivariate-normal log-density at ``point``."""
    point = np.asarray(point, dtype=float)
    factor = cholesky_factor(params.cov)
    out = _log_density_from_factor(factor, params.mean, point)
    return float(out[0]) if point.ndim == 1 else out


def density_internals(mean, stddev, geometry, actions):
    """Shared solves for a batch of raw actions under (mean, stddev, phi).

    Returns (u, w, v, log_pdf): u the per-coordinate standardized residuals
    (n, d); w = B^-1 u^T and v = B^-t w (both (d, n)); log_pdf the (n,)
    log-densities, all computed from the triangular factor S B of C.
    """
    actions = np.atleast_2d(np.asarray(actions, dtype=float))
    b = geometry.bmatrix
    u = (actions - mean) / stddev
    w = np.linalg.solve(b, u.T)
    v = np.linalg.solve(b.T, w)
    d = mean.size
    log_det = 2.0 * (np.sum(np.log(stddev)) + np.sum(np.log(np.diag(b))))
    log_pdf = -0.5 * (d * np.log(2.0 * np.pi) + log_det + np.sum(w * w, axis=0))
    return u, w, v, log_pdf


def weighted_gradients(mean, stddev, geometry, internals, weights):
    """Gradient of (1/n) sum_k weights_k log N(a_k; mean, C) w.r.t.
    (mean, stddev, angles).

    Uses the closed forms through the factor S B: the angle gradient is
    assembled from tail sums of G*B per row, where G is the matrix gradient
    w.r.t. B — fully vectorized, no per-angle loops.
    """
    u, w, v, _ = internals
    weights = np.asarray(weights, dtype=float)
    n = weights.size
    wsum = weights.sum()
    g_mean = (v @ weights) / stddev / n
    g_stddev = ((u.T * v) @ weights - wsum) / stddev / n
    d = mean.size
    if d == 1:
        return g_mean, g_stddev, np.zeros(0)
    b = geometry.bmatrix
    g_b = (v * weights) @ w.T
    g_b[np.diag_indices(d)] -= wsum / np.diag(b)
    g_b /= n

    h = g_b * b
    tail = np.cumsum(h[:, ::-1], axis=1)[:, ::-1] - h  # sum over columns > t
    g_angles = (-g_b[1:, : d - 1] * geometry.sin * geometry.prefix[:, : d - 1]
                + (geometry.cos / geometry.sin) * tail[1:, : d - 1])
    return g_mean, g_stddev, g_angles[_tril(d - 1)]
