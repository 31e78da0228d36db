"""
Curvature of fiber metrics and of conformal metrics on the fiber.

A fiber metric h_{alpha beta-bar}(z) is polarized like MetricField: a matrix
function h(u, w) holomorphic in both slots with h(z, conj z) = h(z). Its Chern
curvature is R = -d d-bar h + (d h) h^-1 (d-bar h).
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bundle_algebra.angles import as_angle, common_order
from common.exceptions import BundleError
from common.numerics import contour_derivative, laplacian, mixed_contour_derivative
from common.results import CheckResult
from common.sampling import make_rng, sample_disc

from .fields import assemble

logger = logging.getLogger(__name__)

BI_SAMPLES = 200
BI_RADIUS = 5.0
INVARIANCE_TOLERANCE = 1e-10
SUPERHARMONIC_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class FiberMetric:
    rank: int
    matrix: Callable
    k: float = None
    label: str = ''

    def at(self, z):
        z = np.asarray(z, dtype=complex)
        return self.matrix(z, np.conj(z))

    def eval(self, z, v):
        """h(v, v-bar) = v^T h conj(v), a positive real."""
        v = np.asarray(v, dtype=complex)
        return np.einsum('...a,...ab,...b->...', v, self.at(z), np.conj(v)).real


def identity_fiber_metric(rank=2):
    def matrix(u, w):
        shape = np.broadcast_shapes(np.shape(u), np.shape(w))
        return np.broadcast_to(np.eye(rank, dtype=complex), shape + (rank, rank))

    return FiberMetric(rank, matrix, label='identity')


def paun_fiber_metric(k):
    """|v1 - (Im z) v2|^2 + k |v2|^2."""
    if k <= 0:
        raise BundleError(f'k must be positive, got {k}')

    def matrix(u, w):
        u, w = np.asarray(u, dtype=complex), np.asarray(w, dtype=complex)
        shape = np.broadcast_shapes(u.shape, w.shape)
        y = (u - w) / 2j
        return assemble([[1.0, -y], [-y, y * y + k]], shape)

    return FiberMetric(2, matrix, k=k, label=f'paun(k={k:g})')


def ah_fiber_metric(H):
    """exp(-pi H |z|^2) |v|^2 on a line of Hermitian form H."""

    def matrix(u, w):
        u, w = np.asarray(u, dtype=complex), np.asarray(w, dtype=complex)
        return np.exp(-np.pi * H * u * w)[..., None, None]

    return FiberMetric(1, matrix, label=f'ah(H={H:g})')


def paun_curvature_closed_form(k, y):
    """
    (1 / 4k) [[1, -y], [-y, y^2 - k]], the sign of R = -d d-bar h + (d h) h^-1 (d-bar h)
    used by fiber_chern_curvature.
    """
    y = np.asarray(y, dtype=float)
    return np.stack([
        np.stack([np.ones_like(y), -y], axis=-1),
        np.stack([-y, y * y - k], axis=-1),
    ], axis=-2) / (4.0 * k)


def fiber_chern_curvature(h, z):
    """R_{z z-bar alpha beta-bar} at z (vectorized)."""
    z = np.asarray(z, dtype=complex)
    z_bar = np.conj(z)

    def grid(offsets):
        return offsets.reshape(offsets.shape + (1,) * z.ndim)

    mixed = mixed_contour_derivative(lambda s, t: h.matrix(z + grid(s), z_bar + grid(t)))
    d = contour_derivative(lambda offsets: h.matrix(z + grid(offsets), z_bar))
    d_bar = contour_derivative(lambda offsets: h.matrix(z, z_bar + grid(offsets)))
    inverse = np.linalg.inv(h.at(z))
    return -mixed + np.matmul(np.matmul(d, inverse), d_bar)


def gauss_curvature(conformal, xi):
    """K = -(1 / 2 lambda) Laplacian(ln lambda) for the metric lambda |dxi|^2."""
    xi = np.asarray(xi, dtype=complex)
    value = np.asarray(conformal(xi), dtype=float)
    return -laplacian(lambda points: np.log(conformal(points)), xi) / (2.0 * value)


def radial(profile):
    """xi -> profile(|xi|^2)."""
    return lambda xi: profile(np.abs(xi) ** 2)


def cigar(xi):
    return 1.0 / (1.0 + np.abs(xi) ** 2)


def superharmonic_defect(u_tilde, samples):
    """max(0, max Laplacian(ln u)) over the samples; 0 means ln u is superharmonic there."""
    values = laplacian(lambda points: np.log(u_tilde(points)), np.asarray(samples, dtype=complex))
    return max(0.0, float(np.max(values)))


def _relative_gap(func, xi, image):
    base = np.asarray(func(xi), dtype=complex)
    moved = np.asarray(func(image), dtype=complex)
    return np.abs(moved - base) / np.maximum(np.abs(base), 1.0)


def validate_bi_candidate(theta, k, u_tilde, h, samples=BI_SAMPLES, seed=None, radius=BI_RADIUS,
                          tolerance=INVARIANCE_TOLERANCE):
    """
    Check candidate data (u, h) of the metric C d(z + h) ^ conj + u dxi ^ dxi-bar.

    Rational characters of order k need Z_k-invariant u and h; irrational ones
    need radial u and constant h. ln u must be superharmonic in both cases.
    Returns a list of CheckResult.
    """
    theta = tuple(as_angle(angle) for angle in theta)
    rng = make_rng(seed)
    xi = sample_disc(rng, samples, radius)
    order = common_order(theta)
    results = []

    if order is not None:
        results.append(CheckResult('order', 1, float(abs(int(k) - order)), 0.0, int(k) == order))
        rotation = np.exp(2j * np.pi / int(k)) if int(k) > 0 else 1.0
        results.append(CheckResult.from_defects('u_invariance', _relative_gap(u_tilde, xi, rotation * xi), tolerance))
        results.append(CheckResult.from_defects('h_invariance', _relative_gap(h, xi, rotation * xi), tolerance))
    else:
        angles = np.exp(2j * np.pi * rng.random(samples))
        results.append(CheckResult.from_defects('u_radial', _relative_gap(u_tilde, xi, angles * xi), tolerance))
        results.append(CheckResult.from_defects('h_constant', _relative_gap(h, np.zeros_like(xi), xi), tolerance))

    results.append(CheckResult.from_defects('superharmonic', superharmonic_defect(u_tilde, xi), SUPERHARMONIC_TOLERANCE))
    for result in results:
        if not result.passed:
            logger.info(f'BI candidate failed {result.check} with defect {result.max_defect:.3e}')
    return results


def curvature_grid(func, extent=2.0, steps=11):
    """Rows (re, im, value) of a real function on a square grid centered at 0."""
    ticks = np.linspace(-extent, extent, steps)
    re, im = np.meshgrid(ticks, ticks, indexing='ij')
    values = np.asarray(func(re + 1j * im), dtype=float)
    return [
        {'re': float(a), 'im': float(b), 'value': float(v)}
        for a, b, v in zip(re.ravel(), im.ravel(), values.ravel())
    ]
