"""Path lengths and distance bounds in Hermitian metrics on total spaces"""
import logging
import math

import numpy as np

from bundle_algebra.isomorphism import bundles_isomorphic
from common.exceptions import BundleError
from common.sampling import DEFAULT_FIBER_RADIUS
from metric_lab.fields import build_metric, gaugenspe_metric
from metric_lab.verification import DEFAULT_SAMPLES, pullback, sample_points

from .distance import integrate

logger = logging.getLogger(__name__)


def segment_length(g, start, end):
    """Length of t -> start + t (end - start), t in [0, 1]."""
    start = np.asarray(start, dtype=complex)
    velocity = np.asarray(end, dtype=complex) - start
    if not np.any(velocity):
        return 0.0

    def speed(t):
        G = g.eval(start + t * velocity)
        return math.sqrt(max(float(np.real(velocity @ G @ np.conj(velocity))), 0.0))

    return integrate(speed, 0.0, 1.0)


def path_length(g, path):
    """Length of the piecewise linear path through the given points."""
    points = [np.asarray(point, dtype=complex) for point in path]
    return sum(segment_length(g, a, b) for a, b in zip(points, points[1:]))


def coordinate_path(point):
    """(0, 0, 0) -> (0, 0, z2) -> (0, z1, z2) -> (z, z1, z2)."""
    z, z1, z2 = np.asarray(point, dtype=complex)
    return [(0, 0, 0), (0, 0, z2), (0, z1, z2), (z, z1, z2)]


def gaugen_lower_bound(point):
    """The coframe rows dz and dz2 have unit length, so d >= max(|z|, |z2|)."""
    z, _, z2 = np.asarray(point, dtype=complex)
    return max(abs(z), abs(z2))


def gaugenspe_distance_bounds(point, tau=1j, g=None):
    """(lower, upper) for the distance from (0, 0, 0) in the universal cover."""
    g = gaugenspe_metric(tau) if g is None else g
    lower = gaugen_lower_bound(point)
    upper = path_length(g, coordinate_path(point))
    return lower, upper


def quasi_isometry_distortion(E, F, samples=DEFAULT_SAMPLES, seed=None, fiber_radius=DEFAULT_FIBER_RADIUS):
    """
    max(stretch, 1 / shrink) of the isomorphism witness X_E -> X_F between
    the metrics both bundles carry, over sample points of X_E.
    """
    witness = bundles_isomorphic(E, F)
    if witness is None:
        raise BundleError(f'Type {E.kind} bundles are not isomorphic, no witness to measure')
    g = build_metric(E)
    target = build_metric(F)
    points = sample_points(g, samples, seed, fiber_radius)
    moved = pullback(target, witness, points)
    factor = np.linalg.inv(np.linalg.cholesky(g.eval(points)))
    relative = np.matmul(np.matmul(factor, moved), np.conj(np.swapaxes(factor, -1, -2)))
    eigenvalues = np.linalg.eigvalsh(relative)
    stretch = math.sqrt(float(np.max(eigenvalues)))
    shrink = math.sqrt(float(np.min(eigenvalues)))
    distortion = max(stretch, 1.0 / shrink)
    logger.info(f'Witness {witness.form} has distortion {distortion:.6g} over {len(points)} points')
    return distortion
