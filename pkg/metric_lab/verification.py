"""
Numerical verification of metric identities.

Defects are evaluated pointwise and vectorized over a batch of points of
shape (count, dim). Mixed derivatives d/du_i d/dw_j use contours in the
polarized slots; first derivatives along real coordinates use the complex
step on the real and imaginary parts of g.
"""
import logging

import numpy as np

from bundle_algebra.maps import FiberLinearMap
from common.exceptions import BundleError
from common.numerics import (
    central_difference, complex_step, contour_derivative, mixed_contour_derivative,
)
from common.results import CheckResult
from common.sampling import DEFAULT_FIBER_RADIUS, make_rng, sample_total_space

logger = logging.getLogger(__name__)

SINGULAR_JACOBIAN = 1e-12
METRIC_SUITE = ('invariance', 'determinant', 'positivity', 'ricci', 'gauduchon', 'kahler')
DEFAULT_SAMPLES = 200
DEFAULT_TOLERANCE = 1e-6
IDENTITY_TOLERANCE = 1e-10


def _offset(values, points, index):
    """values[..., None...] * e_index, broadcast in front of ``points``."""
    unit = np.zeros(points.shape[-1], dtype=complex)
    unit[index] = 1.0
    return values.reshape(values.shape + (1,) * points.ndim) * unit


def polarized_mixed_derivative(func, points, i, j):
    """d/du_i d/dw_j func(u, w) at u = p, w = conj p."""
    points = np.asarray(points, dtype=complex)
    conj = np.conj(points)

    def shifted(s, t):
        return func(points + _offset(s, points, i), conj + _offset(t, points, j))

    return mixed_contour_derivative(shifted)


def holomorphic_partial(func, points, index):
    """d/du_index func(u, conj p) at u = p."""
    points = np.asarray(points, dtype=complex)
    conj = np.conj(points)
    return contour_derivative(lambda offsets: func(points + _offset(offsets, points, index), conj))


def map_jacobian(phi, points):
    """Holomorphic Jacobian J[..., i, a] of a point map."""
    points = np.asarray(points, dtype=complex)
    if isinstance(phi, FiberLinearMap):
        return phi.jacobian(points)
    columns = [
        contour_derivative(lambda offsets, a=a: phi(points + _offset(offsets, points, a)))
        for a in range(points.shape[-1])
    ]
    return np.stack(columns, axis=-1)


def _apply(phi, points):
    return phi.apply(points) if isinstance(phi, FiberLinearMap) else phi(points)


def pullback(g, phi, points):
    """(phi^* g)(p) = J^T g(phi(p)) conj(J)."""
    points = np.asarray(points, dtype=complex)
    J = map_jacobian(phi, points)
    if np.any(np.abs(np.linalg.det(J)) < SINGULAR_JACOBIAN):
        logger.warning(f'Singular Jacobian while pulling back {g.label}')
    image = _apply(phi, points)
    if g.coframe is not None:
        moved = np.matmul(g.frame(image), J)
        return np.einsum('...ai,...aj->...ij', moved, np.conj(moved))
    return np.einsum('...ai,...ab,...bj->...ij', J, g.eval(image), np.conj(J))


def chern_ricci_defect(g, points):
    """max_{i,j} |d_i d_j-bar log det g| per point."""
    worst = 0.0
    for i in range(g.dim):
        for j in range(g.dim):
            value = np.abs(polarized_mixed_derivative(g.log_det, points, i, j))
            worst = np.maximum(worst, value)
    return worst


def gauduchon_defect(g, points):
    """|sum_{i,j} d_i d_j-bar C_{ij}|, the coefficient of i dd-bar(omega^(n-1)) up to a constant."""
    total = 0.0
    for i in range(g.dim):
        for j in range(g.dim):
            def cofactor(u, w, i=i, j=j):
                return g.cofactors(u, w)[..., i, j]
            total = total + polarized_mixed_derivative(cofactor, points, i, j)
    return np.abs(total)


def kahler_defect(g, points):
    """max |d_k g_{i j-bar} - d_i g_{k j-bar}| per point."""
    partials = [holomorphic_partial(g.polarized, points, k) for k in range(g.dim)]
    worst = 0.0
    for k in range(g.dim):
        for i in range(g.dim):
            difference = partials[k][..., i, :] - partials[i][..., k, :]
            worst = np.maximum(worst, np.max(np.abs(difference), axis=-1))
    return worst


def component_derivative(g, points, coord, method='complex_step'):
    """
    d g / d x_coord (coord < dim) or d g / d y_(coord - dim) along a real coordinate.

    The real and imaginary parts of g are real-analytic, so both methods apply.
    """
    points = np.asarray(points, dtype=complex)
    n = g.dim
    if not 0 <= coord < 2 * n:
        raise BundleError(f'Real coordinate {coord} out of range for C^{n}')
    index = coord % n
    direction = 1.0 if coord < n else 1j
    conj = np.conj(points)

    def parts(h):
        u = points + _offset(np.asarray(direction * h), points, index)
        w = conj + _offset(np.asarray(np.conj(direction) * h), points, index)
        G = g.polarized(u, w)
        transpose = np.swapaxes(G, -1, -2)
        return np.stack([(G + transpose) / 2.0, (G - transpose) / 2j])

    if method == 'complex_step':
        real, imag = complex_step(parts)
    elif method == 'central':
        real, imag = central_difference(parts)
    else:
        raise BundleError(f'Unknown differentiation method {method!r}')
    return np.real(real) + 1j * np.real(imag)


def sample_points(g, samples=DEFAULT_SAMPLES, seed=None, fiber_radius=DEFAULT_FIBER_RADIUS):
    """Base points in one fundamental parallelogram, fiber points in a ball."""
    return sample_total_space(make_rng(seed), samples, g.sampling_tau, g.dim - 1, fiber_radius)


def deck_invariance_defect(g, points):
    """max over generators of ||gamma^* g - g||_F / ||g||_F per point."""
    base = g.eval(points)
    scale = np.linalg.norm(base, axis=(-2, -1))
    worst = np.zeros(scale.shape)
    for action in g.deck:
        moved = pullback(g, action, points)
        worst = np.maximum(worst, np.linalg.norm(moved - base, axis=(-2, -1)) / scale)
    return worst


def determinant_defect(g, points):
    return np.abs(g.determinant(points) - 1.0)


def positivity_margin(g, points):
    """Smallest eigenvalue of g per point."""
    return np.linalg.eigvalsh(g.eval(points))[..., 0]


def run_metric_suite(g, suite=METRIC_SUITE, tolerance=DEFAULT_TOLERANCE,
                     identity_tolerance=IDENTITY_TOLERANCE, samples=DEFAULT_SAMPLES, seed=None,
                     fiber_radius=DEFAULT_FIBER_RADIUS):
    """Run the named checks on one sample set; a check result per name, in order."""
    points = sample_points(g, samples, seed, fiber_radius)
    results = []
    for name in suite:
        if name == 'invariance':
            result = CheckResult.from_defects(name, deck_invariance_defect(g, points), identity_tolerance)
        elif name == 'determinant':
            result = CheckResult.from_defects(name, determinant_defect(g, points), identity_tolerance)
        elif name == 'positivity':
            margin = positivity_margin(g, points)
            result = CheckResult.from_defects(name, np.maximum(-margin, 0.0), 0.0)
            if np.any(margin <= 0.0):
                result = CheckResult(name, result.points, result.max_defect, 0.0, False)
        elif name == 'ricci':
            result = CheckResult.from_defects(name, chern_ricci_defect(g, points), tolerance)
        elif name == 'gauduchon':
            result = CheckResult.from_defects(name, gauduchon_defect(g, points), tolerance)
        elif name == 'kahler':
            result = CheckResult.from_defects(name, kahler_defect(g, points), tolerance)
        else:
            raise BundleError(f'Unknown metric check {name!r}; expected one of {", ".join(METRIC_SUITE)}')
        logger.info(f'{g.label} {name}: max defect {result.max_defect:.3e} over {result.points} points')
        results.append(result)
    return results
