"""
Independent checks of the closed-form bases: invariance at random points and
dimensions from a brute-force null-space solve on truncated coefficient spaces.
"""
import logging

import numpy as np
from scipy.linalg import null_space

from bundle_algebra.angles import as_angle, combine
from bundle_algebra.bundles import TypeI, TypeIII, deck_generators
from common.exceptions import BundleError
from common.sampling import DEFAULT_FIBER_RADIUS, make_rng, sample_ball, sample_total_space
from modular_lattice.lattice import as_tau

from .fuchsian import fuchsian_group, fuchsian_representation, mobius_action
from .polynomials import evaluate, monomial, substitute

logger = logging.getLogger(__name__)

NULL_SPACE_RCOND = 1e-9
INVARIANCE_SAMPLES = 100


def invariance_defect(poly, maps, points):
    """max |f(g x) - f(x)| / max(1, |f(x)|) over the maps."""
    poly = dict(poly)
    base = evaluate(poly, points)
    scale = np.maximum(np.abs(base), 1.0)
    worst = 0.0
    for transform in maps:
        moved = evaluate(poly, transform(points))
        worst = max(worst, float(np.max(np.abs(moved - base) / scale)))
    return worst


def bundle_invariance_defect(element, E, samples=INVARIANCE_SAMPLES, seed=None,
                             fiber_radius=DEFAULT_FIBER_RADIUS):
    if element.coefficients is None:
        raise BundleError(f'{element.form} is not a polynomial in (z, z1, z2)')
    points = sample_total_space(make_rng(seed), samples, E.tau, 2, fiber_radius)
    maps = [generator.apply for generator in deck_generators(E)]
    return invariance_defect(element.coefficients, maps, points)


def representation_maps(theta1, theta2, b1, b2, tau):
    """Deck maps of the (possibly split) representation, as point maps."""
    tau = complex(as_tau(tau))
    generators = representation_generators(theta1, theta2, b1, b2, tau)

    def make(translation, matrix):
        def transform(points):
            points = np.asarray(points, dtype=complex)
            image = np.einsum('ij,...j->...i', matrix, points[..., 1:])
            return np.concatenate([(points[..., 0] + translation)[..., None], image], axis=-1)
        return transform

    return [make(translation, matrix) for translation, matrix in generators]


def representation_generators(theta1, theta2, b1, b2, tau):
    theta = (as_angle(theta1), as_angle(theta2))
    tau = complex(as_tau(tau))
    result = []
    for (m, n), b in (((1, 0), b1), ((0, 1), b2)):
        phase = combine((m, n), theta).phase()
        result.append((m + n * tau, phase * np.array([[1.0, complex(b)], [0.0, 1.0]], dtype=complex)))
    return result


def fuchsian_maps(theta1, theta2):
    """(w, xi) -> (sigma w, rho xi) for the three generators."""
    group = fuchsian_group()
    maps = []
    for sigma, rho in zip(group.generators(), fuchsian_representation(theta1, theta2)):
        def transform(points, sigma=sigma, rho=rho):
            points = np.asarray(points, dtype=complex)
            image = np.einsum('ij,...j->...i', rho, points[..., 1:])
            return np.concatenate([mobius_action(sigma, points[..., 0])[..., None], image], axis=-1)
        maps.append(transform)
    return maps


def fuchsian_invariance_defect(element, theta1, theta2, samples=INVARIANCE_SAMPLES, seed=None,
                               fiber_radius=DEFAULT_FIBER_RADIUS):
    rng = make_rng(seed)
    w = rng.uniform(-1.0, 1.0, samples) + 1j * rng.uniform(0.5, 2.0, samples)
    points = np.column_stack([w, sample_ball(rng, samples, 2, fiber_radius)])
    return invariance_defect(element.coefficients, fuchsian_maps(theta1, theta2), points)


def _solve_dimension(generators, keys):
    index = {key: position for position, key in enumerate(keys)}
    blocks = []
    for translation, matrix in generators:
        T = np.zeros((len(keys), len(keys)), dtype=complex)
        for column, key in enumerate(keys):
            image = substitute(monomial(*key), translation, matrix)
            for image_key, value in image.items():
                T[index[image_key], column] += value
        blocks.append(T - np.eye(len(keys)))
    return null_space(np.vstack(blocks), rcond=NULL_SPACE_RCOND).shape[1]


def _keys(d, base_degree):
    return [(j, a, total - a)
            for j in range(base_degree + 1)
            for total in range(d + 1)
            for a in range(total + 1)]


def brute_force_representation_dimension(theta1, theta2, b1, b2, tau, d):
    """Invariant polynomials in (z, z1, z2) with z-degree and fiber degree <= d."""
    generators = representation_generators(theta1, theta2, b1, b2, tau)
    dimension = _solve_dimension(generators, _keys(d, d))
    logger.debug(f'Brute-force dimension {dimension} for d={d}')
    return dimension


def brute_force_dimension(E, d):
    """Same solve for a Type I or Type III bundle, using its own deck matrices."""
    if not isinstance(E, (TypeI, TypeIII)):
        raise BundleError('Brute-force solving needs constant fiber multipliers (Type I or III)')
    generators = []
    for action in deck_generators(E):
        generators.append((action.translation, np.asarray(action.fiber(np.zeros(())))))
    return _solve_dimension(generators, _keys(d, d))


def brute_force_fuchsian_dimension(theta1, theta2, d):
    generators = [(0.0, rho) for rho in fuchsian_representation(theta1, theta2)[:2]]
    keys = [(0, a, total - a) for total in range(d + 1) for a in range(total + 1)]
    return _solve_dimension(generators, keys)
