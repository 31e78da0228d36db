"""
Numerical differentiation helpers.

Three families are used across the apps:

* central differences with one Richardson level, for callables we can only
  evaluate on real inputs (conformal factors, radial profiles);
* complex-step first derivatives, for real-valued components that extend
  analytically in a real coordinate;
* contour (Cauchy trapezoid) derivatives, for functions that extend
  holomorphically in a complex slot, such as polarized metric components.
  The trapezoid rule on a circle converges geometrically, so second mixed
  derivatives reach the 1e-9 range that finite differences cannot.
"""
import logging

import numpy as np

from common.exceptions import DifferentiationError

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
FD_STEP = 1e-4
LAPLACIAN_STEP = 1e-3
COMPLEX_STEP = 1e-20
MIN_STEP = 1e-12
CONTOUR_NODES = 16
CONTOUR_RADIUS = 0.05


def _check_step(step):
    if not np.isfinite(step) or abs(step) < MIN_STEP:
        raise DifferentiationError(f'Step {step!r} is below the usable minimum {MIN_STEP}')


def _check_finite(values, what):
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise DifferentiationError(f'{what} produced non-finite values')
    return values


def richardson(coarse, fine, order=2):
    """One Richardson level for an estimate with error O(h**order); ``fine`` uses h/2."""
    factor = 2.0 ** order
    return (factor * np.asarray(fine) - np.asarray(coarse)) / (factor - 1.0)


def central_difference(func, step=FD_STEP):
    """Derivative at 0 of ``func(h)`` (real offset h), central differences + Richardson."""
    _check_step(step)

    def estimate(h):
        return (np.asarray(func(h)) - np.asarray(func(-h))) / (2.0 * h)

    return _check_finite(richardson(estimate(step), estimate(step / 2.0)), 'Central difference')


def complex_step(func, step=COMPLEX_STEP):
    """Derivative at 0 of a real-analytic, real-valued ``func`` via Im f(ih)/h."""
    if not np.isfinite(step) or step <= 0.0:
        raise DifferentiationError(f'Complex step must be positive, got {step!r}')
    values = np.asarray(func(1j * step))
    if not np.iscomplexobj(values):
        logger.warning('Complex step returned real values; falling back to central differences')
        return central_difference(func)
    return _check_finite(values.imag / step, 'Complex step')


def laplacian(func, xi, step=LAPLACIAN_STEP):
    """Euclidean Laplacian of a real function on the complex plane, vectorized over ``xi``."""
    _check_step(step)
    xi = np.asarray(xi, dtype=complex)
    center = np.asarray(func(xi), dtype=float)

    def estimate(h):
        total = (
            np.asarray(func(xi + h), dtype=float)
            + np.asarray(func(xi - h), dtype=float)
            + np.asarray(func(xi + 1j * h), dtype=float)
            + np.asarray(func(xi - 1j * h), dtype=float)
        )
        return (total - 4.0 * center) / (h * h)

    return _check_finite(richardson(estimate(step), estimate(step / 2.0)), 'Laplacian')


def contour_nodes(radius=CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """Offsets r * exp(2 pi i k / N) of the trapezoid contour."""
    _check_step(radius)
    return radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)


def contour_derivative(func, radius=CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """First derivative at 0 of a holomorphic ``func``.

    ``func`` receives the array of contour offsets (shape ``(nodes,)``) and
    returns values stacked along the first axis.
    """
    offsets = contour_nodes(radius, nodes)
    values = np.asarray(func(offsets))
    weights = 1.0 / (nodes * offsets)
    return _check_finite(np.tensordot(weights, values, axes=1), 'Contour derivative')


def mixed_contour_derivative(func, radius=CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """Mixed second derivative d^2 f / ds dt at (0, 0) of a function holomorphic in (s, t).

    ``func(s, t)`` receives broadcastable offset grids of shape ``(nodes, 1)``
    and ``(1, nodes)`` and returns values of shape ``(nodes, nodes, ...)``.
    """
    offsets = contour_nodes(radius, nodes)
    s = offsets[:, None]
    t = offsets[None, :]
    values = np.asarray(func(s, t))
    weights = 1.0 / (nodes * nodes * s * t)
    return _check_finite(np.tensordot(weights, values, axes=2), 'Mixed contour derivative')
