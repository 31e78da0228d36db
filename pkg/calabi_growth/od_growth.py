"""
Degree matching for O_d(X, g): holomorphic f with |f(q)| <= C (d_g(q, p) + 1)^d.

Members are checked against a lower bound of the distance, which certifies
the inequality on the samples. The next admissible degree is checked against
an upper bound along a fiber ray, which certifies that it leaves O_d.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from bundle_algebra.angles import all_rational, common_order
from bundle_algebra.bundles import TypeI, TypeII, TypeIII
from common.exceptions import BundleError
from common.results import CheckResult
from common.sampling import make_rng, sample_ball, sample_parallelogram
from holo_functions.basis import basis_for
from holo_functions.polynomials import evaluate
from metric_lab.fields import build_metric

from .paths import path_length

logger = logging.getLogger(__name__)

RAY_RADII = tuple(np.logspace(0, 6, 13))
WITNESS_RADII = tuple(np.logspace(1, 6, 6))
GROWTH_BOUND = 1.0 + 1e-9
DIVERGENCE_FACTOR = 10.0
WITNESS_SEARCH = 24
DEFAULT_DIRECTIONS = 20


@dataclass(frozen=True)
class GrowthRow:
    form: str
    degree: int
    exponent: int
    points: int
    max_ratio: float
    bounded: bool

    def to_dict(self):
        return {
            'form': self.form,
            'degree': self.degree,
            'exponent': self.exponent,
            'points': self.points,
            'max_ratio': self.max_ratio,
            'bounded': self.bounded,
        }


@dataclass
class OdReport:
    degree: int
    kind: str
    members: list = field(default_factory=list)
    witness: GrowthRow = None

    @property
    def passed(self):
        return all(row.bounded for row in self.members) and (self.witness is None or not self.witness.bounded)

    def to_results(self):
        """Members pass when bounded; the witness passes when its ratio grows by DIVERGENCE_FACTOR."""
        results = [
            CheckResult(f'O_{self.degree} {row.form}', row.points, row.max_ratio, GROWTH_BOUND, row.bounded)
            for row in self.members
        ]
        if self.witness is not None:
            row = self.witness
            results.append(CheckResult(
                f'outside O_{self.degree} {row.form}', row.points, 1.0 / row.max_ratio,
                1.0 / DIVERGENCE_FACTOR, not row.bounded,
            ))
        return results

    def to_dict(self):
        return {
            'degree': self.degree,
            'type': self.kind,
            'members': [row.to_dict() for row in self.members],
            'witness': None if self.witness is None else self.witness.to_dict(),
            'pass': self.passed,
        }


def monomial_values(element, points):
    """|f| at points; a section coefficient of Type II is normalized to 1."""
    if element.coefficients is not None:
        return np.abs(evaluate(element.coefficients, points))
    points = np.asarray(points, dtype=complex)
    return np.abs(points[..., 1] ** element.p * points[..., 2] ** element.q)


def growth_form(element):
    """Row label of the function monomial_values evaluates."""
    if element.coefficients is not None:
        return element.form
    return f'xi1^{element.p} xi2^{element.q} [section = 1]'


def fiber_lower_bound(E, points):
    """Lower bound of the distance from (z, 0, 0) to (z, xi1, xi2)."""
    points = np.asarray(points, dtype=complex)
    if isinstance(E, TypeIII):
        return np.abs(points[..., 2])
    return np.linalg.norm(points[..., 1:], axis=-1)


def fiber_rays(E, samples, seed=None, radii=RAY_RADII):
    """Points (z, R v) with z in the fundamental parallelogram and |v| = 1."""
    rng = make_rng(seed)
    base = sample_parallelogram(rng, samples, E.tau.value)
    directions = sample_ball(rng, samples, 2, 1.0)
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    radii = np.asarray(radii, dtype=float)
    fiber = directions[:, None, :] * radii[None, :, None]
    z = np.broadcast_to(base[:, None, None], fiber.shape[:2] + (1,))
    return np.concatenate([z, fiber], axis=-1).reshape(-1, 3)


def witness_direction(E):
    """Fiber direction of the divergence ray: (0, 0, 1) for Type III, (0, 1, 1) otherwise."""
    return np.array([0, 0, 1] if isinstance(E, TypeIII) else [0, 1, 1], dtype=complex)


def next_degree_element(E, d):
    """Basis element of the smallest fiber degree above d, None if there is none."""
    if isinstance(E, TypeIII):
        if not all_rational(E.theta):
            return None
        search = d + common_order(E.theta)
    else:
        search = d + WITNESS_SEARCH
    beyond = [m for m in basis_for(E, search).monomials if m.degree > d and m.section_dim > 0]
    if not beyond:
        return None
    return min(beyond, key=lambda m: (m.degree, m.p))


def verify_Od_growth(E, d, samples=DEFAULT_DIRECTIONS, seed=None, radii=RAY_RADII, witness_radii=WITNESS_RADII):
    """Check the basis of fiber degree <= d lies in O_d and the next degree does not."""
    if not isinstance(E, (TypeI, TypeII, TypeIII)):
        raise BundleError(f'O_d growth needs a rank 2 bundle, got {type(E).__name__}')
    if int(d) != d or d < 0:
        raise BundleError(f'Degree must be a nonnegative integer, got {d!r}')
    d = int(d)
    report = OdReport(d, E.kind)

    points = fiber_rays(E, samples, seed, radii)
    distance = fiber_lower_bound(E, points)
    for element in basis_for(E, d).monomials:
        if element.section_dim == 0:
            continue
        ratio = monomial_values(element, points) / (distance + 1.0) ** element.degree
        worst = float(np.max(ratio))
        report.members.append(GrowthRow(
            growth_form(element), element.degree, element.degree, len(points), worst, worst <= GROWTH_BOUND,
        ))

    element = next_degree_element(E, d)
    if element is not None:
        g = build_metric(E)
        direction = witness_direction(E)
        origin = np.zeros(3, dtype=complex)
        ratios = []
        for radius in witness_radii:
            end = radius * direction
            upper = path_length(g, [origin, end])
            ratios.append(float(monomial_values(element, end)) / (upper + 1.0) ** d)
        growth = ratios[-1] / ratios[0] if ratios[0] > 0 else np.inf
        report.witness = GrowthRow(
            growth_form(element), element.degree, d, len(ratios), float(growth), bool(growth < DIVERGENCE_FACTOR),
        )
        logger.info(f'{growth_form(element)} against exponent {d}: ratio grew by {growth:.3e} along the fiber ray')
    return report
