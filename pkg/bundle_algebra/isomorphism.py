"""
Isomorphism and biholomorphism deciders with explicit witnesses.

Over a reduced modulus every bundle map between total spaces covers z -> A z + B
with A in torus_multipliers(tau). For each A the deciders solve the twisted
character conditions and, when they hold, build the intertwining map.
"""
import logging
from dataclasses import dataclass

import numpy as np

from common.exceptions import BundleError
from common.sampling import DEFAULT_FIBER_RADIUS, make_rng, sample_total_space
from modular_lattice.lattice import (
    in_fundamental_domain, lattice_coordinates, multiplier_matrix, reduce_tau,
    same_modulus, torus_multipliers,
)

from .angles import common_order
from .bundles import (
    TypeI, TypeII, TypeIII, deck_action, deck_generators, fiber_rank,
    normalize_witness, representation_angle, same_tau, transport,
)
from .line_bundles import LineBundleAH
from .maps import IsoWitness, constant_matrix, zero_matrix

logger = logging.getLogger(__name__)

WITNESS_SAMPLES = 100
WITNESS_TOLERANCE = 1e-10


@dataclass(frozen=True)
class BIFamily:
    """Metric family carried by a flat line bundle."""

    kind: str
    k: int = None

    @property
    def rotationally_symmetric(self):
        return self.kind == 'irrational'


def _twisted_angles(line, A, tau):
    """Angles of line(A) and line(A tau)."""
    (p, q), (r, s) = multiplier_matrix(A, tau)
    return line.semicharacter(p, q), line.semicharacter(r, s)


def _characters_match(source, target, A, tau):
    """source(gamma) = target(A gamma) on both generators."""
    image_one, image_tau = _twisted_angles(target, A, tau)
    return source.theta[0].congruent(image_one) and source.theta[1].congruent(image_tau)


def _typeI_witness(E, F, A, swap):
    tau = E.tau
    first, second = (F.second, F.first) if swap else (F.first, F.second)
    if not (_characters_match(E.first, first, A, tau) and _characters_match(E.second, second, A, tau)):
        return None
    matrix = [[0, 1], [1, 0]] if swap else [[1, 0], [0, 1]]
    form = '(A z, z2, z1)' if swap else '(A z, z1, z2)'
    return IsoWitness(A.value, 0.0, constant_matrix(matrix), zero_matrix(2), 2,
                      source=E, target=F, multiplier=A, form=form)


def _typeII_witness(E, F, A):
    tau = E.tau
    if E.degree != F.degree:
        return None
    (p, q), (r, s) = multiplier_matrix(A.value, tau)
    product_one = E.first.semicharacter(1, 0) + E.second.semicharacter(1, 0)
    product_tau = E.first.semicharacter(0, 1) + E.second.semicharacter(0, 1)
    image_one = F.first.semicharacter(p, q) + F.second.semicharacter(p, q)
    image_tau = F.first.semicharacter(r, s) + F.second.semicharacter(r, s)
    if not (product_one.congruent(image_one) and product_tau.congruent(image_tau)):
        return None

    # beta(gamma) / beta~(A gamma) = exp(2 pi i H Im(w gamma)) fixes w; B = A conj(w)
    H = E.first.hermitian_form
    theta = (E.second.semicharacter(1, 0) - F.second.semicharacter(p, q)).value
    phi = (E.second.semicharacter(0, 1) - F.second.semicharacter(r, s)).value
    a, b = tau.real, tau.imag
    v = theta / H
    u = (phi - theta * a) / (H * b)
    w = complex(u, v)
    shift = A.value * np.conj(w)

    def fiber(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = np.exp(np.pi * H * w * z)
        out[..., 1, 1] = np.exp(-np.pi * H * w * z)
        return out

    def derivative(z):
        z = np.asarray(z, dtype=complex)
        out = fiber(z)
        out[..., 0, 0] *= np.pi * H * w
        out[..., 1, 1] *= -np.pi * H * w
        return out

    return IsoWitness(A.value, shift, fiber, derivative, 2, source=E, target=F, multiplier=A,
                      form='(A z + B, exp(pi H w z) z1, exp(-pi H w z) z2)')


def _typeIII_witness(E, F, A):
    """Both bundles normalized (b1 = 0)."""
    tau = E.tau
    (p, q), (r, s) = multiplier_matrix(A.value, tau)
    theta1, theta2 = E.theta
    if not (theta1.congruent(representation_angle(F, p, q))
            and theta2.congruent(representation_angle(F, r, s))):
        return None
    c1 = F.b2 * (s - q * tau.value) / E.b2
    shear = q * F.b2

    def fiber(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = c1
        out[..., 0, 1] = shear * z
        out[..., 1, 1] = 1.0
        return out

    derivative = constant_matrix([[0, shear], [0, 0]])
    return IsoWitness(A.value, 0.0, fiber, derivative, 2, source=E, target=F, multiplier=A,
                      form='(A z, c1 z1 + q b2~ z z2, z2)')


def _isomorphic_reduced(E, F):
    tau = E.tau
    for A in torus_multipliers(tau):
        if isinstance(E, TypeI):
            for swap in (False, True):
                witness = _typeI_witness(E, F, A, swap)
                if witness is not None:
                    return witness
        elif isinstance(E, TypeII):
            witness = _typeII_witness(E, F, A)
            if witness is not None:
                return witness
        elif isinstance(E, TypeIII):
            to_normal = normalize_witness(E)
            other_to_normal = normalize_witness(F)
            core = _typeIII_witness(to_normal.target, other_to_normal.target, A)
            if core is not None:
                return other_to_normal.inverse().compose(core.compose(to_normal))
    return None


def bundles_isomorphic(E, F):
    """Witness of E ~ F over the same modulus (up to an automorphism of the curve), else None."""
    if not same_tau(E, F):
        raise BundleError(f'Bundles live over different moduli {E.tau} and {F.tau}')
    if E.kind != F.kind:
        return None
    if in_fundamental_domain(E.tau):
        return _isomorphic_reduced(E, F)

    _, M = reduce_tau(E.tau)
    moved, to_reduced = transport(E, M)
    other_moved, other_to_reduced = transport(F, M)
    core = _isomorphic_reduced(moved, other_moved)
    if core is None:
        return None
    return other_to_reduced.inverse().compose(core.compose(to_reduced))


def total_spaces_biholomorphic(E, F):
    """Witness of a biholomorphism X_E -> X_F, else None."""
    if E.kind != F.kind:
        return None
    _, M = reduce_tau(E.tau)
    _, N = reduce_tau(F.tau)
    moved, to_reduced = transport(E, M)
    other_moved, other_to_reduced = transport(F, N)
    if not same_modulus(moved.tau, other_moved.tau):
        return None
    # both now sit over numerically the same reduced modulus
    other_moved = _retag_tau(other_moved, moved.tau)
    core = _isomorphic_reduced(moved, other_moved)
    if core is None:
        return None
    back = _retag_witness(other_to_reduced, other_moved).inverse()
    return back.compose(core.compose(to_reduced))


def _retag_tau(E, tau):
    if isinstance(E, TypeIII):
        return TypeIII(E.theta, E.b1, E.b2, tau)
    first = LineBundleAH(E.first.degree, tau, E.first.theta)
    second = LineBundleAH(E.second.degree, tau, E.second.theta)
    return type(E)(first, second)


def _retag_witness(witness, target):
    return IsoWitness(witness.scale, witness.shift, witness.fiber, witness.fiber_derivative,
                      witness.rank, source=witness.source, target=target, matrix=witness.matrix,
                      multiplier=witness.multiplier, form=witness.form)


def admits_flat_kahler(E):
    return isinstance(E, TypeI)


def admits_bi_nonneg(L):
    """(True, family) when L carries complete metrics of nonnegative bisectional curvature."""
    if L.degree != 0:
        return False, None
    k = common_order(L.theta)
    if k is None:
        return True, BIFamily('irrational')
    return True, BIFamily('rational', k)


def intertwining_defect(witness, samples=WITNESS_SAMPLES, seed=None, fiber_radius=DEFAULT_FIBER_RADIUS):
    """Max relative error of W(gamma x) = gamma'(W x) over the source generators."""
    source, target = witness.source, witness.target
    rng = make_rng(seed)
    points = sample_total_space(rng, samples, source.tau, fiber_rank(source), fiber_radius)
    worst = 0.0
    for generator, gamma in zip(deck_generators(source), (1.0, source.tau.value)):
        m, n = lattice_coordinates(witness.scale * gamma, target.tau)
        lhs = witness.apply(generator.apply(points))
        rhs = deck_action(target, m, n).apply(witness.apply(points))
        scale = np.maximum(np.linalg.norm(lhs, axis=-1), 1.0)
        worst = max(worst, float(np.max(np.linalg.norm(lhs - rhs, axis=-1) / scale)))
    return worst


def verify_witness(witness, samples=WITNESS_SAMPLES, tolerance=WITNESS_TOLERANCE, seed=None,
                   fiber_radius=DEFAULT_FIBER_RADIUS):
    defect = intertwining_defect(witness, samples, seed, fiber_radius)
    if defect > tolerance:
        logger.warning(f'Witness {witness.form} intertwines only to {defect:.3e}')
    return defect <= tolerance, defect
