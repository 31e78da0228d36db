"""
Rank-2 degree-0 bundles over an elliptic curve and their deck actions.

Type I    L1 + L2 with both lines of degree 0.
Type II   L1 + L2 with deg L1 = -deg L2 > 0.
Type III  the indecomposable bundle of the representation
          rho(1) = e1 [[1, b1], [0, 1]], rho(tau) = e2 [[1, b2], [0, 1]],
          e_k = exp(2 pi i theta_k), with b2 != b1 tau.
"""
import logging
from dataclasses import dataclass

import numpy as np

from common.exceptions import BundleError
from modular_lattice.lattice import (
    ModularMatrix, Tau, as_tau, lattice_scale, mobius_apply, same_modulus,
)

from .angles import as_angle, combine
from .line_bundles import LineBundleAH, require_same_tau
from .maps import DeckAction, IsoWitness, constant_matrix, zero_matrix

logger = logging.getLogger(__name__)

B_TOLERANCE = 1e-9


class Rank2Bundle:
    """Common base of the three bundle types."""

    kind = None
    rank = 2

    @property
    def lines(self):
        return ()


@dataclass(frozen=True)
class TypeI(Rank2Bundle):
    first: LineBundleAH
    second: LineBundleAH

    kind = 'I'

    def __post_init__(self):
        require_same_tau(self.first, self.second)
        if self.first.degree != 0 or self.second.degree != 0:
            raise BundleError('Type I bundles are sums of degree 0 lines')

    @property
    def tau(self):
        return self.first.tau

    @property
    def lines(self):
        return (self.first, self.second)


@dataclass(frozen=True)
class TypeII(Rank2Bundle):
    first: LineBundleAH
    second: LineBundleAH

    kind = 'II'

    def __post_init__(self):
        require_same_tau(self.first, self.second)
        if self.first.degree <= 0 or self.first.degree != -self.second.degree:
            raise BundleError(
                f'Type II needs deg L1 = -deg L2 > 0, got {self.first.degree} and {self.second.degree}'
            )

    @property
    def tau(self):
        return self.first.tau

    @property
    def degree(self):
        return self.first.degree

    @property
    def lines(self):
        return (self.first, self.second)


@dataclass(frozen=True)
class TypeIII(Rank2Bundle):
    theta: tuple
    b1: complex
    b2: complex
    tau: Tau

    kind = 'III'

    def __post_init__(self):
        object.__setattr__(self, 'tau', as_tau(self.tau))
        object.__setattr__(self, 'theta', tuple(as_angle(angle) for angle in self.theta))
        object.__setattr__(self, 'b1', complex(self.b1))
        object.__setattr__(self, 'b2', complex(self.b2))
        if len(self.theta) != 2:
            raise BundleError(f'Type III needs two angles, got {len(self.theta)}')
        if abs(self.twist) <= B_TOLERANCE:
            raise BundleError(f'Type III needs b2 != b1 tau, got b1={self.b1}, b2={self.b2}')

    @property
    def twist(self):
        """b2 - b1 tau, the parameter left after normalizing b1 to 0."""
        return self.b2 - self.b1 * self.tau.value

    @property
    def is_normalized(self):
        return self.b1 == 0


def is_split_representation(b1, b2, tau):
    return abs(complex(b2) - complex(b1) * complex(as_tau(tau))) <= B_TOLERANCE


def classify(theta1, theta2, b1, b2, tau):
    """Bundle of the representation (theta1, theta2, b1, b2) in normal form."""
    tau = as_tau(tau)
    theta = (as_angle(theta1), as_angle(theta2))
    b1, b2 = complex(b1), complex(b2)
    if is_split_representation(b1, b2, tau):
        line = LineBundleAH(0, tau, theta)
        return TypeI(line, line)
    return TypeIII(theta, 0, b2 - b1 * tau.value, tau)


def normalize(E):
    """Type III bundle with b1 = 0."""
    return TypeIII(E.theta, 0, E.twist, E.tau)


def normalize_witness(E):
    """Isomorphism (z, z1, z2) -> (z, z1 - b1 z z2, z2) onto the normal form."""
    b1 = E.b1

    def fiber(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = 1.0
        out[..., 0, 1] = -b1 * z
        out[..., 1, 1] = 1.0
        return out

    derivative = constant_matrix([[0, -b1], [0, 0]])
    return IsoWitness(1.0, 0.0, fiber, derivative, 2, source=E, target=normalize(E),
                      form='(z, z1 - b1 z z2, z2)')


def representation_angle(E, m, n):
    """Angle of the scalar part of rho(m + n tau)."""
    return combine((m, n), E.theta)


def deck_action(E, m, n):
    """Deck transformation of the lattice element m + n tau on the total space."""
    gamma = m + n * E.tau.value
    label = f'gamma({m},{n})'

    if isinstance(E, LineBundleAH):
        def fiber(z):
            return E.factor(m, n, z)[..., None, None]

        def derivative(z):
            return E.factor_derivative(m, n, z)[..., None, None]

        return DeckAction.build(gamma, fiber, derivative, 1, label)

    if isinstance(E, (TypeI, TypeII)):
        first, second = E.lines

        def fiber(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros(z.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = first.factor(m, n, z)
            out[..., 1, 1] = second.factor(m, n, z)
            return out

        def derivative(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros(z.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = first.factor_derivative(m, n, z)
            out[..., 1, 1] = second.factor_derivative(m, n, z)
            return out

        return DeckAction.build(gamma, fiber, derivative, 2, label)

    if isinstance(E, TypeIII):
        return representation_deck_action(E.theta, E.b1, E.b2, E.tau, m, n)

    raise BundleError(f'No deck action for {type(E).__name__}')


def representation_deck_action(theta, b1, b2, tau, m, n):
    """rho(1)^m rho(tau)^n on C^3, also for split data b2 = b1 tau."""
    tau = as_tau(tau)
    phase = combine((m, n), tuple(as_angle(angle) for angle in theta)).phase()
    matrix = phase * np.array([[1.0, m * complex(b1) + n * complex(b2)], [0.0, 1.0]], dtype=complex)
    return DeckAction.build(m + n * tau.value, constant_matrix(matrix), zero_matrix(2), 2, f'gamma({m},{n})')


def deck_generators(E):
    """Deck transformations of 1 and tau."""
    return [deck_action(E, 1, 0), deck_action(E, 0, 1)]


def fiber_rank(E):
    return 1 if isinstance(E, LineBundleAH) else 2


def transport_line(L, M):
    """L written over M tau; generators 1', tau' pull back to d + c tau and b + a tau."""
    scale = lattice_scale(M, L.tau)
    return LineBundleAH(
        L.degree,
        mobius_apply(M, L.tau),
        (L.semicharacter(M.d, M.c), L.semicharacter(M.b, M.a)),
    ), scale


def transport(E, M):
    """Return (E', W): E' is E written over M tau and W: (z, xi) -> (lambda z, xi)."""
    M = M if isinstance(M, ModularMatrix) else ModularMatrix.from_rows(M)
    if isinstance(E, LineBundleAH):
        moved, scale = transport_line(E, M)
    elif isinstance(E, (TypeI, TypeII)):
        first, scale = transport_line(E.first, M)
        second, _ = transport_line(E.second, M)
        moved = type(E)(first, second)
    elif isinstance(E, TypeIII):
        scale = lattice_scale(M, E.tau)
        theta1, theta2 = E.theta
        moved = TypeIII(
            (M.d * theta1 + M.c * theta2, M.b * theta1 + M.a * theta2),
            M.d * E.b1 + M.c * E.b2,
            M.b * E.b1 + M.a * E.b2,
            mobius_apply(M, E.tau),
        )
    else:
        raise BundleError(f'Cannot transport {type(E).__name__}')

    rank = fiber_rank(E)
    witness = IsoWitness(
        scale, 0.0, constant_matrix(np.eye(rank)), zero_matrix(rank), rank,
        source=E, target=moved, matrix=M, form='(lambda z, xi)',
    )
    logger.debug(f'Transported {type(E).__name__} by {M.as_rows()}')
    return moved, witness


def same_tau(E, F):
    return same_modulus(E.tau, F.tau)
