"""
Fiber-linear holomorphic maps of C^(1+r):

    (z, xi) -> (a z + b, F(z) xi)

Deck transformations and bundle isomorphisms are both of this shape. All
methods are vectorized over leading axes of ``points``.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from modular_lattice.lattice import ModularMatrix, Multiplier


def constant_matrix(matrix):
    """z -> matrix, broadcast over the shape of z."""
    matrix = np.asarray(matrix, dtype=complex)

    def evaluate(z):
        z = np.asarray(z)
        return np.broadcast_to(matrix, z.shape + matrix.shape)

    return evaluate


def zero_matrix(rank):
    return constant_matrix(np.zeros((rank, rank), dtype=complex))


@dataclass(frozen=True, eq=False)
class FiberLinearMap:
    scale: complex
    shift: complex
    fiber: Callable
    fiber_derivative: Callable
    rank: int

    def split(self, points):
        points = np.asarray(points, dtype=complex)
        return points, points[..., 0], points[..., 1:]

    def apply(self, points):
        points, z, xi = self.split(points)
        image = np.einsum('...ij,...j->...i', self.fiber(z), xi)
        base = self.scale * z + self.shift
        return np.concatenate([base[..., None], image], axis=-1)

    def jacobian(self, points):
        """Holomorphic Jacobian J[i, a] = d(image_i) / d(point_a)."""
        points, z, xi = self.split(points)
        size = 1 + self.rank
        J = np.zeros(z.shape + (size, size), dtype=complex)
        J[..., 0, 0] = self.scale
        J[..., 1:, 0] = np.einsum('...ij,...j->...i', self.fiber_derivative(z), xi)
        J[..., 1:, 1:] = self.fiber(z)
        return J

    def _composed_parts(self, other):
        a1, b1, a2, b2 = self.scale, self.shift, other.scale, other.shift
        outer_fiber, outer_derivative = self.fiber, self.fiber_derivative
        inner_fiber, inner_derivative = other.fiber, other.fiber_derivative

        def fiber(z):
            z = np.asarray(z, dtype=complex)
            return np.matmul(outer_fiber(a2 * z + b2), inner_fiber(z))

        def fiber_derivative(z):
            z = np.asarray(z, dtype=complex)
            moved = a2 * z + b2
            return (
                a2 * np.matmul(outer_derivative(moved), inner_fiber(z))
                + np.matmul(outer_fiber(moved), inner_derivative(z))
            )

        return a1 * a2, a1 * b2 + b1, fiber, fiber_derivative

    def _inverse_parts(self):
        a, b = self.scale, self.shift
        forward, forward_derivative = self.fiber, self.fiber_derivative

        def fiber(z):
            z = np.asarray(z, dtype=complex)
            return np.linalg.inv(forward((z - b) / a))

        def fiber_derivative(z):
            z = np.asarray(z, dtype=complex)
            source = (z - b) / a
            inverse = np.linalg.inv(forward(source))
            return -np.matmul(np.matmul(inverse, forward_derivative(source)), inverse) / a

        return 1.0 / a, -b / a, fiber, fiber_derivative


@dataclass(frozen=True, eq=False)
class DeckAction(FiberLinearMap):
    """Deck transformation of the lattice element ``translation``."""

    label: str = ''

    @classmethod
    def build(cls, translation, fiber, fiber_derivative, rank, label=''):
        return cls(1.0, complex(translation), fiber, fiber_derivative, rank, label)

    @property
    def translation(self):
        return self.shift


@dataclass(frozen=True, eq=False)
class IsoWitness(FiberLinearMap):
    """A bundle map intertwining the deck actions of ``source`` and ``target``."""

    source: object = None
    target: object = None
    matrix: ModularMatrix = field(default_factory=ModularMatrix.identity)
    multiplier: Multiplier = field(default_factory=lambda: Multiplier(1.0))
    form: str = ''

    @property
    def translation(self):
        return self.shift

    def compose(self, other):
        """self after other."""
        scale, shift, fiber, fiber_derivative = self._composed_parts(other)
        return IsoWitness(
            scale, shift, fiber, fiber_derivative, self.rank,
            source=other.source,
            target=self.target,
            matrix=self.matrix @ other.matrix,
            multiplier=Multiplier(self.multiplier.value * other.multiplier.value),
            form=f'({self.form}) o ({other.form})',
        )

    def inverse(self):
        scale, shift, fiber, fiber_derivative = self._inverse_parts()
        return IsoWitness(
            scale, shift, fiber, fiber_derivative, self.rank,
            source=self.target,
            target=self.source,
            matrix=self.matrix.inverse(),
            multiplier=Multiplier(1.0 / self.multiplier.value),
            form=f'({self.form})^-1',
        )
