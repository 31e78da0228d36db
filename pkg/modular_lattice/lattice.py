"""
Lattice Z{1, tau}, the modular action on the upper half plane and reduction
to the half-open fundamental domain.

The fundamental domain keeps its left boundary: the edge Re = -1/2 and the
arc |z| = 1 with -1/2 <= Re <= 0. Boundary comparisons use EPSILON.
"""
import cmath
import logging
import math
from dataclasses import dataclass

from common.exceptions import LatticeError

logger = logging.getLogger(__name__)

EPSILON = 1e-9
UNIT_TOLERANCE = 1e-12
REDUCTION_CAP = 10_000

SQUARE_POINT = 1j
HEXAGONAL_POINT = cmath.exp(2j * cmath.pi / 3)


@dataclass(frozen=True)
class Tau:
    """Modulus of an elliptic curve, Im(value) > 0."""

    value: complex

    def __post_init__(self):
        value = complex(self.value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise LatticeError(f'Modulus must be finite, got {value!r}')
        if value.imag <= 0.0:
            raise LatticeError(f'Modulus must lie in the upper half plane, got {value!r}')
        object.__setattr__(self, 'value', value)

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __complex__(self):
        return self.value

    def __str__(self):
        return f'{self.value.real:g}{self.value.imag:+g}i'


def as_tau(value):
    """Accept a Tau or anything complex() understands."""
    if isinstance(value, Tau):
        return value
    return Tau(complex(value))


@dataclass(frozen=True)
class ModularMatrix:
    """Integer matrix [[a, b], [c, d]] with determinant 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ('a', 'b', 'c', 'd'):
            entry = getattr(self, name)
            if int(entry) != entry:
                raise LatticeError(f'Entry {name}={entry!r} is not an integer')
            object.__setattr__(self, name, int(entry))
        if self.det != 1:
            raise LatticeError(f'Determinant must be 1, got {self.det}')

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, n):
        """tau -> tau + n"""
        return cls(1, n, 0, 1)

    @classmethod
    def inversion(cls):
        """tau -> -1/tau"""
        return cls(0, -1, 1, 0)

    @classmethod
    def from_rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other):
        return ModularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def is_identity(self):
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def as_rows(self):
        return [[self.a, self.b], [self.c, self.d]]


@dataclass(frozen=True)
class Multiplier:
    """Unit complex number A with A * Gamma = Gamma."""

    value: complex

    def __post_init__(self):
        value = complex(self.value)
        if abs(abs(value) - 1.0) > UNIT_TOLERANCE:
            raise LatticeError(f'Multiplier must have unit modulus, got |{value}| = {abs(value)}')
        object.__setattr__(self, 'value', value)

    def __complex__(self):
        return self.value


def mobius_apply(M, tau):
    """(a tau + b) / (c tau + d)"""
    value = complex(as_tau(tau))
    return Tau((M.a * value + M.b) / (M.c * value + M.d))


def lattice_scale(M, tau):
    """lambda = 1 / (c tau + d); lambda * Z{1, tau} = Z{1, M tau}."""
    value = complex(as_tau(tau))
    return 1.0 / (M.c * value + M.d)


def in_fundamental_domain(tau):
    value = complex(as_tau(tau))
    x = value.real
    modulus = abs(value)

    if modulus > 1.0 + EPSILON and abs(x) < 0.5 - EPSILON:
        return True
    # left arc, corner included
    if abs(modulus - 1.0) <= EPSILON and -0.5 - EPSILON <= x <= EPSILON:
        return True
    # left edge
    if abs(x + 0.5) <= EPSILON and modulus >= 1.0 - EPSILON:
        return True
    return False


def reduce_tau(tau):
    """Return (tau_reduced, M) with mobius_apply(M, tau) = tau_reduced in the fundamental domain."""
    value = complex(as_tau(tau))
    M = ModularMatrix.identity()

    for _ in range(REDUCTION_CAP):
        shift = math.floor(value.real + 0.5 + EPSILON)
        if shift:
            value -= shift
            M = ModularMatrix.translation(-shift) @ M
        if abs(value) ** 2 < 1.0 - EPSILON:
            value = -1.0 / value
            M = ModularMatrix.inversion() @ M
            continue
        break
    else:
        logger.warning(f'Reduction of {tau} hit the cap of {REDUCTION_CAP} steps')
        raise LatticeError(f'Reduction of {tau} did not terminate in {REDUCTION_CAP} steps')

    # right half of the arc is folded onto the left half
    if abs(abs(value) - 1.0) <= EPSILON and value.real > EPSILON:
        M = ModularMatrix.inversion() @ M

    reduced = mobius_apply(M, tau)
    if not in_fundamental_domain(reduced):
        raise LatticeError(f'Reduction of {tau} ended outside the fundamental domain at {reduced}')
    return reduced, M


def same_modulus(tau1, tau2, tolerance=EPSILON):
    first = complex(as_tau(tau1))
    second = complex(as_tau(tau2))
    return abs(first - second) <= tolerance * max(1.0, abs(first))


def elliptic_iso(tau1, tau2):
    """Some M with mobius_apply(M, tau2) = tau1 when the curves are isomorphic, else None."""
    reduced1, M1 = reduce_tau(tau1)
    reduced2, M2 = reduce_tau(tau2)
    if not same_modulus(reduced1, reduced2):
        return None
    return M1.inverse() @ M2


def torus_multipliers(tau):
    """Units A with A * Gamma = Gamma for a reduced modulus."""
    tau = as_tau(tau)
    if not in_fundamental_domain(tau):
        raise LatticeError(f'Multipliers are listed for reduced moduli only, got {tau}')
    value = complex(tau)
    if abs(value - SQUARE_POINT) < EPSILON:
        values = [1, -1, 1j, -1j]
    elif abs(value - HEXAGONAL_POINT) < EPSILON:
        sixth = cmath.exp(1j * cmath.pi / 3)
        values = [1, -1, sixth, -sixth, sixth ** 2, -(sixth ** 2)]
    else:
        values = [1, -1]
    return [Multiplier(complex(v)) for v in values]


def lattice_coordinates(point, tau, tolerance=EPSILON):
    """Integers (m, n) with point = m + n * tau."""
    value = complex(as_tau(tau))
    point = complex(point)
    n_float = point.imag / value.imag
    m_float = point.real - n_float * value.real
    m, n = round(m_float), round(n_float)
    if abs(point - (m + n * value)) > tolerance * max(1.0, abs(point)):
        raise LatticeError(f'{point} is not a point of the lattice Z{{1, {value}}}')
    return m, n


def multiplier_matrix(A, tau):
    """((p, q), (r, s)) with A = p + q tau and A tau = r + s tau."""
    value = complex(as_tau(tau))
    A = complex(A)
    return lattice_coordinates(A, value), lattice_coordinates(A * value, value)


def random_tau(rng, real_range=(-10.0, 10.0), imag_range=(0.01, 10.0)):
    """Random modulus with uniform real and imaginary parts."""
    real = rng.uniform(*real_range)
    imag = rng.uniform(*imag_range)
    return Tau(complex(real, imag))


def random_modular_matrix(rng, steps=4, max_shift=3):
    """Random word in the translations and the inversion."""
    M = ModularMatrix.identity()
    for _ in range(steps):
        M = ModularMatrix.translation(int(rng.integers(-max_shift, max_shift + 1))) @ M
        if rng.random() < 0.5:
            M = ModularMatrix.inversion() @ M
    return M
