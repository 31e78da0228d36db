"""
Exact angles theta in [0, 1).

A rational angle is a Fraction. An irrational angle is only known through a
float approximation, so it is kept as a formal generator: integer combinations
of angles are stored as ``offset + sum(multiplicity * generator)`` and are
rational only when every generator cancels. Distinct generators are treated
as independent over Q.
"""
import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from common.exceptions import BundleError


def _normalize_terms(terms):
    merged = {}
    for generator, multiplicity in terms:
        merged[generator] = merged.get(generator, 0) + multiplicity
    return tuple(sorted((g, m) for g, m in merged.items() if m != 0))


@dataclass(frozen=True)
class AngleParam:
    offset: Fraction = Fraction(0)
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'offset', Fraction(self.offset) % 1)
        object.__setattr__(self, 'terms', _normalize_terms(self.terms))

    @classmethod
    def rational(cls, numerator, denominator=1):
        if denominator <= 0:
            raise BundleError(f'Angle denominator must be positive, got {denominator}')
        return cls(Fraction(numerator, denominator))

    @classmethod
    def irrational(cls, approx):
        approx = float(approx)
        if not math.isfinite(approx):
            raise BundleError(f'Irrational angle must be finite, got {approx!r}')
        approx %= 1.0
        return cls(Fraction(0), ((approx, 1),))

    @classmethod
    def zero(cls):
        return cls()

    @property
    def is_rational(self):
        return not self.terms

    @property
    def kind(self):
        return 'rat' if self.is_rational else 'irr'

    @property
    def numerator(self):
        self._require_rational()
        return self.offset.numerator

    @property
    def denominator(self):
        self._require_rational()
        return self.offset.denominator

    @property
    def value(self):
        """Float representative in [0, 1)."""
        total = float(self.offset) + sum(g * m for g, m in self.terms)
        return total % 1.0

    def phase(self):
        """exp(2 pi i theta)"""
        return cmath.exp(2j * cmath.pi * self.value)

    def is_zero(self):
        return self.is_rational and self.offset == 0

    def congruent(self, other):
        return (self - as_angle(other)).is_zero()

    def _require_rational(self):
        if not self.is_rational:
            raise BundleError('Angle is irrational')

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return AngleParam(self.offset + other, self.terms)
        if not isinstance(other, AngleParam):
            return NotImplemented
        return AngleParam(self.offset + other.offset, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return AngleParam(-self.offset, tuple((g, -m) for g, m in self.terms))

    def __sub__(self, other):
        return self + (-as_angle(other))

    def __mul__(self, factor):
        if not isinstance(factor, int):
            return NotImplemented
        return AngleParam(self.offset * factor, tuple((g, m * factor) for g, m in self.terms))

    __rmul__ = __mul__

    def to_json(self):
        if self.is_rational:
            return ['rat', self.offset.numerator, self.offset.denominator]
        return ['irr', self.value]

    def __str__(self):
        if self.is_rational:
            return str(self.offset)
        return f'irr({self.value:.6g})'


def as_angle(value):
    if isinstance(value, AngleParam):
        return value
    if isinstance(value, (int, Fraction)):
        return AngleParam(Fraction(value))
    raise BundleError(f'Cannot use {value!r} as an exact angle')


def combine(coefficients, angles):
    """Integer combination sum(c * theta)."""
    total = AngleParam.zero()
    for coefficient, angle in zip(coefficients, angles):
        total = total + int(coefficient) * angle
    return total


def common_order(angles):
    """Smallest k > 0 with k * theta in Z for every angle, None if one is irrational."""
    order = 1
    for angle in angles:
        if not angle.is_rational:
            return None
        order = math.lcm(order, angle.denominator)
    return order


def all_rational(angles):
    return all(angle.is_rational for angle in angles)
