"""
Appell-Humbert line bundles L(H, alpha) over C / Z{1, tau}.

H is the Hermitian form H(z, w) = (degree / Im tau) z conj(w); alpha is the
semicharacter with alpha(1) = exp(2 pi i theta1), alpha(tau) = exp(2 pi i theta2),
extended to the lattice by alpha(m + n tau) = (-1)^(m n degree) alpha(1)^m alpha(tau)^n.
The deck transformation of gamma acts on C^2 by
(z, xi) -> (z + gamma, alpha(gamma) exp(pi H z conj(gamma) + pi/2 H |gamma|^2) xi).
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from common.exceptions import BundleError
from modular_lattice.lattice import Tau, as_tau, same_modulus

from .angles import AngleParam, as_angle

DEGREE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LineBundleAH:
    degree: int
    tau: Tau
    theta: tuple = (AngleParam(), AngleParam())

    def __post_init__(self):
        if int(self.degree) != self.degree:
            raise BundleError(f'Degree must be an integer, got {self.degree!r}')
        object.__setattr__(self, 'degree', int(self.degree))
        object.__setattr__(self, 'tau', as_tau(self.tau))
        if len(self.theta) != 2:
            raise BundleError(f'A line bundle needs two angles, got {len(self.theta)}')
        object.__setattr__(self, 'theta', tuple(as_angle(angle) for angle in self.theta))

    @classmethod
    def trivial(cls, tau):
        return cls(0, tau)

    @property
    def hermitian_form(self):
        """H as a real number: H(z, w) = H z conj(w)."""
        return self.degree / self.tau.imag

    def semicharacter(self, m, n):
        """Angle of alpha(m + n tau)."""
        theta1, theta2 = self.theta
        sign = Fraction((m * n * self.degree) % 2, 2)
        return int(m) * theta1 + int(n) * theta2 + sign

    def lattice_point(self, m, n):
        return m + n * self.tau.value

    def factor(self, m, n, z):
        """Automorphy factor of gamma = m + n tau at z (vectorized over z)."""
        gamma = self.lattice_point(m, n)
        H = self.hermitian_form
        z = np.asarray(z, dtype=complex)
        exponent = np.pi * H * z * np.conj(gamma) + 0.5 * np.pi * H * abs(gamma) ** 2
        return self.semicharacter(m, n).phase() * np.exp(exponent)

    def factor_derivative(self, m, n, z):
        gamma = self.lattice_point(m, n)
        return np.pi * self.hermitian_form * np.conj(gamma) * self.factor(m, n, z)

    def __str__(self):
        return f'L(deg={self.degree}, theta=({self.theta[0]}, {self.theta[1]}), tau={self.tau})'


def require_same_tau(first, second):
    if not same_modulus(first.tau, second.tau):
        raise BundleError(f'Bundles live over different moduli {first.tau} and {second.tau}')


def ah_degree(L):
    """Stored degree, checked against H Im tau."""
    if abs(L.hermitian_form * L.tau.imag - L.degree) > DEGREE_TOLERANCE * max(1, abs(L.degree)):
        raise BundleError(f'Hermitian form of {L} is inconsistent with its degree')
    return L.degree


def ah_tensor(first, second):
    """H adds, alpha multiplies."""
    require_same_tau(first, second)
    return LineBundleAH(
        first.degree + second.degree,
        first.tau,
        (first.theta[0] + second.theta[0], first.theta[1] + second.theta[1]),
    )


def ah_dual(L):
    return LineBundleAH(-L.degree, L.tau, (-L.theta[0], -L.theta[1]))


def ah_power(L, exponent):
    """L tensored with itself ``exponent`` times (negative means the dual)."""
    base = L if exponent >= 0 else ah_dual(L)
    return LineBundleAH(
        base.degree * abs(exponent),
        L.tau,
        (abs(exponent) * base.theta[0], abs(exponent) * base.theta[1]),
    )


def is_trivial(L):
    return L.degree == 0 and L.theta[0].is_zero() and L.theta[1].is_zero()


def h0_line(L):
    """Dimension of the space of holomorphic sections."""
    if L.degree < 0:
        return 0
    if L.degree > 0:
        return L.degree
    return 1 if is_trivial(L) else 0
