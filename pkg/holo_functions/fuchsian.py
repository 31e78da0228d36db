"""
Rank-2 degree -1 bundle over a compact hyperbolic quotient.

The group acts on H x C^2 by (w, xi) -> (sigma(g) w, rho(g) xi) with
sigma(g1) = diag((sqrt6 + sqrt2)/2, (sqrt6 - sqrt2)/2),
sigma(g2) = [[sqrt2, 1], [1, sqrt2]],
sigma(g0) = [sigma(g1), sigma(g2)]^-1, which squares to -E, and
rho(g1) = e1 [[0, 1], [1, 0]], rho(g2) = e2 diag(-1, 1), rho(g0) = -E.

An invariant polynomial sum c_{a,b} z1^a z2^b of degree k needs
c_{a,b} = e1^k c_{b,a} and e2^k (-1)^a = 1 on every nonzero coefficient.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from bundle_algebra.angles import all_rational, as_angle

from .basis import BasisReport, _check_degree, constants_only, polynomial_monomial
from .polynomials import add, monomial

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


@dataclass(frozen=True)
class FuchsianGroup:
    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma0: np.ndarray

    def commutator(self):
        inv1 = np.linalg.inv(self.sigma1)
        inv2 = np.linalg.inv(self.sigma2)
        return self.sigma1 @ self.sigma2 @ inv1 @ inv2

    def generators(self):
        return [self.sigma1, self.sigma2, self.sigma0]


def fuchsian_group():
    sigma1 = np.diag([(SQRT6 + SQRT2) / 2.0, (SQRT6 - SQRT2) / 2.0])
    sigma2 = np.array([[SQRT2, 1.0], [1.0, SQRT2]])
    sigma0 = np.array([[SQRT3, -(SQRT2 + SQRT6)], [SQRT6 - SQRT2, -SQRT3]])
    return FuchsianGroup(sigma1, sigma2, sigma0)


def fuchsian_representation(theta1, theta2):
    """rho(g1), rho(g2), rho(g0)."""
    e1 = as_angle(theta1).phase()
    e2 = as_angle(theta2).phase()
    rho1 = e1 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rho2 = e2 * np.diag([-1.0, 1.0]).astype(complex)
    rho0 = -np.eye(2, dtype=complex)
    return [rho1, rho2, rho0]


def mobius_action(matrix, w):
    a, b, c, d = matrix[0, 0], matrix[0, 1], matrix[1, 0], matrix[1, 1]
    return (a * w + b) / (c * w + d)


def _admissible(theta1, theta2, k, t):
    """Conditions on c_{k-t,t} and its partner c_{t,k-t}."""
    if not (2 * k * theta1).is_zero():
        return False
    if not (k * theta2 + Fraction(k - t, 2)).is_zero():
        return False
    if not (k * theta2 + Fraction(t, 2)).is_zero():
        return False
    if k - t == t:
        # a lone diagonal coefficient satisfies c = e1^k c
        return (k * theta1).is_zero()
    return True


def basis_fuchsian(theta1, theta2, d):
    d = _check_degree(d)
    theta1, theta2 = as_angle(theta1), as_angle(theta2)
    if not all_rational((theta1, theta2)):
        return constants_only(d)
    report = BasisReport(d)
    for k in range(d + 1):
        for t in range(k // 2 + 1):
            if not _admissible(theta1, theta2, k, t):
                continue
            a, b = k - t, t
            if a == b:
                poly = monomial(0, a, b)
                kind = 'diagonal'
            else:
                phase = (k * theta1).phase()
                poly = add(monomial(0, a, b), monomial(0, b, a), phase.real if abs(phase.imag) < 1e-12 else phase)
                kind = 'pair'
            report.monomials.append(polynomial_monomial(a, b, poly, kind))
    return report
