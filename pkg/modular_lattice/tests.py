import cmath

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from common.exceptions import LatticeError
from common.sampling import make_rng

from .lattice import (
    HEXAGONAL_POINT, ModularMatrix, Multiplier, Tau, elliptic_iso, in_fundamental_domain,
    lattice_coordinates, lattice_scale, mobius_apply, multiplier_matrix, random_modular_matrix,
    random_tau, reduce_tau, torus_multipliers,
)


def close(first, second, tolerance=1e-12):
    first, second = complex(first), complex(second)
    return abs(first - second) <= tolerance * max(1.0, abs(first))


class TauTest(SimpleTestCase):
    """Test Tau and ModularMatrix value types"""

    def test_lower_half_plane_rejected(self):
        """Test Im tau <= 0 is rejected"""
        with self.assertRaises(LatticeError):
            Tau(1 - 1j)
        with self.assertRaises(LatticeError):
            Tau(2.0)

    def test_determinant_enforced(self):
        """Test matrices must lie in SL(2, Z)"""
        with self.assertRaises(LatticeError):
            ModularMatrix(2, 0, 0, 1)

    def test_inverse_and_composition(self):
        """Test composition with the inverse gives the identity"""
        M = ModularMatrix(2, 1, 1, 1)
        self.assertTrue((M @ M.inverse()).is_identity())
        self.assertTrue((M.inverse() @ M).is_identity())

    def test_multiplier_requires_unit_modulus(self):
        """Test multipliers off the unit circle are rejected"""
        with self.assertRaises(LatticeError):
            Multiplier(1.5)


class MobiusApplyTest(SimpleTestCase):
    """Test mobius_apply"""

    def test_identity(self):
        """Test the identity matrix fixes tau"""
        self.assertEqual(complex(mobius_apply(ModularMatrix.identity(), 2j)), 2j)

    def test_translation(self):
        """Test translation by -1"""
        self.assertTrue(close(mobius_apply(ModularMatrix(1, -1, 0, 1), 1 + 1j), 1j))

    def test_inversion_fixes_i(self):
        """Test -1/i = i"""
        self.assertTrue(close(mobius_apply(ModularMatrix(0, -1, 1, 0), 1j), 1j))

    def test_cocycle_and_imaginary_part(self):
        """Test M1 M2 acts as M1 after M2 and the Im(M tau) identity"""
        rng = make_rng(7)
        for _ in range(1000):
            tau = random_tau(rng, imag_range=(0.1, 10.0))
            M1 = random_modular_matrix(rng, steps=2)
            M2 = random_modular_matrix(rng, steps=2)
            composed = mobius_apply(M1 @ M2, tau)
            nested = mobius_apply(M1, mobius_apply(M2, tau))
            self.assertTrue(close(composed, nested, 1e-10))
            image = mobius_apply(M2, tau)
            expected = tau.imag / abs(M2.c * tau.value + M2.d) ** 2
            self.assertAlmostEqual(image.imag / expected, 1.0, places=10)

    def test_lattice_scale(self):
        """Test lambda * Z{1, tau} is the lattice of M tau"""
        tau = Tau(0.3 + 1.7j)
        M = ModularMatrix(2, 1, 1, 1)
        image = mobius_apply(M, tau)
        scale = lattice_scale(M, tau)
        self.assertEqual(lattice_coordinates(scale * 1, image), (M.a, -M.c))
        self.assertEqual(lattice_coordinates(scale * tau.value, image), (-M.b, M.d))


class FundamentalDomainTest(SimpleTestCase):
    """Test in_fundamental_domain and reduce_tau"""

    def test_membership_examples(self):
        """Test interior, excluded right corner and the arc point i"""
        self.assertTrue(in_fundamental_domain(2j))
        self.assertFalse(in_fundamental_domain(cmath.exp(1j * cmath.pi / 3)))
        self.assertTrue(in_fundamental_domain(1j))
        self.assertTrue(in_fundamental_domain(HEXAGONAL_POINT))
        self.assertTrue(in_fundamental_domain(-0.5 + 3j))
        self.assertFalse(in_fundamental_domain(0.5 + 3j))
        self.assertFalse(in_fundamental_domain(cmath.exp(1j * 1.2)))

    def test_rejects_lower_half_plane(self):
        """Test membership rejects Im tau <= 0"""
        with self.assertRaises(LatticeError):
            in_fundamental_domain(-1j)

    def test_reduce_examples(self):
        """Test reduction of i, 1+i and 0.5+2i"""
        reduced, M = reduce_tau(1j)
        self.assertTrue(close(reduced, 1j))
        self.assertTrue(M.is_identity())

        reduced, M = reduce_tau(1 + 1j)
        self.assertTrue(close(reduced, 1j))
        self.assertEqual(M, ModularMatrix.translation(-1))

        reduced, M = reduce_tau(0.5 + 2j)
        self.assertTrue(close(reduced, -0.5 + 2j))
        self.assertEqual(M, ModularMatrix.translation(-1))

    def test_right_arc_is_folded(self):
        """Test a point on the right arc reduces to its mirror"""
        point = cmath.exp(1j * 1.2)
        reduced, _ = reduce_tau(point)
        self.assertTrue(close(reduced, -point.conjugate(), 1e-12))

    def test_random_reduction(self):
        """Test 10,000 random moduli reduce into the domain, idempotently"""
        rng = make_rng(11)
        for _ in range(10_000):
            tau = random_tau(rng)
            reduced, M = reduce_tau(tau)
            self.assertTrue(in_fundamental_domain(reduced))
            self.assertTrue(close(mobius_apply(M, tau), reduced))
            again, identity = reduce_tau(reduced)
            self.assertTrue(identity.is_identity())
            self.assertEqual(again, reduced)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False),
        st.floats(min_value=1e-3, max_value=50, allow_nan=False, allow_infinity=False),
    )
    def test_reduction_property(self, real, imag):
        """Test reduction lands in the domain for arbitrary moduli"""
        reduced, M = reduce_tau(complex(real, imag))
        self.assertTrue(in_fundamental_domain(reduced))
        self.assertEqual(M.det, 1)


class EllipticIsoTest(SimpleTestCase):
    """Test elliptic_iso"""

    def test_same_point(self):
        """Test (i, i) gives the identity"""
        self.assertTrue(elliptic_iso(1j, 1j).is_identity())

    def test_translate(self):
        """Test (1+i, i) gives M with M i = 1+i"""
        M = elliptic_iso(1 + 1j, 1j)
        self.assertIsNotNone(M)
        self.assertTrue(close(mobius_apply(M, 1j), 1 + 1j))

    def test_distinct_moduli(self):
        """Test 2i and 3i are not isomorphic"""
        self.assertIsNone(elliptic_iso(2j, 3j))

    def test_random_orbit(self):
        """Test a random SL(2, Z) image is recognised"""
        rng = make_rng(5)
        for _ in range(100):
            tau = random_tau(rng, real_range=(-1, 1), imag_range=(0.5, 3))
            image = mobius_apply(random_modular_matrix(rng), tau)
            M = elliptic_iso(image, tau)
            self.assertIsNotNone(M)
            self.assertTrue(close(mobius_apply(M, tau), image, 1e-8))


class TorusMultipliersTest(SimpleTestCase):
    """Test torus_multipliers and lattice coordinates"""

    def test_generic(self):
        """Test a generic modulus has multipliers +-1"""
        self.assertEqual([m.value for m in torus_multipliers(2j)], [1, -1])

    def test_square(self):
        """Test tau = i adds +-i"""
        self.assertEqual({m.value for m in torus_multipliers(1j)}, {1, -1, 1j, -1j})

    def test_hexagonal(self):
        """Test tau = exp(2 pi i / 3) gives the sixth roots of unity"""
        values = [m.value for m in torus_multipliers(HEXAGONAL_POINT)]
        self.assertEqual(len(values), 6)
        for value in values:
            self.assertAlmostEqual(abs(value ** 6 - 1), 0.0, places=12)

    def test_multipliers_preserve_lattice(self):
        """Test A and A tau are integer combinations of 1 and tau"""
        for tau in (2j, 1j, HEXAGONAL_POINT, -0.5 + 1.3j):
            for multiplier in torus_multipliers(tau):
                (p, q), (r, s) = multiplier_matrix(multiplier.value, tau)
                self.assertEqual(p * s - q * r, 1)

    def test_unreduced_rejected(self):
        """Test multipliers require a reduced modulus"""
        with self.assertRaises(LatticeError):
            torus_multipliers(0.1j)

    def test_non_lattice_point(self):
        """Test coordinates of a non-lattice point fail"""
        with self.assertRaises(LatticeError):
            lattice_coordinates(0.5, 1j)
        self.assertEqual(lattice_coordinates(np.complex128(3 - 2j), 1j), (3, -2))
