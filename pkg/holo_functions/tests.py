from fractions import Fraction
from itertools import product

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from bundle_algebra.angles import AngleParam
from bundle_algebra.bundles import TypeI, TypeII, TypeIII, classify
from bundle_algebra.line_bundles import LineBundleAH, ah_dual

from .basis import basis_for, basis_typeI, basis_typeII, basis_typeIII, has_nonconstant
from .fuchsian import basis_fuchsian, fuchsian_group, fuchsian_representation
from .oracles import (
    brute_force_dimension, brute_force_fuchsian_dimension, brute_force_representation_dimension,
    bundle_invariance_defect, fuchsian_invariance_defect, invariance_defect, representation_maps,
)
from .polynomials import evaluate, format_polynomial, sheared_power

TAU = 0.2 + 1.3j


def rat(p, q=1):
    return AngleParam.rational(p, q)


def small_angles():
    """Angles with denominators up to 4."""
    values = sorted({Fraction(p, q) for q in range(1, 5) for p in range(q)})
    return [AngleParam(value) for value in values]


class PolynomialTest(SimpleTestCase):
    """Test polynomial helpers"""

    def test_sheared_power_expansion(self):
        """Test (z1 - b z z2)^2 expands binomially"""
        poly = sheared_power(2.0, 2, 0)
        self.assertEqual(poly, {(0, 2, 0): 1, (1, 1, 1): -4, (2, 0, 2): 4})

    def test_format(self):
        """Test readable forms"""
        self.assertEqual(format_polynomial({(0, 0, 0): 1}), '1')
        self.assertEqual(format_polynomial({(0, 2, 0): 1, (0, 0, 2): -1}), 'z1^2-z2^2')
        self.assertEqual(format_polynomial(sheared_power(1.0, 1, 0)), 'z1-z*z2')

    def test_evaluate(self):
        """Test evaluation at a point"""
        value = evaluate({(1, 1, 1): 2.0}, np.array([[2.0, 3.0, 1j]]))
        self.assertAlmostEqual(complex(value[0]), 12j)


class BasisTypeITest(SimpleTestCase):
    """Test basis_typeI"""

    def test_trivial_lines(self):
        """Test the trivial bundle has every monomial"""
        trivial = LineBundleAH.trivial(TAU)
        report = basis_typeI(trivial, trivial, 2)
        self.assertEqual(len(report.monomials), 6)
        self.assertEqual(report.total_dim, 6)

    def test_irrational_first_line(self):
        """Test an irrational first character kills every xi1 power"""
        first = LineBundleAH(0, TAU, (AngleParam.irrational(2 ** 0.5 - 1), rat(0)))
        report = basis_typeI(first, LineBundleAH.trivial(TAU), 5)
        self.assertEqual(set(report.dims()), {(0, q) for q in range(6)})
        self.assertEqual(report.total_dim, 6)

    def test_two_torsion(self):
        """Test (1/2, 0) twice keeps even total degree"""
        line = LineBundleAH(0, TAU, (rat(1, 2), rat(0)))
        report = basis_typeI(line, line, 2)
        self.assertEqual(set(report.dims()), {(0, 0), (1, 1), (2, 0), (0, 2)})
        self.assertEqual(report.total_dim, 4)

    def test_brute_force_agrees(self):
        """Test the closed form against the null-space solve"""
        for first, second in [((rat(1, 2), rat(0)), (rat(0), rat(1, 3))), ((rat(1, 4), rat(0)), (rat(3, 4), rat(0)))]:
            E = TypeI(LineBundleAH(0, TAU, first), LineBundleAH(0, TAU, second))
            for d in range(4):
                self.assertEqual(brute_force_dimension(E, d), basis_for(E, d).total_dim)


class BasisTypeIITest(SimpleTestCase):
    """Test basis_typeII"""

    def setUp(self):
        self.first = LineBundleAH(1, TAU, (rat(1, 3), rat(0)))

    def test_dual_pair(self):
        """Test h=1 with L2 = L1^-1"""
        report = basis_typeII(self.first, ah_dual(self.first), 2)
        self.assertEqual(report.dims(), {(0, 0): 1, (0, 1): 1, (1, 1): 1, (0, 2): 2})
        self.assertEqual(report.total_dim, 5)

    def test_not_dual(self):
        """Test diagonal terms vanish when L2 is not the dual"""
        second = LineBundleAH(-1, TAU, (rat(0), rat(1, 2)))
        report = basis_typeII(self.first, second, 0)
        self.assertEqual(report.monomials, [])
        self.assertEqual(report.total_dim, 0)

    def test_degree_two_section(self):
        """Test (0, 1) has dimension (q - p) h"""
        first = LineBundleAH(2, TAU)
        report = basis_typeII(first, LineBundleAH(-2, TAU), 1)
        self.assertEqual(report.dims()[(0, 1)], 2)


class BasisTypeIIITest(SimpleTestCase):
    """Test basis_typeIII"""

    def test_dps_bundle(self):
        """Test theta = 0 and b2 != b1 tau gives powers of z2"""
        report = basis_typeIII(rat(0), rat(0), 0, 1, 1j, 3)
        self.assertEqual(report.forms(), ['1', 'z2', 'z2^2', 'z2^3'])

    def test_order_six(self):
        """Test theta = (1/2, 1/3) keeps multiples of 6"""
        report = basis_typeIII(rat(1, 2), rat(1, 3), 0, 1, 1j, 6)
        self.assertEqual(report.forms(), ['1', 'z2^6'])

    def test_split_representation(self):
        """Test b2 = b1 tau gives the sheared monomials"""
        report = basis_typeIII(rat(0), rat(0), 1, 1j, 1j, 1)
        self.assertEqual(report.forms(), ['1', 'z1-z*z2', 'z2'])
        self.assertEqual(report.total_dim, 3)

    def test_irrational_constants(self):
        """Test an irrational angle leaves only constants"""
        report = basis_typeIII(AngleParam.irrational(0.3), rat(0), 0, 1, 1j, 5)
        self.assertEqual(report.forms(), ['1'])

    def test_dimension_formulas(self):
        """Test d+1, floor(d/m)+1 and the split sum for d <= 20"""
        for d in range(21):
            self.assertEqual(basis_typeIII(rat(0), rat(0), 0, 1, 1j, d).total_dim, d + 1)
            m = 6
            self.assertEqual(basis_typeIII(rat(1, 2), rat(2, 3), 0, 1, 1j, d).total_dim, d // m + 1)
            split = basis_typeIII(rat(1, 2), rat(2, 3), 1, TAU, TAU, d).total_dim
            self.assertEqual(split, sum(m * j + 1 for j in range(d // m + 1)))

    def test_monotone(self):
        """Test total_dim is nondecreasing in d"""
        previous = 0
        for d in range(12):
            current = basis_typeIII(rat(1, 4), rat(1, 2), 0.5, 2 - 1j, TAU, d).total_dim
            self.assertGreaterEqual(current, previous)
            previous = current

    def test_invariance_oracle(self):
        """Test every basis element satisfies the functional equation"""
        for theta, (b1, b2) in product([(rat(0), rat(0)), (rat(1, 2), rat(1, 3))], [(0.7, 2 + 1j), (1, TAU)]):
            report = basis_typeIII(theta[0], theta[1], b1, b2, TAU, 6)
            maps = representation_maps(theta[0], theta[1], b1, b2, TAU)
            rng = np.random.default_rng(3)
            points = np.column_stack([
                rng.random(100) + TAU * rng.random(100),
                rng.normal(size=100) + 1j * rng.normal(size=100),
                rng.normal(size=100) + 1j * rng.normal(size=100),
            ])
            for element in report.monomials:
                self.assertLess(invariance_defect(element.coefficients, maps, points), 1e-10)

    def test_bundle_invariance_oracle(self):
        """Test invariance through the bundle deck actions"""
        E = TypeIII((rat(1, 2), rat(0)), 0.5, 3 - 1j, TAU)
        for element in basis_for(E, 4).monomials:
            self.assertLess(bundle_invariance_defect(element, E), 1e-10)

    def test_brute_force_small_instances(self):
        """Test the closed form against brute force for denominators <= 4 and d <= 4"""
        angles = small_angles()
        for theta1, theta2 in product(angles, angles):
            for d in (2, 4):
                for b1, b2 in ((0.0, 1.5 - 0.5j), (1.0, TAU)):
                    expected = basis_typeIII(theta1, theta2, b1, b2, TAU, d).total_dim
                    found = brute_force_representation_dimension(theta1, theta2, b1, b2, TAU, d)
                    self.assertEqual(found, expected, msg=f'theta=({theta1}, {theta2}) b=({b1}, {b2}) d={d}')

    def test_brute_force_on_bundle(self):
        """Test the bundle-level solve on a normalized Type III"""
        E = classify(rat(1, 3), rat(0), 2, 5, 1j)
        self.assertEqual(brute_force_dimension(E, 3), basis_for(E, 3).total_dim)


class FuchsianTest(SimpleTestCase):
    """Test the degree -1 Fuchsian total space"""

    def test_group_relation(self):
        """Test sigma0 inverts the commutator and squares to -E"""
        group = fuchsian_group()
        self.assertTrue(np.allclose(group.sigma0 @ group.sigma0, -np.eye(2), atol=1e-12))
        self.assertTrue(np.allclose(group.commutator() @ group.sigma0, np.eye(2), atol=1e-12))
        for sigma in group.generators():
            self.assertAlmostEqual(np.linalg.det(sigma), 1.0, places=12)

    def test_representation_relation(self):
        """Test rho of the commutator is -E"""
        rho1, rho2, rho0 = fuchsian_representation(rat(1, 3), rat(1, 4))
        commutator = rho1 @ rho2 @ np.linalg.inv(rho1) @ np.linalg.inv(rho2)
        self.assertTrue(np.allclose(commutator, rho0))

    def test_trivial_angles(self):
        """Test theta = 0, d = 4"""
        report = basis_fuchsian(rat(0), rat(0), 4)
        self.assertEqual(set(report.forms()), {'1', 'z1^2+z2^2', 'z1^4+z2^4', 'z1^2*z2^2'})
        self.assertEqual(report.total_dim, 4)

    def test_degree_zero(self):
        """Test d = 0 gives the constants"""
        self.assertEqual(basis_fuchsian(rat(0), rat(1, 2), 0).forms(), ['1'])

    def test_phase_sign(self):
        """Test theta1 = 1/4 gives the antisymmetric pair"""
        self.assertIn('z1^2-z2^2', basis_fuchsian(rat(1, 4), rat(0), 2).forms())

    def test_irrational(self):
        """Test irrational angles leave constants"""
        self.assertEqual(basis_fuchsian(AngleParam.irrational(0.1), rat(0), 6).forms(), ['1'])

    def test_invariance_and_brute_force(self):
        """Test each element is invariant and the count matches the null-space solve"""
        angles = small_angles()
        for theta1, theta2 in product(angles, angles):
            report = basis_fuchsian(theta1, theta2, 4)
            for element in report.monomials:
                self.assertLess(fuchsian_invariance_defect(element, theta1, theta2), 1e-9)
            self.assertEqual(brute_force_fuchsian_dimension(theta1, theta2, 4), report.total_dim)


class HasNonconstantTest(SimpleTestCase):
    """Test has_nonconstant"""

    def test_type_iii(self):
        """Test irrational Type III has only constants and the DPS bundle does not"""
        self.assertFalse(has_nonconstant(TypeIII((AngleParam.irrational(0.3), rat(0)), 0, 1, 1j)))
        self.assertTrue(has_nonconstant(TypeIII((rat(0), rat(0)), 0, 1, 1j)))

    def test_type_ii(self):
        """Test Type II always has sections"""
        E = TypeII(LineBundleAH(1, TAU), LineBundleAH(-1, TAU, (rat(1, 2), rat(0))))
        self.assertTrue(has_nonconstant(E))

    def test_type_i_cases(self):
        """Test cancellation of irrational characters"""
        irrational = LineBundleAH(0, TAU, (AngleParam.irrational(0.3), rat(0)))
        self.assertTrue(has_nonconstant(TypeI(irrational, ah_dual(irrational))))
        self.assertFalse(has_nonconstant(TypeI(irrational, irrational)))
        self.assertTrue(has_nonconstant(TypeI(irrational, LineBundleAH.trivial(TAU))))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 11), st.integers(1, 12), st.integers(0, 11), st.integers(1, 12))
    def test_rational_type_i_always_has_functions(self, p1, q1, p2, q2):
        """Test rational Type I bundles have nonconstant functions"""
        first = LineBundleAH(0, TAU, (rat(p1, q1), rat(p2, q2)))
        self.assertTrue(has_nonconstant(TypeI(first, LineBundleAH.trivial(TAU))))
