import logging

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from .exceptions import ConfigError, DifferentiationError, ProfileError
from .formatting import format_coefficient, format_complex, format_real, truncate_chars
from .numerics import (
    central_difference, complex_step, contour_derivative, laplacian, mixed_contour_derivative, richardson,
)
from .results import CheckResult, all_passed
from .sampling import make_rng, sample_ball, sample_parallelogram, sample_total_space


class NumericsTest(SimpleTestCase):
    """Test the differentiation helpers"""

    def test_richardson(self):
        """Test one level removes the h^2 term"""
        self.assertAlmostEqual(float(richardson(1.0 + 0.04, 1.0 + 0.01)), 1.0)

    def test_central_difference(self):
        """Test d/dx sin at 0.3"""
        self.assertAlmostEqual(float(central_difference(lambda h: np.sin(0.3 + h))), np.cos(0.3), places=10)

    def test_complex_step(self):
        """Test d/dx exp(x) / sqrt(x) at 1.5 to machine precision"""
        def f(x):
            return np.exp(x) / np.sqrt(x)

        expected = np.exp(1.5) / np.sqrt(1.5) * (1.0 - 0.5 / 1.5)
        self.assertAlmostEqual(float(complex_step(lambda h: f(1.5 + h))), expected, places=13)

    def test_complex_step_real_values(self):
        """Test a function dropping the imaginary part falls back to central differences"""
        value = complex_step(lambda h: np.real(np.asarray(0.3 + h)) ** 2)
        self.assertAlmostEqual(float(value), 0.6, places=9)

    def test_bad_steps(self):
        """Test underflowing steps"""
        with self.assertRaises(DifferentiationError):
            central_difference(np.sin, step=1e-15)
        with self.assertRaises(DifferentiationError):
            complex_step(np.sin, step=-1.0)

    def test_laplacian(self):
        """Test Laplacian(|xi|^4) = 16 |xi|^2"""
        xi = np.array([0.5 + 0.2j, -1.0 + 1.0j])
        self.assertTrue(np.allclose(laplacian(lambda p: np.abs(p) ** 4, xi), 16 * np.abs(xi) ** 2, rtol=1e-8))

    def test_contour_derivatives(self):
        """Test first and mixed derivatives of holomorphic functions"""
        self.assertAlmostEqual(complex(contour_derivative(lambda s: np.exp(2 * s))), 2.0, places=12)
        mixed = mixed_contour_derivative(lambda s, t: np.exp(s * t) * (1 + s))
        self.assertAlmostEqual(complex(mixed), 1.0, places=12)

    def test_non_finite(self):
        """Test non-finite derivative values are reported"""
        with self.assertRaises(DifferentiationError):
            central_difference(lambda h: np.inf * (1 + h))


class SamplingTest(SimpleTestCase):
    """Test seeded sampling"""

    def test_seeded(self):
        """Test the same seed reproduces the same points"""
        first = sample_total_space(make_rng(3), 10, 1j, 2)
        second = sample_total_space(make_rng(3), 10, 1j, 2)
        self.assertTrue(np.array_equal(first, second))

    def test_domains(self):
        """Test points land in the parallelogram and the ball"""
        rng = make_rng()
        tau = 0.3 + 1.2j
        base = sample_parallelogram(rng, 500, tau)
        t = base.imag / tau.imag
        s = base.real - t * tau.real
        self.assertTrue(np.all((s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)))
        ball = sample_ball(rng, 500, 2, 4.0)
        self.assertEqual(ball.shape, (500, 2))
        self.assertTrue(np.all(np.linalg.norm(ball, axis=1) <= 4.0 + 1e-12))

    def test_shape(self):
        """Test total space points are (count, 1 + fiber_dim)"""
        self.assertEqual(sample_total_space(make_rng(), 7, 1j, 1).shape, (7, 2))


class FormattingTest(SimpleTestCase):
    """Test report formatting"""

    def test_real(self):
        """Test integers lose the decimal point"""
        self.assertEqual(format_real(3.0), '3')
        self.assertEqual(format_real(-0.5), '-0.5')
        self.assertEqual(format_real(2 ** 0.5), '1.41421')

    def test_complex(self):
        """Test units and signs"""
        self.assertEqual(format_complex(1j), 'i')
        self.assertEqual(format_complex(-3j), '-3i')
        self.assertEqual(format_complex(5 - 2j), '5-2i')

    def test_coefficient(self):
        """Test coefficients in front of monomials"""
        self.assertEqual(format_coefficient(1), '')
        self.assertEqual(format_coefficient(-1), '-')
        self.assertEqual(format_coefficient(5 - 2j), '(5-2i)')

    def test_truncate(self):
        """Test long forms are cut with an ellipsis"""
        self.assertEqual(truncate_chars('z1-b1*z*z2', 4), 'z1-b...')
        self.assertEqual(truncate_chars('z2', 4), 'z2')
        self.assertEqual(truncate_chars(None, 4), '')


class ResultsTest(SimpleTestCase):
    """Test CheckResult"""

    def test_from_defects(self):
        """Test the worst defect decides"""
        result = CheckResult.from_defects('det', [1e-12, 3e-11], 1e-10)
        self.assertTrue(result.passed)
        self.assertEqual(result.points, 2)
        self.assertEqual(result.max_defect, 3e-11)

    def test_non_finite(self):
        """Test a nan defect fails"""
        self.assertFalse(CheckResult.from_defects('ricci', [0.0, np.nan], 1.0).passed)

    def test_report_keys(self):
        """Test the report row uses 'pass'"""
        row = CheckResult('gauduchon', 1, 0.0, 1e-6, True).to_dict()
        self.assertEqual(list(row), ['check', 'points', 'max_defect', 'tolerance', 'pass'])
        self.assertTrue(all_passed([CheckResult('a', 1, 0.0, 0.0, True)]))


class ExceptionsTest(SimpleTestCase):
    """Test exception payloads"""

    def test_profile_error(self):
        """Test the offending t is kept"""
        self.assertEqual(ProfileError('w <= 0', 4.5).t, 4.5)

    def test_config_error(self):
        """Test the location prefixes the message"""
        error = ConfigError('denominator must be positive', 'theta[1][2]')
        self.assertEqual(str(error), 'theta[1][2]: denominator must be positive')
        self.assertEqual(error.location, 'theta[1][2]')


class LoggingConfigTest(SimpleTestCase):
    """Test the per-app loggers"""

    def test_app_loggers(self):
        """Test every app logs to the console at BUNDLELAB_LOG_LEVEL"""
        level = logging.getLevelName(settings.BUNDLELAB_LOG_LEVEL)
        for app in settings.BUNDLELAB_APPS:
            self.assertIn(app, settings.INSTALLED_APPS)
            logger = logging.getLogger(app)
            self.assertEqual(logger.level, level)
            self.assertFalse(logger.propagate)
            self.assertTrue(logger.handlers)

    def test_module_loggers_inherit(self):
        """Test module loggers pick up their app's level"""
        level = logging.getLevelName(settings.BUNDLELAB_LOG_LEVEL)
        self.assertEqual(logging.getLogger('calabi_growth.distance').getEffectiveLevel(), level)
