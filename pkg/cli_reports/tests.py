import json
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hypothesis_settings, strategies as st

from bundle_algebra.angles import AngleParam
from bundle_algebra.bundles import TypeI, TypeII, TypeIII
from bundle_algebra.line_bundles import LineBundleAH
from common.exceptions import ConfigError

from .forms import SPEC_TYPES
from .jobs import JobConfig, Report, json_safe, parse_params, run
from .serializers import ingest_spec, serialize_bundle, spec_to_bundle

SPECS = Path(settings.BASE_DIR) / 'specs'
DPS = str(SPECS / 'dps.json')
T1 = str(SPECS / 't1.json')
T2 = str(SPECS / 't2.json')
LINE = str(SPECS / 'line.json')


def bundlelab(*args):
    """Run the command; returns (stdout, exit code)."""
    out = StringIO()
    try:
        call_command('bundlelab', *args, stdout=out, stderr=StringIO())
    except CommandError as error:
        return out.getvalue(), error.returncode
    return out.getvalue(), 0


def angles():
    rational = st.builds(AngleParam.rational, st.integers(-12, 12), st.integers(1, 12))
    irrational = st.builds(AngleParam.irrational, st.floats(0.01, 0.99))
    return st.one_of(rational, irrational)


def complexes():
    return st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def moduli():
    return st.builds(complex, st.floats(-2, 2), st.floats(0.1, 3))


class IngestSpecTest(SimpleTestCase):
    """Test ingest_spec and the bundle spec form"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, data, name='spec.json'):
        path = Path(self.tmp.name) / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    def test_dps(self):
        """Test the DPS spec gives TypeIII(theta = (0, 0), b = (0, 1), tau = i)"""
        E = ingest_spec(DPS)
        self.assertIsInstance(E, TypeIII)
        self.assertEqual((E.b1, E.b2), (0, 1))
        self.assertEqual(E.tau.value, 1j)
        self.assertTrue(all(angle.is_zero() for angle in E.theta))

    def test_shipped_specs(self):
        """Test the example specs ingest to their types"""
        self.assertIsInstance(ingest_spec(T1), TypeI)
        self.assertIsInstance(ingest_spec(T2), TypeII)
        self.assertIsInstance(ingest_spec(LINE), LineBundleAH)

    def test_split_representation(self):
        """Test b2 = b1 tau gives Type I"""
        spec = {'tau': [0, 1], 'type': 'repr', 'theta': [['rat', 1, 2], ['rat', 0, 1]], 'b': [[1, 0], [0, 1]]}
        self.assertIsInstance(spec_to_bundle(spec), TypeI)

    def test_rational_tags_exact(self):
        """Test rational angles stay exact fractions"""
        E = ingest_spec(T1)
        self.assertEqual(E.first.theta[0], AngleParam.rational(1, 2))
        self.assertFalse(E.second.theta[0].is_rational)
        self.assertEqual(E.second.theta[1], AngleParam.rational(1, 3))

    def test_lower_half_plane(self):
        """Test Im tau <= 0 is rejected with its path"""
        path = self.write({'tau': [0, -1], 'type': 'sum', 'theta': [['rat', 0, 1]] * 2, 'degrees': [0]})
        with self.assertRaisesMessage(ConfigError, 'tau[1]'):
            ingest_spec(path)

    def test_field_path(self):
        """Test a zero denominator names theta[1][2]"""
        path = self.write({'tau': [0, 1], 'type': 'repr', 'theta': [['rat', 0, 1], ['rat', 1, 0]],
                           'b': [[0, 0], [1, 0]]})
        with self.assertRaisesMessage(ConfigError, 'theta[1][2]'):
            ingest_spec(path)

    def test_bad_angle_tag(self):
        """Test an unknown angle tag"""
        spec = {'tau': [0, 1], 'type': 'sum', 'theta': [['rat', 0, 1], ['deg', 3]], 'degrees': [0]}
        with self.assertRaisesMessage(ConfigError, 'theta[1]'):
            spec_to_bundle(spec)

    def test_unknown_keys(self):
        """Test keys outside the schema are rejected"""
        spec = {'tau': [0, 1], 'type': 'sum', 'theta': [['rat', 0, 1]] * 2, 'degrees': [0], 'rank': 1}
        with self.assertRaisesMessage(ConfigError, 'unknown keys rank'):
            spec_to_bundle(spec)

    def test_missing_field(self):
        """Test a missing tau"""
        with self.assertRaisesMessage(ConfigError, 'tau:'):
            spec_to_bundle({'type': 'sum', 'theta': [['rat', 0, 1]] * 2, 'degrees': [0]})

    def test_shape_mismatch(self):
        """Test two lines need four angles"""
        spec = {'tau': [0, 1], 'type': 'sum', 'theta': [['rat', 0, 1]] * 2, 'degrees': [0, 0]}
        with self.assertRaisesMessage(ConfigError, 'theta:'):
            spec_to_bundle(spec)

    def test_invalid_degrees(self):
        """Test degrees (1, 1) is neither Type I nor Type II"""
        spec = {'tau': [0, 1], 'type': 'sum', 'theta': [['rat', 0, 1]] * 4, 'degrees': [1, 1]}
        with self.assertRaises(ConfigError):
            spec_to_bundle(spec)

    def test_malformed_json(self):
        """Test a JSON syntax error reports file, line and column"""
        path = self.write('{"tau": [0, 1],\n "type": }')
        with self.assertRaisesMessage(ConfigError, f'{path}:2:10'):
            ingest_spec(path)

    def test_missing_file(self):
        """Test an unreadable path"""
        with self.assertRaises(ConfigError):
            ingest_spec(str(Path(self.tmp.name) / 'absent.json'))

    def test_schema_document(self):
        """Test the published schema lists the accepted keys and types"""
        schema = json.loads((Path(settings.BASE_DIR) / 'docs' / 'bundle_spec.schema.json').read_text())
        self.assertEqual(schema['properties']['type']['enum'], [value for value, _ in SPEC_TYPES])
        self.assertEqual(set(schema['properties']), {'tau', 'type', 'theta', 'b', 'degrees'})


class SerializeTest(SimpleTestCase):
    """Test serialize_bundle against spec_to_bundle"""

    def test_shipped_specs(self):
        """Test the example specs serialize back to the same objects"""
        for path in (DPS, T1, T2, LINE):
            E = ingest_spec(path)
            self.assertEqual(spec_to_bundle(serialize_bundle(E)), E)

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(angles(), angles(), complexes(), complexes(), moduli())
    def test_representation(self, theta1, theta2, b1, b2, tau):
        """Test representation bundles"""
        spec = {
            'tau': [tau.real, tau.imag], 'type': 'repr',
            'theta': [theta1.to_json(), theta2.to_json()], 'b': [[b1.real, b1.imag], [b2.real, b2.imag]],
        }
        E = spec_to_bundle(spec)
        self.assertEqual(spec_to_bundle(serialize_bundle(E)), E)

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(st.lists(angles(), min_size=4, max_size=4), st.integers(0, 4), moduli())
    def test_sums(self, theta, h, tau):
        """Test Type I and Type II sums"""
        first = LineBundleAH(h, tau, tuple(theta[:2]))
        second = LineBundleAH(-h, tau, tuple(theta[2:]))
        E = TypeI(first, second) if h == 0 else TypeII(first, second)
        self.assertEqual(spec_to_bundle(serialize_bundle(E)), E)


class JobConfigTest(SimpleTestCase):
    """Test JobConfig"""

    def test_defaults(self):
        """Test settings fill the unset fields"""
        with mock.patch.dict(os.environ, {}, clear=False):
            os.environ.pop('BUNDLELAB_SEED', None)
            config = JobConfig('calabi')
        self.assertEqual(config.seed, settings.BUNDLELAB_SEED)
        self.assertEqual(config.samples, settings.BUNDLELAB_SAMPLES)
        self.assertEqual(config.tolerance, settings.BUNDLELAB_TOLERANCE)
        self.assertEqual(config.witness_samples, settings.BUNDLELAB_WITNESS_SAMPLES)

    def test_seed_fallback(self):
        """Test BUNDLELAB_SEED is read when no seed is given"""
        with mock.patch.dict(os.environ, {'BUNDLELAB_SEED': '0x2a'}):
            self.assertEqual(JobConfig('calabi').seed, 42)
            self.assertEqual(JobConfig('calabi', seed=7).seed, 7)

    def test_bad_seed_env(self):
        """Test a non-integer BUNDLELAB_SEED"""
        with mock.patch.dict(os.environ, {'BUNDLELAB_SEED': 'seven'}):
            with self.assertRaisesMessage(ConfigError, 'BUNDLELAB_SEED'):
                JobConfig('calabi')

    def test_unknown_keys(self):
        """Test option mappings with unknown keys"""
        with self.assertRaisesMessage(ConfigError, 'unknown keys colour'):
            JobConfig.from_options('calabi', {'colour': 'red', 'seed': 1})

    def test_invalid_values(self):
        """Test command, format and tolerance validation"""
        with self.assertRaises(ConfigError):
            JobConfig('plot')
        with self.assertRaises(ConfigError):
            JobConfig('calabi', format='xml')
        with self.assertRaises(ConfigError):
            JobConfig('calabi', tolerance=0.0)

    def test_witness_samples(self):
        """Test witness checks use BUNDLELAB_WITNESS_SAMPLES, not BUNDLELAB_SAMPLES"""
        def witness_points():
            report, code = run(JobConfig('iso', specs=(DPS, DPS), samples=30))
            self.assertEqual(code, 0)
            return [result.points for result in report.results if result.check == 'witness']

        with override_settings(BUNDLELAB_WITNESS_SAMPLES=12):
            self.assertEqual(witness_points(), [12])
        with override_settings(BUNDLELAB_WITNESS_SAMPLES=40):
            self.assertEqual(witness_points(), [40])
        with self.assertRaises(ConfigError):
            JobConfig('iso', witness_samples=0)

    def test_params(self):
        """Test KEY=VALUE parsing"""
        self.assertEqual(parse_params(['A=2', 'C=3.5']), {'A': 2.0, 'C': 3.5})
        with self.assertRaises(ConfigError):
            parse_params(['A'])

    @hypothesis_settings(max_examples=60, deadline=None)
    @given(
        st.floats(-3, 3), st.floats(-2, 2).filter(lambda im: im <= 0 or im >= 0.05),
        st.one_of(st.none(), st.floats(-1e-3, 1e-3, allow_nan=False)),
        st.one_of(st.none(), st.integers(-2, 50)),
    )
    def test_exit_code_contract(self, re, im, tolerance, samples):
        """Test fuzzed reduce-tau configs exit 0 or fail with a config error"""
        invalid = im <= 0 or (tolerance is not None and tolerance <= 0) or (samples is not None and samples < 1)
        try:
            report, code = run(JobConfig('reduce-tau', tau=complex(re, im), tolerance=tolerance, samples=samples))
        except ConfigError:
            self.assertTrue(invalid)
            return
        self.assertFalse(invalid)
        self.assertEqual(code, 0)
        self.assertTrue(report.passed)


class ReportTest(SimpleTestCase):
    """Test Report rendering"""

    def test_json_safe(self):
        """Test non-finite floats become null"""
        self.assertEqual(json_safe({'t': float('inf'), 'z': 1j, 'ok': True}), {'t': None, 'z': [0.0, 1.0], 'ok': True})

    def test_timing(self):
        """Test wall time is written only on request"""
        report = Report({'command': 'calabi'}, wall_time=0.5)
        self.assertNotIn('wall_time', json.loads(report.to_json()))
        self.assertEqual(json.loads(report.to_json(timing=True))['wall_time'], 0.5)


class BundlelabCommandTest(SimpleTestCase):
    """Test the bundlelab management command"""

    def test_reduce_tau(self):
        """Test tau = 1 + i reduces to i by [[1, -1], [0, 1]]"""
        out, code = bundlelab('reduce-tau', '--tau', '1,1')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(report['tau_reduced'], [0.0, 1.0])
        self.assertEqual(report['matrix'], [[1, -1], [0, 1]])
        self.assertTrue(report['pass'])

    def test_bad_tau(self):
        """Test unparseable and lower half plane moduli exit 2"""
        self.assertEqual(bundlelab('reduce-tau', '--tau', '1')[1], 2)
        self.assertEqual(bundlelab('reduce-tau', '--tau=1,-1')[1], 2)

    def test_holo_basis(self):
        """Test the DPS basis of fiber degree <= 3"""
        out, code = bundlelab('holo-basis', '--spec', DPS, '--degree', '3')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual([row['form'] for row in report['basis']], ['1', 'z2', 'z2^2', 'z2^3'])
        self.assertEqual(report['dim'], 4)

    def test_holo_basis_csv(self):
        """Test basis rows p, q, dim, form"""
        out, code = bundlelab('holo-basis', '--spec', DPS, '--degree', '1', '--format', 'csv')
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines(), ['p,q,dim,form', '0,0,1,1', '0,1,1,z2'])

    def test_metric_check(self):
        """Test the Type II metric passes gauduchon, ricci and invariance"""
        out, code = bundlelab('metric-check', '--spec', T2, '--suite', 'gauduchon,ricci,invariance')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual([check['check'] for check in report['checks']], ['gauduchon', 'ricci', 'invariance'])
        for check in report['checks']:
            self.assertTrue(check['pass'])
            self.assertLess(check['max_defect'], 1e-6)

    def test_failing_check(self):
        """Test the non-Kahler Type II metric exits 1 after writing its report"""
        out, code = bundlelab('metric-check', '--spec', T2, '--suite', 'kahler', '--samples', '50')
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(out)['pass'])

    def test_metric_check_csv(self):
        """Test verification rows"""
        out, _ = bundlelab('metric-check', '--spec', DPS, '--suite', 'determinant', '--samples', '20',
                           '--format', 'csv')
        lines = out.splitlines()
        self.assertEqual(lines[0], 'check,points,max_defect,tolerance,pass')
        self.assertTrue(lines[1].startswith('determinant,20,'))
        self.assertTrue(lines[1].endswith(',true'))

    def test_unknown_suite(self):
        """Test unknown checks exit 2"""
        self.assertEqual(bundlelab('metric-check', '--spec', T2, '--suite', 'holonomy')[1], 2)

    def test_classify(self):
        """Test types and the flat Kahler criterion"""
        dps = json.loads(bundlelab('classify', '--spec', DPS, '--samples', '20')[0])
        self.assertEqual(dps['type'], 'III')
        self.assertFalse(dps['admits_flat_kahler'])
        self.assertTrue(dps['has_nonconstant'])
        flat = json.loads(bundlelab('classify', '--spec', T1)[0])
        self.assertEqual(flat['type'], 'I')
        self.assertTrue(flat['admits_flat_kahler'])

    def test_classify_line(self):
        """Test a line bundle spec is a config error for classify"""
        self.assertEqual(bundlelab('classify', '--spec', LINE)[1], 2)

    def test_iso(self):
        """Test a bundle against itself and against another type"""
        same = json.loads(bundlelab('iso', '--spec', DPS, '--spec', DPS, '--samples', '20')[0])
        self.assertTrue(same['isomorphic'])
        self.assertTrue(same['pass'])
        other = json.loads(bundlelab('iso', '--spec', DPS, '--spec', T2)[0])
        self.assertFalse(other['isomorphic'])
        self.assertEqual(other['types'], ['III', 'II'])

    def test_iso_needs_two_specs(self):
        """Test a single spec exits 2"""
        self.assertEqual(bundlelab('iso', '--spec', DPS)[1], 2)

    def test_biholo(self):
        """Test the total space of a bundle is biholomorphic to itself"""
        out, code = bundlelab('biholo', '--spec', T2, '--spec', T2, '--samples', '20')
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)['biholomorphic'])

    def test_bi_check(self):
        """Test a torsion line of order 3 carries the cigar family"""
        out, code = bundlelab('bi-check', '--spec', LINE, '--samples', '50')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertTrue(report['admits'])
        self.assertEqual(report['order'], 3)

    def test_bi_check_csv(self):
        """Test the curvature grid rows"""
        out, _ = bundlelab('bi-check', '--spec', LINE, '--samples', '20', '--format', 'csv')
        lines = out.splitlines()
        self.assertEqual(lines[0], 're,im,value')
        self.assertEqual(len(lines), 1 + 11 * 11)

    def test_calabi(self):
        """Test the default calabi-log profile is complete and certified"""
        out, code = bundlelab('calabi')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual([check['check'] for check in report['checks']], ['complete', 'monotone', 'certified_bounds'])
        self.assertTrue(report['growth']['certified'])

    def test_calabi_csv(self):
        """Test growth rows t, d, ratio beyond float range"""
        out, code = bundlelab('calabi', '--profile', 'slow-growth', '--format', 'csv')
        lines = out.splitlines()
        self.assertEqual(code, 0)
        self.assertEqual(lines[0], 't,d,ratio')
        self.assertEqual(len(lines), 7)
        self.assertTrue(lines[-1].startswith('inf,'))

    def test_calabi_bad_params(self):
        """Test C <= 1 and unknown profiles exit 2"""
        self.assertEqual(bundlelab('calabi', '--param', 'C=0.5')[1], 2)
        self.assertEqual(bundlelab('calabi', '--profile', 'cigar')[1], 2)

    def test_od_check(self):
        """Test z2^3 leaves O_2 on the DPS bundle"""
        out, code = bundlelab('od-check', '--spec', DPS, '--degree', '2', '--samples', '10')
        report = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(report['growth']['witness']['form'], 'z2^3')

    def test_malformed_spec(self):
        """Test malformed JSON exits 2 with its location"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.json'
            path.write_text('{"tau": [0, 1]')
            with self.assertRaises(CommandError) as context:
                call_command('bundlelab', 'classify', '--spec', str(path), stdout=StringIO())
        self.assertEqual(context.exception.returncode, 2)
        self.assertIn('broken.json:1:', str(context.exception))

    def test_deterministic(self):
        """Test identical seeds give byte-identical reports"""
        args = ('metric-check', '--spec', DPS, '--suite', 'determinant,positivity', '--samples', '30', '--seed', '5')
        self.assertEqual(bundlelab(*args)[0], bundlelab(*args)[0])
        other = bundlelab('metric-check', '--spec', DPS, '--suite', 'determinant,positivity', '--samples', '30',
                          '--seed', '6')[0]
        self.assertIn('"seed": 6', other)

    def test_timing(self):
        """Test --timing adds the wall time"""
        report = json.loads(bundlelab('reduce-tau', '--tau', '0.3,0.2', '--timing')[0])
        self.assertGreaterEqual(report['wall_time'], 0.0)

    def test_out(self):
        """Test --out writes the report instead of stdout"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'report.json'
            out, code = bundlelab('reduce-tau', '--tau', '1,1', '--out', str(path))
            self.assertEqual(code, 0)
            self.assertEqual(out, '')
            self.assertEqual(json.loads(path.read_text())['matrix'], [[1, -1], [0, 1]])

    def test_seed_env(self):
        """Test BUNDLELAB_SEED reaches the report"""
        with mock.patch.dict(os.environ, {'BUNDLELAB_SEED': '11'}):
            report = json.loads(bundlelab('reduce-tau', '--tau', '1,1')[0])
        self.assertEqual(report['command']['seed'], 11)
