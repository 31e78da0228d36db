"""
Jobs behind ``manage.py bundlelab``.

A job is a validated JobConfig; ``run`` dispatches it to one of the command
handlers below and returns the Report with its exit code: 0 when every check
passes, 1 when one fails. Configuration errors raise ConfigError (exit 2).
"""
import csv
import io
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np
from django.conf import settings

from bundle_algebra.bundles import Rank2Bundle, TypeIII, normalize_witness
from bundle_algebra.isomorphism import (
    admits_bi_nonneg, admits_flat_kahler, bundles_isomorphic, total_spaces_biholomorphic, verify_witness,
)
from bundle_algebra.line_bundles import LineBundleAH
from calabi_growth.distance import DIVERGENCE_EXPONENT, hadamard_order
from calabi_growth.od_growth import verify_Od_growth
from calabi_growth.profiles import CalabiLog, build_profile
from common.exceptions import BundleLabError, ConfigError
from common.formatting import truncate_chars
from common.results import CheckResult, all_passed
from holo_functions.basis import basis_for, has_nonconstant
from holo_functions.oracles import bundle_invariance_defect
from metric_lab.curvature import cigar, curvature_grid, gauss_curvature, validate_bi_candidate
from metric_lab.fields import build_bi_metric, build_metric
from metric_lab.verification import METRIC_SUITE, run_metric_suite
from modular_lattice.lattice import as_tau, in_fundamental_domain, mobius_apply, reduce_tau

from .serializers import ingest_spec, pair, serialize_bundle

logger = logging.getLogger(__name__)

COMMANDS = ('reduce-tau', 'classify', 'iso', 'biholo', 'holo-basis', 'metric-check', 'bi-check', 'calabi', 'od-check')
FORMATS = ('json', 'csv')
REDUCTION_TOLERANCE = 1e-12
BASIS_TOLERANCE = 1e-9
DEFAULT_DEGREE = 3
DEFAULT_SUITES = {
    'I': ('invariance', 'determinant', 'positivity', 'ricci', 'gauduchon', 'kahler'),
    'II': ('invariance', 'determinant', 'positivity', 'ricci', 'gauduchon'),
    'III': ('invariance', 'determinant', 'positivity', 'ricci', 'gauduchon'),
    'line': ('invariance', 'positivity', 'kahler'),
}
DEFAULT_PROFILE = 'calabi-log'
PROFILE_DEFAULTS = {'calabi-log': {'A': 2.0, 'B': 1.0, 'C': 3.0}}
FORM_WIDTH = 80


def parse_tau(text):
    """'RE,IM' -> complex"""
    try:
        re, im = (float(part) for part in text.split(','))
    except (AttributeError, ValueError):
        raise ConfigError(f'expected RE,IM, got {text!r}', '--tau') from None
    return complex(re, im)


def parse_seed(text, location='BUNDLELAB_SEED'):
    try:
        return int(str(text), 0)
    except ValueError:
        raise ConfigError(f'expected an integer seed, got {text!r}', location) from None


def parse_params(items):
    """['A=2', 'C=3'] -> {'A': 2.0, 'C': 3.0}"""
    params = {}
    for item in items or ():
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise ConfigError(f'expected KEY=VALUE, got {item!r}', '--param')
        try:
            params[key] = float(value)
        except ValueError:
            raise ConfigError(f'{key} must be a number, got {value!r}', '--param') from None
    return params


@dataclass(frozen=True)
class JobConfig:
    """
    Defaults: seed from --seed, else BUNDLELAB_SEED, else settings;
    tolerance, samples, witness samples and fiber radius from the
    BUNDLELAB_* settings;
    degree 3; the per-type metric suite; the calabi-log profile with
    A = 2, B = 1, C = 3.
    """

    command: str
    specs: tuple = ()
    tau: complex = None
    degree: int = None
    suite: tuple = None
    tolerance: float = None
    identity_tolerance: float = None
    seed: int = None
    samples: int = None
    witness_samples: int = None
    fiber_radius: float = None
    out: str = None
    format: str = 'json'
    timing: bool = False
    profile: str = None
    params: dict = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f'unknown command {self.command!r}; expected one of {", ".join(COMMANDS)}', 'command')
        if self.format not in FORMATS:
            raise ConfigError(f'expected json or csv, got {self.format!r}', '--format')
        defaults = {
            'tolerance': settings.BUNDLELAB_TOLERANCE,
            'identity_tolerance': settings.BUNDLELAB_IDENTITY_TOLERANCE,
            'samples': settings.BUNDLELAB_SAMPLES,
            'witness_samples': settings.BUNDLELAB_WITNESS_SAMPLES,
            'fiber_radius': settings.BUNDLELAB_FIBER_RADIUS,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        if self.seed is None:
            env = os.getenv('BUNDLELAB_SEED')
            object.__setattr__(self, 'seed', settings.BUNDLELAB_SEED if env is None else parse_seed(env))
        object.__setattr__(self, 'specs', tuple(str(spec) for spec in self.specs))
        if self.suite is not None:
            object.__setattr__(self, 'suite', tuple(self.suite))
        if not self.tolerance > 0:
            raise ConfigError(f'tolerance must be positive, got {self.tolerance}', '--tol')
        if self.samples < 1:
            raise ConfigError(f'need at least one sample, got {self.samples}', '--samples')
        if self.witness_samples < 1:
            raise ConfigError(f'need at least one witness sample, got {self.witness_samples}', 'witness_samples')
        if self.degree is not None and self.degree < 0:
            raise ConfigError(f'degree must be nonnegative, got {self.degree}', '--degree')
        if self.seed < 0:
            raise ConfigError(f'seed must be nonnegative, got {self.seed}', '--seed')

    @classmethod
    def from_options(cls, command, options):
        """Build from a flat option mapping; unknown keys are rejected."""
        known = {f.name for f in fields(cls)} - {'command'}
        unknown = sorted(set(options) - known)
        if unknown:
            raise ConfigError(f'unknown keys {", ".join(unknown)}', 'config')
        return cls(command, **options)

    def echo(self):
        """The command line options that shape the report."""
        echo = {'command': self.command, 'specs': list(self.specs), 'seed': self.seed}
        for name in ('tau', 'degree', 'suite', 'profile', 'params'):
            value = getattr(self, name)
            if value is not None:
                echo[name] = pair(value) if name == 'tau' else (list(value) if name == 'suite' else value)
        return echo


@dataclass
class Report:
    command: dict
    results: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    rows: list = None
    columns: tuple = None
    wall_time: float = None

    @property
    def passed(self):
        return all_passed(self.results)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_dict(self, timing=False):
        report = {
            'command': self.command,
            **self.data,
            'checks': [result.to_dict() for result in self.results],
            'pass': self.passed,
        }
        if timing:
            report['wall_time'] = self.wall_time
        return json_safe(report)

    def to_json(self, timing=False):
        return json.dumps(self.to_dict(timing), indent=2, allow_nan=False) + '\n'

    def to_csv(self):
        """Plot-ready rows when the command has them, else one row per check."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        if self.rows is not None:
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([csv_value(row[column]) for column in self.columns])
        else:
            columns = ('check', 'points', 'max_defect', 'tolerance', 'pass')
            writer.writerow(columns)
            for result in self.results:
                values = result.to_dict()
                writer.writerow([csv_value(values[column]) for column in columns])
        return buffer.getvalue()

    def render(self, format='json', timing=False):
        return self.to_csv() if format == 'csv' else self.to_json(timing)


def json_safe(value):
    """Plain JSON values; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(key): json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return json_safe(pair(value))
    return value


def csv_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return value


def _spec(config, count=1):
    if len(config.specs) != count:
        raise ConfigError(f'{config.command} needs {count} --spec file(s), got {len(config.specs)}', '--spec')
    bundles = [ingest_spec(path) for path in config.specs]
    return bundles[0] if count == 1 else bundles


def _rank2(config):
    E = _spec(config)
    if not isinstance(E, Rank2Bundle):
        raise ConfigError(f'{config.command} needs a rank 2 bundle, got a line bundle', config.specs[0])
    return E


def _line(config):
    L = _spec(config)
    if not isinstance(L, LineBundleAH):
        raise ConfigError(f'{config.command} needs a line bundle spec', config.specs[0])
    return L


def _witness_result(check, witness, config):
    passed, defect = verify_witness(
        witness, config.witness_samples, config.identity_tolerance, config.seed, config.fiber_radius,
    )
    return CheckResult(check, config.witness_samples, defect, config.identity_tolerance, passed)


def reduce_tau_job(config):
    if config.tau is not None:
        tau = as_tau(config.tau)
    elif config.specs:
        tau = _spec(config).tau
    else:
        raise ConfigError('reduce-tau needs --tau or --spec', '--tau')
    reduced, M = reduce_tau(tau)
    defect = abs(mobius_apply(M, tau).value - reduced.value)
    check = CheckResult(
        'fundamental_domain', 1, defect, REDUCTION_TOLERANCE,
        in_fundamental_domain(reduced) and defect <= REDUCTION_TOLERANCE,
    )
    data = {'tau': pair(tau.value), 'tau_reduced': pair(reduced.value), 'matrix': M.as_rows()}
    return Report(config.echo(), [check], data)


def classify_job(config):
    E = _rank2(config)
    data = {
        'type': E.kind,
        'bundle': serialize_bundle(E),
        'admits_flat_kahler': admits_flat_kahler(E),
        'has_nonconstant': has_nonconstant(E),
    }
    results = []
    if isinstance(E, TypeIII):
        witness = normalize_witness(E)
        data['normal_form'] = serialize_bundle(witness.target)
        data['witness'] = witness.form
        results.append(_witness_result('normal_form_witness', witness, config))
    return Report(config.echo(), results, data)


def _equivalence_job(config, decide, key):
    E, F = _spec(config, 2)
    witness = decide(E, F)
    data = {key: witness is not None, 'types': [E.kind, F.kind]}
    results = []
    if witness is not None:
        data['witness'] = truncate_chars(witness.form, FORM_WIDTH)
        results.append(_witness_result('witness', witness, config))
    return Report(config.echo(), results, data)


def iso_job(config):
    return _equivalence_job(config, bundles_isomorphic, 'isomorphic')


def biholo_job(config):
    return _equivalence_job(config, total_spaces_biholomorphic, 'biholomorphic')


def holo_basis_job(config):
    E = _rank2(config)
    degree = DEFAULT_DEGREE if config.degree is None else config.degree
    basis = basis_for(E, degree)
    results = []
    for element in basis.monomials:
        if element.coefficients is None:
            continue
        defect = bundle_invariance_defect(element, E, config.samples, config.seed, config.fiber_radius)
        results.append(CheckResult(f'invariance {element.form}', config.samples, defect, BASIS_TOLERANCE,
                                   defect <= BASIS_TOLERANCE))
    data = {'degree': degree, 'dim': basis.total_dim, 'basis': basis.to_rows()}
    return Report(config.echo(), results, data, basis.to_rows(), ('p', 'q', 'dim', 'form'))


def metric_check_job(config):
    E = _spec(config)
    kind = 'line' if isinstance(E, LineBundleAH) else E.kind
    suite = config.suite or DEFAULT_SUITES[kind]
    unknown = [name for name in suite if name not in METRIC_SUITE]
    if unknown:
        raise ConfigError(f'unknown checks {", ".join(unknown)}; expected {", ".join(METRIC_SUITE)}', '--suite')
    g = build_metric(E)
    results = run_metric_suite(
        g, suite, config.tolerance, config.identity_tolerance, config.samples, config.seed, config.fiber_radius,
    )
    return Report(config.echo(), results, {'metric': g.label, 'suite': list(suite)})


def bi_check_job(config):
    L = _line(config)
    admits, family = admits_bi_nonneg(L)
    data = {'admits': admits, 'family': None if family is None else family.kind}
    results = [CheckResult('flat', 1, float(abs(L.degree)), 0.0, admits)]
    grid = curvature_grid(lambda xi: gauss_curvature(cigar, xi))
    if admits:
        k = family.k
        data['order'] = k
        h = (lambda xi: np.zeros_like(xi)) if k is None else (lambda xi: xi ** k)
        results.extend(validate_bi_candidate(L.theta, k or 0, cigar, h, config.samples, config.seed))
        suite = config.suite or DEFAULT_SUITES['line']
        results.extend(run_metric_suite(
            build_bi_metric(L), suite, config.tolerance, config.identity_tolerance,
            config.samples, config.seed, config.fiber_radius,
        ))
    return Report(config.echo(), results, data, grid, ('re', 'im', 'value'))


def calabi_job(config):
    name = config.profile or DEFAULT_PROFILE
    params = {**PROFILE_DEFAULTS.get(name, {}), **(config.params or {})}
    profile = build_profile(name, **params)
    growth = hadamard_order(profile)
    results = [
        CheckResult('complete', 1, growth.decay_exponent, DIVERGENCE_EXPONENT, growth.divergent),
        CheckResult('monotone', len(growth.rows), 0.0 if growth.is_monotone() else 1.0, 0.0, growth.is_monotone()),
    ]
    if isinstance(profile, CalabiLog):
        results.append(CheckResult('certified_bounds', len(growth.rows), 0.0 if growth.certified else 1.0, 0.0,
                                   bool(growth.certified)))
    return Report(config.echo(), results, {'growth': growth.to_dict()}, growth.rows, ('t', 'd', 'ratio'))


def od_check_job(config):
    E = _rank2(config)
    degree = DEFAULT_DEGREE if config.degree is None else config.degree
    report = verify_Od_growth(E, degree, config.samples, config.seed)
    return Report(config.echo(), report.to_results(), {'growth': report.to_dict()})


HANDLERS = {
    'reduce-tau': reduce_tau_job,
    'classify': classify_job,
    'iso': iso_job,
    'biholo': biholo_job,
    'holo-basis': holo_basis_job,
    'metric-check': metric_check_job,
    'bi-check': bi_check_job,
    'calabi': calabi_job,
    'od-check': od_check_job,
}


def run(config):
    """(report, exit code); invalid input raises ConfigError."""
    start = time.perf_counter()
    try:
        report = HANDLERS[config.command](config)
    except ConfigError:
        raise
    except BundleLabError as error:
        raise ConfigError(str(error), config.command) from error
    report.wall_time = time.perf_counter() - start
    logger.info(f'{config.command} finished in {report.wall_time:.3f}s: '
                f'{sum(r.passed for r in report.results)}/{len(report.results)} checks passed')
    return report, report.exit_code
