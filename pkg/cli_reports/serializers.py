"""Bundle spec files to domain objects and back"""
import json
import logging
from pathlib import Path

from bundle_algebra.bundles import TypeI, TypeII, TypeIII, classify, is_split_representation
from bundle_algebra.line_bundles import LineBundleAH
from common.exceptions import BundleLabError, ConfigError
from modular_lattice.lattice import as_tau

from .forms import BundleSpecForm

logger = logging.getLogger(__name__)


def pair(value):
    value = complex(value)
    return [value.real, value.imag]


def serialize_line(L):
    return {
        'tau': pair(L.tau.value),
        'type': 'sum',
        'theta': [angle.to_json() for angle in L.theta],
        'degrees': [L.degree],
    }


def serialize_bundle(E):
    """Spec dict of a line or rank 2 bundle; ``spec_to_bundle`` inverts it exactly."""
    if isinstance(E, LineBundleAH):
        return serialize_line(E)
    if isinstance(E, TypeIII):
        return {
            'tau': pair(E.tau.value),
            'type': 'repr',
            'theta': [angle.to_json() for angle in E.theta],
            'b': [pair(E.b1), pair(E.b2)],
        }
    if isinstance(E, (TypeI, TypeII)):
        return {
            'tau': pair(E.tau.value),
            'type': 'sum',
            'theta': [angle.to_json() for line in E.lines for angle in line.theta],
            'degrees': [line.degree for line in E.lines],
        }
    raise ConfigError(f'Cannot serialize {type(E).__name__}')


def _build(data):
    tau = as_tau(data['tau'])
    theta = data['theta']
    if data['type'] == 'repr':
        b1, b2 = data['b']
        if is_split_representation(b1, b2, tau):
            return classify(theta[0], theta[1], b1, b2, tau)
        return TypeIII(tuple(theta), b1, b2, tau)

    lines = [
        LineBundleAH(degree, tau, tuple(theta[2 * index:2 * index + 2]))
        for index, degree in enumerate(data['degrees'])
    ]
    if len(lines) == 1:
        return lines[0]
    first, second = lines
    if first.degree == 0 and second.degree == 0:
        return TypeI(first, second)
    return TypeII(first, second)


def spec_to_bundle(spec, source='spec'):
    """Validate a parsed spec; ConfigError names the field path."""
    if not isinstance(spec, dict):
        raise ConfigError(f'expected a JSON object, got {type(spec).__name__}', source)
    form = BundleSpecForm(data=spec)
    if not form.is_valid():
        raise ConfigError('; '.join(form.error_paths()), source)
    try:
        return _build(form.cleaned_data)
    except BundleLabError as error:
        raise ConfigError(str(error), source) from error


def ingest_spec(path):
    """Line bundle or rank 2 bundle of the spec file at ``path``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise ConfigError(f'cannot read spec: {error.strerror}', str(path)) from error
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError(error.msg, f'{path}:{error.lineno}:{error.colno}') from error
    E = spec_to_bundle(spec, str(path))
    logger.debug(f'Ingested {path} as {type(E).__name__}')
    return E
