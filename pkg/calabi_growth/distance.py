"""
Fiber distances of Calabi-type metrics and their growth.

d(T) is the integral over [0, T] of sqrt(w(t)) / (2 sqrt(t)). The head [0, 10]
is integrated in s = sqrt(t), the tail in sigma = ln t, and doubly exponential
scales in mu = ln ln t with the integrand rescaled by its value at the end.
"""
import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from common.exceptions import ProfileError

from .profiles import TAIL_START, CalabiLog, Euclidean, check_profile

logger = logging.getLogger(__name__)

QUAD_RELATIVE = 1e-10
QUAD_ABSOLUTE = 1e-14
QUAD_LIMIT = 200
VERDICT_T_MAX = 1e12
VERDICT_DECADES = 3
VERDICT_SAMPLES = 13
DIVERGENCE_EXPONENT = 1.1
DEFAULT_GRID = tuple(10.0 ** k for k in range(1, 13))
DEFAULT_LOGLOG_GRID = (3.0, 10.0, 30.0, 100.0, 300.0, 1000.0)


def integrate(func, a, b, points=()):
    """scipy quad over [a, b], split at the interior breakpoints."""
    edges = [a, *sorted(p for p in points if a < p < b), b]
    total = 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', IntegrationWarning)
        for left, right in zip(edges, edges[1:]):
            value, _ = quad(func, left, right, epsabs=QUAD_ABSOLUTE, epsrel=QUAD_RELATIVE, limit=QUAD_LIMIT)
            total += value
    for warning in caught:
        logger.warning(f'Quadrature on [{a:.6g}, {b:.6g}]: {warning.message}')
    return total


def fiber_distance(profile, t_max, check=True):
    """Distance from the zero section to a fiber point with |v|^2 = t_max."""
    if t_max < 0:
        raise ProfileError(f'Fiber norm must be nonnegative, got {t_max}', t_max)
    if t_max == 0:
        return 0.0
    if check:
        check_profile(profile, t_max)
    breakpoints = profile.breakpoints
    head = min(t_max, TAIL_START)
    distance = integrate(
        lambda s: math.sqrt(float(profile.weight(s * s))),
        0.0, math.sqrt(head), [math.sqrt(b) for b in breakpoints],
    )
    if t_max > TAIL_START:
        distance += integrate(
            lambda sigma: 0.5 * math.sqrt(float(profile.weight(math.exp(sigma))) * math.exp(sigma)),
            math.log(TAIL_START), math.log(t_max), [math.log(b) for b in breakpoints if b > 0],
        )
    return distance


def log_fiber_distance(profile, ell):
    """ln d(x) at x = exp(exp(ell)); reaches scales no float can hold."""
    if isinstance(profile, Euclidean):
        return 0.5 * math.exp(ell)
    start = profile.tail_start
    mu0 = math.log(math.log(start))
    if ell <= mu0 or profile.log_tail_weight(ell) is None:
        with np.errstate(over='ignore'):
            x = float(np.exp(np.exp(ell)))
        if not math.isfinite(x):
            raise ProfileError(f'{profile.name} has no closed-form tail for ln ln x = {ell}')
        return math.log(fiber_distance(profile, x))

    def log_integrand(mu):
        return math.log(0.5) + 0.5 * float(profile.log_tail_weight(mu)) + mu

    peak = max(log_integrand(mu0), log_integrand(ell))
    rest = integrate(lambda mu: math.exp(log_integrand(mu) - peak), mu0, ell)
    base = fiber_distance(profile, start)
    return float(np.logaddexp(math.log(base), peak + math.log(rest)))


def calabi_log_lower_bound(profile, t):
    """Certified lower bound of d(t) for a CalabiLog profile."""
    if not isinstance(profile, CalabiLog):
        raise ProfileError(f'Lower bound is only certified for calabi-log, got {profile.name}')
    return float(profile.lower_bound(t))


def decay_exponent(profile, t_max=VERDICT_T_MAX, decades=VERDICT_DECADES, samples=VERDICT_SAMPLES):
    """
    q with d d / ds ~ s^-q over the last decades below t_max, s = ln t.

    The integral of s^-q diverges for q <= 1; exponential growth in s gives q < 0.
    """
    t = np.geomspace(t_max / 10.0 ** decades, t_max, samples)
    rate = 0.5 * np.sqrt(profile.weight(t) * t)
    slope = np.polyfit(np.log(np.log(t)), np.log(rate), 1)[0]
    return float(-slope)


def completeness_verdict(profile, t_max=VERDICT_T_MAX, threshold=DIVERGENCE_EXPONENT, decades=VERDICT_DECADES):
    """Numerical divergence heuristic for d(T) as T -> infinity; not a proof."""
    check_profile(profile, t_max)
    exponent = decay_exponent(profile, t_max, decades)
    divergent = exponent <= threshold
    logger.info(
        f'{profile.name}: fiber distance decay exponent {exponent:.4f} over {decades} decades '
        f'below {t_max:.3g}, {"divergent" if divergent else "convergent"} (heuristic)'
    )
    return divergent


def hadamard_ratio(loglog_x, log_d):
    """ln ln x / ln d, nan where ln d vanishes."""
    if log_d == 0 or not math.isfinite(log_d):
        return math.nan
    return loglog_x / log_d


@dataclass
class GrowthReport:
    profile: dict
    rows: list = field(default_factory=list)
    divergent: bool = False
    decay_exponent: float = math.nan
    estimated_order: float = None
    trend: str = None
    certificate_constant: float = None
    certified: bool = None

    def distances(self):
        return [row['d'] for row in self.rows]

    def ratios(self):
        return [row['ratio'] for row in self.rows]

    def is_monotone(self):
        values = [row['log_d'] for row in self.rows]
        return all(b >= a for a, b in zip(values, values[1:]))

    def to_dict(self):
        return {
            'profile': self.profile,
            'divergent': self.divergent,
            'decay_exponent': self.decay_exponent,
            'estimated_order': self.estimated_order,
            'trend': self.trend,
            'certificate_constant': self.certificate_constant,
            'certified': self.certified,
            'rows': self.rows,
        }

    def to_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['t', 'd', 'ratio'])
        for row in self.rows:
            writer.writerow([repr(row['t']), repr(row['d']), repr(row['ratio'])])
        return buffer.getvalue()


def _trend(ratios):
    finite = [r for r in ratios if math.isfinite(r) and r > 0]
    steps = [b - a for a, b in zip(finite, finite[1:])]
    if not steps:
        return None
    if all(step <= 0 for step in steps):
        return 'decreasing'
    if all(step >= 0 for step in steps):
        return 'increasing'
    return 'mixed'


def _row(loglog_x, log_d, t=None, d=None):
    with np.errstate(over='ignore'):
        t = float(np.exp(np.exp(loglog_x))) if t is None else t
        d = float(np.exp(log_d)) if d is None else d
    return {'t': t, 'd': d, 'ratio': hadamard_ratio(loglog_x, log_d), 'loglog_x': loglog_x, 'log_d': log_d}


def hadamard_order(profile, xs=None, loglog=None):
    """
    Sample ln ln x / ln d(x) on a grid of x, or of ln ln x with ``loglog``.

    Profiles with a closed-form tail default to the doubly exponential grid;
    others to x = 10 .. 1e12. For CalabiLog the report also carries the fitted
    constant of d(x) <= C sqrt(ln x) and whether the certified bounds bracket
    every sample.
    """
    if xs is None and loglog is None:
        if isinstance(profile, (CalabiLog, Euclidean)) or profile.log_tail_weight(2.0) is None:
            xs = DEFAULT_GRID
        else:
            loglog = DEFAULT_LOGLOG_GRID
    report = GrowthReport(profile.to_dict())
    if loglog is not None:
        for ell in loglog:
            report.rows.append(_row(float(ell), log_fiber_distance(profile, float(ell))))
    else:
        for x in xs:
            x = float(x)
            if x <= math.e:
                raise ProfileError(f'Hadamard ratios need x > e, got {x}', x)
            distance = fiber_distance(profile, x)
            report.rows.append(_row(math.log(math.log(x)), math.log(distance), x, distance))

    report.divergent = completeness_verdict(profile)
    report.decay_exponent = decay_exponent(profile)
    ratios = report.ratios()
    finite = [r for r in ratios if math.isfinite(r)]
    report.estimated_order = finite[-1] if finite else None
    report.trend = _trend(ratios)

    if isinstance(profile, CalabiLog) and xs is not None:
        report.certificate_constant = max(row['d'] / math.sqrt(math.log(row['t'])) for row in report.rows)
        report.certified = all(
            profile.lower_bound(row['t']) <= row['d'] * (1 + 1e-9) <= profile.upper_bound(row['t']) * (1 + 2e-9)
            for row in report.rows
        )
        logger.info(
            f'{profile.name}: d(x) <= {report.certificate_constant:.6g} sqrt(ln x) on the grid, '
            f'bounds {"hold" if report.certified else "fail"}'
        )
    return report
