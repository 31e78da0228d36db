"""
Radial profiles u(t) of Calabi-type metrics pi^* omega + i dd-bar u(t), t = |v|_h^2.

Along a fiber only the weight w(t) = u'(t) + t u''(t) = (t u'(t))' matters:
the distance of v to the zero section is the integral of sqrt(w) / (2 sqrt(t)).
Every profile exposes u, u', u'' and w as vectorized functions of t >= 0.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import BPoly

from common.exceptions import ProfileError

logger = logging.getLogger(__name__)

TAIL_START = 10.0
CHECK_SAMPLES = 200
CHECK_FLOOR = 1e-6
SLOW_GROWTH_ALPHA = 2000.0


class RadialProfile:
    """Base of the profile variants; subclasses provide u_prime and weight at least."""

    name = 'profile'

    @property
    def breakpoints(self):
        """Points in t where the profile is only piecewise smooth."""
        return ()

    @property
    def tail_start(self):
        """Beyond this t, ``log_tail_weight`` is valid."""
        return TAIL_START

    def u(self, t):
        """u(t) - u(0) by quadrature of u'."""
        def single(value):
            return quad(lambda s: float(self.u_prime(s)), 0.0, value, points=self._inner(value), limit=200)[0]

        return np.vectorize(single, otypes=[float])(np.asarray(t, dtype=float))

    def u_prime(self, t):
        raise NotImplementedError

    def u_second(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            return (self.weight(t) - self.u_prime(t)) / t

    def weight(self, t):
        """u'(t) + t u''(t)."""
        t = np.asarray(t, dtype=float)
        return self.u_prime(t) + t * self.u_second(t)

    def log_tail_weight(self, mu):
        """ln(w(t) t) at t = exp(exp(mu)), for profiles with a closed-form tail."""
        return None

    def _inner(self, value):
        return [b for b in self.breakpoints if 0.0 < b < value] or None

    def to_dict(self):
        return {'profile': self.name}


@dataclass(frozen=True)
class Euclidean(RadialProfile):
    name = 'euclidean'

    def u(self, t):
        return np.asarray(t, dtype=float)

    def u_prime(self, t):
        return np.ones(np.shape(t))

    def u_second(self, t):
        return np.zeros(np.shape(t))

    def weight(self, t):
        return np.ones(np.shape(t))

    def log_tail_weight(self, mu):
        return np.exp(mu)


@dataclass(frozen=True)
class CalabiLog(RadialProfile):
    """u(t) = A ln(C + t) - B ln ln(C + t) with C > 1 and A > B / ln C."""

    A: float
    B: float
    C: float

    name = 'calabi-log'

    def __post_init__(self):
        if min(self.A, self.B, self.C) <= 0:
            raise ProfileError(f'CalabiLog needs positive A, B, C, got ({self.A}, {self.B}, {self.C})')
        if self.C <= 1:
            raise ProfileError(f'CalabiLog needs C > 1, got C = {self.C}', 0.0)
        if self.A <= self.B / math.log(self.C):
            raise ProfileError(
                f'CalabiLog needs A > B / ln C = {self.B / math.log(self.C):.6g}, got A = {self.A}', 0.0
            )

    def _log(self, t):
        return np.log(self.C + np.asarray(t, dtype=float))

    def u(self, t):
        L = self._log(t)
        return self.A * L - self.B * np.log(L)

    def u_prime(self, t):
        t = np.asarray(t, dtype=float)
        L = self._log(t)
        return (self.A - self.B / L) / (self.C + t)

    def u_second(self, t):
        t = np.asarray(t, dtype=float)
        L = self._log(t)
        return (self.B / L ** 2 - (self.A - self.B / L)) / (self.C + t) ** 2

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        L = self._log(t)
        return (self.B * t / L ** 2 + self.C * (self.A - self.B / L)) / (self.C + t) ** 2

    def log_tail_weight(self, mu):
        with np.errstate(over='ignore'):
            log_ratio = math.log(self.C) - np.exp(mu)
        shift = np.log1p(np.exp(log_ratio))
        log_L = mu + np.log1p(shift * np.exp(-mu))
        main = math.log(self.B) - 2.0 * log_L
        rest = log_ratio + np.log(self.A - self.B * np.exp(-log_L))
        return np.logaddexp(main, rest) - 2.0 * shift

    def lower_bound(self, t):
        """(sqrt(B) / 2) (ln ln(C + t) - ln ln C), from w >= B t / (L (C + t))^2."""
        return 0.5 * math.sqrt(self.B) * (np.log(self._log(t)) - math.log(math.log(self.C)))

    def upper_bound(self, t):
        """pi sqrt(A) / 2 plus the lower bound, from w <= (B t / L^2 + A C) / (C + t)^2."""
        return 0.5 * math.pi * math.sqrt(self.A) + self.lower_bound(t)

    def to_dict(self):
        return {'profile': self.name, 'A': self.A, 'B': self.B, 'C': self.C}


def _log_tail(t):
    """ln h and its first two derivatives for h = 1 / (t ln t (ln ln t)^2)."""
    L = math.log(t)
    M = math.log(L)
    value = -L - M - 2.0 * math.log(M)
    first = -1.0 / t - 1.0 / (t * L) - 2.0 / (t * L * M)
    second = 1.0 / t ** 2 + (L + 1.0) / (t * L) ** 2 + 2.0 * (L * M + M + 1.0) / (t * L * M) ** 2
    return [value, first, second]


@dataclass(frozen=True)
class SlowGrowth(RadialProfile):
    """
    (t u'(t))' = (2k / C) h(t) with h = t^2 on [0, alpha],
    h = 1 / (t ln t (ln ln t)^2) beyond alpha + 1 and C the integral of h.

    On [alpha, alpha + 1], ln h is the quintic matching value, slope and
    curvature at both ends, so h stays positive.
    """

    k: float = 1.0
    alpha: float = SLOW_GROWTH_ALPHA
    _bridge: BPoly = field(init=False, repr=False, compare=False)
    _bridge_mass: float = field(init=False, repr=False, compare=False)
    total: float = field(init=False, repr=False, compare=False)

    name = 'slow-growth'

    def __post_init__(self):
        if self.k <= 0:
            raise ProfileError(f'SlowGrowth needs k > 0, got {self.k}')
        if self.alpha <= math.e or math.log(math.log(self.alpha)) <= 2.0:
            raise ProfileError(f'SlowGrowth needs ln ln alpha > 2, got alpha = {self.alpha}', self.alpha)
        a = float(self.alpha)
        left = [2.0 * math.log(a), 2.0 / a, -2.0 / a ** 2]
        bridge = BPoly.from_derivatives([a, a + 1.0], [left, _log_tail(a + 1.0)])
        object.__setattr__(self, '_bridge', bridge)
        mass = quad(lambda s: math.exp(float(bridge(s))), a, a + 1.0, epsabs=0.0, epsrel=1e-12)[0]
        object.__setattr__(self, '_bridge_mass', mass)
        object.__setattr__(self, 'total', a ** 3 / 3.0 + mass + 1.0 / math.log(math.log(a + 1.0)))
        logger.debug(f'SlowGrowth(k={self.k}, alpha={a}) has C = {self.total:.6e}')

    @property
    def scale(self):
        return 2.0 * self.k / self.total

    @property
    def breakpoints(self):
        return (self.alpha, self.alpha + 1.0)

    @property
    def tail_start(self):
        return self.alpha + 1.0

    def h(self, t):
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a = self.alpha
        out = np.empty(t.shape)
        low = t <= a
        high = t >= a + 1.0
        middle = ~(low | high)
        out[low] = t[low] ** 2
        if np.any(middle):
            out[middle] = np.exp(self._bridge(t[middle]))
        if np.any(high):
            L = np.log(t[high])
            out[high] = 1.0 / (t[high] * L * np.log(L) ** 2)
        return out.reshape(shape)

    def mass(self, t):
        """Integral of h over [0, t]."""
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a = self.alpha
        out = np.empty(t.shape)
        low = t <= a
        high = t >= a + 1.0
        middle = ~(low | high)
        out[low] = t[low] ** 3 / 3.0
        for index in zip(*np.nonzero(middle)):
            piece = quad(lambda s: math.exp(float(self._bridge(s))), a, float(t[index]), epsabs=0.0, epsrel=1e-12)
            out[index] = a ** 3 / 3.0 + piece[0]
        if np.any(high):
            out[high] = (a ** 3 / 3.0 + self._bridge_mass + 1.0 / math.log(math.log(a + 1.0))
                         - 1.0 / np.log(np.log(t[high])))
        return out.reshape(shape)

    def u_prime(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            value = self.scale * self.mass(t) / t
        return np.where(t > 0, value, 0.0)

    def u_second(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            value = self.scale * (self.h(t) / t - self.mass(t) / t ** 2)
        return np.where(t > 0, value, 0.0)

    def weight(self, t):
        return self.scale * self.h(t)

    def log_tail_weight(self, mu):
        return math.log(self.scale) - mu - 2.0 * np.log(mu)

    def to_dict(self):
        return {'profile': self.name, 'k': self.k, 'alpha': self.alpha}


@dataclass(frozen=True)
class LogPower(RadialProfile):
    """
    (t u'(t))' = delta / ((t + 2) ln(t + 2)^(1 + alpha)).

    Complete for alpha <= 1; for alpha < 1 the distance grows like
    ln(t)^((1 - alpha) / 2), so functions of polynomial growth have Hadamard
    order up to 2 / (1 - alpha).
    """

    delta: float = 1.0
    alpha: float = 0.5

    name = 'log-power'

    def __post_init__(self):
        if self.delta <= 0 or self.alpha <= 0:
            raise ProfileError(f'LogPower needs positive delta and alpha, got ({self.delta}, {self.alpha})')

    def u_prime(self, t):
        t = np.asarray(t, dtype=float)
        ln2 = math.log(2.0)
        a = self.alpha
        drop = -np.expm1(-a * np.log1p(np.log1p(t / 2.0) / ln2))
        limit = self.delta / (2.0 * ln2 ** (a + 1.0))
        with np.errstate(divide='ignore', invalid='ignore'):
            value = self.delta * drop / (a * ln2 ** a * t)
        return np.where(t > 0, value, limit)

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        return self.delta / ((t + 2.0) * np.log(t + 2.0) ** (1.0 + self.alpha))

    def log_tail_weight(self, mu):
        with np.errstate(over='ignore'):
            shift = np.log1p(2.0 * np.exp(-np.exp(mu)))
        return math.log(self.delta) - shift - (1.0 + self.alpha) * (mu + np.log1p(shift * np.exp(-mu)))

    def to_dict(self):
        return {'profile': self.name, 'delta': self.delta, 'alpha': self.alpha}


@dataclass(frozen=True)
class Custom(RadialProfile):
    u_func: Callable
    u_prime_func: Callable
    u_second_func: Callable
    label: str = 'custom'

    @property
    def name(self):
        return self.label

    def u(self, t):
        return np.asarray(self.u_func(np.asarray(t, dtype=float)), dtype=float)

    def u_prime(self, t):
        return np.asarray(self.u_prime_func(np.asarray(t, dtype=float)), dtype=float)

    def u_second(self, t):
        return np.asarray(self.u_second_func(np.asarray(t, dtype=float)), dtype=float)

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        return self.u_prime(t) + t * self.u_second(t)


def log_one_plus():
    """u = ln(1 + t): w = 1 / (1 + t)^2 and the fiber distance is arctan(sqrt(t))."""
    return Custom(np.log1p, lambda t: 1.0 / (1.0 + t), lambda t: -1.0 / (1.0 + t) ** 2, 'log-one-plus')


def check_profile(profile, t_max, samples=CHECK_SAMPLES):
    """Raise ProfileError at the first sampled t in (0, t_max] with u' <= 0 or w <= 0."""
    if t_max <= 0:
        return
    floor = min(CHECK_FLOOR, t_max)
    t = np.append(np.geomspace(floor, t_max, samples), profile.breakpoints)
    t = np.sort(t[t <= t_max])
    for label, values in (("u'", profile.u_prime(t)), ("u' + t u''", profile.weight(t))):
        bad = ~(np.isfinite(values) & (values > 0))
        if np.any(bad):
            where = float(t[np.argmax(bad)])
            raise ProfileError(f'{profile.name}: {label} is not positive at t = {where:.6g}', where)


PROFILE_BUILDERS = {
    'euclidean': Euclidean,
    'calabi-log': CalabiLog,
    'slow-growth': SlowGrowth,
    'log-power': LogPower,
}


def build_profile(name, **params):
    """Profile by its report name, e.g. build_profile('calabi-log', A=2, B=1, C=3)."""
    try:
        builder = PROFILE_BUILDERS[name]
    except KeyError:
        raise ProfileError(f'Unknown profile {name!r}; expected one of {", ".join(PROFILE_BUILDERS)}') from None
    try:
        return builder(**params)
    except TypeError as error:
        raise ProfileError(f'Bad parameters for {name}: {error}')
