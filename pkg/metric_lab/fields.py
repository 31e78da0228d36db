"""
Hermitian metrics on total spaces as polarized fields.

A metric g_{i j-bar}(p) is stored through its polarization G(u, w): a function
holomorphic in u and in w with G(p, conj p) = g(p). Holomorphic derivatives are
derivatives in u, antiholomorphic ones are derivatives in w, so every
verification reduces to contour derivatives of holomorphic functions.

When a coframe Theta is known (rows theta_a = sum Theta_{a i} dz_i with
omega = i sum theta_a ^ conj(theta_a)), G = Theta^T Theta-bar and the
determinant and cofactors are taken from Theta directly.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bundle_algebra.angles import as_angle, common_order
from bundle_algebra.bundles import TypeI, TypeII, TypeIII, deck_generators, representation_deck_action
from bundle_algebra.line_bundles import LineBundleAH
from common.exceptions import BundleError
from common.numerics import contour_derivative
from modular_lattice.lattice import Tau, as_tau

logger = logging.getLogger(__name__)


def conjugate_polarized(func):
    """Polarization of conj(f): (u, w) -> conj(f(conj w, conj u))."""

    def evaluate(u, w):
        return np.conj(func(np.conj(w), np.conj(u)))

    return evaluate


def leading_shape(u, w):
    return np.broadcast_shapes(np.shape(u)[:-1], np.shape(w)[:-1])


def assemble(rows, shape):
    """Stack nested rows of broadcastable entries into shape + (n, m)."""
    entries = [np.asarray(entry, dtype=complex) for row in rows for entry in row]
    entries = np.broadcast_arrays(np.zeros(shape, dtype=complex), *entries)[1:]
    full = np.stack(entries, axis=-1)
    return full.reshape(full.shape[:-1] + (len(rows), len(rows[0])))


def identity_field(n):
    def evaluate(u, w):
        shape = leading_shape(u, w)
        return np.broadcast_to(np.eye(n, dtype=complex), shape + (n, n))

    return evaluate


@dataclass(frozen=True, eq=False)
class MetricField:
    dim: int
    polarized: Callable
    deck: tuple = ()
    label: str = ''
    tau: Tau = None
    coframe: Callable = None

    def split(self, points):
        points = np.asarray(points, dtype=complex)
        if points.shape[-1] != self.dim:
            raise BundleError(f'{self.label} lives on C^{self.dim}, got points of size {points.shape[-1]}')
        return points, np.conj(points)

    def eval(self, points):
        """g_{i j-bar} at points of shape (..., dim)."""
        return self.polarized(*self.split(points))

    def frame(self, points):
        return self.coframe(*self.split(points))

    def polarized_pair(self, u, w):
        """(Theta, Theta-bar) at (u, w)."""
        return self.coframe(u, w), conjugate_polarized(self.coframe)(u, w)

    def determinant(self, points):
        if self.coframe is not None:
            return np.abs(np.linalg.det(self.frame(points))) ** 2
        return np.linalg.det(self.eval(points)).real

    def log_det(self, u, w):
        """Polarized log det g."""
        if self.coframe is not None:
            theta, theta_bar = self.polarized_pair(u, w)
            return np.log(np.linalg.det(theta)) + np.log(np.linalg.det(theta_bar))
        return np.log(np.linalg.det(self.polarized(u, w)))

    def cofactors(self, u, w):
        """Polarized cofactor matrix C_{ij} of the entry g_{i j-bar}."""
        if self.coframe is not None:
            theta, theta_bar = self.polarized_pair(u, w)
            det = np.linalg.det(theta) * np.linalg.det(theta_bar)
            inverse_t = np.matmul(np.linalg.inv(theta), np.swapaxes(np.linalg.inv(theta_bar), -1, -2))
            return det[..., None, None] * inverse_t
        G = self.polarized(u, w)
        det = np.linalg.det(G)
        return det[..., None, None] * np.swapaxes(np.linalg.inv(G), -1, -2)

    @property
    def sampling_tau(self):
        return self.tau if self.tau is not None else Tau(1j)


def from_coframe(dim, coframe, **kwargs):
    """MetricField with G = Theta^T Theta-bar."""
    conjugate = conjugate_polarized(coframe)

    def polarized(u, w):
        return np.einsum('...ai,...aj->...ij', coframe(u, w), conjugate(u, w))

    return MetricField(dim, polarized, coframe=coframe, **kwargs)


def euclidean_metric(dim=3):
    return from_coframe(dim, identity_field(dim), label='euclidean')


def build_flat_typeI(L1, L2):
    """Flat metric |dz|^2 + |dxi1|^2 + |dxi2|^2; the multipliers are unitary."""
    E = TypeI(L1, L2)
    return from_coframe(3, identity_field(3), deck=tuple(deck_generators(E)), label='flat-typeI', tau=E.tau)


def typeII_coframe(H):
    """Rows dz, s (dxi1 - pi H z-bar xi1 dz), s^-1 (dxi2 + pi H z-bar xi2 dz), s = exp(-pi H |z|^2 / 2)."""

    def coframe(u, w):
        shape = leading_shape(u, w)
        z_bar = w[..., 0]
        s = np.exp(-0.5 * np.pi * H * u[..., 0] * w[..., 0])
        return assemble([
            [1.0, 0.0, 0.0],
            [-s * np.pi * H * z_bar * u[..., 1], s, 0.0],
            [np.pi * H * z_bar * u[..., 2] / s, 0.0, 1.0 / s],
        ], shape)

    return coframe


def typeII_polarized(H):
    """Closed-form entries of the Type II metric, E = exp(-pi H z z-bar), F = 1 / E."""

    def polarized(u, w):
        shape = leading_shape(u, w)
        z, z_bar = u[..., 0], w[..., 0]
        E = np.exp(-np.pi * H * z * z_bar)
        F = 1.0 / E
        c = np.pi * H
        return assemble([
            [1 + c * c * z * z_bar * (u[..., 1] * w[..., 1] * E + u[..., 2] * w[..., 2] * F),
             -c * z_bar * u[..., 1] * E,
             c * z_bar * u[..., 2] * F],
            [-c * z * w[..., 1] * E, E, 0.0],
            [c * z * w[..., 2] * F, 0.0, F],
        ], shape)

    return polarized


def build_typeII_metric(E):
    """Metric built from the Chern connections of e^{-pi H|z|^2} on L1 and e^{pi H|z|^2} on L2."""
    if not isinstance(E, TypeII):
        raise BundleError(f'Type II metric needs a Type II bundle, got {type(E).__name__}')
    H = E.first.hermitian_form
    return MetricField(3, typeII_polarized(H), deck=tuple(deck_generators(E)), label='typeII',
                       tau=E.tau, coframe=typeII_coframe(H))


def gaugen_slopes(b1, b2, tau):
    """(b1, c) with phi = b1 x + c y, phi(z + 1) = phi + b1 and phi(z + tau) = phi + b2."""
    tau = as_tau(tau)
    b1, b2 = complex(b1), complex(b2)
    return b1, (b2 - b1 * tau.real) / tau.imag


def gaugen_coframe(b1, b2, tau):
    """Rows dz, dz1 - phi dz2 - z2 phi_z dz, dz2."""
    slope_x, slope_y = gaugen_slopes(b1, b2, tau)
    phi_z = 0.5 * (slope_x - 1j * slope_y)

    def coframe(u, w):
        shape = leading_shape(u, w)
        x = 0.5 * (u[..., 0] + w[..., 0])
        y = (u[..., 0] - w[..., 0]) / 2j
        phi = slope_x * x + slope_y * y
        return assemble([
            [1.0, 0.0, 0.0],
            [-u[..., 2] * phi_z, 1.0, -phi],
            [0.0, 0.0, 1.0],
        ], shape)

    return coframe


def build_typeIII_metric(b1, b2, theta, tau):
    """Metric of the representation (theta, b1, b2); Kahler exactly when b2 = b1 tau."""
    tau = as_tau(tau)
    theta = tuple(as_angle(angle) for angle in theta)
    deck = tuple(representation_deck_action(theta, b1, b2, tau, m, n) for m, n in ((1, 0), (0, 1)))
    return from_coframe(3, gaugen_coframe(b1, b2, tau), deck=deck, label='typeIII', tau=tau)


def gaugenspe_metric(tau=1j):
    """b1 = 1, b2 = conj(tau): [[1, 0, 0], [0, 1, -z], [0, -z-bar, 1 + |z|^2]]."""
    tau = as_tau(tau)
    return build_typeIII_metric(1.0, np.conj(tau.value), (0, 0), tau)


def holomorphic_derivative(func):
    """Contour derivative of a vectorized holomorphic function of one variable."""

    def derivative(xi):
        xi = np.asarray(xi, dtype=complex)
        return contour_derivative(lambda offsets: func(xi + offsets.reshape(offsets.shape + (1,) * xi.ndim)))

    return derivative


def cigar_profile(t):
    """u(t) = 1 / (1 + t), t = |xi|^2."""
    return 1.0 / (1.0 + t)


def build_bi_metric(L, C=1.0, h=None, h_prime=None, profile=cigar_profile):
    """
    C d(z + h(xi)) ^ conj + u(|xi|^2) dxi ^ dxi-bar on a flat line bundle.

    ``h`` defaults to xi^k for a torsion character of order k and to 0 for an
    irrational one; ``profile`` must accept complex arguments.
    """
    if not isinstance(L, LineBundleAH) or L.degree != 0:
        raise BundleError('Metrics of nonnegative bisectional curvature need a flat line bundle')
    if C <= 0:
        raise BundleError(f'C must be positive, got {C}')
    k = common_order(L.theta)
    if h is None:
        if k is None:
            h, h_prime = (lambda xi: np.zeros_like(xi)), (lambda xi: np.zeros_like(xi))
        else:
            h, h_prime = (lambda xi: xi ** k), (lambda xi: k * xi ** (k - 1))
    if h_prime is None:
        h_prime = holomorphic_derivative(h)
    scale = np.sqrt(C)

    def coframe(u, w):
        shape = leading_shape(u, w)
        xi = u[..., 1]
        return assemble([
            [scale, scale * h_prime(xi)],
            [0.0, np.sqrt(profile(u[..., 1] * w[..., 1]))],
        ], shape)

    return from_coframe(2, coframe, deck=tuple(deck_generators(L)), label='bi', tau=L.tau)


def build_metric(E):
    """The metric each bundle type carries."""
    if isinstance(E, TypeI):
        return build_flat_typeI(E.first, E.second)
    if isinstance(E, TypeII):
        return build_typeII_metric(E)
    if isinstance(E, TypeIII):
        return build_typeIII_metric(E.b1, E.b2, E.theta, E.tau)
    if isinstance(E, LineBundleAH):
        return build_bi_metric(E)
    raise BundleError(f'No metric for {type(E).__name__}')
