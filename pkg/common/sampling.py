"""Seeded random sampling of verification points"""
import numpy as np

DEFAULT_SEED = 0xE11
DEFAULT_FIBER_RADIUS = 10.0


def make_rng(seed=None):
    """Return a numpy Generator; ``None`` means the default suite seed."""
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def sample_ball(rng, count, dim, radius):
    """Uniform points in the ball of ``radius`` in C^dim, shape (count, dim)."""
    if dim == 0:
        return np.zeros((count, 0), dtype=complex)
    gauss = rng.standard_normal((count, 2 * dim))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    scale = radius * rng.random(count) ** (1.0 / (2 * dim))
    real = gauss * scale[:, None]
    return real[:, :dim] + 1j * real[:, dim:]


def sample_disc(rng, count, radius):
    """Uniform points in the disc of ``radius`` in C, shape (count,)."""
    return sample_ball(rng, count, 1, radius)[:, 0]


def sample_parallelogram(rng, count, tau):
    """Points s + t*tau with s, t uniform in [0, 1]."""
    s = rng.random(count)
    t = rng.random(count)
    return s + t * complex(tau)


def sample_total_space(rng, count, tau, fiber_dim, fiber_radius=DEFAULT_FIBER_RADIUS):
    """Points (z, fiber) with z in the closed fundamental parallelogram, shape (count, 1 + fiber_dim)."""
    base = sample_parallelogram(rng, count, tau)
    fiber = sample_ball(rng, count, fiber_dim, fiber_radius)
    return np.column_stack([base, fiber])
