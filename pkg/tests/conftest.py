import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_small_dataset(rng, n=None, h_lo=0.15, h_hi=0.8):
    """A small random dataset plus bandwidths, for brute-force comparisons."""
    n = n or int(rng.integers(3, 51))
    times = rng.exponential(1.0, n) + 0.05
    xs = rng.normal(0.0, 1.0, n)
    ys = rng.normal(0.0, 1.0, n)
    hx = float(rng.uniform(h_lo, h_hi))
    hy = float(rng.uniform(h_lo, h_hi))
    return times, xs, ys, hx, hy
