import numpy as np
import pytest

from heterodro.measures import make_finite_measure


def random_measure(rng, upper=1.0, max_atoms=5):
    """Random finite measure with 1..max_atoms atoms on [0, upper]."""
    k = int(rng.integers(1, max_atoms + 1))
    pts = rng.uniform(0.0, upper, size=k)
    wts = rng.dirichlet(np.ones(k))
    return make_finite_measure(pts.tolist(), wts.tolist(), upper)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
