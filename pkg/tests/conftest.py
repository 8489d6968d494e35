import numpy as np
import pytest

from shiftspec.holo import Polynomial
from shiftspec.spectra import OperatorSpec
from shiftspec.weights import WeightSequence


def random_weights(rng, max_prefix=2, lo=0.6, hi=3.0):
    kind = int(rng.integers(0, 3))
    prefix = tuple(rng.uniform(lo, hi, int(rng.integers(0, max_prefix + 1))))
    if kind == 0:
        return WeightSequence.constant(rng.uniform(lo, hi), prefix)
    if kind == 1:
        period = int(rng.integers(1, 5))
        return WeightSequence.periodic(rng.uniform(lo, hi, period), prefix)
    return WeightSequence.doubling_blocks(rng.uniform(lo, hi), rng.uniform(lo, hi), prefix)


def random_poly(rng, max_degree=4, span=2.0):
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = rng.uniform(-span, span, (degree + 1, 2))
    return Polynomial(tuple(complex(a, b) for a, b in coeffs))


def random_instance(rng, **kw):
    return OperatorSpec(random_weights(rng), random_poly(rng, **kw))


def naive_window_product(w, k, n):
    """Independent oracle: plain float multiplication, no log space."""
    out = 1.0
    for i in range(k, k + n):
        out *= w.value(i)
    return out


def naive_kappa_scan(w, n, k_limit=5000):
    """Independent oracle: brute minimum over a long explicit k scan."""
    return min(naive_window_product(w, k, n) for k in range(1, k_limit + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
