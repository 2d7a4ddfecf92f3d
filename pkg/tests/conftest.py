import numpy as np
import pytest

from qudit_swap.protocol import SchmidtCoeffs
from qudit_swap.tensor_core import make_state


def random_coeffs(rng, d, complex_=True):
    v = rng.normal(size=d)
    if complex_:
        v = v + 1j * rng.normal(size=d)
    return SchmidtCoeffs.from_values(v, normalize=True)


def simplex_coeffs(rng, d):
    return SchmidtCoeffs.from_values(np.sqrt(rng.dirichlet(np.ones(d))), normalize=True)


def haar_state(rng, dims):
    n = int(np.prod(dims))
    return make_state(rng.normal(size=n) + 1j * rng.normal(size=n), dims, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
