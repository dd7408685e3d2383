import numpy as np
import pytest

from annulus_split.annulus_core import Annulus, EvaluableFunction, make_grid, sample
from annulus_split.zero_mean import ZeroMeanCoefficients, random_zero_mean, synthesize


@pytest.fixture
def annulus() -> Annulus:
    return Annulus(1.0, 2.0)


@pytest.fixture
def wide_annulus() -> Annulus:
    """gamma = 2, centre bound 1."""
    return Annulus(1.0, 3.0)


@pytest.fixture
def grid(annulus):
    return make_grid(annulus, 33, 256)


@pytest.fixture
def inverse_pair() -> EvaluableFunction:
    return EvaluableFunction(lambda z: 1.0 / z + 1.0 / np.conj(z), "1/z + 1/conj z")


@pytest.fixture
def inverse_pair_coeffs() -> ZeroMeanCoefficients:
    return ZeroMeanCoefficients.from_harmonics({1: [1.0], -1: [1.0]})


@pytest.fixture
def rotating_pair_coeffs() -> ZeroMeanCoefficients:
    """z / conj z + conj z / z^2."""
    return ZeroMeanCoefficients.from_harmonics({2: [0.0, 1.0], -3: [0.0, 1.0, 0.0]})


@pytest.fixture
def random_coeffs(annulus) -> ZeroMeanCoefficients:
    return random_zero_mean(7, 8, 0.5, annulus)


@pytest.fixture
def sampled_inverse_pair(inverse_pair, grid):
    return sample(inverse_pair, grid)


@pytest.fixture
def sampled_random(random_coeffs, grid):
    return sample(synthesize(random_coeffs), grid)


@pytest.fixture
def term_scale(annulus):
    """Largest modulus on A of each monomial of harmonic n, for termwise coefficient comparisons."""

    def scale(n: int) -> np.ndarray:
        j = np.arange(abs(n))
        return np.maximum(annulus.r1 ** (2 * j - abs(n)), annulus.r2 ** (2 * j - abs(n)))

    return scale
