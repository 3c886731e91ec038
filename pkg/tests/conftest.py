import numpy as np
import pytest

from antizeno import DensityMatrix, HermitianOperator

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
IDENTITY2 = np.eye(2, dtype=np.complex128)


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(0.5 * (m + m.conj().T))


def random_density(rng, dim):
    """A full-rank random state via the Wishart construction."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w = g @ g.conj().T
    return DensityMatrix(w / np.trace(w).real)


def random_unit_vector(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def bloch_projector(w):
    wx, wy, wz = w
    return HermitianOperator(
        0.5
        * np.array(
            [[1.0 + wz, wx - 1j * wy], [wx + 1j * wy, 1.0 - wz]],
            dtype=np.complex128,
        )
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
