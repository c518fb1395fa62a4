import numpy as np
import pytest


def random_density_matrix(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    """Random full-rank mixed state: normalized A A^dag with Gaussian A."""
    dim = 1 << n_qubits
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))
