import numpy as np
import pytest

from sixphoton.qstate import reference_state


@pytest.fixture(scope="session")
def psi6():
    return reference_state("Psi6Plus")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def haar_ket(rng, dim=2):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def haar_unitary(rng, dim=2):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
