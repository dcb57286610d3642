"""Shared fixtures: parsed test systems and their oracle references."""

import numpy as np
import pytest

from svmps import oracle
from svmps.svengine import assemble_subspace_hamiltonian
from svmps.system import MolecularSystem, bundled_fcidump


@pytest.fixture(scope="session")
def h2():
    return MolecularSystem.from_fcidump(bundled_fcidump("h2"))


@pytest.fixture(scope="session")
def h4():
    return MolecularSystem.from_fcidump(bundled_fcidump("h4"))


@pytest.fixture(scope="session")
def h6():
    return MolecularSystem.from_fcidump(bundled_fcidump("h6"))


@pytest.fixture(scope="session")
def h2_csr(h2):
    return assemble_subspace_hamiltonian(h2.hamiltonian, h2.basis)


@pytest.fixture(scope="session")
def h4_csr(h4):
    return assemble_subspace_hamiltonian(h4.hamiltonian, h4.basis)


@pytest.fixture(scope="session")
def h6_csr(h6):
    return assemble_subspace_hamiltonian(h6.hamiltonian, h6.basis)


@pytest.fixture(scope="session")
def h2_fci(h2_csr):
    return oracle.fci_ground_energy(h2_csr)[0]


@pytest.fixture(scope="session")
def h4_fci(h4_csr):
    return oracle.fci_ground_energy(h4_csr)[0]


@pytest.fixture(scope="session")
def h6_fci(h6_csr):
    return oracle.fci_ground_energy(h6_csr)[0]


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
