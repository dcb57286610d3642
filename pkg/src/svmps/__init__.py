"""svmps: sparse state-vector and tensor-train emulation of adaptive
variational eigensolvers for molecular Hamiltonians."""

__version__ = "0.1.0"

from .cibasis import (
    CiBasis,
    Configuration,
    enumerate_basis,
    hartree_fock_configuration,
    sector_dimensions,
    subspace_stats,
)
from .fcidump import IntegralSet, load_fcidump, parse_fcidump
from .mapping import (
    SecondQuantizedHamiltonian,
    hartree_fock_reference,
    jordan_wigner,
    to_spin_orbital,
)
from .pauli import PauliSum, PauliTerm
from .sparse import CsrMatrix, SparseVector, axpy, dot, normalize, scale, spmspv
from .svengine import (
    AnsatzElement,
    ExcitationOperator,
    SvState,
    apply_qeb_exponential,
    assemble_subspace_hamiltonian,
    expectation,
    pool_gradient,
)
from .system import MolecularSystem, bundled_fcidump

__all__ = [name for name in dir() if not name.startswith("_")]
