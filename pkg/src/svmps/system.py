"""Molecular problem setup shared by the CLI, the drivers and the tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .cibasis import CiBasis, Configuration, enumerate_basis
from .fcidump import IntegralSet, load_fcidump, parse_fcidump
from .mapping import SecondQuantizedHamiltonian, hartree_fock_reference, jordan_wigner, to_spin_orbital
from .pauli import PauliSum


def bundled_fcidump(name: str) -> Path:
    """Path of a fixture shipped with the package (h2, h4, ..., h12)."""
    path = resources.files("svmps").joinpath("data", f"{name.lower()}.fcidump")
    with resources.as_file(path) as concrete:
        if not concrete.exists():
            raise FileNotFoundError(f"no bundled FCIDUMP named {name!r}")
        return concrete


@dataclass
class MolecularSystem:
    """Everything derived from one FCIDUMP under one ordering convention."""

    integrals: IntegralSet
    ordering: str
    sq: SecondQuantizedHamiltonian
    hamiltonian: PauliSum
    hf: Configuration
    _basis: CiBasis | None = field(default=None, repr=False)

    @classmethod
    def from_integrals(cls, ints: IntegralSet, ordering: str = "interleaved") -> "MolecularSystem":
        sq = to_spin_orbital(ints, ordering)
        h = jordan_wigner(sq)
        hf = hartree_fock_reference(ints.nelec, sq.n_spin_orbitals, ordering, ints.ms2)
        return cls(integrals=ints, ordering=ordering, sq=sq, hamiltonian=h, hf=hf)

    @classmethod
    def from_fcidump(cls, path, ordering: str = "interleaved") -> "MolecularSystem":
        return cls.from_integrals(load_fcidump(path), ordering)

    @classmethod
    def from_fcidump_text(cls, text: str, ordering: str = "interleaved") -> "MolecularSystem":
        return cls.from_integrals(parse_fcidump(text), ordering)

    @property
    def n_qubits(self) -> int:
        return self.sq.n_spin_orbitals

    @property
    def n_alpha(self) -> int:
        return self.integrals.n_alpha

    @property
    def n_beta(self) -> int:
        return self.integrals.n_beta

    @property
    def basis(self) -> CiBasis:
        if self._basis is None:
            self._basis = enumerate_basis(self.n_qubits, self.n_alpha,
                                          self.n_beta, self.ordering)
        return self._basis
