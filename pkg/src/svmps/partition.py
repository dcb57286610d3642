"""Hierarchical Hamiltonian partitioning and the dual SV/MPS state.

The qubit chain is cut into 2^eta equal blocks.  Terms supported inside a
single block stay "local" and are evaluated exactly through the sparse
engine; terms crossing a block edge go to a boundary group keyed by
(level, cut) and are compiled to bond-capped MPOs evaluated on the MPS
representation.  The term sets partition exactly, so

    <H> = <Psi_SV| H_local |Psi_SV> + sum_groups <Psi_MPS| B |Psi_MPS>

recovers the full expectation value additively, with truncation error
confined to the boundary contributions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cibasis import CiBasis, Configuration
from .mpsengine import (
    MpoBatch,
    MpsState,
    TruncationLog,
    apply_mpo_exact,
    apply_qeb_gate,
    expectation_mps,
    from_configuration,
    mpo_from_pauli_sum,
    mps_norm,
    qeb_generator_mpo,
    sandwich,
    scale_mps,
)
from .pauli import PauliSum
from .sparse import CsrMatrix, dot, spmspv
from .svengine import (
    ExcitationOperator,
    SvState,
    apply_generator,
    apply_qeb_exponential,
    assemble_subspace_hamiltonian,
)

COMPILE_DELTA = 1e-14
COMPILE_CAP = 100


def classify_support(support: int, eta: int, n_qubits: int):
    """Group key for one term: None when block-local, else (level, cut).

    The level is the smallest i at which the support spans more than one
    level-i block; the cut index counts the level-i cuts from the left
    (cuts at even multiples belong to coarser levels and cannot be the
    leftmost crossed one).
    """
    if support == 0:
        return None
    lo = (support & -support).bit_length() - 1
    hi = support.bit_length() - 1
    if lo // (n_qubits >> eta) == hi // (n_qubits >> eta):
        return None
    for level in range(1, eta + 1):
        width = n_qubits >> level
        if lo // width != hi // width:
            multiple = lo // width + 1
            return (level, (multiple + 1) // 2)
    raise AssertionError("unreachable: crossing term with no crossing level")


@dataclass
class PartitionedHamiltonian:
    eta: int
    n_qubits: int
    block_size: int
    local_terms: PauliSum
    boundary_groups: dict            # (level, cut) -> PauliSum
    boundary_mpos: dict              # (level, cut) -> MpoBatch
    local_csr: CsrMatrix | None = None
    basis: CiBasis | None = None

    @property
    def group_keys(self) -> list:
        return sorted(self.boundary_groups)

    def iter_boundary_parts(self):
        for key in self.group_keys:
            for part in self.boundary_mpos[key].parts:
                yield key, part

    def attach_basis(self, basis: CiBasis):
        self.basis = basis
        self.local_csr = assemble_subspace_hamiltonian(self.local_terms, basis)

    def report(self) -> dict:
        per_level: dict[int, int] = {}
        for (level, _), terms in self.boundary_groups.items():
            per_level[level] = per_level.get(level, 0) + len(terms)
        groups = []
        for key in self.group_keys:
            batch = self.boundary_mpos[key]
            groups.append({
                "level": key[0],
                "cut": key[1],
                "n_terms": len(self.boundary_groups[key]),
                "mpo_parts": len(batch.parts),
                "max_bond": batch.max_bond,
                "bond_profile": batch.bond_profile(),
            })
        return {
            "eta": self.eta,
            "n_qubits": self.n_qubits,
            "block_size": self.block_size,
            "n_local_terms": len(self.local_terms),
            "n_boundary_terms": sum(len(g) for g in self.boundary_groups.values()),
            "per_level_boundary_terms": {str(k): v for k, v in sorted(per_level.items())},
            "local_csr_nnz": None if self.local_csr is None else self.local_csr.nnz,
            "groups": groups,
        }


def partition(h: PauliSum, eta: int, n_qubits: int | None = None, *,
              basis: CiBasis | None = None, delta: float = COMPILE_DELTA,
              cap: int = COMPILE_CAP) -> PartitionedHamiltonian:
    """Split a Pauli sum into block-local and boundary-crossing groups."""
    n = h.n_qubits if n_qubits is None else n_qubits
    if n != h.n_qubits:
        raise ValueError("n_qubits disagrees with the Pauli sum")
    if eta < 1:
        raise ValueError("partitioning level must be >= 1")
    if n % (1 << eta):
        raise ValueError(f"2^eta = {1 << eta} does not divide n_qubits = {n}")
    if len(h) == 0:
        raise ValueError("empty Hamiltonian")

    keys = [classify_support(int(s), eta, n) for s in h.supports]
    local_mask = np.array([k is None for k in keys])
    groups: dict[tuple, np.ndarray] = {}
    for key in sorted({k for k in keys if k is not None}):
        groups[key] = np.array([k == key for k in keys])

    local_terms = h.select(local_mask)
    boundary_groups = {key: h.select(mask) for key, mask in groups.items()}
    boundary_mpos = {key: mpo_from_pauli_sum(g, delta, cap)
                     for key, g in boundary_groups.items()}
    ph = PartitionedHamiltonian(
        eta=eta, n_qubits=n, block_size=n >> eta,
        local_terms=local_terms, boundary_groups=boundary_groups,
        boundary_mpos=boundary_mpos,
    )
    if basis is not None:
        ph.attach_basis(basis)
    return ph


@dataclass
class DualState:
    """Paired exact-sparse and compressed representations of one ansatz."""

    sv: SvState
    mps: MpsState
    sync_log: TruncationLog = field(default_factory=TruncationLog)

    @classmethod
    def hartree_fock(cls, basis: CiBasis, hf: Configuration) -> "DualState":
        return cls(sv=SvState.from_configuration(basis, hf),
                   mps=from_configuration(hf))


def apply_ansatz_dual(op: ExcitationOperator, theta: float, d: DualState,
                      delta: float, max_bond: int | None = None,
                      log: TruncationLog | None = None,
                      rule: str = "value") -> DualState:
    """Apply one exponentiated pool operator to both representations.

    The sparse side is exact; the MPS side goes through the gate MPO with
    zip-up truncation at ``delta`` and is rescaled back to unit norm (the
    gate is unitary, so any norm loss is truncation artifact).
    """
    sv = apply_qeb_exponential(op, theta, d.sv)
    mps, oplog = apply_qeb_gate(op, theta, d.mps, delta, max_bond=max_bond,
                                rule=rule)
    nrm = mps_norm(mps)
    if nrm > 0:
        mps = scale_mps(mps, 1.0 / nrm)
    target = log if log is not None else d.sync_log
    target.extend(oplog)
    return DualState(sv=sv, mps=mps, sync_log=d.sync_log)


def expectation_partitioned(ph: PartitionedHamiltonian, d: DualState,
                            n_workers: int = 1) -> float:
    """Exact local expectation plus boundary MPS contractions (additive)."""
    if ph.local_csr is None:
        raise ValueError("partition has no attached basis / local CSR")
    local = dot(d.sv.vec, spmspv(ph.local_csr, d.sv.vec, n_workers=n_workers))
    boundary = 0.0
    for key in ph.group_keys:
        boundary += expectation_mps(ph.boundary_mpos[key], d.mps)
    return local + boundary


def pool_gradient_partitioned(ph: PartitionedHamiltonian, d: DualState,
                              op: ExcitationOperator) -> float:
    """2<H psi|T psi> assembled additively: sparse local + exact boundary
    contractions (no truncation beyond what the states already carry)."""
    if ph.local_csr is None:
        raise ValueError("partition has no attached basis / local CSR")
    w = spmspv(ph.local_csr, d.sv.vec)
    local = dot(w, apply_generator(op, d.sv))
    t_psi = apply_mpo_exact(qeb_generator_mpo(op, ph.n_qubits), d.mps)
    boundary = 0.0
    for _, part in ph.iter_boundary_parts():
        boundary += sandwich(t_psi, part, d.mps)
    return 2.0 * (local + boundary)
