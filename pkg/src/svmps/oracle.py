"""Brute-force dense references.

Everything here recomputes quantities through an independent route (Kronecker
products, explicit fermionic ladder matrices, dense eigensolves, full tensor
contractions) so the engines can be validated against it.  None of these
functions call engine code, and the engines never call back into this module
outside the test suite and the ``oracle`` CLI subcommand.

Size guards are hard errors: oracles must never dominate runtimes silently.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .cibasis import CiBasis
from .pauli import PauliSum
from .sparse import CsrMatrix

MAX_PAULI_QUBITS = 14
MAX_FERMION_QUBITS = 14
MAX_EXPM_DIM = 1 << 12
MAX_MPS_QUBITS = 14
MAX_MPO_QUBITS = 10

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_from_pauli(h: PauliSum, max_qubits: int = MAX_PAULI_QUBITS) -> np.ndarray:
    """Dense matrix of a Pauli sum by Kronecker-product accumulation.

    Qubit 0 is the least significant bit, so it sits rightmost in the
    Kronecker chain.
    """
    n = h.n_qubits
    if n > max_qubits:
        raise ValueError(f"dense_from_pauli limited to {max_qubits} qubits, got {n}")
    total = scipy.sparse.csr_matrix((1 << n, 1 << n), dtype=complex)
    for coeff, word in h.term_strings():
        acc = scipy.sparse.identity(1, dtype=complex, format="csr")
        for letter in reversed(word):  # qubit n-1 first, qubit 0 last
            acc = scipy.sparse.kron(acc, scipy.sparse.csr_matrix(_PAULI_MATS[letter]),
                                    format="csr")
        total = total + coeff * acc
    dense = total.toarray()
    if np.max(np.abs(dense.imag), initial=0.0) > 1e-12:
        raise ValueError("Pauli sum has a non-real dense matrix")
    return dense.real


def _ladder_matrices(n_spin_orbitals: int):
    """Sparse annihilation matrices a_p over the full occupation basis.

    Built directly from the fermionic action on occupation integers,
    with the canonical sign (-1)^(number of occupied orbitals below p).
    """
    if n_spin_orbitals > MAX_FERMION_QUBITS:
        raise ValueError(f"fermionic oracle limited to {MAX_FERMION_QUBITS} spin orbitals")
    dim = 1 << n_spin_orbitals
    b = np.arange(dim, dtype=np.int64)
    ops = []
    for p in range(n_spin_orbitals):
        occupied = (b >> p) & 1 == 1
        src = b[occupied]
        tgt = src ^ (1 << p)
        signs = 1.0 - 2.0 * (np.bitwise_count(src & ((1 << p) - 1)) & 1)
        ops.append(scipy.sparse.csr_matrix((signs, (tgt, src)), shape=(dim, dim)))
    return ops


def dense_fermionic_hamiltonian(sq) -> np.ndarray:
    """Full-space Hamiltonian from ladder-matrix products (no Pauli algebra)."""
    n = sq.n_spin_orbitals
    ann = _ladder_matrices(n)
    cre = [a.T.tocsr() for a in ann]
    dim = 1 << n
    total = scipy.sparse.identity(dim, format="csr") * sq.core_energy
    for p, q in zip(*np.nonzero(sq.h)):
        total = total + sq.h[p, q] * (cre[p] @ ann[q])
    for p, q, r, s in zip(*np.nonzero(sq.g)):
        total = total + (0.5 * sq.g[p, q, r, s]) * (cre[p] @ cre[r] @ ann[s] @ ann[q])
    return total.toarray()


def restrict_to_basis(full: np.ndarray, basis: CiBasis) -> np.ndarray:
    """Restrict a full-space matrix to the rows/columns of a CI sector."""
    states = basis.states
    return full[np.ix_(states, states)]


def fci_ground_energy(m, cross_check: str | bool = "auto", tol: float = 1e-12):
    """Lowest eigenpair via a restarted Krylov solve.

    ``cross_check`` runs a full dense eigensolve and demands agreement within
    1e-10; "auto" enables it up to dimension 1024 (tests push it to 4096).
    """
    if isinstance(m, CsrMatrix):
        mat = scipy.sparse.csr_matrix(
            (m.values, m.col_indices, m.row_offsets), shape=(m.n_rows, m.n_cols)
        )
    elif isinstance(m, np.ndarray):
        mat = m
    elif scipy.sparse.issparse(m):
        mat = m.tocsr()
    else:
        raise TypeError(f"unsupported matrix type {type(m)!r}")
    dim = mat.shape[0]
    if mat.shape[0] != mat.shape[1]:
        raise ValueError("ground-state solve needs a square matrix")

    if dim <= 2:
        dense = mat.toarray() if scipy.sparse.issparse(mat) else np.asarray(mat)
        vals, vecs = np.linalg.eigh(dense)
        return float(vals[0]), vecs[:, 0]

    rng = np.random.default_rng(12345)
    v0 = rng.standard_normal(dim)
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", tol=tol,
                                               v0=v0, maxiter=100 * dim)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise RuntimeError(f"Krylov eigensolver did not converge: {exc}") from exc
    energy = float(vals[0])
    vec = vecs[:, 0]

    do_check = cross_check is True or (cross_check == "auto" and dim <= 1024)
    if do_check:
        dense = mat.toarray() if scipy.sparse.issparse(mat) else np.asarray(mat)
        dense_val = float(np.linalg.eigvalsh(dense)[0])
        if abs(dense_val - energy) > 1e-10:
            raise RuntimeError(
                f"Krylov/dense eigenvalue disagreement: {energy} vs {dense_val}"
            )
    return energy, vec


def dense_expm(generator: np.ndarray, theta: float) -> np.ndarray:
    """exp(theta * G) for an antisymmetric G (scaling-and-squaring Pade)."""
    generator = np.asarray(generator, dtype=np.float64)
    if generator.shape[0] > MAX_EXPM_DIM:
        raise ValueError(f"dense_expm limited to dimension {MAX_EXPM_DIM}")
    if np.max(np.abs(generator + generator.T), initial=0.0) > 1e-12:
        raise ValueError("generator is not antisymmetric")
    out = scipy.linalg.expm(theta * generator)
    defect = np.max(np.abs(out @ out.T - np.eye(out.shape[0])))
    if defect > 1e-12:
        raise RuntimeError(f"orthogonality defect {defect:.3e} in dense_expm")
    return out


def dense_from_mps(s) -> np.ndarray:
    """Full amplitude vector of an MPS (index = sum of bit_k 2^k)."""
    n = len(s.cores)
    if n > MAX_MPS_QUBITS:
        raise ValueError(f"dense_from_mps limited to {MAX_MPS_QUBITS} qubits")
    cur = s.cores[0][0]  # (2, r1)
    for core in s.cores[1:]:
        cur = np.einsum("dr,rps->pds", cur, core)
        cur = cur.reshape(-1, core.shape[2])
    return cur[:, 0]


def dense_from_mpo(m) -> np.ndarray:
    """Full matrix of an MPO (row index = output bits, col = input bits)."""
    n = len(m.cores)
    if n > MAX_MPO_QUBITS:
        raise ValueError(f"dense_from_mpo limited to {MAX_MPO_QUBITS} qubits")
    cur = m.cores[0][0]  # (2, 2, R1)
    for core in m.cores[1:]:
        cur = np.einsum("abR,RpqS->paqbS", cur, core)
        cur = cur.reshape(cur.shape[0] * cur.shape[1],
                          cur.shape[2] * cur.shape[3], core.shape[3])
    return cur[:, :, 0]
