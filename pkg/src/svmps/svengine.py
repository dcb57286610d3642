"""Exact sparse state-vector engine.

Assembles the subspace Hamiltonian in CSR form by per-term bit action,
applies exponentiated qubit-excitation generators in closed form and
evaluates energies and pool gradients.

A qubit-excitation generator T couples two occupation patterns on its
support and vanishes elsewhere, so T^3 = -T and

    exp(theta T) = I + sin(theta) T + (1 - cos(theta)) T^2

is exact: a Givens rotation on each matching pair of configurations.  The
generators carry no Jordan-Wigner strings, which keeps the rotation planes
local to the support qubits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .cibasis import CiBasis, Configuration
from .pauli import PauliSum
from .sparse import CsrMatrix, SparseVector, dot, norm, spmspv

NORM_DRIFT_TOL = 1e-9
ASSEMBLY_CHUNK_ENTRIES = 4_000_000


@dataclass(frozen=True)
class ExcitationOperator:
    """Spin-conserving single or double excitation between qubit sets."""

    kind: str                 # "single" | "double"
    occ: tuple[int, ...]      # source qubits, ascending
    virt: tuple[int, ...]     # target qubits, ascending

    def __post_init__(self):
        expected = {"single": 1, "double": 2}.get(self.kind)
        if expected is None:
            raise ValueError(f"unknown excitation kind {self.kind!r}")
        if len(self.occ) != expected or len(self.virt) != expected:
            raise ValueError("index count does not match the excitation kind")
        object.__setattr__(self, "occ", tuple(sorted(self.occ)))
        object.__setattr__(self, "virt", tuple(sorted(self.virt)))
        touched = set(self.occ) | set(self.virt)
        if len(touched) != 2 * expected:
            raise ValueError("excitation indices must be distinct")

    @property
    def occ_mask(self) -> int:
        m = 0
        for q in self.occ:
            m |= 1 << q
        return m

    @property
    def virt_mask(self) -> int:
        m = 0
        for q in self.virt:
            m |= 1 << q
        return m

    @property
    def flip_mask(self) -> int:
        return self.occ_mask | self.virt_mask

    def label(self) -> str:
        o = ",".join(map(str, self.occ))
        v = ",".join(map(str, self.virt))
        return f"{self.kind[0]}:{o}->{v}"

    def __repr__(self) -> str:
        return f"ExcitationOperator({self.label()})"


@dataclass(frozen=True)
class AnsatzElement:
    op: ExcitationOperator
    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise ValueError("ansatz angle must be finite")


@dataclass(frozen=True)
class SvState:
    """Sparse state over a CI basis."""

    basis: CiBasis
    vec: SparseVector

    @classmethod
    def from_configuration(cls, basis: CiBasis, c: Configuration) -> "SvState":
        pos = basis.index_of(c)
        if pos is None:
            raise ValueError(f"configuration {c.ket()} is outside the basis sector")
        return cls(basis, SparseVector.basis_state(len(basis), pos))

    @property
    def nnz(self) -> int:
        return self.vec.nnz

    def configurations(self) -> np.ndarray:
        """Occupation integers of the support, ascending."""
        return self.basis.states[self.vec.indices]


SECTOR_LEAK_TOL = 1e-10


def assemble_subspace_hamiltonian(h: PauliSum, basis: CiBasis) -> CsrMatrix:
    """Subspace matrix M[i, j] = <state_i| h |state_j> as CSR.

    A single Pauli word maps |b> to a phase times |b ^ x>, which can leave
    the spin sector; for a spin-conserving Hamiltonian those transitions
    cancel among all words sharing one x mask (X0X1 against Y0Y1 and so on).
    Terms are therefore accumulated per flip mask, and only a net amplitude
    escaping the sector above tolerance signals a non-conserving input.
    """
    states = basis.states
    n_states = len(states)
    if h.n_qubits != basis.n_qubits:
        raise ValueError("Pauli sum and basis disagree on qubit count")
    cols = np.arange(n_states, dtype=np.int64)

    groups: dict[int, list[int]] = {}
    for t in range(len(h)):
        groups.setdefault(int(h.xs[t]), []).append(t)

    rows_acc, cols_acc, vals_acc = [], [], []
    for x in sorted(groups):
        amp = np.zeros(n_states)
        for t in groups[x]:
            z = int(h.zs[t])
            coeff = float(h.coeffs[t])
            n_y = (x & z).bit_count()
            if n_y % 2:
                raise ValueError("odd-Y Pauli term has imaginary matrix elements; "
                                 "Hamiltonian is not real")
            sign_y = -1.0 if n_y % 4 == 2 else 1.0
            z_parity = np.bitwise_count(states & z) & 1
            amp += (coeff * sign_y) * (1.0 - 2.0 * z_parity.astype(np.float64))
        if x == 0:
            keep = amp != 0.0
            rows_acc.append(cols[keep])
            cols_acc.append(cols[keep])
            vals_acc.append(amp[keep])
            continue
        targets = states ^ x
        pos, found = basis.try_positions(targets)
        leak = np.max(np.abs(amp[~found]), initial=0.0)
        if leak > SECTOR_LEAK_TOL:
            raise ValueError(
                f"Pauli terms with flip mask {x:#x} leak amplitude {leak:.3e} "
                "outside the sector; Hamiltonian is not spin-conserving"
            )
        keep = found & (amp != 0.0)
        rows_acc.append(pos[keep])
        cols_acc.append(cols[keep])
        vals_acc.append(amp[keep])

    if not rows_acc:
        return CsrMatrix.from_coo(n_states, n_states, [], [], [])
    return CsrMatrix.from_coo(
        n_states, n_states,
        np.concatenate(rows_acc), np.concatenate(cols_acc), np.concatenate(vals_acc),
    )


def expectation(m: CsrMatrix, s: SvState, n_workers: int = 1) -> float:
    """<psi| m |psi>, exact."""
    return dot(s.vec, spmspv(m, s.vec, n_workers=n_workers))


def _pattern_classes(op: ExcitationOperator, configs: np.ndarray):
    """Boolean masks of support entries in the source / target pattern."""
    om, vm = op.occ_mask, op.virt_mask
    src = ((configs & om) == om) & ((configs & vm) == 0)
    tgt = ((configs & vm) == vm) & ((configs & om) == 0)
    return src, tgt


def apply_generator(op: ExcitationOperator, s: SvState) -> SparseVector:
    """T|psi> for the antisymmetric generator (source -> +target)."""
    v = s.vec
    if v.nnz == 0:
        return SparseVector.empty(v.dim)
    configs = s.configurations()
    src, tgt = _pattern_classes(op, configs)
    flip = op.flip_mask
    idx_parts, val_parts = [], []
    if np.any(src):
        idx_parts.append(s.basis.positions_of(configs[src] ^ flip))
        val_parts.append(v.values[src])
    if np.any(tgt):
        idx_parts.append(s.basis.positions_of(configs[tgt] ^ flip))
        val_parts.append(-v.values[tgt])
    if not idx_parts:
        return SparseVector.empty(v.dim)
    return SparseVector.from_entries(
        v.dim, np.concatenate(idx_parts), np.concatenate(val_parts)
    )


def apply_qeb_exponential(op: ExcitationOperator, theta: float, s: SvState) -> SvState:
    """exp(theta T)|psi> in closed form; unitary, stays in the sector."""
    v = s.vec
    if v.nnz == 0 or theta == 0.0:
        return s
    configs = s.configurations()
    src, tgt = _pattern_classes(op, configs)
    rotated = src | tgt
    if not np.any(rotated):
        return s
    c, sn = np.cos(theta), np.sin(theta)
    flip = op.flip_mask

    scale_fac = np.where(rotated, c, 1.0)
    idx_parts = [v.indices]
    val_parts = [v.values * scale_fac]
    if np.any(src):
        idx_parts.append(s.basis.positions_of(configs[src] ^ flip))
        val_parts.append(sn * v.values[src])
    if np.any(tgt):
        idx_parts.append(s.basis.positions_of(configs[tgt] ^ flip))
        val_parts.append(-sn * v.values[tgt])
    out = SparseVector.from_entries(
        v.dim, np.concatenate(idx_parts), np.concatenate(val_parts)
    )
    drift = abs(norm(out) - norm(v))
    if drift > NORM_DRIFT_TOL * max(1.0, norm(v)):
        raise RuntimeError(f"norm drift {drift:.3e} in qeb exponential")
    return SvState(s.basis, out)


def apply_ansatz(basis: CiBasis, hf: Configuration, ops, thetas) -> SvState:
    state = SvState.from_configuration(basis, hf)
    for op, theta in zip(ops, thetas):
        state = apply_qeb_exponential(op, float(theta), state)
    return state


def pool_gradient(m: CsrMatrix, s: SvState, op: ExcitationOperator,
                  n_workers: int = 1) -> float:
    """dE/dtheta at theta=0 for appending exp(theta T): 2 <H psi | T psi>."""
    w = spmspv(m, s.vec, n_workers=n_workers)
    return 2.0 * dot(w, apply_generator(op, s))


def pool_gradients(m: CsrMatrix, s: SvState, ops, n_workers: int = 1) -> np.ndarray:
    """Gradients for a whole pool; H|psi> is computed once and shared."""
    w = spmspv(m, s.vec, n_workers=n_workers)
    return np.array([2.0 * dot(w, apply_generator(op, s)) for op in ops])


def ansatz_energy_gradient(m: CsrMatrix, basis: CiBasis, hf: Configuration,
                           ops, thetas, n_workers: int = 1):
    """Energy and full analytic gradient of the ansatz parameters.

    One forward pass stores the intermediate states; the adjoint state
    H|psi> is then pulled backwards through the inverse rotations, giving
    all k partial derivatives for one extra matrix application.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    k = len(ops)
    states = [SvState.from_configuration(basis, hf)]
    for op, theta in zip(ops, thetas):
        states.append(apply_qeb_exponential(op, float(theta), states[-1]))
    psi = states[-1]
    w = spmspv(m, psi.vec, n_workers=n_workers)
    energy = dot(psi.vec, w)
    grad = np.zeros(k)
    lam = SvState(basis, w)
    for i in range(k - 1, -1, -1):
        grad[i] = 2.0 * dot(lam.vec, apply_generator(ops[i], states[i + 1]))
        lam = apply_qeb_exponential(ops[i], -float(thetas[i]), lam)
    return energy, grad


_CSR_MAGIC = b"SVMPSCSR"
_CSR_VERSION = 1


def save_csr(path, m: CsrMatrix) -> None:
    """Little-endian binary cache: header then offsets/indices/values."""
    with open(path, "wb") as fh:
        fh.write(_CSR_MAGIC)
        fh.write(struct.pack("<IQQQ", _CSR_VERSION, m.n_rows, m.n_cols, m.nnz))
        fh.write(m.row_offsets.astype("<i8").tobytes())
        fh.write(m.col_indices.astype("<i8").tobytes())
        fh.write(m.values.astype("<f8").tobytes())


def load_csr(path) -> CsrMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CSR_MAGIC))
        if magic != _CSR_MAGIC:
            raise ValueError("not a CSR cache file")
        version, n_rows, n_cols, nnz = struct.unpack("<IQQQ", fh.read(28))
        if version != _CSR_VERSION:
            raise ValueError(f"unsupported CSR cache version {version}")
        offsets = np.frombuffer(fh.read(8 * (n_rows + 1)), dtype="<i8")
        cols = np.frombuffer(fh.read(8 * nnz), dtype="<i8")
        vals = np.frombuffer(fh.read(8 * nnz), dtype="<f8")
    m = CsrMatrix(n_rows, n_cols, offsets.copy(), cols.copy(), vals.copy())
    m.validate()
    return m
