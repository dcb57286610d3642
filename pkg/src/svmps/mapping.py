"""Second quantization and the fermion-to-qubit mapping.

Spatial integrals are expanded to spin orbitals (interleaved or blocked
ordering), then mapped to a real Pauli sum with Jordan-Wigner:

    a_p^dag -> Z_0 .. Z_{p-1} (X_p - i Y_p) / 2

with qubit 0 the least significant bit.  The two-body part keeps the plain
chemists' operator order with an explicit 1/2 prefactor:

    H = E_core + sum h[P,Q] a_P^dag a_Q
               + 1/2 sum g[P,Q,R,S] a_P^dag a_R^dag a_S a_Q.

All imaginary parts must cancel below tolerance (real Hamiltonian); a
residual signals a non-Hermitian input and is raised as an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cibasis import Configuration, check_ordering, hartree_fock_configuration, qubit_index
from .fcidump import IntegralSet
from .pauli import PauliSum, merge_terms, mul_words

JW_DROP_TOL = 1e-12
JW_IMAG_TOL = 1e-12


@dataclass
class SecondQuantizedHamiltonian:
    """Spin-orbital coefficient tables (plain chemists' two-body form)."""

    n_spin_orbitals: int
    core_energy: float
    h: np.ndarray  # (N, N)
    g: np.ndarray  # (N, N, N, N), convention recorded below
    ordering: str
    convention: str = "chemists-plain"

    def validate(self):
        if np.max(np.abs(self.h - self.h.T), initial=0.0) > 1e-12:
            raise ValueError("one-body spin-orbital table is not symmetric")


def to_spin_orbital(ints: IntegralSet, ordering: str = "interleaved") -> SecondQuantizedHamiltonian:
    """Expand spatial integrals over 2*norb spin orbitals.

    Spin-forbidden entries are exactly zero: h couples equal spins only and
    g couples (equal, equal) spin pairs in chemists' index grouping.
    """
    check_ordering(ordering)
    norb = ints.norb
    n = 2 * norb
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))

    spin_slice = {}
    for s in (0, 1):
        idx = np.array([qubit_index(p, s, n, ordering) for p in range(norb)])
        spin_slice[s] = idx
    for s in (0, 1):
        idx = spin_slice[s]
        h[np.ix_(idx, idx)] = ints.one_body
    for s1 in (0, 1):
        for s2 in (0, 1):
            a, b = spin_slice[s1], spin_slice[s2]
            g[np.ix_(a, a, b, b)] = ints.two_body

    sq = SecondQuantizedHamiltonian(
        n_spin_orbitals=n, core_energy=ints.core_energy, h=h, g=g, ordering=ordering
    )
    sq.validate()
    return sq


def _ladder(p: int, dagger: bool):
    """JW image of a_p^dag / a_p as [(x, z, complex coeff), ...]."""
    zstring = (1 << p) - 1
    x = 1 << p
    sign = -0.5j if dagger else 0.5j
    return [(x, zstring, 0.5), (x, zstring | x, sign)]


def _accumulate_product(acc: dict, factors, scale: float):
    """Expand a product of ladder operators into the term accumulator."""
    terms = [(0, 0, complex(scale))]
    for factor in factors:
        nxt = []
        for x1, z1, c1 in terms:
            for x2, z2, c2 in factor:
                x3, z3, k = mul_words(x1, z1, x2, z2)
                nxt.append((x3, z3, c1 * c2 * (1j) ** k))
        terms = nxt
    for x, z, c in terms:
        key = (x, z)
        acc[key] = acc.get(key, 0.0) + c


def jordan_wigner(sq: SecondQuantizedHamiltonian, drop_tol: float = JW_DROP_TOL) -> PauliSum:
    """Map the second-quantized Hamiltonian to a merged real Pauli sum."""
    n = sq.n_spin_orbitals
    acc: dict = {(0, 0): complex(sq.core_energy)}

    for p, q in zip(*np.nonzero(sq.h)):
        _accumulate_product(acc, (_ladder(int(p), True), _ladder(int(q), False)),
                            sq.h[p, q])

    for p, q, r, s in zip(*np.nonzero(sq.g)):
        factors = (
            _ladder(int(p), True),
            _ladder(int(r), True),
            _ladder(int(s), False),
            _ladder(int(q), False),
        )
        _accumulate_product(acc, factors, 0.5 * sq.g[p, q, r, s])

    worst_imag = max((abs(c.imag) for c in acc.values()), default=0.0)
    if worst_imag > JW_IMAG_TOL:
        raise ValueError(
            f"residual imaginary Pauli coefficient {worst_imag:.3e}; input is not Hermitian"
        )
    real_acc = {key: c.real for key, c in acc.items()}
    return merge_terms(n, real_acc, drop_tol)


def hartree_fock_reference(n_electrons: int, n_qubits: int,
                           ordering: str = "interleaved", ms2: int = 0) -> Configuration:
    """Occupation bitstring of the Hartree-Fock reference determinant."""
    return hartree_fock_configuration(n_electrons, n_qubits, ordering, ms2)
