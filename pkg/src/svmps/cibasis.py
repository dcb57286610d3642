"""Spin-restricted configuration subspaces.

The emulator never works in the full 2^n Hilbert space: states live in the
subspace of occupation configurations with fixed alpha and beta electron
counts.  This module enumerates that subspace and provides the exact
configuration -> position lookup used by the Hamiltonian assembly.

Two spin-orbital orderings are supported project-wide:

* ``interleaved``: spatial orbital p maps to qubits (2p, 2p+1) = (alpha, beta)
* ``blocked``:     spatial orbital p maps to qubits (p, p + n/2)

Qubit 0 is the least significant bit of a configuration integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

ORDERINGS = ("interleaved", "blocked")

MAX_QUBITS = 62  # configuration integers are int64


def check_ordering(ordering: str) -> str:
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    return ordering


def qubit_index(p: int, spin: int, n_qubits: int, ordering: str) -> int:
    """Qubit carrying spin-orbital (spatial p, spin 0=alpha / 1=beta)."""
    if ordering == "interleaved":
        return 2 * p + spin
    return p + spin * (n_qubits // 2)


def qubit_spin(q: int, n_qubits: int, ordering: str) -> int:
    """Spin (0=alpha, 1=beta) of the orbital sitting on qubit q."""
    if ordering == "interleaved":
        return q & 1
    return 0 if q < n_qubits // 2 else 1


def spin_qubits(spin: int, n_qubits: int, ordering: str) -> list[int]:
    return [qubit_index(p, spin, n_qubits, ordering) for p in range(n_qubits // 2)]


@dataclass(frozen=True)
class Configuration:
    """An n-qubit occupation bitstring stored as an integer."""

    bits: int
    n_qubits: int

    def occupied(self) -> list[int]:
        return [k for k in range(self.n_qubits) if (self.bits >> k) & 1]

    def ket(self) -> str:
        """Ket string with qubit 0 rightmost, e.g. ``|0011>`` for bits=3."""
        return "|" + format(self.bits, f"0{self.n_qubits}b") + ">"

    def __repr__(self) -> str:
        return f"Configuration({self.ket()})"


def hartree_fock_configuration(
    n_electrons: int, n_qubits: int, ordering: str = "interleaved", ms2: int = 0
) -> Configuration:
    """Reference configuration filling the lowest-energy spin orbitals.

    FCIDUMP orbitals arrive in canonical energy order, so the reference
    occupies spatial orbitals 0.. for each spin channel; the split between
    channels follows ms2 (n_alpha - n_beta).
    """
    if n_electrons > n_qubits:
        raise ValueError("more electrons than spin orbitals")
    if (n_electrons + ms2) % 2:
        raise ValueError("n_electrons and ms2 have incompatible parity")
    check_ordering(ordering)
    n_alpha = (n_electrons + ms2) // 2
    n_beta = (n_electrons - ms2) // 2
    if min(n_alpha, n_beta) < 0 or max(n_alpha, n_beta) > n_qubits // 2:
        raise ValueError("electron counts do not fit the orbital space")
    bits = 0
    for p in range(n_alpha):
        bits |= 1 << qubit_index(p, 0, n_qubits, ordering)
    for p in range(n_beta):
        bits |= 1 << qubit_index(p, 1, n_qubits, ordering)
    return Configuration(bits, n_qubits)


class CiBasis:
    """Ascending-ordered enumeration of one (n_alpha, n_beta) sector."""

    def __init__(self, n_qubits: int, n_alpha: int, n_beta: int, ordering: str,
                 states: np.ndarray):
        self.n_qubits = n_qubits
        self.n_alpha = n_alpha
        self.n_beta = n_beta
        self.ordering = ordering
        self.states = states  # int64, strictly ascending

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def alpha_mask(self) -> int:
        mask = 0
        for q in spin_qubits(0, self.n_qubits, self.ordering):
            mask |= 1 << q
        return mask

    @cached_property
    def beta_mask(self) -> int:
        return ((1 << self.n_qubits) - 1) ^ self.alpha_mask

    def configuration(self, position: int) -> Configuration:
        return Configuration(int(self.states[position]), self.n_qubits)

    def index_of(self, c) -> int | None:
        """Position of a configuration, or None when outside the sector."""
        bits = c.bits if isinstance(c, Configuration) else int(c)
        pos = int(np.searchsorted(self.states, bits))
        if pos < len(self.states) and self.states[pos] == bits:
            return pos
        return None

    def try_positions(self, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized lookup; returns (positions, found-mask)."""
        pos = np.searchsorted(self.states, bits)
        ok = (pos < len(self.states)) & (self.states[np.minimum(pos, len(self.states) - 1)] == bits)
        return pos, ok

    def positions_of(self, bits: np.ndarray) -> np.ndarray:
        """Vectorized exact lookup; raises if any entry leaves the sector."""
        pos, ok = self.try_positions(bits)
        if not np.all(ok):
            bad = Configuration(int(np.asarray(bits)[~ok][0]), self.n_qubits)
            raise ValueError(f"configuration {bad.ket()} is outside the ci sector")
        return pos

    def __repr__(self) -> str:
        return (f"CiBasis(n_qubits={self.n_qubits}, n_alpha={self.n_alpha}, "
                f"n_beta={self.n_beta}, size={len(self)})")


def enumerate_basis(n_qubits: int, n_alpha: int, n_beta: int,
                    ordering: str = "interleaved") -> CiBasis:
    """Enumerate every configuration with the requested per-spin occupations.

    States come out in ascending integer order, so positions are reproducible
    and binary search gives the exact index map.
    """
    check_ordering(ordering)
    if n_qubits % 2:
        raise ValueError("n_qubits must be even (spin orbital pairs)")
    if n_qubits > MAX_QUBITS:
        raise ValueError(f"n_qubits={n_qubits} exceeds the {MAX_QUBITS}-bit index width")
    norb = n_qubits // 2
    if not (0 <= n_alpha <= norb and 0 <= n_beta <= norb):
        raise ValueError("per-spin occupation exceeds the orbital count")

    def spin_masks(spin: int, count: int) -> np.ndarray:
        qubits = spin_qubits(spin, n_qubits, ordering)
        masks = [
            sum(1 << qubits[p] for p in combo)
            for combo in combinations(range(norb), count)
        ]
        return np.array(masks, dtype=np.int64)

    alpha = spin_masks(0, n_alpha)
    beta = spin_masks(1, n_beta)
    states = (alpha[:, None] | beta[None, :]).ravel()
    states.sort()
    return CiBasis(n_qubits, n_alpha, n_beta, ordering, states)


def sector_dimensions(n_qubits: int, n_alpha: int, n_beta: int) -> dict:
    """Closed-form subspace sizes; usable far beyond enumerable scales."""
    norb = n_qubits // 2
    omega_h = 1 << n_qubits
    omega_ci = math.comb(n_qubits, n_alpha + n_beta)
    omega_cik = math.comb(norb, n_alpha) * math.comb(norb, n_beta)
    return {
        "hilbert": omega_h,
        "ci": omega_ci,
        "ci_k": omega_cik,
        "filling_ratio": omega_cik / omega_h,
    }


def subspace_stats(basis: CiBasis) -> dict:
    """Hilbert / particle-conserving / spin-resolved sizes for a basis."""
    stats = sector_dimensions(basis.n_qubits, basis.n_alpha, basis.n_beta)
    stats["ci_k"] = len(basis)
    stats["filling_ratio"] = len(basis) / stats["hilbert"]
    return stats
