"""Real-weighted n-qubit Pauli strings.

A Pauli word is stored symplectically as two bit masks: ``x`` has bit p set
when the letter on qubit p is X or Y, ``z`` when it is Z or Y.  Qubit 0 is
the least significant bit throughout the package, occupied orbitals are
``|1>`` and ``Z|0> = +|0>``.

With this encoding a word acts on a computational basis state ``|b>`` as

    P |b> = i^nY * (-1)^popcount(b & z) * |b ^ x>,

where nY = popcount(x & z) counts Y letters.  Molecular Hamiltonians are
real, so every surviving term after mapping has an even number of Y letters
and the phase i^nY reduces to the real sign (-1)^(nY/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def word_to_masks(word: str) -> tuple[int, int]:
    """Convert a letter string (index k = qubit k) to (x, z) masks."""
    x = z = 0
    for k, letter in enumerate(word):
        xb, zb = _MASKS[letter]
        x |= xb << k
        z |= zb << k
    return x, z


def masks_to_word(x: int, z: int, n_qubits: int) -> str:
    return "".join(
        _LETTERS[((x >> k) & 1, (z >> k) & 1)] for k in range(n_qubits)
    )


def mul_words(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """Multiply two Pauli words; returns (x, z, k) with phase i^k, k in 0..3.

    Uses the XZ normal form: a word equals i^popcount(x & z) * X^x Z^z, and
    commuting Z^z1 past X^x2 costs (-1)^popcount(z1 & x2).
    """
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    k = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    )
    return x3, z3, k % 4


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli word on ``n_qubits`` qubits."""

    n_qubits: int
    x: int
    z: int
    coeff: float

    @property
    def word(self) -> str:
        return masks_to_word(self.x, self.z, self.n_qubits)

    @property
    def n_y(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def support(self) -> int:
        """Bit mask of qubits the word acts on non-trivially."""
        return self.x | self.z

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{self.coeff:+.12g}*{self.word}"


class PauliSum:
    """Canonically sorted, duplicate-merged list of real Pauli terms.

    The term data lives in three parallel arrays (``xs``, ``zs``,
    ``coeffs``), sorted by (x, z).  Instances are treated as immutable.
    """

    __slots__ = ("n_qubits", "xs", "zs", "coeffs")

    def __init__(self, n_qubits: int, xs, zs, coeffs, *, _trusted=False):
        self.n_qubits = int(n_qubits)
        xs = np.asarray(xs, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("non-finite Pauli coefficient")
        if not _trusted:
            xs, zs, coeffs = _merge_sorted(xs, zs, coeffs)
        self.xs = xs
        self.zs = zs
        self.coeffs = coeffs

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[int, int, float]]) -> "PauliSum":
        """Build from (x, z, coeff) triples; duplicates are merged."""
        xs, zs, cs = [], [], []
        for x, z, c in terms:
            xs.append(x)
            zs.append(z)
            cs.append(c)
        return cls(n_qubits, xs, zs, cs)

    @classmethod
    def from_strings(cls, pairs: Sequence[tuple[float, str]]) -> "PauliSum":
        """Build from (coeff, word) pairs, e.g. ``[(0.5, "XZI")]``."""
        n = len(pairs[0][1])
        triples = []
        for c, w in pairs:
            if len(w) != n:
                raise ValueError("inconsistent word lengths")
            x, z = word_to_masks(w)
            triples.append((x, z, c))
        return cls.from_terms(n, triples)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[PauliTerm]:
        for x, z, c in zip(self.xs, self.zs, self.coeffs):
            yield PauliTerm(self.n_qubits, int(x), int(z), float(c))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n_qubits == other.n_qubits
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def scaled(self, factor: float) -> "PauliSum":
        out = PauliSum(self.n_qubits, self.xs, self.zs, factor * self.coeffs, _trusted=True)
        return out if factor != 0.0 else PauliSum(self.n_qubits, [], [], [])

    def select(self, mask) -> "PauliSum":
        """Sub-sum of the terms picked by a boolean mask (order preserved)."""
        mask = np.asarray(mask, dtype=bool)
        return PauliSum(
            self.n_qubits, self.xs[mask], self.zs[mask], self.coeffs[mask], _trusted=True
        )

    @property
    def supports(self) -> np.ndarray:
        return self.xs | self.zs

    @property
    def identity_coefficient(self) -> float:
        hit = np.flatnonzero((self.xs == 0) & (self.zs == 0))
        return float(self.coeffs[hit[0]]) if hit.size else 0.0

    def term_strings(self) -> list[tuple[float, str]]:
        return [(float(c), masks_to_word(int(x), int(z), self.n_qubits))
                for x, z, c in zip(self.xs, self.zs, self.coeffs)]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={len(self)})"


def _merge_sorted(xs, zs, coeffs, drop_tol: float = 0.0):
    """Sort by (x, z), merge duplicate words, drop negligible coefficients."""
    if len(coeffs) == 0:
        return xs, zs, coeffs
    order = np.lexsort((zs, xs))
    xs, zs, coeffs = xs[order], zs[order], coeffs[order]
    new_group = np.empty(len(xs), dtype=bool)
    new_group[0] = True
    new_group[1:] = (xs[1:] != xs[:-1]) | (zs[1:] != zs[:-1])
    starts = np.flatnonzero(new_group)
    merged = np.add.reduceat(coeffs, starts)
    keep = np.abs(merged) > drop_tol
    return xs[starts][keep], zs[starts][keep], merged[keep]


def merge_terms(n_qubits: int, acc: dict, drop_tol: float) -> PauliSum:
    """Turn an accumulator dict {(x, z): coeff} into a pruned PauliSum."""
    xs, zs, cs = [], [], []
    for (x, z), c in acc.items():
        if abs(c) > drop_tol:
            xs.append(x)
            zs.append(z)
            cs.append(c)
    return PauliSum(n_qubits, xs, zs, cs)
