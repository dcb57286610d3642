"""FCIDUMP ingestion (Molpro conventions).

The file holds molecular integrals over spatial orbitals in Hartree:
a namelist header with NORB/NELEC/MS2 terminated by ``&END`` or ``/``,
then free-format lines ``value i j k l`` with 1-based indices.  The
``i=j=k=l=0`` row is the core (nuclear repulsion + frozen) energy and
``k=l=0`` rows are one-body integrals.  Two-body values are chemists'
notation (ij|kl) with the full 8-fold permutational symmetry; every stored
representative populates all equivalent slots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

ONE_BODY_SYM_TOL = 1e-12
DUPLICATE_TOL = 1e-10


@dataclass
class IntegralSet:
    """Spatial-orbital integrals as read from an FCIDUMP file."""

    norb: int
    nelec: int
    ms2: int
    core_energy: float = 0.0
    one_body: np.ndarray = field(default=None)  # (norb, norb), Hartree
    two_body: np.ndarray = field(default=None)  # (norb,)*4 chemists' (ij|kl)

    def __post_init__(self):
        if self.one_body is None:
            self.one_body = np.zeros((self.norb, self.norb))
        if self.two_body is None:
            self.two_body = np.zeros((self.norb,) * 4)
        self.validate()

    def validate(self):
        if self.norb < 1:
            raise ValueError("norb must be >= 1")
        if not 0 <= self.nelec <= 2 * self.norb:
            raise ValueError("nelec outside [0, 2*norb]")
        if np.max(np.abs(self.one_body - self.one_body.T), initial=0.0) > ONE_BODY_SYM_TOL:
            raise ValueError("one-body integrals are not symmetric")

    @property
    def n_alpha(self) -> int:
        return (self.nelec + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.nelec - self.ms2) // 2


def _two_body_slots(i, j, k, l):
    """All 8 chemists'-notation permutations of (ij|kl)."""
    return (
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    )


_HEADER_INT = {
    "NORB": re.compile(r"NORB\s*=\s*(\d+)", re.IGNORECASE),
    "NELEC": re.compile(r"NELEC\s*=\s*(\d+)", re.IGNORECASE),
    "MS2": re.compile(r"MS2\s*=\s*(-?\d+)", re.IGNORECASE),
}


def parse_fcidump(text) -> IntegralSet:
    """Parse FCIDUMP contents (a string or an open text file)."""
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()

    header_lines = []
    body_start = None
    for ln, raw in enumerate(lines):
        stripped = raw.strip()
        header_lines.append(stripped)
        if stripped.endswith("&END") or stripped.endswith("/"):
            body_start = ln + 1
            break
    if body_start is None:
        raise ValueError("FCIDUMP header not terminated by &END or /")
    header = " ".join(header_lines)
    if not header.lstrip().upper().startswith("&FCI"):
        raise ValueError("FCIDUMP header must start with &FCI")

    values = {}
    for key, rx in _HEADER_INT.items():
        m = rx.search(header)
        if m is None:
            raise ValueError(f"FCIDUMP header misses {key}")
        values[key] = int(m.group(1))
    norb, nelec, ms2 = values["NORB"], values["NELEC"], values["MS2"]
    # ORBSYM / ISYM are accepted and ignored (no point-group handling).

    ints = IntegralSet(norb=norb, nelec=nelec, ms2=ms2)
    seen_one = np.zeros((norb, norb), dtype=bool)
    seen_two = np.zeros((norb,) * 4, dtype=bool)
    core_seen = False

    for raw in lines[body_start:]:
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise ValueError(f"malformed integral line: {raw!r}")
        try:
            # Fortran writers may emit D exponents.
            v = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError as exc:
            raise ValueError(f"non-numeric integral line: {raw!r}") from exc
        for idx in (i, j, k, l):
            if not 0 <= idx <= norb:
                raise ValueError(f"orbital index {idx} outside [0, {norb}]: {raw!r}")

        if i == j == k == l == 0:
            if core_seen and abs(ints.core_energy - v) > DUPLICATE_TOL:
                raise ValueError("inconsistent duplicate core-energy entries")
            ints.core_energy = v
            core_seen = True
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise ValueError(f"malformed one-body indices: {raw!r}")
            a, b = i - 1, j - 1
            for p, q in ((a, b), (b, a)):
                if seen_one[p, q] and abs(ints.one_body[p, q] - v) > DUPLICATE_TOL:
                    raise ValueError(f"inconsistent duplicate one-body entry ({i},{j})")
                ints.one_body[p, q] = v
                seen_one[p, q] = True
        elif 0 in (i, j, k, l):
            raise ValueError(f"malformed two-body indices: {raw!r}")
        else:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for slot in _two_body_slots(a, b, c, d):
                if seen_two[slot] and abs(ints.two_body[slot] - v) > DUPLICATE_TOL:
                    raise ValueError(f"inconsistent duplicate two-body entry ({i},{j},{k},{l})")
                ints.two_body[slot] = v
                seen_two[slot] = True

    ints.validate()
    return ints


def load_fcidump(path) -> IntegralSet:
    with open(path, "r", encoding="ascii") as fh:
        return parse_fcidump(fh)


def dumps_fcidump(ints: IntegralSet, tol: float = 1e-15) -> str:
    """Serialize back to FCIDUMP text (unique 8-fold representatives only)."""
    norb = ints.norb
    out = [
        f" &FCI NORB={norb},NELEC={ints.nelec},MS2={ints.ms2},",
        "  ORBSYM=" + "1," * norb,
        "  ISYM=1,",
        " &END",
    ]
    for i in range(norb):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    v = ints.two_body[i, j, k, l]
                    if abs(v) > tol:
                        out.append(f" {v: .16e} {i+1:4d} {j+1:4d} {k+1:4d} {l+1:4d}")
    for i in range(norb):
        for j in range(i + 1):
            v = ints.one_body[i, j]
            if abs(v) > tol:
                out.append(f" {v: .16e} {i+1:4d} {j+1:4d}    0    0")
    out.append(f" {ints.core_energy: .16e}    0    0    0    0")
    return "\n".join(out) + "\n"
