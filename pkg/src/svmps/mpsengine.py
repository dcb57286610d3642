"""Tensor-train engine: MPS states, MPOs, rounding and zip-up application.

Conventions
-----------
* MPS core k has shape (r_{k-1}, 2, r_k) with r_0 = r_n = 1; site k is
  qubit k (least significant bit of a configuration).
* MPO core k has shape (R_{k-1}, 2, 2, R_k) with physical axes (out, in).
* Everything is real float64; Pauli Y enters through iY (real,
  antisymmetric) with the sign absorbed into the term coefficient, which is
  possible exactly when a word carries an even number of Y letters.

Truncation
----------
Each truncated SVD discards the largest set of smallest singular values
whose 2-norm (the "tail") stays within the threshold ``delta``; with
``delta = 0`` only exact zeros drop and the operation is lossless.  A full
rounding sweep on an orthogonalized chain therefore keeps the total error
within sqrt(n-1) * delta, i.e. a relative error of
sqrt(n-1) * delta / ||A||_F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cibasis import Configuration
from .pauli import PauliSum
from .svengine import ExcitationOperator

DEFAULT_STATE_MAX_BOND = 256
HAMILTONIAN_MPO_DELTA = 1e-14
GATE_TT_DELTA = 1e-14
GATE_MAX_BOND = 5


class BondLimitError(RuntimeError):
    """A state's bond dimension exceeded the configured hard cap."""

    def __init__(self, site: int, bond: int, cap: int):
        super().__init__(
            f"bond dimension {bond} at site {site} exceeds the hard cap {cap}; "
            "rank growth would need harder truncation than requested"
        )
        self.site = site
        self.bond = bond
        self.cap = cap


@dataclass
class TruncationLog:
    """Per-operation discarded-tail records and their running maximum."""

    entries: list = field(default_factory=list)  # (site, tail_norm)
    running_max: float = 0.0

    def record(self, site: int, tail: float):
        if tail < 0:
            raise ValueError("negative truncation tail")
        self.entries.append((site, float(tail)))
        if tail > self.running_max:
            self.running_max = float(tail)

    def extend(self, other: "TruncationLog"):
        for site, tail in other.entries:
            self.record(site, tail)

    @property
    def max_error(self) -> float:
        return self.running_max


class MpsState:
    """Tensor-train state with open boundaries."""

    __slots__ = ("cores", "canonical_center")

    def __init__(self, cores, canonical_center: int | None = None):
        self.cores = list(cores)
        self.canonical_center = canonical_center
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[2] != 1:
            raise ValueError("boundary bond dimensions must be 1")

    @property
    def n_sites(self) -> int:
        return len(self.cores)

    @property
    def bond_dims(self) -> list[int]:
        return [c.shape[2] for c in self.cores[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1) if self.n_sites > 1 else 1

    @property
    def n_parameters(self) -> int:
        return sum(c.size for c in self.cores)

    def copy(self) -> "MpsState":
        return MpsState([c.copy() for c in self.cores], self.canonical_center)

    def __repr__(self) -> str:
        return f"MpsState(n={self.n_sites}, max_bond={self.max_bond})"


class Mpo:
    """Tensor-train operator with open boundaries."""

    __slots__ = ("cores",)

    def __init__(self, cores):
        self.cores = list(cores)
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[3] != 1:
            raise ValueError("boundary bond dimensions must be 1")

    @property
    def n_sites(self) -> int:
        return len(self.cores)

    @property
    def bond_dims(self) -> list[int]:
        return [c.shape[3] for c in self.cores[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1) if self.n_sites > 1 else 1

    def __repr__(self) -> str:
        return f"Mpo(n={self.n_sites}, max_bond={self.max_bond})"


@dataclass
class MpoBatch:
    """A Hamiltonian as a sum of MPO parts, each bond-capped."""

    parts: list
    cap: int

    @property
    def n_sites(self) -> int:
        return self.parts[0].n_sites

    @property
    def max_bond(self) -> int:
        return max(p.max_bond for p in self.parts)

    def bond_profile(self) -> list[list[int]]:
        return [p.bond_dims for p in self.parts]


# ---------------------------------------------------------------------------
# construction

def from_configuration(c: Configuration) -> MpsState:
    """Product-state MPS of an occupation bitstring (all bonds 1)."""
    cores = []
    for k in range(c.n_qubits):
        core = np.zeros((1, 2, 1))
        core[0, (c.bits >> k) & 1, 0] = 1.0
        cores.append(core)
    return MpsState(cores, canonical_center=0)


def mps_from_dense(vec: np.ndarray, delta: float = 0.0) -> MpsState:
    """Exact (or delta-rounded) TT factorization of a dense state vector."""
    vec = np.asarray(vec, dtype=np.float64)
    n = int(np.log2(vec.size))
    if 1 << n != vec.size:
        raise ValueError("dense vector length must be a power of two")
    tensor = vec.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))
    cores = []
    rank = 1
    mat = tensor.reshape(rank * 2, -1)
    for _ in range(n - 1):
        u, sv, vt, _ = _truncated_svd(mat, delta)
        cores.append(u.reshape(rank, 2, len(sv)))
        rank = len(sv)
        mat = (sv[:, None] * vt).reshape(rank * 2, -1)
    cores.append(mat.reshape(rank, 2, 1))
    return MpsState(cores, canonical_center=n - 1)


# ---------------------------------------------------------------------------
# orthogonalization, contraction

def _left_qr(core):
    r, d, rn = core.shape
    q, rem = np.linalg.qr(core.reshape(r * d, rn))
    return q.reshape(r, d, -1), rem


def _right_qr(core):
    r, d, rn = core.shape
    q, rem = np.linalg.qr(core.reshape(r, d * rn).T)
    return q.T.reshape(-1, d, rn), rem.T


def _absorb_left(mat: np.ndarray, core: np.ndarray) -> np.ndarray:
    """(a,b) x (b,p,s) -> (a,p,s) without einsum overhead."""
    b, p, s = core.shape
    return (mat @ core.reshape(b, p * s)).reshape(mat.shape[0], p, s)


def _absorb_right(core: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """(a,p,s) x (s,b) -> (a,p,b)."""
    a, p, s = core.shape
    return (core.reshape(a * p, s) @ mat).reshape(a, p, mat.shape[1])


def canonicalize(s: MpsState, center: int) -> MpsState:
    """Orthogonalize every core left of center from the left and right of it
    from the right; norm-preserving."""
    if not 0 <= center < s.n_sites:
        raise ValueError("canonical center out of range")
    cores = [c.copy() for c in s.cores]
    for k in range(center):
        q, rem = _left_qr(cores[k])
        cores[k] = q
        cores[k + 1] = _absorb_left(rem, cores[k + 1])
    for k in range(s.n_sites - 1, center, -1):
        q, rem = _right_qr(cores[k])
        cores[k] = q
        cores[k - 1] = _absorb_right(cores[k - 1], rem)
    return MpsState(cores, canonical_center=center)


def inner(a: MpsState, b: MpsState) -> float:
    """<a|b> by exact left-to-right environment contraction (real states)."""
    if a.n_sites != b.n_sites:
        raise ValueError("site count mismatch in inner product")
    env = np.ones((1, 1))
    for ca, cb in zip(a.cores, b.cores):
        t = np.tensordot(env, ca, axes=([0], [0]))        # (rb, p, ra')
        env = np.tensordot(cb, t, axes=([0, 1], [0, 1])).T  # (ra', rb')
    return float(env[0, 0])


def mps_norm(s: MpsState) -> float:
    if s.canonical_center is not None:
        return float(np.linalg.norm(s.cores[s.canonical_center]))
    return float(np.sqrt(max(inner(s, s), 0.0)))


def scale_mps(s: MpsState, factor: float) -> MpsState:
    cores = [c.copy() for c in s.cores]
    cores[-1] = cores[-1] * factor
    center = s.canonical_center
    return MpsState(cores, canonical_center=None if center is None else center)


# ---------------------------------------------------------------------------
# truncation

def _robust_svd(mat: np.ndarray):
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but sturdier
        import scipy.linalg

        return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")


def _truncated_svd(mat: np.ndarray, delta: float, rule: str = "tail"):
    """Truncated SVD; returns (U, S, Vt, discarded-tail norm).

    ``rule="tail"`` discards the largest set of smallest singular values
    whose combined 2-norm stays within ``delta`` (TT-rounding semantics,
    tail <= delta by construction).  ``rule="value"`` discards every
    singular value below ``delta`` individually, the usual fixed
    singular-value cutoff of MPS circuit arithmetic: there the discarded
    tail is unbounded and is the interesting diagnostic.  At least one
    value is always kept; with delta = 0 both rules drop exact zeros only.
    """
    u, sv, vt = _robust_svd(mat)
    if sv.size == 0:
        return u, sv, vt, 0.0
    sq = sv[::-1] ** 2
    tails = np.sqrt(np.maximum(np.cumsum(sq), 0.0))[::-1]  # tails[k] = ||sv[k:]||
    keep = sv.size
    if rule == "tail":
        for k in range(sv.size - 1, 0, -1):
            if tails[k] <= delta or sv[k] == 0.0:
                keep = k
            else:
                break
    elif rule == "value":
        above = np.flatnonzero(sv >= delta)
        keep = int(above[-1]) + 1 if above.size else 1
    else:
        raise ValueError(f"unknown truncation rule {rule!r}")
    # drop exact zeros even when the rule keeps them
    while keep > 1 and sv[keep - 1] == 0.0:
        keep -= 1
    tail = float(tails[keep]) if keep < sv.size else 0.0
    return u[:, :keep], sv[:keep], vt[:keep], tail


def _round_cores(cores: list, delta: float, log: TruncationLog):
    """Right-orthogonalize, then truncate left-to-right (any physical dim)."""
    n = len(cores)
    cores = [c.copy() for c in cores]
    for k in range(n - 1, 0, -1):
        shape = cores[k].shape
        q, rem = np.linalg.qr(cores[k].reshape(shape[0], -1).T)
        cores[k] = q.T.reshape((-1,) + shape[1:])
        prev = cores[k - 1]
        cores[k - 1] = (prev.reshape(-1, shape[0]) @ rem.T).reshape(
            prev.shape[:-1] + (-1,))
    for k in range(n - 1):
        shape = cores[k].shape
        mat = cores[k].reshape(-1, shape[-1])
        u, sv, vt, tail = _truncated_svd(mat, delta)
        log.record(k, tail)
        cores[k] = u.reshape(shape[:-1] + (-1,))
        carry = sv[:, None] * vt
        nxt = cores[k + 1]
        cores[k + 1] = (carry @ nxt.reshape(nxt.shape[0], -1)).reshape(
            (carry.shape[0],) + nxt.shape[1:])
    return cores


def tt_round(s: MpsState, delta: float, mode: str = "absolute") -> tuple[MpsState, TruncationLog]:
    """Rounding sweep with per-bond discarded-tail threshold.

    ``mode="absolute"`` uses ``delta`` directly; ``mode="relative"`` converts
    it so the global relative error stays within delta:
    per-bond tail <= delta * ||A||_F / sqrt(n-1).
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    for c in s.cores:
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite MPS core entries")
    if mode == "relative":
        denom = np.sqrt(max(s.n_sites - 1, 1))
        delta = delta * mps_norm(s) / denom
    elif mode != "absolute":
        raise ValueError(f"unknown rounding mode {mode!r}")
    log = TruncationLog()
    if s.n_sites == 1:
        return s.copy(), log
    cores = _round_cores(s.cores, delta, log)
    return MpsState(cores, canonical_center=s.n_sites - 1), log


def mpo_round(m: Mpo, delta: float) -> tuple[Mpo, TruncationLog]:
    """TT-rounding of an operator (treated as a train with physical dim 4)."""
    log = TruncationLog()
    if m.n_sites == 1:
        return Mpo([c.copy() for c in m.cores]), log
    as_train = [c.reshape(c.shape[0], 4, c.shape[3]) for c in m.cores]
    rounded = _round_cores(as_train, delta, log)
    cores = [c.reshape(c.shape[0], 2, 2, c.shape[2]) for c in rounded]
    return Mpo(cores), log


# ---------------------------------------------------------------------------
# MPO construction

_REAL_SITE_MATS = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
    # iY: real antisymmetric stand-in for Y; the (-1)^(nY/2) sign in front
    "Y": np.array([[0.0, 1.0], [-1.0, 0.0]]),
}


def identity_mpo(n: int) -> Mpo:
    core = np.eye(2).reshape(1, 2, 2, 1)
    return Mpo([core.copy() for _ in range(n)])


def mpo_from_term(n_qubits: int, x: int, z: int, coeff: float) -> Mpo:
    """Rank-1 MPO of one Pauli word (requires an even number of Y letters)."""
    n_y = (x & z).bit_count()
    if n_y % 2:
        raise ValueError("odd-Y Pauli word has no real MPO; Hamiltonian must be real")
    sign = -1.0 if n_y % 4 == 2 else 1.0
    cores = []
    for k in range(n_qubits):
        xb, zb = (x >> k) & 1, (z >> k) & 1
        letter = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(xb, zb)]
        cores.append(_REAL_SITE_MATS[letter].reshape(1, 2, 2, 1).copy())
    cores[0] = cores[0] * (coeff * sign)
    return Mpo(cores)


def direct_sum_mpo(a: Mpo, b: Mpo) -> Mpo:
    """Rank-additive sum: bond dimensions add at every internal cut."""
    n = a.n_sites
    if b.n_sites != n:
        raise ValueError("site count mismatch in MPO sum")
    if n == 1:
        return Mpo([a.cores[0] + b.cores[0]])
    cores = []
    for k in range(n):
        ca, cb = a.cores[k], b.cores[k]
        if k == 0:
            cores.append(np.concatenate([ca, cb], axis=3))
        elif k == n - 1:
            cores.append(np.concatenate([ca, cb], axis=0))
        else:
            ra, rb = ca.shape[0], cb.shape[0]
            sa, sb = ca.shape[3], cb.shape[3]
            core = np.zeros((ra + rb, 2, 2, sa + sb))
            core[:ra, :, :, :sa] = ca
            core[ra:, :, :, sa:] = cb
            cores.append(core)
    return Mpo(cores)


def mpo_from_pauli_sum(h: PauliSum, delta: float = HAMILTONIAN_MPO_DELTA,
                       cap: int = 100, chunk: int = 8) -> MpoBatch:
    """Greedy batched compression of a Pauli sum into bond-capped MPO parts.

    Terms are accumulated by rank-additive direct sums and re-rounded at
    ``delta``; whenever rounding cannot keep the running part under ``cap``
    a new part begins.  The parts sum to the input exactly up to rounding.
    """
    if len(h) == 0:
        raise ValueError("empty Pauli sum")
    chunk = max(1, min(chunk, cap))
    term_mpos = [mpo_from_term(h.n_qubits, int(x), int(z), float(c))
                 for x, z, c in zip(h.xs, h.zs, h.coeffs)]
    parts: list[Mpo] = []
    current: Mpo | None = None
    for start in range(0, len(term_mpos), chunk):
        group = term_mpos[start:start + chunk]
        block = group[0]
        for t in group[1:]:
            block = direct_sum_mpo(block, t)
        candidate = block if current is None else direct_sum_mpo(current, block)
        rounded, _ = mpo_round(candidate, delta)
        if rounded.max_bond <= cap:
            current = rounded
        else:
            if current is None:
                raise ValueError("a single chunk exceeds the bond cap; lower chunk")
            parts.append(current)
            current, _ = mpo_round(block, delta)
            if current.max_bond > cap:
                raise ValueError("a fresh chunk exceeds the bond cap; lower chunk")
    parts.append(current)
    return MpoBatch(parts=parts, cap=cap)


# ---------------------------------------------------------------------------
# application

def apply_mpo_exact(m: Mpo, s: MpsState) -> MpsState:
    """Exact MPO application: bond dimensions multiply (no truncation)."""
    cores = []
    for w, a in zip(m.cores, s.cores):
        t = np.tensordot(w, a, axes=([2], [1]))  # (R, p, S, r, b)
        t = t.transpose(0, 3, 1, 2, 4)           # (R, r, p, S, b)
        cores.append(t.reshape(t.shape[0] * t.shape[1], 2, t.shape[3] * t.shape[4]))
    return MpsState(cores, canonical_center=None)


def apply_mpo_zipup(m: Mpo, s: MpsState, delta: float,
                    max_bond: int | None = None,
                    rule: str = "tail") -> tuple[MpsState, TruncationLog]:
    """Single-pass MPO x MPS contraction with interleaved truncation.

    Sweeps left to right carrying the partially contracted block; each site
    is split off by a truncated SVD at ``delta`` (``rule`` as in
    ``_truncated_svd``).  A final right-to-left orthogonalization leaves the
    result canonical at site 0.  Raises BondLimitError instead of truncating
    harder when ``max_bond`` is hit.
    """
    n = s.n_sites
    if m.n_sites != n:
        raise ValueError("site count mismatch in zip-up")
    log = TruncationLog()
    new_cores = _zipup_range(s.cores, m.cores, 0, delta, max_bond, log, rule)
    out = MpsState(new_cores, canonical_center=n - 1)
    return canonicalize(out, 0), log


def _zipup_range(state_cores, mpo_cores, lo: int, delta: float,
                 max_bond: int | None, log: TruncationLog,
                 rule: str = "tail") -> list:
    """Zip an MPO over sites [lo, lo + len(mpo_cores)); cores outside the
    range are reused unchanged.  The MPO must have boundary bonds 1, which
    makes the range self-contained."""
    width = len(mpo_cores)
    hi = lo + width - 1
    r_left = state_cores[lo].shape[0]
    carry = np.eye(r_left).reshape(r_left, r_left, 1)  # (chi, r, R=1)
    out = list(state_cores)
    for k in range(lo, hi + 1):
        a = state_cores[k]
        w = mpo_cores[k - lo]
        t = np.tensordot(carry, a, axes=([1], [0]))        # (chi, R, q, b)
        t = np.tensordot(t, w, axes=([1, 2], [0, 2]))      # (chi, b, p, S)
        t = t.transpose(0, 2, 1, 3)                        # (chi, p, b, S)
        if not np.all(np.isfinite(t)):
            raise ValueError("non-finite intermediate in zip-up")
        chi = t.shape[0]
        if k < hi:
            mat = t.reshape(chi * 2, -1)
            u, sv, vt, tail = _truncated_svd(mat, delta, rule)
            log.record(k, tail)
            new_chi = len(sv)
            if max_bond is not None and new_chi > max_bond:
                raise BondLimitError(k, new_chi, max_bond)
            out[k] = u.reshape(chi, 2, new_chi)
            carry = (sv[:, None] * vt).reshape(new_chi, t.shape[2], t.shape[3])
        else:
            out[k] = t.reshape(chi, 2, t.shape[2] * t.shape[3])
    return out


# ---------------------------------------------------------------------------
# expectation values

def sandwich(bra: MpsState, m: Mpo, ket: MpsState) -> float:
    """<bra| m |ket> by exact environment contraction (no truncation)."""
    env = np.ones((1, 1, 1))  # (bra bond, mpo bond, ket bond)
    for cb, w, ck in zip(bra.cores, m.cores, ket.cores):
        env = np.tensordot(env, ck, axes=([2], [0]))       # (a, R, q, c)
        env = np.tensordot(env, w, axes=([1, 2], [0, 2]))  # (a, c, p, S)
        env = np.tensordot(cb, env, axes=([0, 1], [0, 2])) # (d, c, S)
        env = env.transpose(0, 2, 1)                       # (d, S, c)
    return float(env[0, 0, 0])


def expectation_mps(hb, s: MpsState) -> float:
    """Sum of exact part expectations <s|part|s> in fixed part order."""
    parts = hb.parts if isinstance(hb, MpoBatch) else [hb]
    return float(sum(sandwich(s, part, s) for part in parts))


# ---------------------------------------------------------------------------
# gate MPOs

def _operator_tt_cores(dense: np.ndarray, width: int, delta: float):
    """TT-decompose an operator on ``width`` contiguous sites."""
    t = dense.reshape((2,) * (2 * width))
    axes = []
    for k in range(width):
        axes.extend([width - 1 - k, 2 * width - 1 - k])
    t = t.transpose(axes)
    cores = []
    rank = 1
    mat = t.reshape(rank * 4, -1)
    for _ in range(width - 1):
        u, sv, vt, _ = _truncated_svd(mat, delta)
        cores.append(u.reshape(rank, 2, 2, len(sv)))
        rank = len(sv)
        mat = (sv[:, None] * vt).reshape(rank * 4, -1)
    cores.append(mat.reshape(rank, 2, 2, 1))
    return cores


def embed_operator_mpo(n_qubits: int, support: list[int], dense: np.ndarray,
                       delta: float = GATE_TT_DELTA) -> Mpo:
    """MPO of an operator on arbitrary (sorted) support qubits.

    The operator is TT-decomposed on its support; intervening sites get
    rank-carrying identity cores, sites outside the span rank-1 identities.
    """
    support = sorted(support)
    width = len(support)
    span_cores = _operator_tt_cores(dense, width, delta)
    cores: list[np.ndarray] = []
    eye = np.eye(2)
    pos = 0
    for q in range(n_qubits):
        if q < support[0] or q > support[-1]:
            cores.append(eye.reshape(1, 2, 2, 1).copy())
        elif q == support[pos]:
            cores.append(span_cores[pos])
            if pos + 1 < width:
                pos += 1
        else:
            rank = cores[-1].shape[3]
            cores.append(np.einsum("ab,pq->apqb", np.eye(rank), eye))
    return Mpo(cores)


def _pattern_indices(op: ExcitationOperator):
    support = sorted(op.occ + op.virt)
    m_occ = 0
    for t, q in enumerate(support):
        if q in op.occ:
            m_occ |= 1 << t
    m_virt = m_occ ^ ((1 << len(support)) - 1)
    return support, m_occ, m_virt


def _qeb_gate_dense(op: ExcitationOperator, theta: float):
    """Dense exp(theta T) on the op's sorted support (a Givens rotation)."""
    support, m_occ, m_virt = _pattern_indices(op)
    dim = 1 << len(support)
    dense = np.eye(dim)
    c, sn = np.cos(theta), np.sin(theta)
    dense[m_occ, m_occ] = c
    dense[m_virt, m_virt] = c
    dense[m_virt, m_occ] = sn
    dense[m_occ, m_virt] = -sn
    return support, dense


def qeb_exponential_mpo(op: ExcitationOperator, theta: float, n_qubits: int) -> Mpo:
    """Exact MPO of exp(theta T): a Givens rotation embedded in identity.

    Bond dimensions are structurally bounded by 5 (identity plus four
    pattern projectors/swappers on the support).
    """
    support, dense = _qeb_gate_dense(op, theta)
    mpo = embed_operator_mpo(n_qubits, support, dense)
    if mpo.max_bond > GATE_MAX_BOND:  # pragma: no cover - structurally impossible
        import warnings

        warnings.warn(f"gate MPO bond {mpo.max_bond} exceeds {GATE_MAX_BOND}")
    return mpo


@lru_cache(maxsize=4096)
def _gate_span_templates(op: ExcitationOperator):
    """Cached span MPOs of the generator T and of T^2 for one pool operator.

    exp(theta T) = I + sin(theta) T + (1 - cos(theta)) T^2 with T^3 = -T, so
    a gate at any angle is a first-core-scaled direct sum of three cached
    parts (bond <= 1 + 2 + 2 = 5); no SVD is needed per application.
    """
    support, m_occ, m_virt = _pattern_indices(op)
    lo, hi = support[0], support[-1]
    width = hi - lo + 1
    shifted = [q - lo for q in support]
    dim = 1 << len(support)
    t = np.zeros((dim, dim))
    t[m_virt, m_occ] = 1.0
    t[m_occ, m_virt] = -1.0
    t_mpo = embed_operator_mpo(width, shifted, t)
    t2_mpo = embed_operator_mpo(width, shifted, t @ t)
    return lo, identity_mpo(width), t_mpo, t2_mpo


def _scaled_first_core(m: Mpo, factor: float) -> Mpo:
    cores = list(m.cores)
    cores[0] = cores[0] * factor
    return Mpo(cores)


def apply_qeb_gate(op: ExcitationOperator, theta: float, s: MpsState, delta: float,
                   max_bond: int | None = None,
                   rule: str = "value") -> tuple[MpsState, TruncationLog]:
    """Gate application touching only the support span of the operator.

    Identical action to zipping the full-chain gate MPO except that the
    identity tails are skipped; the result carries no canonical center.
    Engine arithmetic defaults to the fixed singular-value cutoff.
    """
    lo, ident, t_mpo, t2_mpo = _gate_span_templates(op)
    gate = direct_sum_mpo(
        direct_sum_mpo(ident, _scaled_first_core(t_mpo, np.sin(theta))),
        _scaled_first_core(t2_mpo, 1.0 - np.cos(theta)),
    )
    log = TruncationLog()
    cores = _zipup_range(s.cores, gate.cores, lo, delta, max_bond, log, rule)
    return MpsState(cores, canonical_center=None), log


def qeb_generator_mpo(op: ExcitationOperator, n_qubits: int) -> Mpo:
    """MPO of the antisymmetric generator T (rank <= 2)."""
    support, m_occ, m_virt = _pattern_indices(op)
    dim = 1 << len(support)
    dense = np.zeros((dim, dim))
    dense[m_virt, m_occ] = 1.0
    dense[m_occ, m_virt] = -1.0
    return embed_operator_mpo(n_qubits, support, dense)
