"""Tensor-train engine against the dense oracles."""

import numpy as np
import pytest

from svmps import oracle
from svmps.cibasis import Configuration
from svmps.mpsengine import (
    BondLimitError,
    MpsState,
    apply_mpo_exact,
    apply_mpo_zipup,
    apply_qeb_gate,
    canonicalize,
    direct_sum_mpo,
    expectation_mps,
    from_configuration,
    identity_mpo,
    inner,
    mpo_from_pauli_sum,
    mpo_from_term,
    mps_from_dense,
    mps_norm,
    qeb_exponential_mpo,
    qeb_generator_mpo,
    sandwich,
    tt_round,
)
from svmps.pauli import PauliSum
from svmps.sparse import SparseVector, normalize
from svmps.svengine import (
    ExcitationOperator,
    SvState,
    apply_qeb_exponential,
    assemble_subspace_hamiltonian,
    expectation,
)


def random_mps(n, r, rng, normalized=False):
    cores = []
    prev = 1
    for k in range(n):
        nxt = 1 if k == n - 1 else int(min(r, 2 ** (k + 1), 2 ** (n - k - 1)))
        cores.append(rng.standard_normal((prev, 2, nxt)) / np.sqrt(2 * prev))
        prev = nxt
    s = MpsState(cores)
    if normalized:
        nrm = mps_norm(s)
        cores[-1] = cores[-1] / nrm
        s = MpsState(cores)
    return s


def embed_sv(state: SvState, n_qubits):
    full = np.zeros(1 << n_qubits)
    full[state.basis.states[state.vec.indices]] = state.vec.values
    return full


# ---------------------------------------------------------------------------
# states

def test_from_configuration_product_state():
    s = from_configuration(Configuration(0b0101, 4))
    assert s.bond_dims == [1, 1, 1]
    vec = oracle.dense_from_mps(s)
    assert vec[0b0101] == 1.0 and np.count_nonzero(vec) == 1
    assert mps_norm(s) == 1.0


def test_inner_and_norm(rng):
    a = random_mps(8, 12, rng)
    b = random_mps(8, 12, rng)
    da, db = oracle.dense_from_mps(a), oracle.dense_from_mps(b)
    assert inner(a, b) == pytest.approx(float(da @ db), abs=1e-11)
    assert inner(a, a) == pytest.approx(mps_norm(a) ** 2, abs=1e-11)
    c0 = from_configuration(Configuration(0, 4))
    c1 = from_configuration(Configuration(1, 4))
    assert inner(c0, c1) == 0.0


def test_canonicalize_preserves_and_orthogonalizes(rng):
    s = random_mps(8, 10, rng)
    ref = oracle.dense_from_mps(s)
    out = canonicalize(s, 4)
    assert np.allclose(oracle.dense_from_mps(out), ref, atol=1e-12)
    for k in range(4):
        core = out.cores[k]
        gram = np.einsum("apr,aps->rs", core, core)
        assert np.allclose(gram, np.eye(core.shape[2]), atol=1e-10)
    for k in range(5, 8):
        core = out.cores[k]
        gram = np.einsum("rpa,spa->rs", core, core)
        assert np.allclose(gram, np.eye(core.shape[0]), atol=1e-10)


# ---------------------------------------------------------------------------
# rounding

def test_tt_round_lossless_at_zero(rng):
    s = random_mps(10, 16, rng)
    out, log = tt_round(s, 0.0)
    assert np.max(np.abs(oracle.dense_from_mps(out) - oracle.dense_from_mps(s))) <= 1e-13
    assert log.max_error == 0.0


def test_tt_round_ghz_ranks():
    ghz = np.zeros(1 << 8)
    ghz[0] = ghz[-1] = 1 / np.sqrt(2)
    out, _ = tt_round(mps_from_dense(ghz), 1e-8)
    assert out.bond_dims == [2] * 7


def test_tt_round_error_bound(rng):
    """Measured error within delta*sqrt(n-1), i.e. the stated relative bound."""
    for _ in range(20):
        s = random_mps(10, 16, rng)
        dense = oracle.dense_from_mps(s)
        for delta in (1e-2, 1e-4):
            out, _ = tt_round(s, delta)
            err = np.linalg.norm(oracle.dense_from_mps(out) - dense)
            assert err <= delta * np.sqrt(9)


def test_tt_round_relative_mode(rng):
    s = random_mps(10, 16, rng)
    dense = oracle.dense_from_mps(s)
    out, _ = tt_round(s, 1e-3, mode="relative")
    err = np.linalg.norm(oracle.dense_from_mps(out) - dense)
    assert err <= 1e-3 * np.linalg.norm(dense)


def test_tt_round_rejects_bad_input(rng):
    s = random_mps(6, 4, rng)
    with pytest.raises(ValueError):
        tt_round(s, -1.0)
    s.cores[2][0, 0, 0] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        tt_round(s, 0.0)


# ---------------------------------------------------------------------------
# MPOs

def test_mpo_single_term_rank_one(h4):
    batch = mpo_from_pauli_sum(PauliSum.from_strings([(0.8, "XZYY")]))
    assert len(batch.parts) == 1
    assert batch.max_bond == 1


def test_direct_sum_rank_additivity():
    terms = [(0.5, "XXII"), (0.25, "IYYI"), (-0.3, "ZZZZ"), (0.1, "IIZI")]
    ps = PauliSum.from_strings(terms)
    mpos = [mpo_from_term(4, int(x), int(z), float(c))
            for x, z, c in zip(ps.xs, ps.zs, ps.coeffs)]
    acc = mpos[0]
    for m in mpos[1:]:
        acc = direct_sum_mpo(acc, m)
    assert max(acc.bond_dims) <= len(terms)
    assert np.allclose(oracle.dense_from_mpo(acc), oracle.dense_from_pauli(ps), atol=1e-14)


def test_mpo_batch_h4_single_part(h4):
    batch = mpo_from_pauli_sum(h4.hamiltonian, 1e-14, cap=100)
    assert len(batch.parts) == 1
    assert batch.max_bond <= 100
    dense = sum(oracle.dense_from_mpo(p) for p in batch.parts)
    assert np.max(np.abs(dense - oracle.dense_from_pauli(h4.hamiltonian))) <= 1e-12


def test_mpo_batch_cap_splits(h4):
    batch = mpo_from_pauli_sum(h4.hamiltonian, 1e-14, cap=20)
    assert len(batch.parts) > 1
    assert batch.max_bond <= 20
    dense = sum(oracle.dense_from_mpo(p) for p in batch.parts)
    assert np.max(np.abs(dense - oracle.dense_from_pauli(h4.hamiltonian))) <= 1e-12


def test_mpo_empty_sum_rejected():
    with pytest.raises(ValueError):
        mpo_from_pauli_sum(PauliSum(4, [], [], []))


def test_odd_y_term_rejected():
    ps = PauliSum.from_strings([(1.0, "YIII")])
    with pytest.raises(ValueError, match="real"):
        mpo_from_term(4, int(ps.xs[0]), int(ps.zs[0]), 1.0)


# ---------------------------------------------------------------------------
# zip-up application

def test_zipup_identity_invariance(rng):
    s = random_mps(8, 8, rng)
    out, log = apply_mpo_zipup(identity_mpo(8), s, 1e-14)
    assert np.allclose(oracle.dense_from_mps(out), oracle.dense_from_mps(s), atol=1e-12)
    assert out.max_bond == s.max_bond  # rank-1 MPO keeps bonds invariant


def test_zipup_lossless_at_zero(h4, rng):
    batch = mpo_from_pauli_sum(h4.hamiltonian)
    s = random_mps(8, 8, rng)
    ref = oracle.dense_from_mpo(batch.parts[0]) @ oracle.dense_from_mps(s)
    out, _ = apply_mpo_zipup(batch.parts[0], s, 0.0)
    assert np.max(np.abs(oracle.dense_from_mps(out) - ref)) <= 1e-11
    exact = apply_mpo_exact(batch.parts[0], s)
    assert np.max(np.abs(oracle.dense_from_mps(exact) - ref)) <= 1e-11


def test_zipup_bond_cap_aborts(h4, rng):
    batch = mpo_from_pauli_sum(h4.hamiltonian)
    s = random_mps(8, 8, rng)
    with pytest.raises(BondLimitError):
        apply_mpo_zipup(batch.parts[0], s, 0.0, max_bond=4)


def test_value_rule_tail_can_exceed_delta(h6, rng):
    """Fixed singular-value cutoff: the discarded tail is unbounded by delta.

    Zipping the Hamiltonian onto a mildly entangled state discards many
    sub-threshold singular values whose combined mass exceeds delta; the
    tail rule by contrast clamps every recorded tail at delta.
    """
    delta = 1e-2
    state = from_configuration(h6.hf)
    for op, theta in [(ExcitationOperator("double", (0, 1), (6, 7)), 0.4),
                      (ExcitationOperator("double", (2, 3), (8, 9)), -0.5),
                      (ExcitationOperator("double", (4, 5), (10, 11)), 0.3),
                      (ExcitationOperator("double", (0, 3), (7, 10)), 0.6)]:
        state, _ = apply_qeb_gate(op, theta, state, delta, rule="value")
    batch = mpo_from_pauli_sum(h6.hamiltonian)
    worst_value = 0.0
    worst_tail = 0.0
    for part in batch.parts:
        _, log_v = apply_mpo_zipup(part, state, delta, rule="value")
        _, log_t = apply_mpo_zipup(part, state, delta, rule="tail")
        worst_value = max(worst_value, log_v.max_error)
        worst_tail = max(worst_tail, log_t.max_error)
    assert worst_value > delta
    assert worst_tail <= delta


# ---------------------------------------------------------------------------
# expectation values

def test_expectation_identity_batch(rng):
    s = random_mps(6, 6, rng, normalized=True)
    batch = mpo_from_pauli_sum(PauliSum.from_strings([(1.0, "I" * 6)]))
    assert expectation_mps(batch, s) == pytest.approx(1.0, abs=1e-12)


def test_expectation_hf_cross_engine(h4, h4_csr):
    hf_mps = from_configuration(h4.hf)
    batch = mpo_from_pauli_sum(h4.hamiltonian)
    e_mps = expectation_mps(batch, hf_mps)
    e_sv = expectation(h4_csr, SvState.from_configuration(h4.basis, h4.hf))
    assert e_mps == pytest.approx(e_sv, abs=1e-10)


def test_expectation_eigen_mps(h4, h4_csr, h4_fci):
    e, vec = oracle.fci_ground_energy(h4_csr)
    full = np.zeros(1 << 8)
    full[h4.basis.states] = vec
    s = mps_from_dense(full)
    batch = mpo_from_pauli_sum(h4.hamiltonian)
    assert expectation_mps(batch, s) == pytest.approx(e, abs=1e-9)


# ---------------------------------------------------------------------------
# gate MPOs

GATE_OPS = [
    ExcitationOperator("single", (1,), (5,)),
    ExcitationOperator("single", (0,), (2,)),
    ExcitationOperator("double", (0, 1), (4, 5)),
    ExcitationOperator("double", (0, 3), (5, 6)),
    ExcitationOperator("double", (2, 3), (4, 7)),
]


def test_gate_mpo_theta_zero_identity():
    g = qeb_exponential_mpo(GATE_OPS[2], 0.0, 8)
    assert np.allclose(oracle.dense_from_mpo(g), np.eye(256), atol=1e-12)


@pytest.mark.parametrize("op", GATE_OPS)
def test_gate_mpo_bond_bound(op):
    for theta in (0.3, -1.2, 2.9):
        assert qeb_exponential_mpo(op, theta, 8).max_bond <= 5


def test_gate_mpo_cross_engine(h4, rng):
    """Gate MPO action matches the sparse closed form on random states."""
    worst = 0.0
    for op in GATE_OPS:
        theta = float(rng.uniform(-2.5, 2.5))
        sv = SvState(h4.basis, normalize(SparseVector.from_dense(
            rng.standard_normal(len(h4.basis)))))
        out_sv = apply_qeb_exponential(op, theta, sv)
        mps_in = mps_from_dense(embed_sv(sv, 8))
        out_full, _ = apply_mpo_zipup(qeb_exponential_mpo(op, theta, 8), mps_in, 0.0)
        out_span, _ = apply_qeb_gate(op, theta, mps_in, 0.0)
        ref = embed_sv(out_sv, 8)
        worst = max(worst, np.max(np.abs(oracle.dense_from_mps(out_full) - ref)))
        worst = max(worst, np.max(np.abs(oracle.dense_from_mps(out_span) - ref)))
    assert worst <= 1e-10


def test_gate_unitarity_roundtrip(rng):
    s = random_mps(8, 6, rng, normalized=True)
    op = GATE_OPS[3]
    theta = 1.1
    fwd, log1 = apply_qeb_gate(op, theta, s, 1e-12)
    back, log2 = apply_qeb_gate(op, -theta, fwd, 1e-12)
    err = np.max(np.abs(oracle.dense_from_mps(back) - oracle.dense_from_mps(s)))
    assert err <= max(2 * (log1.max_error + log2.max_error), 1e-10)


def test_generator_mpo_rank_two(rng):
    for op in GATE_OPS:
        g = qeb_generator_mpo(op, 8)
        assert g.max_bond <= 2


def test_sandwich_matches_dense(h4, rng):
    batch = mpo_from_pauli_sum(h4.hamiltonian)
    a = random_mps(8, 6, rng)
    b = random_mps(8, 6, rng)
    ref = oracle.dense_from_mps(a) @ oracle.dense_from_mpo(batch.parts[0]) @ oracle.dense_from_mps(b)
    assert sandwich(a, batch.parts[0], b) == pytest.approx(float(ref), abs=1e-10)
