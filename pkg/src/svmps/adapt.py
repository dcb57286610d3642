"""Adaptive ansatz-growth driver over the three emulation engines.

Each iteration screens the pool gradients on the current state, appends the
operator with the largest magnitude (ties: lowest pool index), re-optimizes
all angles warm-started from the previous optimum, and records energy,
state size and truncation diagnostics.

Optimizers: the sparse engine uses quasi-Newton descent with analytic
gradients (one adjoint sweep per evaluation); the tensor-train engines use a
derivative-free coordinate search (sequential golden-section refinement of
one angle at a time, at least two full sweeps).  Energy evaluations are
counted exactly; gradient screenings are tracked separately since the pool
is fixed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from .cibasis import qubit_spin
from .mpsengine import (
    BondLimitError,
    DEFAULT_STATE_MAX_BOND,
    MpsState,
    TruncationLog,
    apply_mpo_exact,
    apply_mpo_zipup,
    apply_qeb_gate,
    expectation_mps,
    from_configuration,
    inner,
    mpo_from_pauli_sum,
    mps_norm,
    qeb_generator_mpo,
    scale_mps,
)
from .partition import (
    DualState,
    apply_ansatz_dual,
    expectation_partitioned,
    partition,
)
from .sparse import dot, spmspv
from .svengine import (
    ExcitationOperator,
    SvState,
    ansatz_energy_gradient,
    apply_generator,
    apply_qeb_exponential,
    assemble_subspace_hamiltonian,
)
from .system import MolecularSystem

ENGINES = ("sv", "mps", "partitioned")


@dataclass(frozen=True)
class OperatorPool:
    """Deterministically ordered spin-conserving excitation pool."""

    ops: tuple

    @property
    def size(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)


def build_qeb_pool(n_qubits: int, n_electrons: int, ordering: str = "interleaved",
                   ms2: int = 0) -> OperatorPool:
    """All singles (same spin) and doubles (S_z conserving) from the
    Hartree-Fock occupation into the virtual spin orbitals."""
    from .cibasis import hartree_fock_configuration

    hf = hartree_fock_configuration(n_electrons, n_qubits, ordering, ms2)
    occ = hf.occupied()
    virt = [q for q in range(n_qubits) if q not in occ]
    if not virt or not occ:
        raise ValueError("empty operator pool: no occupied/virtual orbitals")
    spin = {q: qubit_spin(q, n_qubits, ordering) for q in range(n_qubits)}

    singles = [
        ExcitationOperator("single", (i,), (a,))
        for i in occ for a in virt if spin[i] == spin[a]
    ]
    singles.sort(key=lambda op: (op.occ, op.virt))
    doubles = []
    occ_pairs = [(i, j) for n_, i in enumerate(occ) for j in occ[n_ + 1:]]
    virt_pairs = [(a, b) for n_, a in enumerate(virt) for b in virt[n_ + 1:]]
    for i, j in occ_pairs:
        si = spin[i] + spin[j]
        for a, b in virt_pairs:
            if spin[a] + spin[b] == si and {spin[a], spin[b]} == {spin[i], spin[j]}:
                doubles.append(ExcitationOperator("double", (i, j), (a, b)))
    doubles.sort(key=lambda op: (op.occ, op.virt))
    ops = tuple(singles + doubles)
    if len(set(ops)) != len(ops):
        raise AssertionError("duplicate pool operators")
    return OperatorPool(ops)


@dataclass
class AdaptConfig:
    engine: str = "sv"
    eps_grad: float = 1e-3
    max_iter: int = 500
    opt_tol: float = 1e-9          # energy-change stop
    opt_gtol: float = 1e-6         # gradient-norm stop (sv engine)
    opt_max_evals: int = 200_000
    opt_xtol: float = 1e-6         # golden-section angle resolution
    opt_line: str = "golden"       # 1-d sub-solver: golden | fit5
    min_sweeps: int = 2
    delta: float = 1e-12           # MPS truncation threshold
    trunc_rule: str = "value"      # engine SVD cutoff: value | tail
    eta: int = 1                   # partitioning level
    mpo_cap: int = 100
    max_bond: int = DEFAULT_STATE_MAX_BOND
    threads: int = 1
    seed: int = 0

    def validate(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        for name in ("eps_grad", "opt_tol", "opt_gtol", "opt_xtol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.trunc_rule not in ("value", "tail"):
            raise ValueError(f"unknown truncation rule {self.trunc_rule!r}")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class RunRecord:
    iteration: int
    selected_op: str | None
    grad_max: float
    energy: float
    abs_error: float | None
    nnz: int
    max_trunc_err: float
    wall_elapsed: float
    energy_evals: int

    CSV_HEADER = "iter,selected_op,grad_max,energy,abs_error,nnz,max_trunc_err,wall_s,energy_evals"

    def csv_row(self) -> str:
        err = "" if self.abs_error is None else f"{self.abs_error:.12e}"
        sel = self.selected_op or ""
        return (f"{self.iteration},{sel},{self.grad_max:.12e},{self.energy:.15e},"
                f"{err},{self.nnz},{self.max_trunc_err:.12e},"
                f"{self.wall_elapsed:.6f},{self.energy_evals}")


@dataclass
class OptResult:
    thetas: np.ndarray
    energy: float
    n_evals: int
    warning: bool = False
    message: str = ""


# ---------------------------------------------------------------------------
# engines

class SvAdaptEngine:
    """Exact sparse engine: analytic gradients, quasi-Newton optimization."""

    name = "sv"
    uses_coordinate_search = False

    def __init__(self, system: MolecularSystem, config: AdaptConfig):
        self.system = system
        self.basis = system.basis
        self.matrix = assemble_subspace_hamiltonian(system.hamiltonian, self.basis)
        self.threads = config.threads
        self.run_log = TruncationLog()
        self._drained = 0

    def initial_state(self) -> SvState:
        return SvState.from_configuration(self.basis, self.system.hf)

    def apply(self, state, op, theta, log=None):
        return apply_qeb_exponential(op, theta, state)

    def rebuild(self, ops, thetas):
        state = self.initial_state()
        for op, theta in zip(ops, thetas):
            state = apply_qeb_exponential(op, float(theta), state)
        return state

    def energy(self, state) -> float:
        return dot(state.vec, spmspv(self.matrix, state.vec, n_workers=self.threads))

    def energy_and_gradient(self, ops, thetas):
        return ansatz_energy_gradient(self.matrix, self.basis, self.system.hf,
                                      ops, thetas, n_workers=self.threads)

    def screen(self, state, pool) -> np.ndarray:
        w = spmspv(self.matrix, state.vec, n_workers=self.threads)
        return np.array([2.0 * dot(w, apply_generator(op, state)) for op in pool])

    def state_size(self, state) -> int:
        return state.vec.nnz

    def drain_log(self):
        return []


class MpsAdaptEngine:
    """Pure tensor-train engine; the Hamiltonian is one static bond-capped
    MPO batch built at 1e-14, run-time truncation happens at config.delta."""

    name = "mps"
    uses_coordinate_search = True

    def __init__(self, system: MolecularSystem, config: AdaptConfig):
        self.system = system
        self.delta = config.delta
        self.rule = config.trunc_rule
        self.max_bond = config.max_bond
        self.hamiltonian_mpo = mpo_from_pauli_sum(system.hamiltonian, cap=config.mpo_cap)
        self.run_log = TruncationLog()
        self._drained = 0

    def initial_state(self) -> MpsState:
        return from_configuration(self.system.hf)

    def apply(self, state, op, theta, log=None):
        out, oplog = apply_qeb_gate(op, theta, state, self.delta,
                                    max_bond=self.max_bond, rule=self.rule)
        nrm = mps_norm(out)
        if nrm > 0:
            out = scale_mps(out, 1.0 / nrm)
        if log is not None:
            log.extend(oplog)
        return out

    def rebuild(self, ops, thetas):
        state = self.initial_state()
        for op, theta in zip(ops, thetas):
            state = self.apply(state, op, float(theta), log=self.run_log)
        return state

    def energy(self, state) -> float:
        return expectation_mps(self.hamiltonian_mpo, state)

    def screen(self, state, pool) -> np.ndarray:
        """Gradients via zip-up of each Hamiltonian part onto the state.

        The compressions H|psi> are the heavy, truncating contractions of
        the run; their discarded tails go to the run log.
        """
        phis = []
        for part in self.hamiltonian_mpo.parts:
            phi, oplog = apply_mpo_zipup(part, state, self.delta, max_bond=None,
                                         rule=self.rule)
            self.run_log.extend(oplog)
            phis.append(phi)
        grads = np.empty(len(pool))
        for k, op in enumerate(pool):
            t_psi = apply_mpo_exact(qeb_generator_mpo(op, state.n_sites), state)
            grads[k] = 2.0 * sum(inner(phi, t_psi) for phi in phis)
        return grads

    def state_size(self, state) -> int:
        return state.n_parameters

    def drain_log(self):
        new = self.run_log.entries[self._drained:]
        self._drained = len(self.run_log.entries)
        return new


class PartitionedAdaptEngine:
    """Dual-representation engine: exact sparse local part, MPS boundary."""

    name = "partitioned"
    uses_coordinate_search = True

    def __init__(self, system: MolecularSystem, config: AdaptConfig):
        self.system = system
        self.basis = system.basis
        self.delta = config.delta
        self.rule = config.trunc_rule
        self.max_bond = config.max_bond
        self.threads = config.threads
        self.partitioned = partition(system.hamiltonian, config.eta,
                                     basis=self.basis, cap=config.mpo_cap)
        self.run_log = TruncationLog()
        self._drained = 0

    def initial_state(self) -> DualState:
        return DualState.hartree_fock(self.basis, self.system.hf)

    def apply(self, state, op, theta, log=None):
        scratch = TruncationLog()
        out = apply_ansatz_dual(op, theta, state, self.delta,
                                max_bond=self.max_bond, log=scratch,
                                rule=self.rule)
        if log is not None:
            log.extend(scratch)
        return out

    def rebuild(self, ops, thetas):
        state = self.initial_state()
        for op, theta in zip(ops, thetas):
            state = self.apply(state, op, float(theta), log=self.run_log)
        return state

    def energy(self, state) -> float:
        return expectation_partitioned(self.partitioned, state, n_workers=self.threads)

    def screen(self, state, pool) -> np.ndarray:
        """Local part exactly on the sparse core; boundary parts via logged
        zip-up compressions onto the MPS, mirroring the pure engine."""
        w = spmspv(self.partitioned.local_csr, state.sv.vec, n_workers=self.threads)
        phis = []
        for _, part in self.partitioned.iter_boundary_parts():
            phi, oplog = apply_mpo_zipup(part, state.mps, self.delta, max_bond=None,
                                         rule=self.rule)
            self.run_log.extend(oplog)
            phis.append(phi)
        grads = np.empty(len(pool))
        for k, op in enumerate(pool):
            local = dot(w, apply_generator(op, state.sv))
            t_psi = apply_mpo_exact(qeb_generator_mpo(op, state.mps.n_sites), state.mps)
            grads[k] = 2.0 * (local + sum(inner(phi, t_psi) for phi in phis))
        return grads

    def state_size(self, state) -> int:
        return state.sv.vec.nnz

    def drain_log(self):
        new = self.run_log.entries[self._drained:]
        self._drained = len(self.run_log.entries)
        return new


def make_engine(system: MolecularSystem, config: AdaptConfig):
    config.validate()
    cls = {"sv": SvAdaptEngine, "mps": MpsAdaptEngine,
           "partitioned": PartitionedAdaptEngine}[config.engine]
    return cls(system, config)


# ---------------------------------------------------------------------------
# selection and optimization

def screen_gradients(engine, state, pool) -> list:
    """(op, gradient) per pool operator, in pool order."""
    grads = engine.screen(state, pool)
    return list(zip(pool.ops, grads))


def select_operator(gradients, eps_grad: float):
    """Index of the largest-magnitude gradient, or None when converged.

    Exact ties resolve to the lowest pool index (np.argmax convention).
    """
    mags = np.abs(np.asarray([g for _, g in gradients] if gradients and
                             isinstance(gradients[0], tuple) else gradients))
    if mags.size == 0:
        raise ValueError("empty gradient list")
    best = int(np.argmax(mags))
    if mags[best] < eps_grad:
        return None
    return best


def _optimize_lbfgs(engine, ops, thetas0, cfg: AdaptConfig) -> OptResult:
    counter = {"n": 0}

    def fun(t):
        counter["n"] += 1
        return engine.energy_and_gradient(ops, t)

    if len(ops) == 0:
        e = engine.energy(engine.initial_state())
        return OptResult(np.zeros(0), e, 1)
    res = scipy.optimize.minimize(
        fun, np.asarray(thetas0, dtype=np.float64), jac=True, method="L-BFGS-B",
        options={"ftol": cfg.opt_tol, "gtol": cfg.opt_gtol,
                 "maxfun": cfg.opt_max_evals},
    )
    warning = counter["n"] >= cfg.opt_max_evals
    return OptResult(np.asarray(res.x), float(res.fun), counter["n"],
                     warning, str(res.message))


def _golden_refine(f, a, b, c, fb, xtol):
    """Golden-section minimization inside a bracket a < b < c with fb known."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x0, x3 = a, c
    if abs(c - b) > abs(b - a):
        x1, x2 = b, b + (1 - invphi) * (c - b)
        f1, f2 = fb, f(x2)
    else:
        x1, x2 = b - (1 - invphi) * (b - a), b
        f1, f2 = f(x1), fb
    while abs(x3 - x0) > xtol:
        if f1 < f2:
            x3, x2, f2 = x2, x1, f1
            x1 = invphi * x2 + (1 - invphi) * x0
            f1 = f(x1)
        else:
            x0, x1, f1 = x1, x2, f2
            x2 = invphi * x1 + (1 - invphi) * x3
            f2 = f(x2)
    return (x1, f1) if f1 < f2 else (x2, f2)


def _line_minimize(f, t0, f0, xtol, step=0.4, max_expand=16):
    """Bracket downhill from t0 then golden-refine; never returns worse."""
    a, b, c = t0 - step, t0, t0 + step
    fa, fc = f(a), f(c)
    fb = f0
    expansions = 0
    while not (fb <= fa and fb <= fc) and expansions < max_expand:
        if fa < fc:
            c, fc = b, fb
            b, fb = a, fa
            a = b - 1.618 * (c - b)
            fa = f(a)
        else:
            a, fa = b, fb
            b, fb = c, fc
            c = b + 1.618 * (b - a)
            fc = f(c)
        expansions += 1
    if not (fb <= fa and fb <= fc):
        return t0, f0
    t_best, f_best = _golden_refine(f, a, b, c, fb, xtol)
    if f_best <= f0:
        return t_best, f_best
    return t0, f0


_FIT5_OFFSETS = np.array([0.0, 0.4 * np.pi, 0.8 * np.pi, 1.2 * np.pi, 1.6 * np.pi])


def _trig_design(ts: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones_like(ts), np.cos(ts), np.sin(ts),
                            np.cos(2 * ts), np.sin(2 * ts)])


def _line_minimize_fit5(f, t0, f0, xtol):
    """Exact 5-point fit of the single-angle energy restriction.

    exp(theta T) is quadratic in (sin theta, cos theta), so the energy along
    one coordinate is a degree-2 trigonometric polynomial; five samples over
    one period determine it.  The fitted minimum is verified with one real
    evaluation and never accepted when worse than the start.
    """
    ts = t0 + _FIT5_OFFSETS
    fs = np.array([f0] + [f(t) for t in ts[1:]])
    coeff = np.linalg.solve(_trig_design(ts), fs)
    grid = t0 + np.linspace(-np.pi, np.pi, 1024, endpoint=False)
    vals = _trig_design(grid) @ coeff
    t_best = grid[int(np.argmin(vals))]
    # Newton polish on the fitted model (derivatives are closed-form)
    for _ in range(40):
        _, c1, s1, c2, s2 = coeff
        g = -c1 * np.sin(t_best) + s1 * np.cos(t_best) \
            - 2 * c2 * np.sin(2 * t_best) + 2 * s2 * np.cos(2 * t_best)
        h = -c1 * np.cos(t_best) - s1 * np.sin(t_best) \
            - 4 * c2 * np.cos(2 * t_best) - 4 * s2 * np.sin(2 * t_best)
        if h <= 0 or abs(g) < 1e-15:
            break
        step = g / h
        t_best -= step
        if abs(step) < xtol * 1e-3:
            break
    f_best = f(t_best)
    best = int(np.argmin(fs))
    if fs[best] < f_best:
        t_best, f_best = ts[best], fs[best]
    if f_best <= f0:
        return t_best, f_best
    return t0, f0


def _optimize_coordinate(engine, ops, thetas0, cfg: AdaptConfig) -> OptResult:
    """Sequential per-angle golden-section sweeps with prefix-state caching.

    Trial states are scratch (not logged); the accepted state is rebuilt by
    the caller with logging.  Energy never increases across accepted steps.
    """
    k = len(ops)
    counter = {"n": 0}
    if k == 0:
        e = engine.energy(engine.initial_state())
        return OptResult(np.zeros(0), e, 1)
    thetas = np.array(thetas0, dtype=np.float64)

    def tail_energy(i, prefix_state, t):
        counter["n"] += 1
        s = engine.apply(prefix_state, ops[i], float(t), log=None)
        for m in range(i + 1, k):
            s = engine.apply(s, ops[m], float(thetas[m]), log=None)
        return engine.energy(s)

    if cfg.opt_line == "fit5":
        line_search = _line_minimize_fit5
    elif cfg.opt_line == "golden":
        line_search = _line_minimize
    else:
        raise ValueError(f"unknown line minimizer {cfg.opt_line!r}")

    best = None
    sweeps = 0
    warning = False
    while True:
        sweeps += 1
        prefix = engine.initial_state()
        sweep_start = best
        for i in range(k):
            def f(t, _i=i, _prefix=prefix):
                return tail_energy(_i, _prefix, t)
            f0 = f(thetas[i])
            t_new, f_new = line_search(f, thetas[i], f0, cfg.opt_xtol)
            thetas[i] = t_new
            best = f_new
            prefix = engine.apply(prefix, ops[i], float(thetas[i]), log=None)
            if counter["n"] >= cfg.opt_max_evals:
                warning = True
                break
        if warning:
            break
        if sweeps >= cfg.min_sweeps:
            if sweep_start is not None and sweep_start - best <= cfg.opt_tol:
                break
    return OptResult(thetas, float(best), counter["n"], warning,
                     "max evals exceeded" if warning else "")


def optimize_parameters(engine, ops, thetas0, config: AdaptConfig) -> OptResult:
    """Dispatch to the engine's optimizer; counts energy evaluations exactly."""
    if engine.uses_coordinate_search:
        return _optimize_coordinate(engine, ops, thetas0, config)
    return _optimize_lbfgs(engine, ops, thetas0, config)


# ---------------------------------------------------------------------------
# the outer loop

@dataclass
class RunResult:
    records: list
    status: str                     # converged | max_iter | aborted
    ansatz_ops: list = field(default_factory=list)
    thetas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    abort_reason: str = ""
    optimizer_warnings: int = 0


def run_adapt(config: AdaptConfig, system: MolecularSystem, *,
              pool: OperatorPool | None = None,
              reference_energy: float | None = None,
              csv_path=None, trunc_csv_path=None,
              progress=None) -> RunResult:
    """Iterate screen -> select -> append -> optimize -> record.

    Records are appended (and flushed) to ``csv_path`` as they are produced,
    so a killed run leaves a parseable prefix.  Engine aborts (bond-cap
    overflow) terminate the run with all records intact.
    """
    config.validate()
    engine = make_engine(system, config)
    if pool is None:
        pool = build_qeb_pool(system.n_qubits, system.integrals.nelec,
                              system.ordering, system.integrals.ms2)

    records: list[RunRecord] = []
    ansatz_ops: list[ExcitationOperator] = []
    thetas = np.zeros(0)
    n_evals = 0
    n_warn = 0
    status = "max_iter"
    abort_reason = ""
    t0 = time.perf_counter()

    csv_file = open(csv_path, "w", encoding="ascii") if csv_path else None
    trunc_file = open(trunc_csv_path, "w", encoding="ascii") if trunc_csv_path else None
    if csv_file:
        csv_file.write(RunRecord.CSV_HEADER + "\n")
        csv_file.flush()
    if trunc_file:
        trunc_file.write("iteration,site,tail_norm,running_max\n")
        trunc_file.flush()

    def emit(record: RunRecord):
        records.append(record)
        if csv_file:
            csv_file.write(record.csv_row() + "\n")
            csv_file.flush()
        if trunc_file:
            for site, tail in engine.drain_log():
                trunc_file.write(f"{record.iteration},{site},{tail:.6e},"
                                 f"{engine.run_log.running_max:.6e}\n")
            trunc_file.flush()
        if progress:
            progress(record)

    try:
        state = engine.initial_state()
        energy = engine.energy(state)
        n_evals += 1
        grads = engine.screen(state, pool)
        selected: str | None = None
        iteration = 0
        while True:
            emit(RunRecord(
                iteration=iteration, selected_op=selected,
                grad_max=float(np.max(np.abs(grads))), energy=float(energy),
                abs_error=None if reference_energy is None else abs(energy - reference_energy),
                nnz=engine.state_size(state),
                max_trunc_err=engine.run_log.running_max,
                wall_elapsed=time.perf_counter() - t0,
                energy_evals=n_evals,
            ))
            pick = select_operator(list(grads), config.eps_grad)
            if pick is None:
                status = "converged"
                break
            if iteration >= config.max_iter:
                status = "max_iter"
                break
            ansatz_ops.append(pool.ops[pick])
            selected = pool.ops[pick].label()
            thetas = np.append(thetas, 0.0)
            opt = optimize_parameters(engine, ansatz_ops, thetas, config)
            thetas = opt.thetas
            energy = opt.energy
            n_evals += opt.n_evals
            n_warn += int(opt.warning)
            state = engine.rebuild(ansatz_ops, thetas)
            grads = engine.screen(state, pool)
            iteration += 1
    except BondLimitError as exc:
        status = "aborted"
        abort_reason = str(exc)
    finally:
        if csv_file:
            csv_file.close()
        if trunc_file:
            trunc_file.close()

    return RunResult(records=records, status=status, ansatz_ops=ansatz_ops,
                     thetas=thetas, abort_reason=abort_reason,
                     optimizer_warnings=n_warn)


# ---------------------------------------------------------------------------
# performance metric

def amortized_coefficient(records):
    """Amortized iteration coefficient per record and the quadratic fit.

    Accepts RunRecords or (iteration, wall_seconds) pairs; iteration 0 and
    zero wall times are skipped.  Returns (iterations, c_tilde, c_fit) where
    c_tilde[j] = j / sqrt(T_j) and c_fit minimizes ||T - c j^2||_2.
    """
    pairs = []
    for r in records:
        if hasattr(r, "iteration"):
            pairs.append((r.iteration, r.wall_elapsed))
        else:
            pairs.append((int(r[0]), float(r[1])))
    pairs = [(j, t) for j, t in pairs if j > 0 and t > 0]
    if len(pairs) < 2:
        raise ValueError("need at least 2 records with positive wall time")
    js = np.array([p[0] for p in pairs], dtype=np.float64)
    ts = np.array([p[1] for p in pairs])
    if np.any(np.diff(ts[np.argsort(js)]) < 0):
        raise ValueError("wall times are not monotone in the iteration index")
    c_tilde = js / np.sqrt(ts)
    c_fit = float(np.sum(ts * js ** 2) / np.sum(js ** 4))
    return js.astype(int), c_tilde, c_fit
