"""Command-line entry point.

Subcommands:

* ``run``       -- ADAPT iteration loop on any engine; emits per-iteration
                   CSV, a truncation-log CSV (MPS modes), a partition report
                   (partitioned mode) and a JSON run summary.
* ``stats``     -- subspace sizes (Hilbert / CI / spin-resolved CI) as JSON.
* ``oracle``    -- brute-force ground-state energy of an FCIDUMP as JSON.
* ``assemble``  -- build the subspace CSR Hamiltonian and write the binary cache.
* ``metrics``   -- amortized-iteration coefficient from a run CSV.

Exit codes: 0 success (converged or clean max-iter stop), 1 usage/input
error, 2 engine abort (bond-cap overflow).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__

_CONFIG_KEYS = {
    "engine", "eps_grad", "max_iter", "opt_tol", "opt_gtol", "opt_max_evals",
    "opt_xtol", "min_sweeps", "delta", "eta", "mpo_cap", "max_bond",
    "threads", "seed", "fcidump", "ordering", "out", "reference",
}
_INT_KEYS = {"max_iter", "opt_max_evals", "min_sweeps", "eta", "mpo_cap",
             "max_bond", "threads", "seed"}
_FLOAT_KEYS = {"eps_grad", "opt_tol", "opt_gtol", "opt_xtol", "delta"}


def read_config_file(path) -> dict:
    """key=value lines; blank lines and # comments allowed; unknown keys rejected."""
    values: dict = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{ln}: unknown key {key!r}")
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        else:
            values[key] = val
    return values


def _load_system(args):
    from .system import MolecularSystem

    path = Path(args.fcidump)
    if not path.exists():
        raise FileNotFoundError(f"FCIDUMP not found: {path}")
    return MolecularSystem.from_fcidump(path, args.ordering)


def cmd_stats(args) -> int:
    from .cibasis import enumerate_basis, sector_dimensions, subspace_stats
    from .fcidump import load_fcidump

    if args.fcidump:
        ints = load_fcidump(args.fcidump)
        n_qubits, n_alpha, n_beta = 2 * ints.norb, ints.n_alpha, ints.n_beta
    elif args.qubits is not None:
        n_qubits = args.qubits
        n_alpha = args.nalpha
        n_beta = args.nbeta if args.nbeta is not None else args.nalpha
    else:
        raise ValueError("stats needs --fcidump or --qubits/--nalpha")
    stats = sector_dimensions(n_qubits, n_alpha, n_beta)
    if args.enumerate:
        basis = enumerate_basis(n_qubits, n_alpha, n_beta, args.ordering)
        stats = subspace_stats(basis)
        stats["enumerated"] = True
    out = {"n_qubits": n_qubits, "n_alpha": n_alpha, "n_beta": n_beta, **stats}
    print(json.dumps(out, indent=2))
    return 0


def cmd_oracle(args) -> int:
    from . import oracle
    from .svengine import assemble_subspace_hamiltonian

    system = _load_system(args)
    matrix = assemble_subspace_hamiltonian(system.hamiltonian, system.basis)
    energy, _ = oracle.fci_ground_energy(matrix)
    print(json.dumps({
        "fcidump": str(args.fcidump),
        "ordering": args.ordering,
        "n_qubits": system.n_qubits,
        "subspace_dimension": len(system.basis),
        "fci_energy": energy,
    }, indent=2))
    return 0


def cmd_assemble(args) -> int:
    from .svengine import assemble_subspace_hamiltonian, save_csr

    system = _load_system(args)
    matrix = assemble_subspace_hamiltonian(system.hamiltonian, system.basis)
    save_csr(args.out, matrix)
    print(json.dumps({
        "out": str(args.out),
        "n_rows": matrix.n_rows,
        "nnz": matrix.nnz,
    }, indent=2))
    return 0


def cmd_metrics(args) -> int:
    import csv as csvmod

    from .adapt import amortized_coefficient

    pairs = []
    with open(args.csv, newline="") as fh:
        for row in csvmod.DictReader(fh):
            pairs.append((int(row["iter"]), float(row["wall_s"])))
    js, c_tilde, c_fit = amortized_coefficient(pairs)
    print(json.dumps({
        "csv": str(args.csv),
        "iterations": [int(j) for j in js],
        "c_tilde": [float(c) for c in c_tilde],
        "c_fit": c_fit,
    }, indent=2))
    return 0


def cmd_run(args) -> int:
    from . import oracle
    from .adapt import AdaptConfig, run_adapt
    from .svengine import assemble_subspace_hamiltonian

    overrides = read_config_file(args.config) if args.config else {}
    for key in ("fcidump", "ordering"):
        if key in overrides and getattr(args, key) is None:
            setattr(args, key, overrides[key])
    if args.out is None and "out" in overrides:
        args.out = overrides["out"]
    if args.fcidump is None:
        raise ValueError("run needs --fcidump (flag or config file)")
    if args.ordering is None:
        args.ordering = "interleaved"

    cfg_kwargs = {k: v for k, v in overrides.items()
                  if k not in ("fcidump", "ordering", "out", "reference")}
    for key in ("engine", "eps_grad", "max_iter", "delta", "eta", "threads",
                "max_bond", "opt_tol", "opt_gtol", "opt_xtol", "opt_max_evals",
                "min_sweeps", "seed"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg_kwargs[key] = val
    config = AdaptConfig(**cfg_kwargs)
    config.validate()

    system = _load_system(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    reference = None
    ref_arg = args.reference if args.reference is not None else overrides.get("reference", "auto")
    if ref_arg == "auto":
        if system.n_qubits <= 16:
            matrix = assemble_subspace_hamiltonian(system.hamiltonian, system.basis)
            reference, _ = oracle.fci_ground_energy(matrix, cross_check=False)
    elif ref_arg not in ("none", None):
        reference = float(ref_arg)

    csv_path = outdir / "run.csv"
    trunc_path = outdir / "truncation.csv" if config.engine in ("mps", "partitioned") else None
    result = run_adapt(config, system, reference_energy=reference,
                       csv_path=csv_path, trunc_csv_path=trunc_path,
                       progress=(_print_progress if args.verbose else None))

    if config.engine == "partitioned":
        from .partition import partition

        report = partition(system.hamiltonian, config.eta, basis=system.basis,
                           cap=config.mpo_cap).report()
        (outdir / "partition.json").write_text(json.dumps(report, indent=2))

    last = result.records[-1]
    summary = {
        "config": config.to_dict(),
        "fcidump": str(args.fcidump),
        "ordering": args.ordering,
        "n_qubits": system.n_qubits,
        "pool_reference": None if reference is None else reference,
        "status": result.status,
        "abort_reason": result.abort_reason,
        "iterations": last.iteration,
        "final_energy": last.energy,
        "final_abs_error": last.abs_error,
        "energy_evals": last.energy_evals,
        "wall_s": last.wall_elapsed,
        "optimizer_warnings": result.optimizer_warnings,
        "outputs": {
            "run_csv": str(csv_path),
            "truncation_csv": None if trunc_path is None else str(trunc_path),
        },
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))
    return 2 if result.status == "aborted" else 0


def _print_progress(record):
    err = "" if record.abs_error is None else f" err={record.abs_error:.3e}"
    print(f"iter {record.iteration:4d}  E={record.energy:.10f}{err}  "
          f"gmax={record.grad_max:.3e}  nnz={record.nnz}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svmps", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="ADAPT loop on an engine")
    run.add_argument("--fcidump", default=None)
    run.add_argument("--ordering", choices=("interleaved", "blocked"), default=None)
    run.add_argument("--config", default=None, help="key=value config file")
    run.add_argument("--engine", choices=("sv", "mps", "partitioned"), default=None)
    run.add_argument("--eps-grad", dest="eps_grad", type=float, default=None)
    run.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--eta", type=int, default=None)
    run.add_argument("--max-bond", dest="max_bond", type=int, default=None)
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--opt-tol", dest="opt_tol", type=float, default=None)
    run.add_argument("--opt-gtol", dest="opt_gtol", type=float, default=None)
    run.add_argument("--opt-xtol", dest="opt_xtol", type=float, default=None)
    run.add_argument("--opt-max-evals", dest="opt_max_evals", type=int, default=None)
    run.add_argument("--min-sweeps", dest="min_sweeps", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--reference", default=None,
                     help="'auto' (default, oracle eigensolve), 'none', or a number")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--verbose", action="store_true")
    run.set_defaults(func=cmd_run)

    stats = sub.add_parser("stats", help="subspace sizes as JSON")
    stats.add_argument("--fcidump", default=None)
    stats.add_argument("--qubits", type=int, default=None)
    stats.add_argument("--nalpha", type=int, default=None)
    stats.add_argument("--nbeta", type=int, default=None)
    stats.add_argument("--ordering", choices=("interleaved", "blocked"),
                       default="interleaved")
    stats.add_argument("--enumerate", action="store_true",
                       help="enumerate the basis instead of using the closed form")
    stats.set_defaults(func=cmd_stats)

    orc = sub.add_parser("oracle", help="brute-force FCI energy as JSON")
    orc.add_argument("--fcidump", required=True)
    orc.add_argument("--ordering", choices=("interleaved", "blocked"),
                     default="interleaved")
    orc.set_defaults(func=cmd_oracle)

    asm = sub.add_parser("assemble", help="write the CSR Hamiltonian cache")
    asm.add_argument("--fcidump", required=True)
    asm.add_argument("--ordering", choices=("interleaved", "blocked"),
                     default="interleaved")
    asm.add_argument("--out", required=True)
    asm.set_defaults(func=cmd_assemble)

    met = sub.add_parser("metrics", help="amortized iteration coefficient")
    met.add_argument("--csv", required=True)
    met.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
