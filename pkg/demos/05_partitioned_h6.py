#!/usr/bin/env python3
# Why partition: coarse truncation corrupts a pure tensor-train run, while
# routing block-local terms through the exact sparse core keeps the damage
# confined to boundary-crossing terms.
#
# Both engines run the same ADAPT protocol on H6 with the same coarse
# threshold (delta = 1e-2).  Watch two columns: the running maximum of the
# discarded singular-value mass (the local truncation error) and the energy
# error against the exact eigenvalue.  The pure run's compression of the
# whole Hamiltonian onto the state discards far more than the partitioned
# run's boundary-only compressions.

from svmps import oracle
from svmps.adapt import AdaptConfig, run_adapt
from svmps.partition import partition
from svmps.svengine import assemble_subspace_hamiltonian
from svmps.system import MolecularSystem, bundled_fcidump

system = MolecularSystem.from_fcidump(bundled_fcidump("h6"))
matrix = assemble_subspace_hamiltonian(system.hamiltonian, system.basis)
e_fci, _ = oracle.fci_ground_energy(matrix)

ph = partition(system.hamiltonian, eta=1, basis=system.basis)
report = ph.report()
print(f"H6 partition at eta=1: {report['n_local_terms']} local terms, "
      f"{report['n_boundary_terms']} boundary terms, "
      f"local CSR nnz {report['local_csr_nnz']} (full: {matrix.nnz})")

common = dict(eps_grad=1e-4, max_iter=10, delta=1e-2, opt_line="fit5", opt_tol=1e-9)
mps = run_adapt(AdaptConfig(engine="mps", **common), system, reference_energy=e_fci)
part = run_adapt(AdaptConfig(engine="partitioned", eta=1, **common), system,
                 reference_energy=e_fci)

print(f"\n{'iter':>4} | {'max trunc (mps)':>16} {'max trunc (part)':>17} | "
      f"{'err (mps)':>10} {'err (part)':>10}")
for a, b in zip(mps.records, part.records):
    print(f"{a.iteration:>4} | {a.max_trunc_err:>16.4e} {b.max_trunc_err:>17.4e} | "
          f"{a.abs_error:>10.3e} {b.abs_error:>10.3e}")

print("\nthe same comparison at 28-36 qubits is the regime where a pure "
      "tensor-train run collapses entirely; at desk scale the ordering of "
      "the two columns is the observable stand-in.")
