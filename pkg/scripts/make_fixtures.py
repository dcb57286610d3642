#!/usr/bin/env python3
"""Generate the bundled FCIDUMP fixtures (hydrogen chains, STO-3G).

Geometries
----------
* h2:  two H atoms at the experimental equilibrium bond length 0.7414 Angstrom
* h4 .. h12: linear chains with 1.0 Angstrom between adjacent atoms

All integrals are computed here from scratch: STO-3G hydrogen uses a single
contracted s function (3 primitives), for which overlap, kinetic, nuclear
attraction and repulsion integrals have closed forms via the Boys function
F0.  A restricted Hartree-Fock with DIIS produces canonical orbitals, the
integrals are transformed to the MO basis and written in Molpro FCIDUMP
format (chemists' notation, 8-fold symmetry, core energy = nuclear
repulsion).

Run from the repository root:

    python3 scripts/make_fixtures.py [outdir]

The checked-in fixtures under src/svmps/data/ were produced by this script;
regenerating them is byte-stable.
"""

import sys
from pathlib import Path

import numpy as np
from scipy.special import erf

BOHR_PER_ANGSTROM = 1.8897259886

# STO-3G hydrogen 1s (zeta = 1.24), exponents and contraction coefficients
STO3G_H_EXPONENTS = np.array([3.42525091, 0.62391373, 0.16885540])
STO3G_H_COEFFS = np.array([0.15432897, 0.53532814, 0.44463454])


def boys_f0(t):
    t = np.asarray(t, dtype=float)
    small = t < 1e-12
    safe = np.where(small, 1.0, t)
    out = 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe))
    return np.where(small, 1.0 - t / 3.0, out)


class SFunction:
    """One contracted s-type Gaussian (normalized primitives)."""

    def __init__(self, center, exponents, coeffs):
        self.center = np.asarray(center, dtype=float)
        self.exps = exponents
        norms = (2.0 * exponents / np.pi) ** 0.75
        self.coeffs = coeffs * norms


def _pair(a: SFunction, b: SFunction):
    """Primitive-pair quantities for the Gaussian product theorem."""
    al = a.exps[:, None]
    be = b.exps[None, :]
    p = al + be
    mu = al * be / p
    rab2 = float(np.dot(a.center - b.center, a.center - b.center))
    kab = np.exp(-mu * rab2)
    centers = (al[..., None] * a.center + be[..., None] * b.center) / p[..., None]
    cc = a.coeffs[:, None] * b.coeffs[None, :]
    return p, mu, rab2, kab, centers, cc


def overlap(a, b):
    p, mu, rab2, kab, _, cc = _pair(a, b)
    return float(np.sum(cc * (np.pi / p) ** 1.5 * kab))


def kinetic(a, b):
    p, mu, rab2, kab, _, cc = _pair(a, b)
    return float(np.sum(cc * mu * (3.0 - 2.0 * mu * rab2) * (np.pi / p) ** 1.5 * kab))


def nuclear(a, b, centers_charges):
    p, mu, rab2, kab, pc, cc = _pair(a, b)
    total = 0.0
    for center, charge in centers_charges:
        d2 = np.sum((pc - center) ** 2, axis=-1)
        total += -charge * float(np.sum(cc * (2.0 * np.pi / p) * kab * boys_f0(p * d2)))
    return total


def eri(a, b, c, d):
    """(ab|cd) in chemists' notation."""
    p, _, _, kab, pab, cab = _pair(a, b)
    q, _, _, kcd, pcd, ccd = _pair(c, d)
    p4 = p[:, :, None, None]
    q4 = q[None, None, :, :]
    k4 = kab[:, :, None, None] * kcd[None, None, :, :]
    c4 = cab[:, :, None, None] * ccd[None, None, :, :]
    d2 = np.sum((pab[:, :, None, None, :] - pcd[None, None, :, :, :]) ** 2, axis=-1)
    pref = 2.0 * np.pi ** 2.5 / (p4 * q4 * np.sqrt(p4 + q4))
    return float(np.sum(c4 * pref * k4 * boys_f0(p4 * q4 / (p4 + q4) * d2)))


def hydrogen_chain(n_atoms, spacing_angstrom=1.0, bond_h2=0.7414):
    if n_atoms == 2:
        zs = np.array([0.0, bond_h2])
    else:
        zs = spacing_angstrom * np.arange(n_atoms, dtype=float)
    return [np.array([0.0, 0.0, z * BOHR_PER_ANGSTROM]) for z in zs]


def ao_integrals(centers):
    basis = [SFunction(c, STO3G_H_EXPONENTS, STO3G_H_COEFFS) for c in centers]
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    charges = [(c, 1.0) for c in centers]
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap(basis[i], basis[j])
            t[i, j] = t[j, i] = kinetic(basis[i], basis[j])
            v[i, j] = v[j, i] = nuclear(basis[i], basis[j], charges)
    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    val = eri(basis[i], basis[j], basis[k], basis[l])
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            g[a, b, c, d] = g[c, d, a, b] = val
    e_nuc = 0.0
    for i in range(len(centers)):
        for j in range(i):
            e_nuc += 1.0 / np.linalg.norm(centers[i] - centers[j])
    return s, t + v, g, e_nuc


def rhf(s, hcore, g, e_nuc, n_electrons, max_iter=200, conv=1e-12):
    """Closed-shell SCF with DIIS; returns (orbital coeffs, total energy)."""
    n = s.shape[0]
    n_occ = n_electrons // 2
    evals, evecs = np.linalg.eigh(s)
    x = evecs @ np.diag(evals ** -0.5) @ evecs.T

    def fock(dm):
        j = np.einsum("pqrs,rs->pq", g, dm)
        k = np.einsum("prqs,rs->pq", g, dm)
        return hcore + j - 0.5 * k

    def density(f):
        fp = x.T @ f @ x
        _, cp = np.linalg.eigh(fp)
        c = x @ cp
        occ = c[:, :n_occ]
        return 2.0 * occ @ occ.T, c

    dm, c = density(hcore)
    energy = 0.0
    diis_f, diis_e = [], []
    for it in range(max_iter):
        f = fock(dm)
        err = f @ dm @ s - s @ dm @ f
        diis_f.append(f)
        diis_e.append(err)
        if len(diis_f) > 8:
            diis_f.pop(0)
            diis_e.pop(0)
        if len(diis_f) > 1:
            m = len(diis_f)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for a in range(m):
                for bb in range(m):
                    b[a, bb] = np.sum(diis_e[a] * diis_e[bb])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, diis_f))
            except np.linalg.LinAlgError:
                pass
        dm_new, c = density(f)
        e_new = 0.5 * np.sum(dm_new * (hcore + fock(dm_new))) + e_nuc
        if abs(e_new - energy) < conv and np.max(np.abs(dm_new - dm)) < 1e-10:
            return c, e_new
        dm, energy = dm_new, e_new
    raise RuntimeError(f"SCF not converged after {max_iter} iterations")


def mo_transform(hcore, g, c):
    h_mo = c.T @ hcore @ c
    g_mo = np.einsum("pqrs,pi->iqrs", g, c, optimize=True)
    g_mo = np.einsum("iqrs,qj->ijrs", g_mo, c, optimize=True)
    g_mo = np.einsum("ijrs,rk->ijks", g_mo, c, optimize=True)
    g_mo = np.einsum("ijks,sl->ijkl", g_mo, c, optimize=True)
    return h_mo, g_mo


def fcidump_text(norb, nelec, core, h_mo, g_mo, tol=1e-14):
    lines = [
        f" &FCI NORB={norb},NELEC={nelec},MS2=0,",
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
                    v = g_mo[i, j, k, l]
                    if abs(v) > tol:
                        lines.append(f" {v: .16e} {i+1:4d} {j+1:4d} {k+1:4d} {l+1:4d}")
    for i in range(norb):
        for j in range(i + 1):
            v = h_mo[i, j]
            if abs(v) > tol:
                lines.append(f" {v: .16e} {i+1:4d} {j+1:4d}    0    0")
    lines.append(f" {core: .16e}    0    0    0    0")
    return "\n".join(lines) + "\n"


def build(n_atoms, outdir: Path):
    centers = hydrogen_chain(n_atoms)
    s, hcore, g, e_nuc = ao_integrals(centers)
    c, e_hf = rhf(s, hcore, g, e_nuc, n_atoms)
    h_mo, g_mo = mo_transform(hcore, g, c)
    # HF energy recomputed from MO integrals as a transform check
    occ = n_atoms // 2
    e_check = e_nuc + 2 * np.trace(h_mo[:occ, :occ])
    for i in range(occ):
        for j in range(occ):
            e_check += 2 * g_mo[i, i, j, j] - g_mo[i, j, j, i]
    assert abs(e_check - e_hf) < 1e-9, (e_check, e_hf)
    text = fcidump_text(n_atoms, n_atoms, e_nuc, h_mo, g_mo)
    path = outdir / f"h{n_atoms}.fcidump"
    path.write_text(text)
    print(f"h{n_atoms}: E_HF = {e_hf:.10f} Ha  ->  {path}")
    return e_hf


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("src/svmps/data")
    outdir.mkdir(parents=True, exist_ok=True)
    for n in (2, 4, 6, 8, 10, 12):
        build(n, outdir)


if __name__ == "__main__":
    main()
