"""Built-in oracle checks run by ``espec validate``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import compare_spectra
from .ed import (
    SectorHamiltonian,
    block_spectrum,
    build_sector_basis,
    ed_entanglement_spectrum,
    reduced_density_blocks,
    species_hopping,
)
from .freefermion import enumerate_levels, free_entanglement_spectrum
from .lanczos import lanczos_lowest
from .model import BoundaryCondition, CutSpec, ModelParams, build_hopping_matrix
from .oracles import dense_sector_spectrum, fock_entanglement, fock_ground_state
from .spectrum import EntanglementSpectrum


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _hopping_bonds() -> tuple[bool, str]:
    h = build_hopping_matrix(ModelParams(4, 0.2), BoundaryCondition.PBC)
    want = {(0, 1): -1.2, (1, 2): -0.8, (2, 3): -1.2, (0, 3): -0.8}
    got = {(i, j): h[i, j] for i in range(4) for j in range(i + 1, 4) if h[i, j] != 0}
    ok = got.keys() == want.keys() and all(abs(got[k] - v) < 1e-15 for k, v in want.items())
    return ok and np.array_equal(h, h.T), f"bonds {got}"


def _dimerized_free() -> tuple[bool, str]:
    s = free_entanglement_spectrum(ModelParams(8, -1.0), CutSpec(4))
    top = s.xi[:16]
    ok = len(s) >= 16 and np.all(np.abs(top - 4 * math.log(2)) < 1e-12)
    t = free_entanglement_spectrum(ModelParams(8, 1.0), CutSpec(4))
    ok = ok and len(t) == 1 and abs(t.xi[0]) < 1e-12
    return bool(ok), f"dt=-1: {len(s)} levels at {top[0]:.15f}; dt=+1: {len(t)} level(s)"


def _hubbard_dimer() -> tuple[bool, str]:
    tau, U = 1.2, 3.0
    cfg = np.array([1, 2], dtype=np.int64)
    T = species_hopping(cfg, [(0, 1, -tau)]).toarray()
    H = np.kron(T, np.eye(2)) + np.kron(np.eye(2), T)
    H += np.diag(U * np.array([(u & d).bit_count() for u in (1, 2) for d in (1, 2)], dtype=float))
    res = lanczos_lowest(lambda v: H @ v, 4, k=2, seed=0)
    exact = U / 2 - math.sqrt((U / 2) ** 2 + 4 * tau ** 2)
    return abs(res.energies[0] - exact) < 1e-12, f"E0={res.energies[0]:.12f} exact={exact:.12f}"


def _dense_oracle_l4() -> tuple[bool, str]:
    worst_e = worst_w = 0.0
    for dt, U in ((0.3, 2.0), (-0.5, -1.5), (-0.4, 3.0)):
        p = ModelParams(4, dt, U)
        basis = build_sector_basis(4, 2, 2)
        H = SectorHamiltonian(basis, p)
        res = lanczos_lowest(H, basis.dim, k=2, seed=0)
        dense = dense_sector_spectrum(p, 2, 2)
        worst_e = max(worst_e, float(np.max(np.abs(res.energies - dense[:2]))))
        ours = block_spectrum(reduced_density_blocks(res.vector, basis, CutSpec(2)))
        _, psi = fock_ground_state(p, 2, 2)
        lam, nu, nd = fock_entanglement(psi, 4, 2)
        keep = lam > 1e-14
        ref = EntanglementSpectrum.from_unsorted(-np.log(lam[keep]), nu[keep], nd[keep])
        worst_w = max(worst_w, compare_spectra(ours, ref, cutoff=1e-12))
    return worst_e < 1e-12 and worst_w < 1e-12, f"max |dE|={worst_e:.2e}, max |d lambda|={worst_w:.2e}"


def _cross_engine_l8() -> tuple[bool, str]:
    p = ModelParams(8, -0.4, 0.0)
    free = free_entanglement_spectrum(p, CutSpec(4), 4 ** 4, math.inf)
    ed = ed_entanglement_spectrum(p, CutSpec(4))
    diff = compare_spectra(free, ed)
    return diff < 1e-9, f"max |d lambda|={diff:.2e}"


def _particle_hole_l8() -> tuple[bool, str]:
    worst = 0.0
    for dt in (-0.4, 0.4):
        a = ed_entanglement_spectrum(ModelParams(8, dt, 3.0), CutSpec(4))
        b = ed_entanglement_spectrum(ModelParams(8, dt, -3.0), CutSpec(4))
        worst = max(worst, compare_spectra(a, b.relabel(n_down=4 - b.n_down)))
    return worst < 1e-9, f"max |d lambda|={worst:.2e}"


def _enumeration_bruteforce() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    worst = 0.0
    for m in (1, 4, 8, 10):
        f = np.sort(rng.uniform(0.01, 0.99, m))
        got = enumerate_levels(f, max_levels=2 ** m, xi_window=math.inf)
        lam = []
        for bits in itertools.product((0, 1), repeat=m):
            b = np.array(bits)
            lam.append(np.prod(np.where(b == 1, f, 1 - f)))
        ref = np.sort(-np.log(lam))
        worst = max(worst, float(np.max(np.abs(np.sort(got.xi) - ref))))
    return worst < 1e-12, f"max |d xi|={worst:.2e}"


def _normalization() -> tuple[bool, str]:
    worst = 0.0
    for p in (ModelParams(8, -0.4, 0.0), ModelParams(8, 0.3, 0.0)):
        s = free_entanglement_spectrum(p, CutSpec(4), 4 ** 4, math.inf)
        worst = max(worst, abs(s.total_weight() - 1))
    s = ed_entanglement_spectrum(ModelParams(8, -0.4, -3.0), CutSpec(4))
    worst = max(worst, abs(s.total_weight() - 1))
    return worst < 1e-10, f"max |sum lambda - 1|={worst:.2e}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("hopping_matrix_bonds", _hopping_bonds),
    ("dimerized_free_limit", _dimerized_free),
    ("hubbard_dimer_lanczos", _hubbard_dimer),
    ("dense_oracle_L4", _dense_oracle_l4),
    ("cross_engine_U0_L8", _cross_engine_l8),
    ("particle_hole_map_L8", _particle_hole_l8),
    ("subset_enumeration_bruteforce", _enumeration_bruteforce),
    ("trace_normalization", _normalization),
]


def run_checks() -> list[CheckResult]:
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
