"""Exact diagonalization of the SSH-Hubbard ring in a fixed (N_up, N_down) sector.

Configurations of one spin species are integers whose bit i marks site i+1.
A basis state is a pair (up_bits, down_bits); states are ordered
lexicographically by up_bits then down_bits, so a state vector reshapes to
an (n_up_configs, n_down_configs) matrix. Creation operators are ordered
all up-spin (site 1..L) first, then all down-spin; hopping of one species is
then a Jordan-Wigner string over the same-species sites strictly between the
two bond ends, and the other species contributes no sign.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateGroundState, InvalidParams, NegativeEigenvalue, SectorTooLarge
from .lanczos import GroundStateResult, lanczos_lowest
from .model import BoundaryCondition, CutSpec, ModelParams, bonds, validate_params
from .spectrum import EntanglementSpectrum

DEFAULT_MAX_STATES = 4_000_000
DEFAULT_GAP_TOL = 1e-8
DEFAULT_FLOOR = 1e-14
NEGATIVE_TOL = 1e-10


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(x, dtype=np.int64)).astype(np.int64)


def species_configs(L: int, n: int) -> np.ndarray:
    """All L-bit integers with n set bits, ascending."""
    out = np.fromiter(
        (sum(1 << i for i in sites) for sites in itertools.combinations(range(L), n)),
        dtype=np.int64,
        count=comb(L, n),
    )
    out.sort()
    return out


@dataclass
class SectorBasis:
    L: int
    n_up: int
    n_down: int
    up: np.ndarray
    down: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.up) * len(self.down)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.up), len(self.down)

    @property
    def states(self) -> list[tuple[int, int]]:
        return [(int(u), int(d)) for u in self.up for d in self.down]

    def index(self, up_bits: int, down_bits: int) -> int:
        iu = int(np.searchsorted(self.up, up_bits))
        idn = int(np.searchsorted(self.down, down_bits))
        if iu >= len(self.up) or self.up[iu] != up_bits or idn >= len(self.down) or self.down[idn] != down_bits:
            raise KeyError((up_bits, down_bits))
        return iu * len(self.down) + idn


def build_sector_basis(L: int, n_up: int, n_down: int, max_states: int = DEFAULT_MAX_STATES) -> SectorBasis:
    if not (0 <= n_up <= L and 0 <= n_down <= L):
        raise InvalidParams(f"particle numbers ({n_up}, {n_down}) outside [0, {L}]")
    size = comb(L, n_up) * comb(L, n_down)
    if size > max_states:
        raise SectorTooLarge(f"sector ({L}, {n_up}, {n_down}) has {size} states, cap is {max_states}")
    return SectorBasis(L, n_up, n_down, species_configs(L, n_up), species_configs(L, n_down))


def fermion_sign(configs: np.ndarray, i: int, j: int) -> np.ndarray:
    """(-1)^(occupied sites strictly between i and j) for each configuration."""
    lo, hi = min(i, j), max(i, j)
    between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    return 1 - 2 * (popcount(configs & between) & 1)


def species_hopping(configs: np.ndarray, bond_list) -> sp.csr_matrix:
    """Sparse hopping matrix of one spin species within its fixed-N configurations."""
    n = len(configs)
    rows, cols, vals = [], [], []
    for i, j, amp in bond_list:
        for src, dst in ((i, j), (j, i)):
            # c^dag_dst c_src
            mask = ((configs >> src) & 1).astype(bool) & ~((configs >> dst) & 1).astype(bool)
            old = configs[mask]
            new = old ^ (1 << src) ^ (1 << dst)
            rows.append(np.searchsorted(configs, new))
            cols.append(np.flatnonzero(mask))
            vals.append(amp * fermion_sign(old, src, dst))
    if rows:
        rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals).astype(float)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


class SectorHamiltonian:
    """Matrix-free H = T_up (x) 1 + 1 (x) T_down + U * double occupancy."""

    def __init__(self, basis: SectorBasis, params: ModelParams, bc: BoundaryCondition = BoundaryCondition.PBC):
        # no unit-cell check here: the kernel is exercised on two-site chains too
        if basis.L != params.L:
            raise InvalidParams(f"basis has L={basis.L}, params have L={params.L}")
        self.basis = basis
        self.params = params
        bl = bonds(params, bc)
        self.t_up = species_hopping(basis.up, bl)
        self.t_down = species_hopping(basis.down, bl)
        self.diag = params.U * popcount(basis.up[:, None] & basis.down[None, :]).astype(float)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def __call__(self, v: np.ndarray) -> np.ndarray:
        psi = np.asarray(v, dtype=float).reshape(self.basis.shape)
        out = self.t_up @ psi
        out += (self.t_down @ psi.T).T
        out += self.diag * psi
        return out.reshape(-1)

    def to_dense(self) -> np.ndarray:
        nu, nd = self.basis.shape
        h = sp.kron(self.t_up, sp.identity(nd)) + sp.kron(sp.identity(nu), self.t_down)
        return h.toarray() + np.diag(self.diag.reshape(-1))


def hamiltonian_apply(basis: SectorBasis, params: ModelParams, bc: BoundaryCondition, v: np.ndarray) -> np.ndarray:
    return SectorHamiltonian(basis, params, bc)(v)


@dataclass
class RDMBlock:
    key: tuple[int, int]
    matrix: np.ndarray


def _split_species(configs: np.ndarray, L_A: int):
    """Group configs by subsystem occupation; map each to (a_index, b_index)."""
    a = configs & ((1 << L_A) - 1)
    b = configs >> L_A
    na = popcount(a)
    groups = {}
    for p in np.unique(na):
        rows = np.flatnonzero(na == p)
        a_vals, a_idx = np.unique(a[rows], return_inverse=True)
        b_vals, b_idx = np.unique(b[rows], return_inverse=True)
        groups[int(p)] = (rows, a_idx, b_idx, len(a_vals), len(b_vals))
    return groups


def reduced_density_blocks(psi: np.ndarray, basis: SectorBasis, cut: CutSpec) -> list[RDMBlock]:
    """Particle-number blocks of the reduced density matrix of sites 1..L_A.

    Moving the A down-spin operators past the B up-spin operators costs
    (-1)^(N_upB * N_downA), a constant inside each block, so it drops out of
    M M^T and is not applied.
    """
    L_A = cut.L_A
    Psi = np.asarray(psi, dtype=float).reshape(basis.shape)
    ups = _split_species(basis.up, L_A)
    downs = _split_species(basis.down, L_A)
    blocks = []
    for p, (ru, au, bu, nau, nbu) in ups.items():
        for q, (rd, ad, bd, nad, nbd) in downs.items():
            X = np.zeros((nau, nbu, nad, nbd))
            X[au[:, None], bu[:, None], ad[None, :], bd[None, :]] = Psi[np.ix_(ru, rd)]
            M = X.transpose(0, 2, 1, 3).reshape(nau * nad, nbu * nbd)
            blocks.append(RDMBlock((p, q), M @ M.T))
    return blocks


def block_spectrum(blocks: list[RDMBlock], floor: float = DEFAULT_FLOOR) -> EntanglementSpectrum:
    xs, nu, nd = [], [], []
    dropped = 0
    for blk in blocks:
        lam = np.linalg.eigvalsh(blk.matrix)
        if lam.size and lam[0] < -NEGATIVE_TOL:
            raise NegativeEigenvalue(f"block {blk.key} has eigenvalue {lam[0]:.3e}")
        keep = lam[lam >= floor]
        dropped += lam.size - keep.size
        xs.append(-np.log(keep))
        nu.append(np.full(keep.size, blk.key[0]))
        nd.append(np.full(keep.size, blk.key[1]))
    if not xs:
        return EntanglementSpectrum(np.zeros(0), np.zeros(0), np.zeros(0))
    return EntanglementSpectrum.from_unsorted(
        np.concatenate(xs), np.concatenate(nu), np.concatenate(nd), complete=True, dropped=dropped
    )


@dataclass
class EDOptions:
    seed: int = 0
    tol: float = 1e-10
    max_iter: int = 500
    max_states: int = DEFAULT_MAX_STATES
    gap_tol: float = DEFAULT_GAP_TOL
    floor: float = DEFAULT_FLOOR
    audit: bool = False


def ground_state(params: ModelParams, n_up: int, n_down: int, opts: EDOptions) -> tuple[SectorBasis, GroundStateResult]:
    basis = build_sector_basis(params.L, n_up, n_down, opts.max_states)
    H = SectorHamiltonian(basis, params, BoundaryCondition.PBC)
    res = lanczos_lowest(H, basis.dim, k=2, max_iter=opts.max_iter, tol=opts.tol, seed=opts.seed)
    return basis, res


def ed_entanglement_spectrum(params: ModelParams, cut: CutSpec, opts: EDOptions | None = None) -> EntanglementSpectrum:
    """Half-filled ring ground state, spectrum of sites 1..L_A."""
    opts = opts or EDOptions()
    validate_params(params)
    cut.check(params.L)
    half = params.L // 2
    t0 = time.perf_counter()
    basis, res = ground_state(params, half, half, opts)
    if res.gap < opts.gap_tol:
        raise DegenerateGroundState(f"ground state gap {res.gap:.3e} below {opts.gap_tol:g}")
    if opts.audit:
        _audit_sectors(params, res.energies[0], opts)
    spec = block_spectrum(reduced_density_blocks(res.vector, basis, cut), opts.floor)
    spec.meta.update(
        seed=opts.seed,
        iterations=res.iterations,
        residual=res.residual,
        energies=[float(e) for e in res.energies],
        gap=res.gap,
        dim=basis.dim,
        solve_time=time.perf_counter() - t0,
    )
    return spec


def _audit_sectors(params: ModelParams, e0: float, opts: EDOptions):
    half = params.L // 2
    for n_up, n_down in ((half + 1, half - 1), (half - 1, half + 1)):
        _, other = ground_state(params, n_up, n_down, opts)
        if other.energies[0] < e0 + opts.gap_tol:
            raise DegenerateGroundState(
                f"sector ({n_up}, {n_down}) reaches E={other.energies[0]:.12g} <= half-filled E0={e0:.12g}"
            )

