"""Entanglement spectrum of the non-interacting ground state from the
restricted correlation matrix.

For a Gaussian state the reduced density matrix of a block is fixed by the
eigenvalues f_l of G_A = <c_i^dag c_j>, (i, j in A). Each many-body level
corresponds to an occupation pattern n_l of the entanglement modes with

    lambda = prod_l f_l^{n_l} (1 - f_l)^{1 - n_l},    xi = -ln(lambda).

The lowest levels are generated in order as the k smallest subset sums of
the flip costs |ln(f_l / (1 - f_l))| on top of the most probable pattern.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import EngineMismatch, GaplessError, SpectrumOutOfRange
from .model import BoundaryCondition, CutSpec, ModelParams, build_hopping_matrix, validate_params
from .spectrum import EntanglementSpectrum

GAP_TOL = 1e-9
RANGE_TOL = 1e-12
FREEZE_TOL = 1e-12
DEFAULT_MAX_LEVELS = 256
DEFAULT_XI_WINDOW = 8.0


def ground_correlation_matrix(h: np.ndarray, n_fill: int) -> np.ndarray:
    """G = sum over the n_fill lowest orbitals of phi phi^T.

    Raises GaplessError when the Fermi level sits inside a degenerate shell,
    in which case the Slater determinant ground state is not unique.
    """
    h = np.asarray(h, dtype=float)
    dim = h.shape[0]
    if not 0 <= n_fill <= dim:
        raise ValueError(f"n_fill={n_fill} outside [0, {dim}]")
    eps, phi = np.linalg.eigh(h)
    if 0 < n_fill < dim and eps[n_fill] - eps[n_fill - 1] < GAP_TOL:
        raise GaplessError(
            f"single-particle levels {n_fill - 1} and {n_fill} are degenerate "
            f"(gap {eps[n_fill] - eps[n_fill - 1]:.3e}); ground state is not unique"
        )
    occ = phi[:, :n_fill]
    return occ @ occ.T


def restrict(G: np.ndarray, cut: CutSpec | int) -> np.ndarray:
    L_A = cut.L_A if isinstance(cut, CutSpec) else int(cut)
    if L_A > G.shape[0]:
        raise ValueError(f"L_A={L_A} exceeds matrix dimension {G.shape[0]}")
    return G[:L_A, :L_A].copy()


def mode_spectrum(G_A: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of a restricted correlation matrix, clamped to [0, 1]."""
    f = np.linalg.eigvalsh(np.asarray(G_A, dtype=float))
    if f.size and (f[0] < -RANGE_TOL or f[-1] > 1 + RANGE_TOL):
        raise SpectrumOutOfRange(f"correlation eigenvalues outside [0, 1]: min={f[0]:.3e}, max={f[-1]:.3e}")
    return np.clip(f, 0.0, 1.0)


def _lowest_subset_sums(costs, max_count, limit):
    """Yield (sum, subset) over subsets of ``costs`` (sorted ascending) in
    nondecreasing order of sum, stopping at ``max_count`` items or when the
    sum exceeds ``limit``.

    Every subset is reached exactly once: a subset whose largest index is i
    spawns the subset with i+1 appended and the one with i replaced by i+1.
    """
    m = len(costs)
    if max_count <= 0:
        return
    yield 0.0, ()
    emitted = 1
    if m == 0:
        return
    seq = 0
    heap = [(costs[0], seq, (0,))]
    while heap and emitted < max_count:
        s, _, subset = heapq.heappop(heap)
        if s > limit:
            break
        yield s, subset
        emitted += 1
        last = subset[-1]
        if last + 1 < m:
            for nxt in (subset + (last + 1,), subset[:-1] + (last + 1,)):
                seq += 1
                heapq.heappush(heap, (math.fsum(costs[k] for k in nxt), seq, nxt))


def enumerate_levels(
    modes: np.ndarray,
    max_levels: int = DEFAULT_MAX_LEVELS,
    xi_window: float = DEFAULT_XI_WINDOW,
) -> EntanglementSpectrum:
    """Lowest levels of a single-species spectrum (labels go to n_up)."""
    f = np.clip(np.sort(np.asarray(modes, dtype=float)), 0.0, 1.0)
    occupied = f > 0.5
    base_count = int(np.count_nonzero(occupied))
    xi0 = -math.fsum(np.log(np.maximum(f, 1.0 - f)))

    active = (f >= FREEZE_TOL) & (f <= 1.0 - FREEZE_TOL)
    fa = f[active]
    with np.errstate(divide="ignore"):
        cost = np.abs(np.log(fa) - np.log1p(-fa))
    # flipping an occupied mode removes a particle, an empty one adds one
    step = np.where(occupied[active], -1, 1)
    order = np.argsort(cost, kind="stable")
    cost = [float(c) for c in cost[order]]
    step = step[order]

    xs, counts = [], []
    for s, subset in _lowest_subset_sums(cost, max_levels, xi_window):
        xs.append(xi0 + s)
        counts.append(base_count + int(sum(step[k] for k in subset)))
    complete = len(xs) == 2 ** len(cost)
    return EntanglementSpectrum.from_unsorted(
        xs, counts, np.zeros(len(xs), dtype=np.int64), complete=complete
    )


def combine_spins(
    up: EntanglementSpectrum,
    down: EntanglementSpectrum,
    max_levels: int = DEFAULT_MAX_LEVELS,
    xi_window: float = math.inf,
) -> EntanglementSpectrum:
    """Lowest pairwise sums xi_up + xi_down of two independent spin species.

    ``up`` contributes the n_up labels and ``down`` its own n_up column as
    n_down (both inputs are single-species spectra).
    """
    n1, n2 = len(up), len(down)
    xs, nu, nd = [], [], []
    if n1 and n2 and max_levels > 0:
        limit = up.xi[0] + down.xi[0] + xi_window
        heap = [(up.xi[0] + down.xi[0], 0, 0)]
        seen = {(0, 0)}
        while heap and len(xs) < max_levels:
            s, i, j = heapq.heappop(heap)
            if s > limit:
                break
            xs.append(s)
            nu.append(up.n_up[i])
            nd.append(down.n_up[j])
            for a, b in ((i + 1, j), (i, j + 1)):
                if a < n1 and b < n2 and (a, b) not in seen:
                    seen.add((a, b))
                    heapq.heappush(heap, (up.xi[a] + down.xi[b], a, b))
    complete = up.complete and down.complete and len(xs) == n1 * n2
    return EntanglementSpectrum.from_unsorted(xs, nu, nd, complete=complete)


def free_entanglement_spectrum(
    params: ModelParams,
    cut: CutSpec,
    max_levels: int = DEFAULT_MAX_LEVELS,
    xi_window: float = DEFAULT_XI_WINDOW,
) -> EntanglementSpectrum:
    """Half-filled U = 0 ring, spinful spectrum of sites 1..L_A."""
    validate_params(params)
    cut.check(params.L)
    if params.U != 0:
        raise EngineMismatch(f"free-fermion engine requires U = 0, got U = {params.U}")
    h = build_hopping_matrix(params, BoundaryCondition.PBC)
    G = ground_correlation_matrix(h, params.L // 2)
    f = mode_spectrum(restrict(G, cut))
    # both species see the same hopping matrix
    single = enumerate_levels(f, max_levels, xi_window)
    spec = combine_spins(single, single, max_levels, xi_window)
    spec.meta["modes"] = f.tolist()
    return spec
