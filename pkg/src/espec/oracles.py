"""Independent reference constructions used by the validation suite.

The Fock-space oracle builds the SSH-Hubbard Hamiltonian from explicit
Jordan-Wigner matrices with the site-interleaved mode order
(1up, 1dn, 2up, 2dn, ...). Subsystem A = sites 1..L_A is then a leading
block of qubits and its reduced density matrix is a plain partial trace.
Nothing here shares code with the sector engine beyond the bond list.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import BoundaryCondition, ModelParams, bonds

_A = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))  # |0><1|, removes a particle
_Z = sp.csr_matrix(np.diag([1.0, -1.0]))
_I = sp.identity(2, format="csr")


def annihilators(n_modes: int) -> list[sp.csr_matrix]:
    """Jordan-Wigner c_k on n_modes qubits; mode 0 is the most significant factor."""
    ops = []
    for k in range(n_modes):
        factors = [_Z] * k + [_A] + [_I] * (n_modes - k - 1)
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op)
    return ops


def fock_hamiltonian(params: ModelParams, bc: BoundaryCondition = BoundaryCondition.PBC):
    """Full Fock-space Hamiltonian plus the up/down number operators."""
    L = params.L
    c = annihilators(2 * L)
    up = [c[2 * i] for i in range(L)]
    dn = [c[2 * i + 1] for i in range(L)]
    dim = 2 ** (2 * L)
    H = sp.csr_matrix((dim, dim))
    for i, j, amp in bonds(params, bc):
        for s in (up, dn):
            hop = s[i].T @ s[j]
            H = H + amp * (hop + hop.T)
    n_up = [u.T @ u for u in up]
    n_dn = [d.T @ d for d in dn]
    for i in range(L):
        H = H + params.U * (n_up[i] @ n_dn[i])
    N_up = sum(n_up[1:], n_up[0])
    N_dn = sum(n_dn[1:], n_dn[0])
    return H.tocsr(), N_up.diagonal(), N_dn.diagonal()


def fock_ground_state(params: ModelParams, n_up: int, n_down: int, k: int = 2):
    """Lowest k energies and the ground vector (embedded in Fock space)."""
    H, Nu, Nd = fock_hamiltonian(params)
    sel = np.flatnonzero((np.rint(Nu) == n_up) & (np.rint(Nd) == n_down))
    Hs = H[sel][:, sel]
    if len(sel) <= 2000:
        e, v = np.linalg.eigh(Hs.toarray())
    else:
        e, v = spla.eigsh(Hs, k=k, which="SA", tol=1e-14)
        order = np.argsort(e)
        e, v = e[order], v[:, order]
    psi = np.zeros(H.shape[0])
    psi[sel] = v[:, 0]
    return e[:k], psi


def fock_entanglement(psi: np.ndarray, L: int, L_A: int):
    """Eigenvalues of rho_A with (n_upA, n_downA) labels, via partial trace."""
    nA = 2 * L_A
    M = psi.reshape(2 ** nA, 2 ** (2 * L - nA))
    rho = M @ M.T
    # occupation of each A mode per basis index; mode 0 is the top bit
    idx = np.arange(2 ** nA)
    bits = (idx[:, None] >> (nA - 1 - np.arange(nA))[None, :]) & 1
    lab_up = bits[:, 0::2].sum(axis=1)
    lab_dn = bits[:, 1::2].sum(axis=1)
    lams, nus, nds = [], [], []
    for u in np.unique(lab_up):
        for d in np.unique(lab_dn):
            sel = np.flatnonzero((lab_up == u) & (lab_dn == d))
            # rho commutes with both number operators, so off-block entries vanish
            w = np.linalg.eigvalsh(rho[np.ix_(sel, sel)])
            lams.append(w)
            nus.append(np.full(w.size, u))
            nds.append(np.full(w.size, d))
    return np.concatenate(lams), np.concatenate(nus), np.concatenate(nds)


def dense_sector_spectrum(params: ModelParams, n_up: int, n_down: int):
    """All sector eigenvalues from the Fock construction."""
    H, Nu, Nd = fock_hamiltonian(params)
    sel = np.flatnonzero((np.rint(Nu) == n_up) & (np.rint(Nd) == n_down))
    return np.linalg.eigvalsh(H[sel][:, sel].toarray())
