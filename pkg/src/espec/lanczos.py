"""Lanczos iteration with full reorthogonalization for the lowest eigenpairs
of a real symmetric operator given only as a matrix-vector product."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NonSymmetricOperator, NotConverged

_BLOCK_ROWS = 32


@dataclass
class GroundStateResult:
    energies: np.ndarray
    vectors: np.ndarray  # shape (dim, k), columns aligned with energies
    residuals: np.ndarray
    iterations: int
    seed: int
    meta: dict = field(default_factory=dict)

    @property
    def vector(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def residual(self) -> float:
        return float(np.max(self.residuals))

    @property
    def gap(self) -> float:
        if len(self.energies) < 2:
            return float("inf")
        return float(self.energies[1] - self.energies[0])


class _KrylovBasis:
    """Row-blocked storage so growth never copies previous vectors."""

    def __init__(self, dim):
        self.dim = dim
        self.blocks: list[np.ndarray] = []
        self.n = 0

    def append(self, v):
        if self.n % _BLOCK_ROWS == 0:
            self.blocks.append(np.empty((_BLOCK_ROWS, self.dim)))
        self.blocks[-1][self.n % _BLOCK_ROWS] = v
        self.n += 1

    def _filled(self):
        for b, blk in enumerate(self.blocks):
            rows = min(_BLOCK_ROWS, self.n - b * _BLOCK_ROWS)
            yield blk[:rows]

    def orthogonalize(self, w):
        # two passes of classical Gram-Schmidt ("twice is enough")
        for _ in range(2):
            for blk in self._filled():
                w -= blk.T @ (blk @ w)
        return w

    def combine(self, coeffs):
        """Return V^T @ coeffs for coeffs of shape (n, k)."""
        out = np.zeros((self.dim, coeffs.shape[1]))
        for b, blk in enumerate(self._filled()):
            out += blk.T @ coeffs[b * _BLOCK_ROWS : b * _BLOCK_ROWS + blk.shape[0]]
        return out


def check_symmetric(apply: Callable, dim: int, rng: np.random.Generator, probes: int = 10, tol: float = 1e-10):
    for _ in range(probes):
        u = rng.standard_normal(dim)
        v = rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        lhs = float(u @ apply(v))
        rhs = float(apply(u) @ v)
        if abs(lhs - rhs) > tol:
            raise NonSymmetricOperator(f"<u,Av> - <Au,v> = {lhs - rhs:.3e} exceeds {tol:g}")


def _deflated(apply, locked):
    if not locked:
        return apply
    Q = np.stack(locked, axis=1)

    def op(v):
        v = v - Q @ (Q.T @ v)
        w = apply(v)
        return w - Q @ (Q.T @ w)

    return op


def _lowest_pair(apply, dim, locked, rng, max_iter, tol, check_every):
    """Lowest Ritz pair of ``apply`` on the complement of ``locked``."""
    op = _deflated(apply, locked)
    V = _KrylovBasis(dim)
    for q in locked:
        V.append(q)
    n_locked = len(locked)

    def fresh():
        w = V.orthogonalize(rng.standard_normal(dim))
        return w / np.linalg.norm(w)

    v = fresh()
    alphas: list[float] = []
    betas: list[float] = []
    v_prev = None
    beta = 0.0
    scale = 0.0
    limit = min(max_iter, dim - n_locked)
    for it in range(1, limit + 1):
        V.append(v)
        w = op(v)
        alpha = float(w @ v)
        w = w - alpha * v
        if v_prev is not None:
            w -= beta * v_prev
        w = V.orthogonalize(w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        scale = max(scale, abs(alpha), beta)
        breakdown = beta <= 1e-13 * max(scale, 1.0)

        if breakdown or it % check_every == 0 or it == limit:
            if betas:
                theta, S = eigh_tridiagonal(np.array(alphas), np.array(betas))
            else:
                theta, S = np.array(alphas), np.ones((1, 1))
            if breakdown or abs(beta * S[-1, 0]) < 0.1 * tol:
                coeffs = np.zeros((V.n, 1))
                coeffs[n_locked:, 0] = S[:, 0]
                vec = V.combine(coeffs)[:, 0]
                vec /= np.linalg.norm(vec)
                energy = float(theta[0])
                residual = float(np.linalg.norm(apply(vec) - energy * vec))
                if residual < tol:
                    return energy, vec, residual, it
                check_every = 1
        if it == limit:
            break
        if breakdown:
            # invariant subspace: continue from a fresh direction as a decoupled block
            w, beta = fresh(), 0.0
        else:
            w /= beta
        betas.append(beta)
        v_prev, v = v, w
    raise NotConverged(f"Lanczos did not reach residual {tol:g} within {max_iter} iterations")


def lanczos_lowest(
    apply: Callable[[np.ndarray], np.ndarray],
    dim: int,
    k: int = 2,
    max_iter: int = 500,
    tol: float = 1e-10,
    seed: int = 0,
    check_every: int = 4,
    probe_symmetry: bool = True,
) -> GroundStateResult:
    """k lowest eigenpairs of ``apply`` with residual ||Av - Ev|| < tol.

    Pairs are found one at a time; each later run works on the operator
    projected off the pairs already found, so exactly degenerate levels are
    resolved instead of being collapsed onto one Krylov direction. Start
    vectors come from ``numpy.random.default_rng([seed, i])``; a fixed seed
    gives a reproducible run. ``max_iter`` bounds each run.
    """
    if dim < 1 or k < 1:
        raise ValueError("dim and k must be positive")
    k = min(k, dim)
    if probe_symmetry:
        check_symmetric(apply, dim, np.random.default_rng([seed, 1_000_003]))
    energies, vecs, residuals = [], [], []
    total = 0
    for i in range(k):
        rng = np.random.default_rng([seed, i])
        e, v, r, it = _lowest_pair(apply, dim, vecs, rng, max_iter, tol, check_every)
        energies.append(e)
        vecs.append(v)
        residuals.append(r)
        total += it
    order = np.argsort(energies, kind="stable")
    return GroundStateResult(
        np.array(energies)[order],
        np.stack(vecs, axis=1)[:, order],
        np.array(residuals)[order],
        total,
        seed,
    )
