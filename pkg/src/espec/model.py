"""SSH-Hubbard chain parameters and the single-particle hopping matrix.

Sites are 1-indexed in docstrings and 0-indexed in code. Bond (i, i+1)
carries amplitude -(t + dt) when i is odd (1-indexed) and -(t - dt) when i
is even; on a ring the wrap bond (L, 1) is therefore a -(t - dt) bond.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams


class BoundaryCondition(str, enum.Enum):
    PBC = "PBC"
    OBC = "OBC"


@dataclass(frozen=True)
class ModelParams:
    L: int
    delta_t: float
    U: float = 0.0
    t: float = 1.0


@dataclass(frozen=True)
class CutSpec:
    """Subsystem A = sites 1..L_A of the chain."""

    L_A: int

    def check(self, L: int) -> "CutSpec":
        if isinstance(self.L_A, bool) or not isinstance(self.L_A, (int, np.integer)):
            raise InvalidParams(f"L_A must be an integer, got {self.L_A!r}")
        if self.L_A % 2 or not 2 <= self.L_A <= L - 2:
            raise InvalidParams(f"L_A must be even with 2 <= L_A <= L-2 (L={L}), got {self.L_A}")
        return self


def validate_params(raw: ModelParams) -> ModelParams:
    L = raw.L
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)):
        raise InvalidParams(f"L must be an integer, got {L!r}")
    if L % 2:
        raise InvalidParams(f"L must be even (two sites per unit cell), got {L}")
    if L < 4:
        raise InvalidParams(f"L must be at least 4, got {L}")
    for name in ("t", "delta_t", "U"):
        value = getattr(raw, name)
        if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
            raise InvalidParams(f"{name} must be a finite real, got {value!r}")
    if raw.t <= 0:
        raise InvalidParams(f"t must be positive, got {raw.t}")
    return raw


def bonds(params: ModelParams, bc: BoundaryCondition) -> list[tuple[int, int, float]]:
    """List of (i, j, amplitude) with 0-indexed i < j, in site order.

    The wrap bond of a ring is reported as (0, L-1).
    """
    L, t, dt = params.L, params.t, params.delta_t
    out = []
    for i in range(L - 1):
        # 0-indexed even i is a 1-indexed odd site
        out.append((i, i + 1, -(t + dt) if i % 2 == 0 else -(t - dt)))
    if BoundaryCondition(bc) is BoundaryCondition.PBC:
        out.append((0, L - 1, -(t - dt)))
    return out


def build_hopping_matrix(params: ModelParams, bc: BoundaryCondition = BoundaryCondition.PBC) -> np.ndarray:
    """Dense real symmetric L x L hopping matrix for one spin species."""
    validate_params(params)
    h = np.zeros((params.L, params.L))
    for i, j, amp in bonds(params, bc):
        h[i, j] = amp
        h[j, i] = amp
    return h
