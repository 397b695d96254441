"""Entanglement spectrum container shared by both engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class ESLevel(NamedTuple):
    xi: float
    n_up: int
    n_down: int

    @property
    def weight(self) -> float:
        return float(np.exp(-self.xi))


@dataclass
class EntanglementSpectrum:
    """Levels xi = -ln(lambda) in ascending order with subsystem particle labels.

    ``complete`` is False when the level list was truncated (max_levels,
    xi window); ``dropped`` counts eigenvalues discarded below a floor.
    """

    xi: np.ndarray
    n_up: np.ndarray
    n_down: np.ndarray
    complete: bool = True
    dropped: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.n_up = np.asarray(self.n_up, dtype=np.int64)
        self.n_down = np.asarray(self.n_down, dtype=np.int64)
        if not (self.xi.shape == self.n_up.shape == self.n_down.shape):
            raise ValueError("xi, n_up and n_down must have equal length")

    @classmethod
    def from_unsorted(cls, xi, n_up, n_down, **kw) -> "EntanglementSpectrum":
        xi = np.asarray(xi, dtype=float)
        n_up = np.asarray(n_up, dtype=np.int64)
        n_down = np.asarray(n_down, dtype=np.int64)
        order = np.lexsort((n_down, n_up, xi))
        return cls(xi[order], n_up[order], n_down[order], **kw)

    def __len__(self) -> int:
        return len(self.xi)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(-self.xi)

    @property
    def levels(self) -> list[ESLevel]:
        return [ESLevel(float(x), int(u), int(d)) for x, u, d in zip(self.xi, self.n_up, self.n_down)]

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def by_label(self) -> dict[tuple[int, int], np.ndarray]:
        """Sorted xi values keyed by (n_up, n_down)."""
        out: dict[tuple[int, int], list[float]] = {}
        for x, u, d in zip(self.xi, self.n_up, self.n_down):
            out.setdefault((int(u), int(d)), []).append(float(x))
        return {k: np.sort(np.array(v)) for k, v in sorted(out.items())}

    def relabel(self, n_up=None, n_down=None) -> "EntanglementSpectrum":
        return EntanglementSpectrum.from_unsorted(
            self.xi,
            self.n_up if n_up is None else n_up,
            self.n_down if n_down is None else n_down,
            complete=self.complete,
            dropped=self.dropped,
            meta=dict(self.meta),
        )
