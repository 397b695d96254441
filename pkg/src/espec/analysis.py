"""Degeneracy grouping and phase classification of entanglement spectra."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import EmptySpectrum
from .spectrum import EntanglementSpectrum, ESLevel

NON_DEGENERATE = "NonDegenerate"
SIXTEENFOLD = "Sixteenfold"
FOURFOLD_DIAGONAL = "FourfoldDiagonal"
FOURFOLD_ANTIDIAGONAL = "FourfoldAntidiagonal"

# Roman-numeral region names; which fourfold pattern is III and which is IV
# is a convention, override as needed.
DEFAULT_PHASE_LABELS = {
    NON_DEGENERATE: "I",
    SIXTEENFOLD: "II",
    FOURFOLD_DIAGONAL: "III",
    FOURFOLD_ANTIDIAGONAL: "IV",
}


@dataclass
class DegeneracyGroup:
    members: list[ESLevel]

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def xi_rep(self) -> float:
        return float(np.mean([m.xi for m in self.members]))

    @property
    def splitting(self) -> float:
        """Spread of the weights lambda inside the group."""
        w = np.exp(-np.array([m.xi for m in self.members]))
        return float(w.max() - w.min())


@dataclass
class PhaseSignature:
    tag: str
    ground_multiplicity: int
    splitting: float
    distribution: dict[tuple[int, int], int] = field(default_factory=dict)

    def label(self, mapping: dict[str, str] | None = None) -> str | None:
        return (DEFAULT_PHASE_LABELS if mapping is None else mapping).get(self.tag)


def group_levels(spec: EntanglementSpectrum, rel_tol: float) -> list[DegeneracyGroup]:
    """Single-linkage clustering of adjacent weights.

    Neighbouring levels join when their weights differ by at most
    ``rel_tol`` times the largest weight of the spectrum.
    """
    if len(spec) == 0:
        return []
    w = spec.weights
    tol = rel_tol * w[0]
    levels = spec.levels
    groups = [[levels[0]]]
    for i in range(1, len(levels)):
        if w[i - 1] - w[i] <= tol:
            groups[-1].append(levels[i])
        else:
            groups.append([levels[i]])
    return [DegeneracyGroup(g) for g in groups]


def ground_multiplicity(groups: list[DegeneracyGroup]) -> int:
    if not groups:
        raise EmptySpectrum("no levels to classify")
    return groups[0].multiplicity


def distribution(group: DegeneracyGroup) -> dict[tuple[int, int], int]:
    counts = Counter((m.n_up, m.n_down) for m in group.members)
    return dict(sorted(counts.items()))


def label_offsets(group: DegeneracyGroup) -> set[tuple[int, int]]:
    """All pairwise (d n_up, d n_down) differences, both signs."""
    out = set()
    for a, b in combinations(group.members, 2):
        d = (a.n_up - b.n_up, a.n_down - b.n_down)
        out.add(d)
        out.add((-d[0], -d[1]))
    return out


def classify(groups: list[DegeneracyGroup]) -> PhaseSignature:
    """Tag the ground multiplet by size and particle-number offset pattern.

    A fourfold multiplet is diagonal when every pair of members differs by
    equal numbers of up and down particles (opposite-spin pairs added or
    removed), antidiagonal when the differences are opposite (one spin
    species counted as holes).
    """
    m = ground_multiplicity(groups)
    g = groups[0]
    offsets = label_offsets(g)
    if m == 1:
        tag = NON_DEGENERATE
    elif m == 16:
        tag = SIXTEENFOLD
    elif m == 4 and all(du == dd for du, dd in offsets):
        tag = FOURFOLD_DIAGONAL
    elif m == 4 and all(du == -dd for du, dd in offsets):
        tag = FOURFOLD_ANTIDIAGONAL
    else:
        tag = f"Other({m})"
    return PhaseSignature(tag, m, g.splitting, distribution(g))


def analyse(spec: EntanglementSpectrum, rel_tol: float) -> tuple[list[DegeneracyGroup], PhaseSignature]:
    groups = group_levels(spec, rel_tol)
    return groups, classify(groups)


def compare_spectra(a: EntanglementSpectrum, b: EntanglementSpectrum, cutoff: float = 1e-12) -> float:
    """Largest weight mismatch between two spectra matched label by label.

    Only weights above ``cutoff`` take part; a label present in one
    spectrum but not the other, or a different level count within a label,
    returns inf.
    """
    wa = {k: np.sort(np.exp(-v))[::-1] for k, v in a.by_label().items()}
    wb = {k: np.sort(np.exp(-v))[::-1] for k, v in b.by_label().items()}
    worst = 0.0
    for key in set(wa) | set(wb):
        x = wa.get(key, np.zeros(0))
        y = wb.get(key, np.zeros(0))
        x, y = x[x > cutoff], y[y > cutoff]
        if len(x) != len(y):
            # a level sitting right at the cutoff may fall on either side
            n = min(len(x), len(y))
            tail = np.concatenate([x[n:], y[n:]])
            if tail.size and tail.max() > 10 * cutoff:
                return float("inf")
            x, y = x[:n], y[:n]
        if x.size:
            worst = max(worst, float(np.max(np.abs(x - y))))
    return worst
