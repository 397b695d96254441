import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from espec.analysis import (
    DEFAULT_PHASE_LABELS,
    FOURFOLD_ANTIDIAGONAL,
    FOURFOLD_DIAGONAL,
    NON_DEGENERATE,
    SIXTEENFOLD,
    analyse,
    classify,
    compare_spectra,
    distribution,
    group_levels,
    ground_multiplicity,
)
from espec.errors import EmptySpectrum
from espec.model import CutSpec, ModelParams
from espec.freefermion import free_entanglement_spectrum
from espec.spectrum import EntanglementSpectrum


def spec_from_weights(weights, labels=None):
    weights = np.asarray(weights, dtype=float)
    if labels is None:
        labels = [(0, 0)] * len(weights)
    nu, nd = zip(*labels)
    return EntanglementSpectrum.from_unsorted(-np.log(weights), nu, nd)


def sizes(groups):
    return [g.multiplicity for g in groups]


class TestGrouping:
    def test_examples(self):
        s = spec_from_weights([0.25, 0.25, 0.25, 0.25 - 1e-10, 0.0001])
        assert sizes(group_levels(s, 1e-8)) == [4, 1]
        s = spec_from_weights([0.5, 0.3, 0.2])
        assert sizes(group_levels(s, 1e-8)) == [1, 1, 1]

    def test_chained_linkage(self):
        # neighbours within tolerance chain even if the ends are further apart
        w = [0.4, 0.4 - 0.6e-3, 0.4 - 1.2e-3, 0.1]
        assert sizes(group_levels(spec_from_weights(w), 1e-3 / 0.4)) == [3, 1]

    def test_empty(self):
        empty = EntanglementSpectrum([], [], [])
        assert group_levels(empty, 1e-8) == []
        with pytest.raises(EmptySpectrum):
            ground_multiplicity([])
        with pytest.raises(EmptySpectrum):
            analyse(empty, 1e-8)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=40),
        st.floats(1e-10, 1e-1),
        st.floats(1e-3, 1e3),
    )
    def test_partition_and_scale_invariance(self, w, rel_tol, scale):
        s = spec_from_weights(w)
        groups = group_levels(s, rel_tol)
        assert sum(sizes(groups)) == len(w)
        flat = [m for g in groups for m in g.members]
        assert flat == s.levels
        # a uniform shift of xi rescales every weight and the tolerance together
        shifted = EntanglementSpectrum(s.xi - math.log(scale), s.n_up, s.n_down)
        assert sizes(group_levels(shifted, rel_tol)) == sizes(groups)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=30), st.floats(1e-10, 1e-1))
    def test_idempotent(self, w, rel_tol):
        s = spec_from_weights(w)
        groups = group_levels(s, rel_tol)
        for g in groups:
            sub = EntanglementSpectrum.from_unsorted(
                [m.xi for m in g.members], [m.n_up for m in g.members], [m.n_down for m in g.members]
            )
            # measured against the group head, regrouping never splits a group
            assert sizes(group_levels(sub, rel_tol * s.weights[0] / sub.weights[0])) == [g.multiplicity]


class TestClassify:
    def test_nondegenerate(self):
        sig = classify(group_levels(spec_from_weights([0.9, 0.1]), 1e-8))
        assert sig.tag == NON_DEGENERATE and sig.ground_multiplicity == 1
        assert sig.label() == "I"

    def test_diagonal(self):
        s = spec_from_weights([0.2] * 4 + [0.2 / 4], [(1, 1), (2, 2), (2, 2), (3, 3), (0, 0)])
        sig = classify(group_levels(s, 1e-8))
        assert sig.tag == FOURFOLD_DIAGONAL
        assert sig.distribution == {(1, 1): 1, (2, 2): 2, (3, 3): 1}
        assert sig.label() == "III"

    def test_antidiagonal(self):
        s = spec_from_weights([0.2] * 4, [(1, 3), (2, 2), (2, 2), (3, 1)])
        assert classify(group_levels(s, 1e-8)).tag == FOURFOLD_ANTIDIAGONAL

    def test_sixteenfold(self):
        labels = [(u, d) for u in (1, 2, 2, 3) for d in (1, 2, 2, 3)]
        sig = classify(group_levels(spec_from_weights([1 / 16] * 16, labels), 1e-8))
        assert sig.tag == SIXTEENFOLD and sig.label() == "II"

    @pytest.mark.parametrize(
        "labels,m",
        [([(1, 1), (2, 1), (2, 2), (3, 3)], 4), ([(2, 2), (3, 3)], 2), ([(0, 0)] * 8, 8)],
    )
    def test_other(self, labels, m):
        sig = classify(group_levels(spec_from_weights([0.1] * len(labels), labels), 1e-8))
        assert sig.tag == f"Other({m})"
        assert sig.label() is None

    def test_custom_labels(self):
        sig = classify(group_levels(spec_from_weights([1.0]), 1e-8))
        assert sig.label({NON_DEGENERATE: "trivial"}) == "trivial"
        assert set(DEFAULT_PHASE_LABELS.values()) == {"I", "II", "III", "IV"}

    def test_particle_hole_swaps_fourfold_tags(self, ed_l8):
        g_neg, sig_neg = analyse(ed_l8(-0.4, -3.0), 0.05)
        g_pos, sig_pos = analyse(ed_l8(-0.4, 3.0), 0.05)
        # at L = 8 the edge singlet and triplet only merge at a 5% tolerance
        assert sig_neg.tag == FOURFOLD_DIAGONAL
        assert sig_pos.tag == FOURFOLD_ANTIDIAGONAL
        assert sig_neg.distribution == {(1, 1): 1, (2, 2): 2, (3, 3): 1}
        assert sig_pos.distribution == {(1, 3): 1, (2, 2): 2, (3, 1): 1}

    def test_free_sixteenfold_distribution(self):
        s = free_entanglement_spectrum(ModelParams(200, -0.2), CutSpec(100))
        groups, sig = analyse(s, 1e-8)
        assert sig.tag == SIXTEENFOLD
        k = 49
        want = {(k + a, k + b): (1 + (a == 1)) * (1 + (b == 1)) for a in range(3) for b in range(3)}
        # per spin species the two zero modes give N in {k, k+1, k+2} with counts 1, 2, 1
        assert distribution(groups[0]) == {key: v for key, v in want.items()}


class TestCompare:
    def test_identical_and_shifted(self):
        a = spec_from_weights([0.6, 0.4], [(1, 0), (0, 1)])
        assert compare_spectra(a, a) == 0.0
        b = spec_from_weights([0.6 + 1e-6, 0.4 - 1e-6], [(1, 0), (0, 1)])
        assert compare_spectra(a, b) == pytest.approx(1e-6, rel=1e-6)

    def test_label_mismatch(self):
        a = spec_from_weights([0.6, 0.4], [(1, 0), (0, 1)])
        b = spec_from_weights([0.6, 0.4], [(1, 0), (1, 1)])
        assert compare_spectra(a, b) == math.inf

    def test_tail_below_cutoff_ignored(self):
        a = spec_from_weights([0.6, 0.4], [(1, 0), (0, 1)])
        b = spec_from_weights([0.6, 0.4, 1e-13], [(1, 0), (0, 1), (1, 1)])
        assert compare_spectra(a, b, cutoff=1e-12) == 0.0
