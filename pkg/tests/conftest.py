import math

import numpy as np
import pytest

from espec.ed import ed_entanglement_spectrum
from espec.freefermion import free_entanglement_spectrum
from espec.model import CutSpec, ModelParams


def brute_force_levels(f):
    """All 2^m (xi, N) pairs of a single-species mode spectrum."""
    f = np.asarray(f, dtype=float)
    out = []
    for bits in np.ndindex(*(2,) * len(f)):
        b = np.array(bits, dtype=int)
        lam = np.prod(np.where(b == 1, f, 1 - f))
        if lam > 0:
            out.append((-math.log(lam), int(b.sum())))
    return sorted(out)


@pytest.fixture(scope="session")
def ed_l8():
    """ED spectra at L = 8, L_A = 4 keyed by (dt, U)."""
    cache = {}

    def get(dt, U):
        if (dt, U) not in cache:
            cache[(dt, U)] = ed_entanglement_spectrum(ModelParams(8, dt, U), CutSpec(4))
        return cache[(dt, U)]

    return get


@pytest.fixture(scope="session")
def free_exact():
    def get(L, L_A, dt):
        return free_entanglement_spectrum(ModelParams(L, dt), CutSpec(L_A), 4 ** L_A, math.inf)

    return get
