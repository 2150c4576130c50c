import warnings

import numpy as np
import pytest

from impscram import sites
from impscram.clifford import sample_clifford2
from impscram.dense import DenseState
from impscram.tableau import init_purified

warnings.filterwarnings("ignore", message=".*not large against.*")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)


def small_layout():
    """7-qubit purified layout: (A,I), (R,AR), (M0,AM0) Bell pairs + D."""
    return [sites.ancilla_a(), sites.impurity(), sites.discard_slot(),
            sites.reset_slot(), sites.ancilla_r(), sites.medium(0),
            sites.ancilla_m(0)]


def paired_states(layout=None):
    """The same purified initial state as (tableau, dense oracle)."""
    layout = layout or small_layout()
    st = init_purified(layout)
    ds = DenseState(layout)
    done = set()
    for s in layout:
        if s in done:
            continue
        partner = None
        if s.kind == "A":
            partner = sites.impurity()
        elif s.kind == "M":
            partner = sites.ancilla_m(s.x, s.strip)
        elif s.kind == "R":
            partner = sites.ancilla_r()
        elif s.kind == "B":
            partner = sites.SiteId("AB")
        elif s.kind == "G":
            partner = sites.SiteId("G2")
        if partner is not None and partner in ds.index:
            ds.bell_pair(s, partner)
            done.update((s, partner))
    return st, ds


def random_clifford_evolution(layout, depth, rng, tableau=None, dense=None):
    """Apply the same random two-qubit circuit to both representations."""
    from impscram.tableau import apply_gate
    st, ds = (tableau, dense) if tableau is not None else paired_states(layout)
    n = len(layout)
    for _ in range(depth):
        i, j = rng.choice(n, size=2, replace=False)
        g = sample_clifford2(rng)
        apply_gate(st, g, (layout[i], layout[j]))
        ds.apply_gate(g, layout[i], layout[j])
    return st, ds
