"""Sampling uniformity and Pauli-conjugation contracts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impscram import sites
from impscram.clifford import CliffordGate2, conjugate, sample_clifford2
from impscram.sites import PauliString, anticommutes

A, B = sites.medium(0), sites.medium(1)


def pair_string(v4):
    return PauliString({s: v for s, v in ((A, v4 & 3), (B, v4 >> 2)) if v})


def test_sampling_deterministic():
    g1 = sample_clifford2(np.random.default_rng(123))
    g2 = sample_clifford2(np.random.default_rng(123))
    assert g1 == g2


def test_symplectic_class_uniformity():
    """Each of the 720 symplectic classes at 1/720 within 5 sigma (binomial)."""
    n = 10**6
    r = np.random.default_rng(7)
    counts = np.zeros(720, dtype=int)
    for _ in range(n):
        counts[sample_clifford2(r).sym] += 1
    p = 1.0 / 720
    sigma = np.sqrt(n * p * (1 - p))
    assert (np.abs(counts - n * p) < 5 * sigma).all()


def test_two_design_second_moment():
    """A fixed non-identity input maps to each of the 15 non-identity outputs
    with frequency 1/15, the depolarizing form behind every OTOC average."""
    n = 60000
    rng = np.random.default_rng(11)
    counts = np.zeros(16, dtype=int)
    for _ in range(n):
        g = sample_clifford2(rng)
        counts[g.forward_letters(0b0001)] += 1  # input X on site a
    assert counts[0] == 0
    p = 1.0 / 15
    sigma = np.sqrt(n * p * (1 - p))
    assert (np.abs(counts[1:] - n * p) < 5 * sigma).all()


def test_conjugate_identity_and_swap():
    p = PauliString({A: "X"})
    assert conjugate(CliffordGate2.identity(), p, (A, B)) == p
    assert conjugate(CliffordGate2.swap(), p, (A, B)) == PauliString({B: "X"})


def test_conjugate_requires_distinct_sites():
    with pytest.raises(ValueError):
        conjugate(CliffordGate2.identity(), PauliString({A: "X"}), (A, A))


def test_conjugate_involution(rng):
    for _ in range(100):
        g = sample_clifford2(rng)
        v4 = int(rng.integers(0, 16))
        p = pair_string(v4)
        assert conjugate(g.inverse(), conjugate(g, p, (A, B)), (A, B)) == p


def test_commutation_preserved_exhaustive(rng):
    """Conjugation preserves anticommutation parity for all 16x16 pairs."""
    for _ in range(25):
        g = sample_clifford2(rng)
        img = [conjugate(g, pair_string(v), (A, B)) for v in range(16)]
        for v in range(16):
            for w in range(16):
                assert anticommutes(img[v], img[w]) == \
                    anticommutes(pair_string(v), pair_string(w))


@given(st.integers(0, 15), st.integers(0, 15))
@settings(max_examples=60, deadline=None)
def test_anticommutes_parity(v, w):
    """Anticommutation is the parity of clashing non-identity letters."""
    clashes = sum(1 for a, b in ((v & 3, w & 3), (v >> 2, w >> 2))
                  if a and b and a != b)
    assert anticommutes(pair_string(v), pair_string(w)) == bool(clashes % 2)


def test_anticommutes_examples():
    i, j = sites.medium(3), sites.medium(4)
    assert anticommutes(PauliString({i: "X"}), PauliString({i: "Y"}))
    assert not anticommutes(PauliString({i: "X"}), PauliString({j: "Y"}))
    assert not anticommutes(PauliString({i: "X", j: "Y"}),
                            PauliString({i: "Y", j: "X"}))


def test_pauli_string_basics():
    p = PauliString({A: "X", B: 0})
    assert p.weight == 1 and p.support == {A}
    assert PauliString().is_identity()
    with pytest.raises(ValueError):
        PauliString({A: 5})


def test_symplectic_property_exposed():
    g = sample_clifford2(np.random.default_rng(5))
    m = g.symplectic
    omega = np.zeros((4, 4), dtype=int)
    for q in range(2):
        omega[2 * q, 2 * q + 1] = omega[2 * q + 1, 2 * q] = 1
    assert ((m.T.astype(int) @ omega @ m.astype(int)) % 2 == omega).all()
    assert CliffordGate2.from_symplectic(m, g.signs) == g
