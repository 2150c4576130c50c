"""Two-qubit Clifford gates: uniform sampling and Pauli conjugation.

Sampling goes through the canonical decomposition of the 11520-element group
(mod phase) into a uniform Sp(4,2) element and four uniform sign bits, so
uniformity is exact rather than empirical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _tables as tables
from .sites import PauliString, SiteId


@dataclass(frozen=True)
class CliffordGate2:
    """One two-qubit Clifford, as (symplectic index, sign bits).

    ``sym`` indexes the fixed enumeration of Sp(4,2); ``signs`` holds the sign
    bits of the images of X1, Z1, X2, Z2 under g P g^dag.
    """

    sym: int
    signs: int

    @property
    def symplectic(self) -> np.ndarray:
        """4x4 GF(2) matrix acting on (x1, z1, x2, z2), forward convention."""
        return tables.SYM[self.sym].copy()

    @property
    def sign_bits(self) -> tuple[int, int, int, int]:
        return tuple((self.signs >> j) & 1 for j in range(4))

    def inverse(self) -> "CliffordGate2":
        isym, isgn = tables.invert_gates(np.array([self.sym]), np.array([self.signs]))
        return CliffordGate2(int(isym[0]), int(isgn[0]))

    def conj(self) -> "CliffordGate2":
        """Complex conjugate gate (computational basis)."""
        csym, csgn = tables.conjugate_gates(np.array([self.sym]), np.array([self.signs]))
        return CliffordGate2(int(csym[0]), int(csgn[0]))

    def forward_letters(self, v4: int) -> int:
        """Letter pair of g P g^dag for input letter pair v4."""
        return int(tables.ACT[self.sym, v4])

    def image_sign(self, v4: int) -> int:
        """Sign bit of g P g^dag for canonical Hermitian input v4."""
        return tables.sign_of_image(self.sym, self.signs, v4)

    @staticmethod
    def identity() -> "CliffordGate2":
        return CliffordGate2(tables.IDENT_SYM, 0)

    @staticmethod
    def swap() -> "CliffordGate2":
        return CliffordGate2(tables.SWAP_SYM, 0)

    @staticmethod
    def from_symplectic(matrix: np.ndarray, signs: int = 0) -> "CliffordGate2":
        m = (np.asarray(matrix) % 2).astype(np.uint8)
        hits = np.where((tables.SYM == m).all(axis=(1, 2)))[0]
        if hits.size == 0:
            raise ValueError("matrix is not symplectic over GF(2)")
        return CliffordGate2(int(hits[0]), int(signs))


def sample_clifford2(rng: np.random.Generator) -> CliffordGate2:
    """Draw a gate uniformly from the two-qubit Clifford group (mod phase)."""
    return CliffordGate2(int(rng.integers(0, tables.N_SYM)), int(rng.integers(0, 16)))


def conjugate(gate: CliffordGate2, p: PauliString, sites: tuple[SiteId, SiteId]) -> PauliString:
    """Heisenberg update U^dag p U on the two named sites; phase discarded."""
    a, b = sites
    if a == b:
        raise ValueError("gate sites must be distinct")
    va, vb = p.get(a), p.get(b)
    v4 = va | (vb << 2)
    out = dict(p.letters)
    out.pop(a, None)
    out.pop(b, None)
    if v4:
        w4 = int(tables.ACT[tables.INV_SYM[gate.sym], v4])
        if w4 & 3:
            out[a] = w4 & 3
        if w4 >> 2:
            out[b] = w4 >> 2
    return PauliString(out)
