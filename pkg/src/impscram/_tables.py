"""Lookup tables for the two-qubit Clifford group.

Every two-qubit Clifford (mod phase) factors uniquely into a symplectic part
(an element of Sp(4,2), 720 matrices) and four sign bits for the images of
X1, Z1, X2, Z2, giving the familiar 11520 gates.  All gate arithmetic in the
hot loops is table lookups built here once at import.

Conventions, fixed package-wide:

* a single-site Pauli letter is v = x + 2z: I=0, X=1, Z=2, Y=3;
* a two-site letter pair is v4 = va | (vb << 2), i.e. bits (xa, za, xb, zb);
* the symplectic matrix S of a gate g maps the (x1, z1, x2, z2) vector of P
  to that of g P g^dag (the forward / Schroedinger push); column j of S is
  the image vector of the j-th basis Pauli (X1, Z1, X2, Z2);
* tableau rows represent Hermitian Paulis P = (-1)^r prod_q W(x_q, z_q) with
  W(1,1) = Y, and sign tables are built for exactly that normal form.
"""

from __future__ import annotations

import numpy as np

# ANF masks are uint16 bitfields: bit s is the coefficient of the monomial
# prod_{i in s} bit_i of (xa, za, xb, zb).

N_SYM = 720
N_GATES = 11520


def _popcount4(v: int) -> int:
    return bin(v & 0xF).count("1")


def _enumerate_symplectic() -> np.ndarray:
    """All of Sp(4,2) as (720, 4, 4) uint8, in a fixed (lexicographic) order."""
    omega = np.zeros((4, 4), dtype=np.uint8)
    for q in range(2):
        omega[2 * q, 2 * q + 1] = 1
        omega[2 * q + 1, 2 * q] = 1
    codes = np.arange(1 << 16, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(16, dtype=np.uint32)) & 1).astype(np.uint8)
    mats = bits.reshape(-1, 4, 4)  # bit (4r + c) is entry [r, c]
    prod = np.einsum("nji,jk,nkl->nil", mats, omega, mats) % 2
    keep = (prod == omega).all(axis=(1, 2))
    out = mats[keep]
    if out.shape[0] != N_SYM:
        raise AssertionError(f"Sp(4,2) enumeration found {out.shape[0]} != {N_SYM}")
    return out


def _mat_to_code(m: np.ndarray) -> int:
    code = 0
    for r in range(4):
        for c in range(4):
            if m[r, c]:
                code |= 1 << (4 * r + c)
    return code


class _Pauli2:
    """Exact 2-qubit Pauli in exponent form i^e * X^x Z^z (per qubit, X left)."""

    __slots__ = ("e", "x", "z")

    def __init__(self, e: int, x: int, z: int):
        self.e, self.x, self.z = e % 4, x & 3, z & 3

    def __mul__(self, other: "_Pauli2") -> "_Pauli2":
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1, per qubit
        e = self.e + other.e + 2 * _popcount4(self.z & other.x)
        return _Pauli2(e, self.x ^ other.x, self.z ^ other.z)

    @classmethod
    def hermitian(cls, x: int, z: int, sign: int = 0) -> "_Pauli2":
        # W(x,z) = i^{x z} X^x Z^z per qubit, times (-1)^sign
        return cls(_popcount4(x & z) + 2 * sign, x, z)

    def canonical_sign(self) -> int:
        """Sign bit r with self = (-1)^r * W(x,z); raises if not Hermitian."""
        d = (self.e - _popcount4(self.x & self.z)) % 4
        if d % 2:
            raise AssertionError("non-Hermitian Pauli where a sign was expected")
        return d // 2


def _v4_split(v4: int) -> tuple[int, int]:
    """(x 2-bit vector, z 2-bit vector) of a v4 letter pair."""
    xa, za, xb, zb = v4 & 1, (v4 >> 1) & 1, (v4 >> 2) & 1, (v4 >> 3) & 1
    return xa | (xb << 1), za | (zb << 1)


def _build() -> dict:
    sym = _enumerate_symplectic()
    code_to_idx = {_mat_to_code(sym[i]): i for i in range(N_SYM)}

    # forward action on letter pairs: ACT[s, v4] = vec(S . v)
    vecs = np.array([[v & 1, (v >> 1) & 1, (v >> 2) & 1, (v >> 3) & 1] for v in range(16)],
                    dtype=np.uint8)
    imgs = np.einsum("sij,vj->svi", sym, vecs) % 2
    act = (imgs[:, :, 0] | (imgs[:, :, 1] << 1) | (imgs[:, :, 2] << 2) | (imgs[:, :, 3] << 3))
    act = act.astype(np.uint8)

    # packed rows: bit (4*o + i) of ROWS16[s] is S[o, i]
    rows16 = np.zeros(N_SYM, dtype=np.uint16)
    for s in range(N_SYM):
        code = 0
        for o in range(4):
            for i in range(4):
                if sym[s, o, i]:
                    code |= 1 << (4 * o + i)
        rows16[s] = code

    # inverses via 4x4 GF(2) solve (search by composition is just as cheap)
    inv_sym = np.zeros(N_SYM, dtype=np.int16)
    for s in range(N_SYM):
        m = sym[s]
        # S^-1 columns: solve S y = e_j; S is small, brute force over act table
        inv = np.zeros((4, 4), dtype=np.uint8)
        for j in range(4):
            target = 1 << j
            src = int(np.where(act[s] == target)[0][0])
            for i in range(4):
                inv[i, j] = (src >> i) & 1
        inv_sym[s] = code_to_idx[_mat_to_code(inv)]

    # sign truth tables for all-positive generator images:
    # TT_BASE[s] bit v4 = sign of the image of canonical input v4
    tt_base = np.zeros(N_SYM, dtype=np.uint16)
    ypar = np.zeros(N_SYM, dtype=np.uint8)  # per basis image, Y-letter parity
    for s in range(N_SYM):
        base_imgs = []
        for j in range(4):
            w = int(act[s, 1 << j])
            x, z = _v4_split(w)
            base_imgs.append(_Pauli2.hermitian(x, z))
            if _popcount4(x & z) % 2:  # number of Y letters in the image
                ypar[s] |= 1 << j
        tt = 0
        for v4 in range(16):
            x, z = _v4_split(v4)
            prod = _Pauli2.hermitian(x, z)  # start from canonical input, sign +
            # image = i^{e_in} * imgX1^xa imgZ1^za imgX2^xb imgZ2^zb, with the
            # canonical-input phase carried through
            res = _Pauli2(prod.e, 0, 0)
            for j, bit in enumerate((v4 & 1, (v4 >> 1) & 1, (v4 >> 2) & 1, (v4 >> 3) & 1)):
                if bit:
                    res = res * base_imgs[j]
            if res.canonical_sign():
                tt |= 1 << v4
        tt_base[s] = tt

    # ANF (Moebius transform) of the base truth tables
    anf_base = np.zeros(N_SYM, dtype=np.uint16)
    for s in range(N_SYM):
        c = [0] * 16
        for mask in range(16):
            acc = 0
            u = mask
            while True:
                acc ^= (int(tt_base[s]) >> u) & 1
                if u == 0:
                    break
                u = (u - 1) & mask
            c[mask] = acc
        code = 0
        for mask in range(16):
            if c[mask]:
                code |= 1 << mask
        anf_base[s] = code

    # inverse sign bits: g P g^dag = s Q  =>  g^dag Q g = s P, so the sign of
    # the inverse gate's j-th image is the forward sign at v = S^-1 e_j
    inv_src = np.zeros((N_SYM, 4), dtype=np.uint8)
    for s in range(N_SYM):
        for j in range(4):
            inv_src[s, j] = int(np.where(act[s] == (1 << j))[0][0])

    ident_idx = code_to_idx[_mat_to_code(np.eye(4, dtype=np.uint8))]
    swap = np.zeros((4, 4), dtype=np.uint8)
    swap[0, 2] = swap[1, 3] = swap[2, 0] = swap[3, 1] = 1
    swap_idx = code_to_idx[_mat_to_code(swap)]

    return {
        "SYM": sym,
        "ACT": act,
        "ROWS16": rows16,
        "INV_SYM": inv_sym,
        "TT_BASE": tt_base,
        "ANF_BASE": anf_base,
        "YPAR": ypar,
        "INV_SRC": inv_src,
        "IDENT": ident_idx,
        "SWAP": swap_idx,
    }


_T = _build()

SYM: np.ndarray = _T["SYM"]
ACT: np.ndarray = _T["ACT"]
ROWS16: np.ndarray = _T["ROWS16"]
INV_SYM: np.ndarray = _T["INV_SYM"]
TT_BASE: np.ndarray = _T["TT_BASE"]
ANF_BASE: np.ndarray = _T["ANF_BASE"]
YPAR: np.ndarray = _T["YPAR"]
INV_SRC: np.ndarray = _T["INV_SRC"]
IDENT_SYM: int = _T["IDENT"]
SWAP_SYM: int = _T["SWAP"]


def sign_of_image(sym_idx: int, signs: int, v4: int) -> int:
    """Sign bit acquired by canonical input v4 under the gate (sym_idx, signs)."""
    base = (int(TT_BASE[sym_idx]) >> v4) & 1
    return base ^ (_popcount4(signs & v4) & 1)


def anf_mask(sym_idx, signs):
    """Full ANF of the sign function; the sign bits only shift the linear part.

    Vectorized over numpy arrays of sym_idx / signs.
    """
    sym_idx = np.asarray(sym_idx)
    signs = np.asarray(signs).astype(np.uint16)
    lin = ((signs & 1) << 1) | ((signs & 2) << 1) | ((signs & 4) << 2) | ((signs & 8) << 5)
    # bit j of signs goes to ANF position 1 << j: 0->1, 1->2, 2->4, 3->8
    return (ANF_BASE[sym_idx] ^ lin).astype(np.uint16)


def invert_gates(sym_idx, signs):
    """(sym, signs) of the inverse gates, vectorized."""
    sym_idx = np.asarray(sym_idx)
    signs = np.asarray(signs).astype(np.uint16)
    inv_s = INV_SYM[sym_idx]
    out_signs = np.zeros_like(signs)
    for j in range(4):
        v = INV_SRC[sym_idx, j].astype(np.uint16)
        base = (TT_BASE[sym_idx].astype(np.uint32) >> v) & 1
        par = _parity16(signs & v)
        out_signs |= ((base ^ par) << j).astype(np.uint16)
    return inv_s, out_signs


def conjugate_gates(sym_idx, signs):
    """(sym, signs) of the complex-conjugate gates, vectorized."""
    sym_idx = np.asarray(sym_idx)
    signs = np.asarray(signs).astype(np.uint16)
    return sym_idx.copy(), (signs ^ YPAR[sym_idx]).astype(np.uint16)


def _parity16(v):
    v = np.asarray(v).astype(np.uint16)
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return (v & 1).astype(np.uint16)
