"""Bit-packed GF(2) kernels for the tableau engine.

Layout: m qubits, 2m lanes (destabilizers then stabilizers), packed 64 lanes
per word.  X[q, w] / Z[q, w] hold the x/z bits of qubit q across lanes; SGN[w]
holds the lane sign bits.  Column order inside rank computations is fixed:
X-part before Z-part per site, sites in the order supplied by the caller.
"""

from __future__ import annotations

import numba
import numpy as np

U64 = numba.uint64
ALL1 = np.uint64(0xFFFFFFFFFFFFFFFF)


@numba.njit(cache=True)
def apply_ops(X, Z, SGN, nwords, aa, bb, rows16, anf16):
    """Apply a sequence of two-qubit Cliffords to every lane."""
    for g in range(aa.shape[0]):
        a = aa[g]
        b = bb[g]
        r = rows16[g]
        m = anf16[g]
        for w in range(nwords):
            xa = X[a, w]
            za = Z[a, w]
            xb = X[b, w]
            zb = Z[b, w]
            o0 = np.uint64(0)
            o1 = np.uint64(0)
            o2 = np.uint64(0)
            o3 = np.uint64(0)
            if r & 0x1:
                o0 ^= xa
            if r & 0x2:
                o0 ^= za
            if r & 0x4:
                o0 ^= xb
            if r & 0x8:
                o0 ^= zb
            if r & 0x10:
                o1 ^= xa
            if r & 0x20:
                o1 ^= za
            if r & 0x40:
                o1 ^= xb
            if r & 0x80:
                o1 ^= zb
            if r & 0x100:
                o2 ^= xa
            if r & 0x200:
                o2 ^= za
            if r & 0x400:
                o2 ^= xb
            if r & 0x800:
                o2 ^= zb
            if r & 0x1000:
                o3 ^= xa
            if r & 0x2000:
                o3 ^= za
            if r & 0x4000:
                o3 ^= xb
            if r & 0x8000:
                o3 ^= zb
            s = np.uint64(0)
            mm = m >> 1
            for k in range(1, 16):
                if mm & 1:
                    t = np.uint64(0xFFFFFFFFFFFFFFFF)
                    if k & 1:
                        t &= xa
                    if k & 2:
                        t &= za
                    if k & 4:
                        t &= xb
                    if k & 8:
                        t &= zb
                    s ^= t
                mm >>= 1
            X[a, w] = o0
            Z[a, w] = o1
            X[b, w] = o2
            Z[b, w] = o3
            SGN[w] ^= s


@numba.njit(cache=True)
def anticommute_vector(X, Z, nwords, qs, xs, zs, out):
    """out[w] bits: lanes whose symplectic product with the Pauli is odd."""
    for w in range(nwords):
        out[w] = np.uint64(0)
    for k in range(qs.shape[0]):
        q = qs[k]
        if zs[k]:
            for w in range(nwords):
                out[w] ^= X[q, w]
        if xs[k]:
            for w in range(nwords):
                out[w] ^= Z[q, w]


@numba.njit(cache=True)
def get_lane(X, Z, nwords, lane, xrow, zrow):
    w = lane >> 6
    bit = np.uint64(1) << np.uint64(lane & 63)
    for q in range(X.shape[0]):
        xrow[q] = np.uint8(1) if (X[q, w] & bit) else np.uint8(0)
        zrow[q] = np.uint8(1) if (Z[q, w] & bit) else np.uint8(0)


@numba.njit(cache=True)
def mult_rows_by(X, Z, SGN, nwords, mask, xrow, zrow, psign):
    """Left-multiply every lane selected by ``mask`` by the fixed Pauli row.

    Phase bookkeeping follows the i-exponent rule of the W(x,z) normal form;
    asserts nothing, so destabilizer lanes may carry meaningless (but
    deterministic) signs, which are never read.
    """
    m = X.shape[0]
    sumlo = np.zeros(nwords, dtype=np.uint64)
    sumhi = np.zeros(nwords, dtype=np.uint64)
    for q in range(m):
        px = xrow[q]
        pz = zrow[q]
        if px == 0 and pz == 0:
            continue
        for w in range(nwords):
            x = X[q, w]
            z = Z[q, w]
            if px == 1 and pz == 0:      # X: +1 on (1,1), -1 on (0,1)
                glo = z
                ghi = z & ~x
            elif px == 0:                # Z: +1 on (1,0), -1 on (1,1)
                glo = x
                ghi = x & z
            else:                        # Y: +1 on (0,1), -1 on (1,0)
                glo = x ^ z
                ghi = x & ~z
            glo &= mask[w]
            ghi &= mask[w]
            carry = sumlo[w] & glo
            sumlo[w] ^= glo
            sumhi[w] ^= ghi ^ carry
            if px:
                X[q, w] ^= mask[w]
            if pz:
                Z[q, w] ^= mask[w]
    for w in range(nwords):
        SGN[w] ^= sumhi[w] & mask[w]
        if psign:
            SGN[w] ^= mask[w]


@numba.njit(cache=True)
def clear_and_set_lane(X, Z, SGN, lane, qs, xs, zs, sign):
    """Overwrite one lane with the given Pauli."""
    w = lane >> 6
    bit = np.uint64(1) << np.uint64(lane & 63)
    nbit = ~bit
    for q in range(X.shape[0]):
        X[q, w] &= nbit
        Z[q, w] &= nbit
    for k in range(qs.shape[0]):
        if xs[k]:
            X[qs[k], w] |= bit
        if zs[k]:
            Z[qs[k], w] |= bit
    if sign:
        SGN[w] |= bit
    else:
        SGN[w] &= nbit


@numba.njit(cache=True)
def copy_lane(X, Z, SGN, src, dst):
    ws = src >> 6
    bs = np.uint64(1) << np.uint64(src & 63)
    wd = dst >> 6
    bd = np.uint64(1) << np.uint64(dst & 63)
    for q in range(X.shape[0]):
        if X[q, ws] & bs:
            X[q, wd] |= bd
        else:
            X[q, wd] &= ~bd
        if Z[q, ws] & bs:
            Z[q, wd] |= bd
        else:
            Z[q, wd] &= ~bd
    if SGN[ws] & bs:
        SGN[wd] |= bd
    else:
        SGN[wd] &= ~bd


@numba.njit(cache=True)
def rank_rows(work):
    """GF(2) rank of packed rows (k, W), destroying ``work``."""
    k = work.shape[0]
    nwords = work.shape[1]
    rank = 0
    for i in range(k):
        pw = -1
        pb = np.uint64(0)
        for w in range(nwords):
            if work[i, w]:
                v = work[i, w]
                pw = w
                pb = v & (~v + np.uint64(1))  # lowest set bit
                break
        if pw < 0:
            continue
        rank += 1
        for j in range(i + 1, k):
            if work[j, pw] & pb:
                for w in range(nwords):
                    work[j, w] ^= work[i, w]
    return rank


@numba.njit(cache=True)
def product_of_lanes(X, Z, SGN, nwords, lanes):
    """Product of the given lanes; returns (xrow, zrow, sign, lo_parity).

    lo_parity must come out 0 whenever the lanes pairwise commute.
    """
    m = X.shape[0]
    rx = np.zeros(m, dtype=np.uint8)
    rz = np.zeros(m, dtype=np.uint8)
    e = 0  # accumulated i exponent (mod 4), from 2*signs and the g function
    for idx in range(lanes.shape[0]):
        lane = lanes[idx]
        w = lane >> 6
        bit = np.uint64(1) << np.uint64(lane & 63)
        if SGN[w] & bit:
            e += 2
        for q in range(m):
            x2 = np.uint8(1) if (X[q, w] & bit) else np.uint8(0)
            z2 = np.uint8(1) if (Z[q, w] & bit) else np.uint8(0)
            if x2 == 0 and z2 == 0:
                continue
            x1 = rx[q]
            z1 = rz[q]
            if x1 or z1:
                if x1 == 1 and z1 == 0:
                    e += z2 * (2 * x2 - 1)
                elif x1 == 0:
                    e += x2 * (1 - 2 * z2)
                else:
                    e += int(z2) - int(x2)
            rx[q] = x1 ^ x2
            rz[q] = z1 ^ z2
    e &= 3
    return rx, rz, np.uint8(e >> 1), np.uint8(e & 1)
