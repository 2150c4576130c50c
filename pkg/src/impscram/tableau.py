"""Sign-tracking stabilizer tableau over a dynamic register set.

The state is always pure: mixed marginals arise from purifying ancillas, never
from dropping generators.  Entropies are GF(2) ranks of the generator matrix
restricted to a partition (column order: X before Z per site, sites in layout
order), which equals every Renyi order for stabilizer states.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from . import _tables as tables
from .clifford import CliffordGate2
from .sites import PauliString, SiteId


class StabilizerState:
    """Pure stabilizer state with destabilizers, bit-packed column-major."""

    def __init__(self, sites: list[SiteId]):
        if len(set(sites)) != len(sites):
            raise ValueError("duplicate SiteIds in layout")
        self.sites = list(sites)
        self.index = {s: q for q, s in enumerate(self.sites)}
        self.m = len(self.sites)
        self.nwords = (2 * self.m + 63) // 64
        self.X = np.zeros((self.m, self.nwords), dtype=np.uint64)
        self.Z = np.zeros((self.m, self.nwords), dtype=np.uint64)
        self.SGN = np.zeros(self.nwords, dtype=np.uint64)
        self.invalid = False
        # stabilizer-lane mask: lanes [m, 2m)
        self._stab_mask = _lane_mask(self.m, 2 * self.m, self.nwords)

    # -- construction -----------------------------------------------------

    def _set_bit(self, arr, q, lane):
        arr[q, lane >> 6] |= np.uint64(1) << np.uint64(lane & 63)

    def init_zero(self, q: int) -> None:
        self._set_bit(self.Z, q, self.m + q)  # stabilizer Z_q
        self._set_bit(self.X, q, q)           # destabilizer X_q

    def init_bell(self, qa: int, qb: int) -> None:
        self._set_bit(self.X, qa, self.m + qa)  # X_a X_b
        self._set_bit(self.X, qb, self.m + qa)
        self._set_bit(self.Z, qa, self.m + qb)  # Z_a Z_b
        self._set_bit(self.Z, qb, self.m + qb)
        self._set_bit(self.Z, qa, qa)           # destabilizers Z_a, X_b
        self._set_bit(self.X, qb, qb)

    def copy(self) -> "StabilizerState":
        out = StabilizerState.__new__(StabilizerState)
        out.sites = list(self.sites)
        out.index = dict(self.index)
        out.m = self.m
        out.nwords = self.nwords
        out.X = self.X.copy()
        out.Z = self.Z.copy()
        out.SGN = self.SGN.copy()
        out.invalid = self.invalid
        out._stab_mask = self._stab_mask
        return out

    # -- gates ------------------------------------------------------------

    def apply_op_arrays(self, aa, bb, syms, sgns) -> None:
        rows16 = tables.ROWS16[np.asarray(syms)]
        anf16 = tables.anf_mask(syms, sgns)
        K.apply_ops(self.X, self.Z, self.SGN, self.nwords,
                    np.ascontiguousarray(aa, dtype=np.int64),
                    np.ascontiguousarray(bb, dtype=np.int64),
                    np.ascontiguousarray(rows16, dtype=np.uint16),
                    np.ascontiguousarray(anf16, dtype=np.uint16))

    # -- measurements -----------------------------------------------------

    def _pauli_arrays(self, p: PauliString):
        qs, xs, zs = [], [], []
        for site, v in p.letters.items():
            q = self.index.get(site)
            if q is None:
                raise KeyError(f"unregistered site {site!r}")
            qs.append(q)
            xs.append(v & 1)
            zs.append(v >> 1)
        return (np.asarray(qs, dtype=np.int64), np.asarray(xs, dtype=np.uint8),
                np.asarray(zs, dtype=np.uint8))

    def postselect_prob(self, p: PauliString, outcome: int) -> float:
        """Measure p, force the given outcome (+1/-1); returns its probability.

        The state is updated in place; a zero-probability request leaves the
        state untouched and flags it invalid.
        """
        if p.is_identity():
            raise ValueError("cannot measure the identity")
        if outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")
        qs, xs, zs = self._pauli_arrays(p)
        antic = np.zeros(self.nwords, dtype=np.uint64)
        K.anticommute_vector(self.X, self.Z, self.nwords, qs, xs, zs, antic)
        stab_bits = antic & self._stab_mask
        want = np.uint8(0 if outcome == 1 else 1)
        if stab_bits.any():
            w = int(np.flatnonzero(stab_bits)[0])
            word = int(stab_bits[w])
            lane = (w << 6) + (word & -word).bit_length() - 1
            mask = antic.copy()
            mask[lane >> 6] &= ~(np.uint64(1) << np.uint64(lane & 63))
            xrow = np.empty(self.m, dtype=np.uint8)
            zrow = np.empty(self.m, dtype=np.uint8)
            K.get_lane(self.X, self.Z, self.nwords, lane, xrow, zrow)
            psign = np.uint8(1) if (self.SGN[lane >> 6] >> np.uint64(lane & 63)) & np.uint64(1) else np.uint8(0)
            K.mult_rows_by(self.X, self.Z, self.SGN, self.nwords, mask, xrow, zrow, psign)
            K.copy_lane(self.X, self.Z, self.SGN, lane, lane - self.m)
            K.clear_and_set_lane(self.X, self.Z, self.SGN, lane, qs, xs, zs, want)
            return 0.5
        # deterministic branch: product of stabilizer partners of the
        # anticommuting destabilizers reproduces +/- p
        destab_bits = antic & ~self._stab_mask
        lanes = _bits_to_lanes(destab_bits) + self.m
        rx, rz, sign, lo = K.product_of_lanes(self.X, self.Z, self.SGN, self.nwords,
                                              lanes.astype(np.int64))
        if lo != 0:
            raise AssertionError("non-Hermitian product in deterministic branch")
        if sign == want:
            return 1.0
        self.invalid = True
        return 0.0

    # -- derived quantities -------------------------------------------------

    def subsystem_entropy(self, part) -> int:
        """S(rho_part) in bits: rank of the restricted generator matrix - |part|."""
        idx = [self.index[s] for s in part]
        k = len(idx)
        if k == 0:
            return 0
        work = np.empty((2 * k, self.nwords), dtype=np.uint64)
        for j, q in enumerate(idx):
            work[2 * j] = self.X[q] & self._stab_mask
            work[2 * j + 1] = self.Z[q] & self._stab_mask
        rank = int(K.rank_rows(work))
        return rank - k

    def coherent_information(self, frm, to) -> int:
        frm = list(frm)
        to = list(to)
        if set(frm) & set(to):
            raise ValueError("partitions overlap")
        return self.subsystem_entropy(to) - self.subsystem_entropy(list(to) + frm)

    def bell_fidelity(self, a: SiteId, b: SiteId) -> float:
        """Overlap with |Phi+> on (a, b), via two post-selections on a copy."""
        if a == b:
            raise ValueError("need two distinct sites")
        st = self.copy()
        f = 1.0
        for p in (PauliString({a: "X", b: "X"}), PauliString({a: "Z", b: "Z"})):
            prob = st.postselect_prob(p, +1)
            if prob == 0.0:
                return 0.0
            f *= prob
        return f

    # -- diagnostics --------------------------------------------------------

    def generator_bits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(xmat, zmat, signs) of the n stabilizer generators, unpacked uint8."""
        m = self.m
        lanes = np.arange(m, 2 * m)
        xm = np.zeros((m, m), dtype=np.uint8)
        zm = np.zeros((m, m), dtype=np.uint8)
        for q in range(m):
            xm[:, q] = (self.X[q, lanes >> 6] >> (lanes & 63).astype(np.uint64)) & np.uint64(1)
            zm[:, q] = (self.Z[q, lanes >> 6] >> (lanes & 63).astype(np.uint64)) & np.uint64(1)
        sg = ((self.SGN[lanes >> 6] >> (lanes & 63).astype(np.uint64)) & np.uint64(1)).astype(np.uint8)
        return xm, zm, sg

    def check_invariants(self) -> None:
        """Generators commute pairwise and are independent (debug/tests)."""
        xm, zm, _ = self.generator_bits()
        sympl = (xm @ zm.T + zm @ xm.T) % 2
        if sympl.any():
            raise AssertionError("stabilizer generators do not commute")
        work = np.empty((self.m, self.nwords), dtype=np.uint64)
        for i in range(self.m):
            lane = self.m + i
            row = np.zeros(self.nwords, dtype=np.uint64)
            for q in range(self.m):
                if xm[i, q]:
                    row[(2 * q) >> 6] |= np.uint64(1) << np.uint64((2 * q) & 63)
                if zm[i, q]:
                    row[(2 * q + 1) >> 6] |= np.uint64(1) << np.uint64((2 * q + 1) & 63)
            work[i] = row
        if int(K.rank_rows(work.copy())) != self.m:
            raise AssertionError("stabilizer generators are dependent")


def _lane_mask(lo: int, hi: int, nwords: int) -> np.ndarray:
    mask = np.zeros(nwords, dtype=np.uint64)
    for lane in range(lo, hi):
        mask[lane >> 6] |= np.uint64(1) << np.uint64(lane & 63)
    return mask


def _bits_to_lanes(bits: np.ndarray) -> np.ndarray:
    out = []
    for w, word in enumerate(bits):
        word = int(word)
        while word:
            low = word & -word
            out.append((w << 6) + low.bit_length() - 1)
            word ^= low
    return np.asarray(out, dtype=np.int64)


# -- module-level operations matching the engine surface ---------------------


def init_purified(layout: list[SiteId]) -> StabilizerState:
    """Purified global state: Bell pairs (A,I0), (R,AR), (M_x, AM_x); D in |0>."""
    st = StabilizerState(layout)
    done: set[SiteId] = set()
    for s in layout:
        if s in done:
            continue
        if s.kind == "A":
            partner = SiteId("I", 0, 0)
        elif s.kind == "M":
            partner = SiteId("AM", s.strip, s.x)
        elif s.kind == "R":
            partner = SiteId("AR")
        elif s.kind == "B":   # decoder's fresh impurity, purified
            partner = SiteId("AB")
        elif s.kind == "G":   # teleportation decoder's output pair
            partner = SiteId("G2")
        else:
            partner = None
        if partner is not None:
            if partner not in st.index:
                raise ValueError(f"{s!r} has no purifying partner in layout")
            st.init_bell(st.index[s], st.index[partner])
            done.add(s)
            done.add(partner)
        elif s.kind in ("I", "AM", "AR", "AB", "G2"):
            continue  # paired when the partner is scanned
        else:
            st.init_zero(st.index[s])
            done.add(s)
    for s in layout:
        if s in done:
            continue
        if s.kind == "I" and SiteId("A") not in st.index:
            st.init_zero(st.index[s])  # unpurified impurity, used in small tests
        elif s.kind in ("I", "AM", "AR", "AB", "G2"):
            raise ValueError(f"{s!r} lacks its purifying partner")
        else:
            st.init_zero(st.index[s])
    return st


def apply_gate(state: StabilizerState, gate: CliffordGate2, sites_pair) -> StabilizerState:
    a, b = sites_pair
    if a == b:
        raise ValueError("gate sites must be distinct")
    state.apply_op_arrays(np.array([state.index[a]]), np.array([state.index[b]]),
                          np.array([gate.sym]), np.array([gate.signs]))
    return state


def subsystem_entropy(state: StabilizerState, part) -> int:
    return state.subsystem_entropy(part)


def coherent_information(state: StabilizerState, frm, to) -> int:
    return state.coherent_information(frm, to)


def bell_fidelity(state: StabilizerState, a: SiteId, b: SiteId) -> float:
    return state.bell_fidelity(a, b)


def postselect(state: StabilizerState, p: PauliString, outcome: int):
    prob = state.postselect_prob(p, outcome)
    return state, prob
