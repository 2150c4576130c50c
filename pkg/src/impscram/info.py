"""Coherent information, echo decoder, and teleportation decoder.

The purified protocol state is evolved in the Schroedinger picture on a
tableau whose register set covers exactly the causally relevant medium sites:
a brickwork gate is instantiated only if it lies inside the forward light cone
of a past interaction event and the backward light cone of a future one.
Gates outside act on pristine purified pairs or commute out of every reported
quantity; dropping them is exact (tested against unpruned runs).

A fast path computes I(A -> Bob) without any tableau: writing the stabilizer
group of the final state in terms of the pushed-forward images of X and Z on
the initial impurity, the only group elements supported inside Bob + A are
built from those two images, so

    I(A -> Bob) = 1 - rank_GF2{lambda_X, lambda_Z}

with lambda_P the final impurity-register letter of the image of P.  The
tableau path stays the reference; the two are cross-checked per realization
in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _tables as tables
from .geometry import C_LIGHT, Schedule, gate_draw_np
from .otoc import _propagate
from .sites import PauliString, SiteId
from .sites import (ancilla_a, ancilla_m, ancilla_r, discard_slot, impurity,
                    medium, reset_slot)
from .tableau import init_purified

_SLACK = 4  # light-cone slack, generous on purpose


@dataclass
class InfoRecord:
    """Per-realization channel quantities of the reset protocol."""

    i_bob: int
    i_charlie: int
    f_echo: float | None
    f_tele: float | None
    s_bob: int
    s_bob_a: int
    s_charlie: int
    s_charlie_a: int
    n_medium: int


def _require_reset(schedule: Schedule):
    if schedule.reset_step is None:
        raise ValueError("this protocol requires a schedule with a reset step")


# -- causal-cone bookkeeping --------------------------------------------------


def _hulls(events: list[tuple[int, int]], n_steps: int):
    """Per-step [lo, hi] bond hulls: inside past AND future event light cones."""
    lo = np.full(n_steps, 1, dtype=np.int64)
    hi = np.full(n_steps, 0, dtype=np.int64)
    if not events:
        return lo, hi
    big = np.int64(2**60)
    past_lo = np.full(n_steps, big)
    past_hi = np.full(n_steps, -big)
    fut_lo = np.full(n_steps, big)
    fut_hi = np.full(n_steps, -big)
    m_lo, m_hi = big, -big
    ev_by_u: dict[int, list[int]] = {}
    for u, x in events:
        ev_by_u.setdefault(u, []).append(x)
    for u in range(n_steps):
        for x in ev_by_u.get(u, ()):
            m_lo = min(m_lo, x + C_LIGHT * u)
            m_hi = max(m_hi, x - C_LIGHT * u)
        past_lo[u] = m_lo - C_LIGHT * u
        past_hi[u] = m_hi + C_LIGHT * u
    m_lo, m_hi = big, -big
    for u in range(n_steps - 1, -1, -1):
        for x in ev_by_u.get(u, ()):
            m_lo = min(m_lo, x - C_LIGHT * u)
            m_hi = max(m_hi, x + C_LIGHT * u)
        fut_lo[u] = m_lo + C_LIGHT * u
        fut_hi[u] = m_hi - C_LIGHT * u
    # before the first event past_lo > past_hi, after the last fut_lo > fut_hi,
    # so steps outside the interaction era come out empty on their own
    lo = np.maximum(past_lo, fut_lo) - _SLACK
    hi = np.minimum(past_hi, fut_hi) + _SLACK
    return lo, hi


class _OpListBuilder:
    """Accumulates tableau ops (two-qubit gates by qubit index)."""

    def __init__(self, index: dict[SiteId, int]):
        self.index = index
        self.aa: list[np.ndarray] = []
        self.bb: list[np.ndarray] = []
        self.sym: list[np.ndarray] = []
        self.sgn: list[np.ndarray] = []

    def add_pair(self, a: SiteId, b: SiteId, sym: int, sgn: int):
        self.aa.append(np.array([self.index[a]], dtype=np.int64))
        self.bb.append(np.array([self.index[b]], dtype=np.int64))
        self.sym.append(np.array([sym], dtype=np.int64))
        self.sgn.append(np.array([sgn], dtype=np.int64))

    def add_swap(self, a: SiteId, b: SiteId):
        self.add_pair(a, b, tables.SWAP_SYM, 0)

    def add_bond_arrays(self, a_idx: np.ndarray, b_idx: np.ndarray,
                        sym: np.ndarray, sgn: np.ndarray):
        if len(a_idx) == 0:
            return
        self.aa.append(np.asarray(a_idx, dtype=np.int64))
        self.bb.append(np.asarray(b_idx, dtype=np.int64))
        self.sym.append(np.asarray(sym, dtype=np.int64))
        self.sgn.append(np.asarray(sgn, dtype=np.int64))

    def arrays(self):
        if not self.aa:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z, z
        return (np.concatenate(self.aa), np.concatenate(self.bb),
                np.concatenate(self.sym), np.concatenate(self.sgn))


def _bond_range(lo: int, hi: int, layer: int, x_cut: int | None) -> np.ndarray:
    """Left sites of layer-parity bonds inside [lo-1, hi+1]."""
    if lo > hi:
        return np.zeros(0, dtype=np.int64)
    start = lo - 1
    if (start & 1) != layer:
        start += 1
    stop = hi
    if x_cut is not None:
        stop = min(stop, x_cut - 1)  # bond fully at/left of the impurity
    if start > stop:
        return np.zeros(0, dtype=np.int64)
    return np.arange(start, stop + 1, 2, dtype=np.int64)


def _relevant_sites(schedule: Schedule, lo_u, hi_u) -> list[int]:
    xs: set[int] = {x for _, x in schedule.swap_events()}
    for u in range(len(lo_u)):
        if lo_u[u] <= hi_u[u]:
            xs.update((int(lo_u[u] - 1), int(hi_u[u] + 1)))
    if not xs:
        return []
    xmin, xmax = min(xs), max(xs)
    return list(range(xmin, xmax + 1))


def _forward_events(schedule: Schedule) -> list[tuple[int, int]]:
    return schedule.swap_events()


def _build_protocol(schedule: Schedule, decoder: str | None, prune: bool = True):
    """Layout plus op arrays for the forward run and an optional decoder.

    decoder: None, "echo", or "mirror" (teleportation).  Returns
    (layout, med_xs, forward_ops, decoder_ops).

    Gates outside the forward light-cone rules never need a decoder twin: in
    the echo circuit they commute to the join between the forward and the
    reversed segment, where they cancel exactly against their own inverses.
    The decoder therefore inverts exactly the applied forward gates.
    """
    params = schedule.params
    t_total = schedule.total_steps
    t1 = schedule.reset_step
    fwd_events = _forward_events(schedule)
    if prune:
        lo_u, hi_u = _hulls(fwd_events, t_total)
    else:
        width = C_LIGHT * t_total + _SLACK
        lo_u = np.full(t_total, -width, dtype=np.int64)
        hi_u = np.full(t_total, int(schedule.x_of_t.max()) + width, dtype=np.int64)
        if not fwd_events:
            lo_u[:] = 1
            hi_u[:] = 0
    med_xs = sorted(_relevant_sites(schedule, lo_u, hi_u))
    layout = [ancilla_a(), impurity(), discard_slot()]
    if t1 is not None:
        layout += [reset_slot(), ancilla_r()]
    base = len(layout)
    for x in med_xs:
        layout += [medium(x), ancilla_m(x)]
    if decoder == "echo":
        layout += [SiteId("B"), SiteId("AB"), SiteId("K")]
    elif decoder == "mirror":
        layout += [SiteId("G"), SiteId("G2"), SiteId("DM")]
    index = {s: q for q, s in enumerate(layout)}
    x0 = med_xs[0] if med_xs else 0

    def med_q(x):
        return base + 2 * (x - x0)      # medium site qubit; ancilla is +1

    truncated = params.boundary_mode == "truncated"
    cliff_int = params.interaction_mode == "clifford"
    gseed = schedule.gate_seed

    # one batched gate draw for every applied (t, layer, bond)
    groups: dict[tuple[int, int], np.ndarray] = {}
    all_t, all_l, all_x = [], [], []
    for t in range(t_total):
        x_cut = int(schedule.x_of_t[t]) if truncated else None
        for layer in (0, 1):
            xs = _bond_range(int(lo_u[t]), int(hi_u[t]), layer, x_cut)
            if len(xs):
                groups[(t, layer)] = xs
                all_t.append(np.full(len(xs), t, dtype=np.int64))
                all_l.append(np.full(len(xs), layer, dtype=np.int64))
                all_x.append(xs)
    if all_t:
        syms, sgns = gate_draw_np(gseed, np.concatenate(all_t),
                                  np.concatenate(all_l), np.concatenate(all_x))
    else:
        syms = sgns = np.zeros(0, dtype=np.int64)
    offsets = {}
    pos = 0
    for key, xs in groups.items():
        offsets[key] = (pos, pos + len(xs))
        pos += len(xs)
    inv_syms, inv_sgns = tables.invert_gates(syms, sgns) if decoder == "echo" \
        else (syms, sgns)
    conj_syms, conj_sgns = tables.conjugate_gates(syms, sgns) if decoder == "mirror" \
        else (syms, sgns)

    swap_ts = [t for t in range(t_total) if schedule.swaps[t]]
    if cliff_int and swap_ts:
        ia_t = np.asarray(swap_ts, dtype=np.int64)
        ia_sym, ia_sgn = gate_draw_np(gseed, ia_t, np.full(len(ia_t), 2),
                                      schedule.x_of_t[ia_t])
        int_gate = {t: (int(s), int(g)) for t, s, g in zip(swap_ts, ia_sym, ia_sgn)}
        ii_sym, ii_sgn = tables.invert_gates(ia_sym, ia_sgn)
        int_gate_inv = {t: (int(s), int(g)) for t, s, g in zip(swap_ts, ii_sym, ii_sgn)}
        ic_sym, ic_sgn = tables.conjugate_gates(ia_sym, ia_sgn)
        int_gate_conj = {t: (int(s), int(g)) for t, s, g in zip(swap_ts, ic_sym, ic_sgn)}
    else:
        int_gate = int_gate_inv = int_gate_conj = {}

    def bond_ops(builder, t, layer, sym_src, sgn_src, qof):
        key = (t, layer)
        if key not in groups:
            return
        o0, o1 = offsets[key]
        xs = groups[key]
        builder.add_bond_arrays(qof(xs), qof(xs) + 2, sym_src[o0:o1], sgn_src[o0:o1])

    def med_qs(xs):
        return base + 2 * (xs - x0)

    def anc_qs(xs):
        return base + 2 * (xs - x0) + 1

    fwd = _OpListBuilder(index)
    for t in range(t_total):
        if t1 is not None and t == t1:
            fwd.add_swap(impurity(), discard_slot())
            fwd.add_swap(impurity(), reset_slot())
        for layer in (0, 1):
            bond_ops(fwd, t, layer, syms, sgns, med_qs)
        if schedule.swaps[t]:
            x = int(schedule.x_of_t[t])
            if cliff_int:
                fwd.add_pair(impurity(), medium(x), *int_gate[t])
            else:
                fwd.add_swap(impurity(), medium(x))

    dec = _OpListBuilder(index)
    if decoder == "echo":
        carrier = SiteId("B")
        for t in range(t_total - 1, -1, -1):
            if t1 is not None and t == t1 - 1:
                # reverse reset sits between the inverses of steps t1 and t1-1
                dec.add_swap(carrier, SiteId("K"))      # set aside Bob's impurity
                dec.add_swap(carrier, discard_slot())   # install D
            if schedule.swaps[t]:
                x = int(schedule.x_of_t[t])
                if cliff_int:
                    dec.add_pair(carrier, medium(x), *int_gate_inv[t])
                else:
                    dec.add_swap(carrier, medium(x))
            for layer in (1, 0):
                bond_ops(dec, t, layer, inv_syms, inv_sgns, med_qs)
        if t1 is not None and t1 == 0:
            dec.add_swap(carrier, SiteId("K"))
            dec.add_swap(carrier, discard_slot())
    elif decoder == "mirror":
        carrier = SiteId("G2")
        for t in range(t_total):
            if t1 is not None and t == t1:
                dec.add_swap(carrier, SiteId("DM"))
                dec.add_swap(carrier, ancilla_r())
            for layer in (0, 1):
                bond_ops(dec, t, layer, conj_syms, conj_sgns, anc_qs)
            if schedule.swaps[t]:
                x = int(schedule.x_of_t[t])
                if cliff_int:
                    dec.add_pair(carrier, ancilla_m(x), *int_gate_conj[t])
                else:
                    dec.add_swap(carrier, ancilla_m(x))

    return layout, med_xs, fwd.arrays(), dec.arrays()


# -- public operations --------------------------------------------------------


def run_info(schedule: Schedule, with_decoder: bool = True,
             prune: bool = True) -> InfoRecord:
    """Schroedinger run of the reset protocol; entropies from the tableau.

    Bob holds the discarded impurity and the instantiated medium; Charlie
    holds the final impurity register and the purifiers A_M, A_R.  With
    ``with_decoder`` the echo decoder is simulated explicitly and its fidelity
    reported alongside (the identity checks live in the test suite).
    """
    _require_reset(schedule)
    layout, med_xs, fwd_ops, _ = _build_protocol(schedule, None, prune)
    st = init_purified(layout)
    st.apply_op_arrays(*fwd_ops)
    bob = [discard_slot()] + [medium(x) for x in med_xs]
    charlie = [impurity(), ancilla_r()] + [ancilla_m(x) for x in med_xs]
    s_bob = st.subsystem_entropy(bob)
    s_bob_a = st.subsystem_entropy(bob + [ancilla_a()])
    s_ch = st.subsystem_entropy(charlie)
    s_ch_a = st.subsystem_entropy(charlie + [ancilla_a()])
    i_bob = s_bob - s_bob_a
    i_charlie = s_ch - s_ch_a
    f_echo = echo_decoder_fidelity(schedule, prune=prune) if with_decoder else None
    f_tele = None if f_echo is None else 1.0 / (4.0 * f_echo)
    return InfoRecord(i_bob=i_bob, i_charlie=i_charlie, f_echo=f_echo,
                      f_tele=f_tele, s_bob=s_bob, s_bob_a=s_bob_a,
                      s_charlie=s_ch, s_charlie_a=s_ch_a, n_medium=len(med_xs))


def echo_decoder_fidelity(schedule: Schedule, prune: bool = True) -> float:
    """Bob's explicit time-reversal decoder: insert a fresh impurity, invert
    the post-reset dynamics, install the discarded qubit, invert the rest;
    the fidelity is the Bell overlap between the ancilla and the recovered
    carrier."""
    _require_reset(schedule)
    layout, _, fwd_ops, dec_ops = _build_protocol(schedule, "echo", prune)
    st = init_purified(layout)
    st.apply_op_arrays(*fwd_ops)
    st.apply_op_arrays(*dec_ops)
    return st.bell_fidelity(ancilla_a(), SiteId("B"))


def teleportation_fidelity(schedule: Schedule) -> float:
    """Charlie's decoder fidelity from the exact complementarity relation
    F_tele = 1 / (4 F_echo)."""
    return 1.0 / (4.0 * echo_decoder_fidelity(schedule))


def simulate_teleportation_decoder(schedule: Schedule, prune: bool = True
                                   ) -> tuple[float, float]:
    """Explicit probabilistic teleportation decoder (feature-flagged).

    Charlie applies the complex-conjugate circuit on his purifiers with a
    fresh Bell pair standing in for Alice's ancilla, then Bell-measures the
    final impurity against its mirror.  Returns (success probability,
    conditional Bell fidelity of Charlie's output with A).
    """
    _require_reset(schedule)
    layout, _, fwd_ops, dec_ops = _build_protocol(schedule, "mirror", prune)
    st = init_purified(layout)
    st.apply_op_arrays(*fwd_ops)
    st.apply_op_arrays(*dec_ops)
    imp, g2 = impurity(), SiteId("G2")
    prob = 1.0
    for p in (PauliString({imp: "X", g2: "X"}), PauliString({imp: "Z", g2: "Z"})):
        pr = st.postselect_prob(p, +1)
        prob *= pr
        if pr == 0.0:
            return 0.0, 0.0
    return prob, st.bell_fidelity(ancilla_a(), SiteId("G"))


def fast_coherent_info(schedule: Schedule) -> int:
    """I(A -> Bob) per realization via the two-image rank formula."""
    _require_reset(schedule)
    lam = []
    for letter in ("X", "Z"):
        p0 = PauliString({impurity(): letter})
        (imp, _, _, _, _), _, _, _, _, _ = _propagate(schedule, p0=p0,
                                                      use_inverse=False)
        lam.append(int(imp))
    lx, lz = lam
    if lx == 0 and lz == 0:
        rank = 0
    elif lx == 0 or lz == 0 or lx == lz:
        rank = 1
    else:
        rank = 2
    return 1 - rank
