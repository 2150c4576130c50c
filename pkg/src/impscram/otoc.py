"""Heisenberg-picture Pauli propagation and OTOC observables.

Letters live in a flat uint8 window per strip (0=I, 1=X, 2=Z, 3=Y); a gate
touching an identity pair is a no-op, so the cost per step is proportional to
the current support, never to the lattice.  Signs are never tracked here:
every observable below depends only on (anti)commutation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numba
import numpy as np

from . import _tables as tables
from ._rng import mix2, mix4
from .geometry import C_LIGHT, ModelParams, Schedule, Schedule2D
from .sites import LETTER_CODES, PauliString, SiteId
from .sites import discard_slot, impurity, medium, reset_slot

NO_FRONT = np.int64(-(2**62))

_ACT = tables.ACT
_INV = tables.INV_SYM.astype(np.int64)


@numba.njit(numba.types.UniTuple(numba.int64, 2)(
    numba.uint64, numba.uint64, numba.uint64, numba.uint64), cache=True,
    inline="always")
def _gate_draw(gate_seed, t, layer, x):
    h = mix4(gate_seed, t, layer, x)
    sym = numba.int64(h % np.uint64(720))
    sgn = numba.int64(mix2(h, np.uint64(7)) & np.uint64(15))
    return sym, sgn


@numba.njit(cache=True)
def _run_1d(t_total, t_reset, x_of_t, swaps, truncated, clifford_interaction,
            gate_seed, use_inverse, med, xlo, lo, hi, imp, dis, res,
            act, inv_sym, front_out, weight_out, probe_t, probe_med):
    """Propagate one Pauli string through a 1D schedule.

    med is the letter window (absolute site x at index x - xlo); [lo, hi] are
    conservative support bounds in absolute coordinates (lo > hi means no
    medium support).  Returns (imp, dis, res, lo, hi) letters and bounds.
    """
    for t in range(t_total):
        if t == t_reset:
            tmp = imp
            imp = res
            res = dis
            dis = tmp
        for layer in range(2):
            if lo <= hi:
                start = lo - 1
                if (start & 1) != layer:
                    start -= 1
                stop = hi  # bond (x, x+1) with x <= hi
                x = start
                while x <= stop:
                    if truncated and (x + 1 > x_of_t[t]):
                        break
                    ia = x - xlo
                    v4 = np.int64(med[ia]) | (np.int64(med[ia + 1]) << 2)
                    if v4 != 0:
                        sym, _ = _gate_draw(gate_seed, np.uint64(t),
                                            np.uint64(layer), np.uint64(x))
                        if use_inverse:
                            sym = inv_sym[sym]
                        out = np.int64(act[sym, v4])
                        med[ia] = out & 3
                        med[ia + 1] = out >> 2
                        if out != 0:
                            if x < lo:
                                lo = x
                            if x + 1 > hi:
                                hi = x + 1
                    x += 2
        if swaps[t]:
            x = x_of_t[t]
            ia = x - xlo
            if clifford_interaction:
                v4 = imp | (np.int64(med[ia]) << 2)
                if v4 != 0:
                    sym, _ = _gate_draw(gate_seed, np.uint64(t), np.uint64(2),
                                        np.uint64(x))
                    if use_inverse:
                        sym = inv_sym[sym]
                    out = np.int64(act[sym, v4])
                    imp = out & 3
                    med[ia] = out >> 2
            else:
                tmp = imp
                imp = np.int64(med[ia])
                med[ia] = tmp
            if med[ia] != 0:
                if x < lo:
                    lo = x
                if x > hi:
                    hi = x
        if front_out.shape[0] > 0:
            while hi >= lo and med[hi - xlo] == 0:
                hi -= 1
            if hi < lo:
                front_out[t] = NO_FRONT
            else:
                front_out[t] = hi
        if weight_out.shape[0] > 0:
            w = 0
            if imp != 0:
                w += 1
            if dis != 0:
                w += 1
            if res != 0:
                w += 1
            for k in range(lo, hi + 1):
                if med[k - xlo] != 0:
                    w += 1
            weight_out[t] = w
        if t == probe_t:
            for k in range(med.shape[0]):
                probe_med[k] = med[k]
    return imp, dis, res, lo, hi


@numba.njit(cache=True)
def _run_2d(t_total, n_chain, x_of_t, swaps, chain_seed, strip_seeds,
            med, xlo, los, his, imp, act, weight_out, det_supersonic):
    """Propagate through the 2D schedule; weight_out[t] = chain support count.

    Early exit only when the chain is empty and, under deterministic
    supersonic drift, no strip support can ever catch the trajectory again.
    """
    for t in range(t_total):
        x = x_of_t[t]
        ia = x - xlo
        for layer in range(2):
            for y in range(layer, n_chain - 1, 2):
                v4 = np.int64(imp[y]) | (np.int64(imp[y + 1]) << 2)
                if v4 != 0:
                    sym, _ = _gate_draw(chain_seed, np.uint64(t),
                                        np.uint64(layer), np.uint64(y))
                    out = np.int64(act[sym, v4])
                    imp[y] = out & 3
                    imp[y + 1] = out >> 2
            for y in range(n_chain):
                if swaps[t, layer, y]:
                    tmp = imp[y]
                    imp[y] = med[y, ia]
                    med[y, ia] = tmp
                    if med[y, ia] != 0:
                        if x < los[y]:
                            los[y] = x
                        if x > his[y]:
                            his[y] = x
        for y in range(n_chain):
            if los[y] > his[y]:
                continue
            for layer in range(2):
                start = los[y] - 1
                if (start & 1) != layer:
                    start -= 1
                stop = his[y]
                xx = start
                while xx <= stop:
                    ib = xx - xlo
                    v4 = np.int64(med[y, ib]) | (np.int64(med[y, ib + 1]) << 2)
                    if v4 != 0:
                        sym, _ = _gate_draw(strip_seeds[y], np.uint64(t),
                                            np.uint64(layer), np.uint64(xx))
                        out = np.int64(act[sym, v4])
                        med[y, ib] = out & 3
                        med[y, ib + 1] = out >> 2
                        if out != 0:
                            if xx < los[y]:
                                los[y] = xx
                            if xx + 1 > his[y]:
                                his[y] = xx + 1
                    xx += 2
        cnt = 0
        for y in range(n_chain):
            if imp[y] != 0:
                cnt += 1
        weight_out[t] = cnt
        if cnt == 0 and det_supersonic:
            reachable = False
            for y in range(n_chain):
                if los[y] <= his[y]:
                    while his[y] >= los[y] and med[y, his[y] - xlo] == 0:
                        his[y] -= 1
                    # strip fronts grow at most 2/step, the trajectory at >2;
                    # generous slack keeps the exit strictly conservative
                    if his[y] >= x_of_t[t + 1] - 4:
                        reachable = True
            if not reachable:
                for tt in range(t + 1, t_total):
                    weight_out[tt] = 0
                return t
    return -1


def _window(schedule: Schedule | Schedule2D) -> tuple[int, int]:
    t_total = schedule.total_steps
    lo = -C_LIGHT * t_total - 4
    hi = int(schedule.x_of_t.max()) + C_LIGHT * t_total + 4
    return lo, hi


@dataclass
class OtocRecord:
    """Per-realization backflow outputs."""

    backflow: int          # 1 iff the evolved string anticommutes with the probe
    n_imp: int             # 1 iff non-trivial impurity support at final time
    impurity_letter: int   # 0..3
    front: np.ndarray | None = None
    support_weight: np.ndarray | None = None


@dataclass
class Otoc2DRecord:
    weight: np.ndarray     # N_I(t), fraction of chain sites with support
    absorbed_at: int | None


def _initial_arrays(schedule: Schedule, p0: PauliString | None):
    params = schedule.params
    xlo, xhi = _window(schedule)
    med = np.zeros(xhi - xlo + 2, dtype=np.uint8)
    lo, hi = 1, 0  # empty
    imp = LETTER_CODES[params.otoc_initial]
    dis = 0
    res = 0
    if p0 is not None:
        imp = 0
        for site, v in p0.letters.items():
            if site.kind == "M":
                x = site.x
                if not (xlo <= x <= xhi):
                    raise ValueError(f"initial support at {site!r} outside window")
                med[x - xlo] = v
                if lo > hi:
                    lo = hi = x
                else:
                    lo = min(lo, x)
                    hi = max(hi, x)
            elif site.kind == "I":
                imp = int(v)
            elif site.kind == "R":
                res = int(v)
            elif site.kind == "D":
                dis = int(v)
            else:
                raise ValueError(f"unsupported initial site {site!r}")
    return med, xlo, lo, hi, imp, dis, res


def _propagate(schedule: Schedule, p0: PauliString | None = None,
               use_inverse: bool = True, record_front: bool = False,
               record_weight: bool = False, probe_t: int = -1):
    params = schedule.params
    med, xlo, lo, hi, imp, dis, res = _initial_arrays(schedule, p0)
    t_reset = -1 if schedule.reset_step is None else schedule.reset_step
    front = np.zeros(schedule.total_steps if record_front else 0, dtype=np.int64)
    weight = np.zeros(schedule.total_steps if record_weight else 0, dtype=np.int64)
    probe_med = np.zeros(med.shape[0] if probe_t >= 0 else 0, dtype=np.uint8)
    out = _run_1d(schedule.total_steps, t_reset, schedule.x_of_t,
                  schedule.swaps.astype(np.uint8), np.uint8(params.boundary_mode == "truncated"),
                  np.uint8(params.interaction_mode == "clifford"),
                  np.uint64(schedule.gate_seed), np.uint8(use_inverse),
                  med, xlo, lo, hi, imp, dis, res, _ACT, _INV,
                  front, weight, probe_t, probe_med)
    return out, med, xlo, front, weight, probe_med


def evolve_pauli(schedule: Schedule, p0: PauliString | None = None) -> PauliString:
    """Full Heisenberg evolution U^dag p0 U through the schedule.

    Default p0 is the configured initial letter on the impurity register.
    """
    (imp, dis, res, lo, hi), med, xlo, _, _, _ = _propagate(schedule, p0)
    letters: dict[SiteId, int] = {}
    if imp:
        letters[impurity()] = int(imp)
    if dis:
        letters[discard_slot()] = int(dis)
    if res:
        letters[reset_slot()] = int(res)
    for x in range(lo, hi + 1):
        v = int(med[x - xlo])
        if v:
            letters[medium(x)] = v
    return PauliString(letters)


def backflow_record(schedule: Schedule, record_front: bool = False,
                    record_weight: bool = False) -> OtocRecord:
    """Evolve the initial impurity operator and read out the backflow bit."""
    if schedule.reset_step is None:
        raise ValueError("backflow requires a schedule with a reset step")
    params = schedule.params
    _warn_if_short(params)
    (imp, _, _, _, _), _, _, front, weight, _ = _propagate(
        schedule, record_front=record_front, record_weight=record_weight)
    probe = LETTER_CODES[params.otoc_probe]
    b = int(imp != 0 and imp != probe)
    return OtocRecord(backflow=b, n_imp=int(imp != 0), impurity_letter=int(imp),
                      front=front if record_front else None,
                      support_weight=weight if record_weight else None)


def backflow_B(schedule: Schedule) -> int:
    """The binary backflow order parameter for one realization."""
    return backflow_record(schedule).backflow


_warned = set()


def _warn_if_short(params: ModelParams):
    if params.p <= 0:
        return
    key = (params.t1, params.t2, params.p)
    if key in _warned:
        return
    need = 5.0 / params.p
    if (params.t1 or 0) < need or params.t2 < need:
        _warned.add(key)
        warnings.warn(
            f"t1={params.t1}, t2={params.t2} not large against 1/p={1/params.p:.0f}; "
            "backflow statistics may not be in the asymptotic regime",
            stacklevel=3)


def medium_density(schedule: Schedule, t: int) -> dict[int, int]:
    """n_M(x, t): 1 where the evolved string has support in the medium."""
    if not 0 <= t <= schedule.total_steps:
        raise ValueError(f"t={t} outside [0, {schedule.total_steps}]")
    if t == 0:
        return {}
    _, med, xlo, _, _, probe_med = _propagate(schedule, probe_t=t - 1)
    xs = np.flatnonzero(probe_med)
    return {int(x + xlo): 1 for x in xs}


def front_positions(schedule: Schedule, p0: PauliString | None = None) -> np.ndarray:
    """Rightmost medium support site after each step (NO_FRONT if none)."""
    _, _, _, front, _, _ = _propagate(schedule, p0=p0, record_front=True)
    return front


def run_2d(schedule: Schedule2D) -> Otoc2DRecord:
    """Chain-averaged operator weight N_I(t) for one 2D realization."""
    params = schedule.params
    n = schedule.n_impurity
    xlo, xhi = _window(schedule)
    med = np.zeros((n, xhi - xlo + 2), dtype=np.uint8)
    los = np.full(n, 1, dtype=np.int64)
    his = np.zeros(n, dtype=np.int64)
    imp = np.zeros(n, dtype=np.uint8)
    imp[0] = LETTER_CODES[params.otoc_initial]
    weight = np.zeros(schedule.total_steps, dtype=np.int64)
    det_supersonic = (params.drift_mode == "deterministic"
                      and round(params.v_d) > C_LIGHT)
    _run_2d(schedule.total_steps, n, schedule.x_of_t,
            schedule.swaps.astype(np.uint8), np.uint64(schedule.gate_seed),
            schedule.strip_seeds, med, xlo, los, his, imp, _ACT, weight,
            det_supersonic)
    frac = weight.astype(np.float64) / n
    absorbed = None
    zeros = np.flatnonzero(weight == 0)
    if zeros.size and (weight[zeros[0]:] == 0).all():
        absorbed = int(zeros[0])
    return Otoc2DRecord(weight=frac, absorbed_at=absorbed)
