"""Circuit realizations: drift, swap events, brickwork layout, reset.

One Schedule fully determines a disorder realization.  Structural randomness
(swap decisions, drift steps) comes from a sequential PCG64 stream consumed in
a fixed per-step order (swap first, then drift); brickwork gates are keyed by
(realization gate seed, step, layer, bond) so that engines can instantiate the
lazily-extended medium sparsely without breaking reproducibility.

The impurity interacts at position x_I(t); a swap event exchanges the impurity
register with medium site (strip, x_I(t)).  Two brickwork layers per step fix
the information speed at c = 2 sites per unit time.  The impurity starts at
x = 0, the left site of an even (layer-0) bond.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import _rng as rng_mod
from ._rng import np_mix2, np_mix3, np_mix4, as_u64
from .clifford import CliffordGate2
from .sites import SiteId, layout_from_medium

C_LIGHT = 2  # sites per unit time, two unitary layers per step

DRIFT_MODES = ("binomial", "deterministic")
BOUNDARY_MODES = ("open", "truncated")
INTERACTION_MODES = ("swap", "clifford")


@dataclass(frozen=True)
class ModelParams:
    """Full description of one model configuration (not one realization)."""

    p: float
    v_d: float
    d_max: int = 20
    t1: int | None = 100
    t2: int = 1000
    drift_mode: str = "binomial"
    boundary_mode: str = "open"
    interaction_mode: str = "swap"
    n_impurity: int = 1
    seed: int = 0
    otoc_initial: str = "X"
    otoc_probe: str = "Y"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"swap probability p={self.p} outside [0,1]")
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")
        if not 0.0 <= self.v_d <= self.d_max:
            raise ValueError(f"need 0 <= v_d <= d_max, got v_d={self.v_d}")
        if self.t2 < 1:
            raise ValueError("t2 must be >= 1")
        if self.t1 is not None and self.t1 < 0:
            raise ValueError("t1 must be >= 0 or None")
        if self.drift_mode not in DRIFT_MODES:
            raise ValueError(f"drift_mode must be one of {DRIFT_MODES}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"boundary_mode must be one of {BOUNDARY_MODES}")
        if self.interaction_mode not in INTERACTION_MODES:
            raise ValueError(f"interaction_mode must be one of {INTERACTION_MODES}")
        if self.n_impurity < 1:
            raise ValueError("n_impurity must be >= 1")

    @property
    def p_drift(self) -> float:
        """Per-trial drift probability p_D = v_d / d_max."""
        return self.v_d / self.d_max

    @property
    def total_steps(self) -> int:
        return (self.t1 or 0) + self.t2

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)

    # flat key-value config file support ------------------------------------

    _CONFIG_KEYS = ("p", "v_d", "d_max", "t1", "t2", "drift_mode", "boundary_mode",
                    "interaction_mode", "n_impurity", "seed")

    def to_config(self) -> str:
        lines = []
        for key in self._CONFIG_KEYS:
            val = getattr(self, key)
            lines.append(f"{key} = {'none' if val is None else val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_config(cls, text: str) -> "ModelParams":
        kv = parse_config(text)
        return cls.from_mapping(kv)

    @classmethod
    def from_mapping(cls, kv: dict) -> "ModelParams":
        kw = {}
        casts = {"p": float, "v_d": float, "d_max": int, "t2": int, "n_impurity": int,
                 "seed": int, "drift_mode": str, "boundary_mode": str,
                 "interaction_mode": str}
        for key, cast in casts.items():
            if key in kv:
                kw[key] = cast(kv[key])
        if "t1" in kv:
            raw = str(kv["t1"]).lower()
            kw["t1"] = None if raw in ("none", "") else int(raw)
        return cls(**kw)


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


@dataclass
class Schedule:
    """One concrete 1D realization (gates addressed by seed, not stored)."""

    params: ModelParams
    seed: int
    drifts: np.ndarray          # (T,) applied after step t
    x_of_t: np.ndarray          # (T+1,) interaction position before step t
    swaps: np.ndarray           # (T,) bool, swap after the two layers of step t
    reset_step: int | None
    gate_seed: int

    @property
    def total_steps(self) -> int:
        return len(self.drifts)

    def swap_events(self) -> list[tuple[int, int]]:
        """(t, x) of every impurity-medium interaction event."""
        ts = np.flatnonzero(self.swaps)
        return [(int(t), int(self.x_of_t[t])) for t in ts]

    def gate_at(self, t: int, layer: int, x: int) -> CliffordGate2:
        """The brickwork gate on bond (x, x+1) in the given layer of step t."""
        sym, sgn = gate_draw_np(self.gate_seed, np.array([t]), np.array([layer]),
                                np.array([x]))
        return CliffordGate2(int(sym[0]), int(sgn[0]))

    def interaction_gate_at(self, t: int) -> CliffordGate2:
        """Gate used for a non-swap impurity-medium interaction at step t."""
        sym, sgn = gate_draw_np(self.gate_seed, np.array([t]), np.array([2]),
                                np.array([self.x_of_t[t]]))
        return CliffordGate2(int(sym[0]), int(sgn[0]))


def gate_draw_np(gate_seed, t, layer, x):
    """Vectorized counter-based gate draw; the numba twin lives in otoc kernels."""
    h = np_mix4(np.uint64(gate_seed), as_u64(t), as_u64(layer), as_u64(x))
    sym = (h % np.uint64(720)).astype(np.int64)
    sgn = (np_mix2(h, np.uint64(7)) & np.uint64(15)).astype(np.int64)
    return sym, sgn


def sample_drift(params: ModelParams, rng: np.random.Generator) -> int:
    """One drift step d in [0, d_max]."""
    if params.drift_mode == "deterministic":
        return int(round(params.v_d))
    return int(rng.binomial(params.d_max, params.p_drift))


def build_schedule(params: ModelParams, seed: int) -> Schedule:
    """A complete 1D realization; bit-identical for identical (params, seed)."""
    t_total = params.total_steps
    if params.t1 is not None and params.t1 >= t_total:
        raise ValueError(f"reset step t1={params.t1} must be < t1+t2={t_total}")
    struct = np.random.Generator(np.random.PCG64(
        int(np_mix2(np.uint64(seed), np.uint64(rng_mod.DOM_STRUCT)))))
    drifts = np.zeros(t_total, dtype=np.int64)
    swaps = np.zeros(t_total, dtype=bool)
    x_of_t = np.zeros(t_total + 1, dtype=np.int64)
    x = 0
    for t in range(t_total):
        x_of_t[t] = x
        swaps[t] = struct.random() < params.p
        drifts[t] = sample_drift(params, struct)
        x += int(drifts[t])
    x_of_t[t_total] = x
    gate_seed = int(np_mix2(np.uint64(seed), np.uint64(rng_mod.DOM_GATE)))
    return Schedule(params=params, seed=int(seed), drifts=drifts, x_of_t=x_of_t,
                    swaps=swaps, reset_step=params.t1, gate_seed=gate_seed)


def build_schedule_truncated(params: ModelParams, seed: int) -> Schedule:
    """Variant with brickwork omitted to the right of the impurity."""
    if params.boundary_mode != "truncated":
        params = params.with_(boundary_mode="truncated")
    return build_schedule(params, seed)


@dataclass
class Schedule2D:
    """One realization of the impurity chain coupled to decoupled strips."""

    params: ModelParams
    seed: int
    drifts: np.ndarray          # (T,), shared by all strips
    x_of_t: np.ndarray          # (T+1,)
    swaps: np.ndarray           # (T, 2, N) bool, one round after each chain layer
    gate_seed: int              # chain brickwork stream
    strip_seeds: np.ndarray     # (N,) uint64, per-strip brickwork streams

    @property
    def total_steps(self) -> int:
        return len(self.drifts)

    @property
    def n_impurity(self) -> int:
        return self.swaps.shape[2]


def build_schedule_2d(params: ModelParams, seed: int) -> Schedule2D:
    """Chain of n_impurity qubits over independent strips; no reset step.

    Per step: chain layer, per-site Bernoulli(p) swap round, second chain
    layer, second swap round, strip evolution, global drift.  Swaps happen
    between every chain layer, which is what pins the Markovian-limit critical
    swap rate at the reference value.
    """
    n = params.n_impurity
    t_total = params.total_steps
    struct = np.random.Generator(np.random.PCG64(
        int(np_mix2(np.uint64(seed), np.uint64(rng_mod.DOM_STRUCT)))))
    drifts = np.zeros(t_total, dtype=np.int64)
    swaps = np.zeros((t_total, 2, n), dtype=bool)
    x_of_t = np.zeros(t_total + 1, dtype=np.int64)
    x = 0
    for t in range(t_total):
        x_of_t[t] = x
        swaps[t, 0] = struct.random(n) < params.p
        swaps[t, 1] = struct.random(n) < params.p
        drifts[t] = sample_drift(params, struct)
        x += int(drifts[t])
    x_of_t[t_total] = x
    chain_seed = int(np_mix2(np.uint64(seed), np.uint64(rng_mod.DOM_GATE_2D_CHAIN)))
    strip_seeds = np_mix3(np.uint64(seed), np.uint64(rng_mod.DOM_GATE),
                          np.arange(n, dtype=np.uint64))
    return Schedule2D(params=params, seed=int(seed), drifts=drifts, x_of_t=x_of_t,
                      swaps=swaps, gate_seed=chain_seed,
                      strip_seeds=strip_seeds.astype(np.uint64))


def touched_cone(schedule: Schedule) -> tuple[int, int] | None:
    """Conservative [lo, hi] of medium sites inside any swap event's light cone."""
    events = schedule.swap_events()
    if not events:
        return None
    t_end = schedule.total_steps
    lo = min(x - C_LIGHT * (t_end - t) for t, x in events)
    hi = max(x + C_LIGHT * (t_end - t) for t, x in events)
    return int(lo), int(hi)


def touched_sites(schedule: Schedule) -> list[SiteId]:
    """Registers plus every medium site a gate, swap, or light cone can reach.

    Purified medium qubits outside this set contribute identically to every
    entropy in scope and are excluded.
    """
    cone = touched_cone(schedule)
    xs: Iterable[int] = range(cone[0], cone[1] + 1) if cone else ()
    return layout_from_medium(xs, with_reset=schedule.reset_step is not None)
