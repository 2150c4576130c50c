"""Experiment orchestration: sweeps, disorder averages, CSV and manifests.

Every realization gets the substream seed hash(master, point, index), so
results are bit-identical for any worker count; aggregation happens in fixed
realization order on integer-valued per-realization outputs.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import realization_seed
from .geometry import ModelParams, build_schedule, build_schedule_2d
from .info import fast_coherent_info, run_info, simulate_teleportation_decoder
from .otoc import backflow_record, front_positions, medium_density, run_2d
from .sites import PauliString, medium

# -- per-realization experiment kernels --------------------------------------


def _one_backflow(params: ModelParams, seed: int, extra: dict) -> list[float]:
    rec = backflow_record(build_schedule(params, seed))
    return [rec.backflow, rec.n_imp, rec.impurity_letter]


def _one_info(params: ModelParams, seed: int, extra: dict) -> list[float]:
    return [fast_coherent_info(build_schedule(params, seed))]


def _one_decoders(params: ModelParams, seed: int, extra: dict) -> list[float]:
    sch = build_schedule(params, seed)
    rec = run_info(sch, with_decoder=True)
    res10 = abs(rec.i_bob - (1.0 + math.log2(rec.f_echo)))
    res12 = abs(rec.i_charlie + rec.i_bob)
    out = [rec.i_bob, rec.f_echo, rec.f_tele, res10, res12]
    if extra.get("explicit_teleport"):
        sp, cf = simulate_teleportation_decoder(sch)
        out += [sp, cf, abs(sp - rec.f_echo)]
    return out


def _one_front(params: ModelParams, seed: int, extra: dict) -> list[float]:
    sch = build_schedule(params, seed)
    p0 = None
    if extra.get("no_impurity"):
        p0 = PauliString({medium(0): params.otoc_initial})
    fr = front_positions(sch, p0=p0)
    ts = extra["ts"]
    return [float(fr[t - 1]) for t in ts]


def _one_hydro(params: ModelParams, seed: int, extra: dict) -> list[float]:
    t_probe = extra["t_probe"]
    x_probe = int(round(params.v_d * t_probe))
    if extra.get("no_impurity"):
        # clean deposit at the origin at t=0; v_d only names the comoving ray
        sch = build_schedule(params.with_(p=0.0), seed)
        p0 = PauliString({medium(0): params.otoc_initial})
        from .otoc import _propagate
        _, _, xlo, _, _, probe = _propagate(sch, p0=p0, probe_t=t_probe - 1)
        return [float(probe[x_probe - xlo] != 0)]
    sch = build_schedule(params, seed)
    nm = medium_density(sch, t_probe)
    return [float(nm.get(x_probe, 0))]


def _one_phase2d(params: ModelParams, seed: int, extra: dict) -> list[float]:
    rec = run_2d(build_schedule_2d(params, seed))
    final = rec.weight[-1]
    absorbed = -1.0 if rec.absorbed_at is None else float(rec.absorbed_at)
    return [final, 1.0 if final > 0 else 0.0, absorbed]


EXPERIMENTS = {
    "backflow": _one_backflow,
    "info": _one_info,
    "decoders": _one_decoders,
    "front": _one_front,
    "hydro": _one_hydro,
    "phase2d": _one_phase2d,
}


def warmup() -> None:
    """Compile the numba kernels once (before forking workers)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = ModelParams(p=0.5, v_d=0.5, t1=2, t2=4)
        backflow_record(build_schedule(params, 0))
        fast_coherent_info(build_schedule(params, 0))
        run_info(build_schedule(params, 0))
        p2 = params.with_(t1=None, n_impurity=2)
        run_2d(build_schedule_2d(p2, 0))


# -- deterministic parallel point runner --------------------------------------


def _chunk(args):
    name, params, master_seed, point_index, r0, r1, extra = args
    fn = EXPERIMENTS[name]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = [fn(params, realization_seed(master_seed, point_index, r), extra)
                for r in range(r0, r1)]
    return r0, np.asarray(rows, dtype=np.float64)


def resolve_workers(workers: int | None) -> int:
    if workers is not None and workers >= 1:
        return workers
    env = os.environ.get("IMPSCRAM_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def run_point(name: str, params: ModelParams, master_seed: int, point_index: int,
              realizations: int, workers: int = 1, extra: dict | None = None,
              pool: ProcessPoolExecutor | None = None) -> np.ndarray:
    """All realizations of one grid point, shape (realizations, n_outputs)."""
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    extra = extra or {}
    if workers <= 1 or realizations < 4 * workers:
        _, rows = _chunk((name, params, master_seed, point_index, 0, realizations, extra))
        return rows
    step = (realizations + workers - 1) // workers
    tasks = [(name, params, master_seed, point_index, r0, min(r0 + step, realizations), extra)
             for r0 in range(0, realizations, step)]
    own_pool = pool is None
    if own_pool:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork"))
    try:
        parts = sorted(pool.map(_chunk, tasks), key=lambda t: t[0])
    finally:
        if own_pool:
            pool.shutdown()
    return np.concatenate([rows for _, rows in parts], axis=0)


# -- output files -------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = len(columns[0])
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(fmt(col[i]) for col in columns))
    path.write_text("\n".join(lines) + "\n")


def read_two_column(path: Path) -> tuple[np.ndarray, np.ndarray]:
    rows = np.genfromtxt(path, delimiter=",", names=True)
    names = rows.dtype.names
    return np.atleast_1d(rows[names[0]]), np.atleast_1d(rows[names[1]])


def spec_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class Progress:
    """Elapsed/ETA lines on standard error; data never goes there."""

    def __init__(self, total: int, label: str):
        self.total = total
        self.label = label
        self.done = 0
        self.start = time.time()

    def tick(self, note: str = "") -> None:
        self.done += 1
        dt = time.time() - self.start
        eta = dt / self.done * (self.total - self.done)
        print(f"[{self.label}] {self.done}/{self.total} elapsed {dt:.0f}s "
              f"eta {eta:.0f}s {note}", file=sys.stderr, flush=True)


@dataclass
class SweepResult:
    points: list[dict]
    files: list[Path]
    manifest_path: Path | None


def _stderr_of_mean(rows: np.ndarray) -> float:
    n = rows.size
    if n < 2:
        return 0.0
    return float(rows.std(ddof=1) / math.sqrt(n))


def run_backflow_sweep(params_base: ModelParams, v_ds, t2s, realizations: int,
                       master_seed: int, out_dir: Path | None, workers: int = 1,
                       truncated: bool = False, label: str = "backflow") -> SweepResult:
    """Disorder-averaged backflow over a (v_d, t2) grid; one CSV pair per t2."""
    warmup()
    v_ds = list(v_ds)
    t2s = list(t2s)
    prog = Progress(len(v_ds) * len(t2s), label)
    points = []
    files: list[Path] = []
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork"))
    try:
        point_index = 0
        for t2 in t2s:
            rows_for_t2 = []
            for v_d in v_ds:
                params = params_base.with_(
                    v_d=v_d, t2=int(t2),
                    boundary_mode="truncated" if truncated else "open")
                rows = run_point("backflow", params, master_seed, point_index,
                                 realizations, workers, pool=pool)
                point_index += 1
                b = rows[:, 0]
                n_imp = rows[:, 1]
                letters = rows[:, 2].astype(int)
                qualifying = letters[letters > 0]
                counts = [int((qualifying == v).sum()) for v in (1, 2, 3)]
                point = {
                    "t2": int(t2), "v_d": float(v_d), "n": int(rows.shape[0]),
                    "B_mean": float(b.mean()), "B_stderr": _stderr_of_mean(b),
                    "n_imp_mean": float(n_imp.mean()),
                    "letters_xzy": counts,
                }
                points.append(point)
                rows_for_t2.append(point)
                prog.tick(f"t2={t2} v_d={v_d:g} B={point['B_mean']:.3f}")
            if out_dir is not None:
                stem = f"{label}_t2_{int(t2)}"
                two = Path(out_dir) / f"{stem}.csv"
                write_csv(two, ["Column1", "Column2"],
                          [np.array([p["v_d"] for p in rows_for_t2]),
                           np.array([p["B_mean"] for p in rows_for_t2])])
                ext = Path(out_dir) / f"{stem}_stats.csv"
                write_csv(ext, ["v_d", "mean", "stderr", "n", "n_imp_mean"],
                          [np.array([p["v_d"] for p in rows_for_t2]),
                           np.array([p["B_mean"] for p in rows_for_t2]),
                           np.array([p["B_stderr"] for p in rows_for_t2]),
                           np.array([p["n"] for p in rows_for_t2]),
                           np.array([p["n_imp_mean"] for p in rows_for_t2])])
                files += [two, ext]
    finally:
        if pool is not None:
            pool.shutdown()
    manifest = _write_manifest(out_dir, label, params_base, {
        "experiment": label, "v_ds": [float(v) for v in v_ds],
        "t2s": [int(t) for t in t2s], "realizations": realizations,
        "seed": master_seed}, files, prog)
    return SweepResult(points=points, files=files, manifest_path=manifest)


def run_info_sweep(params_base: ModelParams, v_ds, t2s, realizations: int,
                   master_seed: int, out_dir: Path | None, workers: int = 1,
                   label: str = "info") -> SweepResult:
    """Coherent-information sweep (fast exact path per realization)."""
    warmup()
    v_ds = list(v_ds)
    t2s = list(t2s)
    prog = Progress(len(v_ds) * len(t2s), label)
    points = []
    files: list[Path] = []
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork"))
    try:
        point_index = 0
        for t2 in t2s:
            rows_for_t2 = []
            for v_d in v_ds:
                params = params_base.with_(v_d=v_d, t2=int(t2))
                rows = run_point("info", params, master_seed, point_index,
                                 realizations, workers, pool=pool)
                point_index += 1
                i_bob = rows[:, 0]
                point = {
                    "t2": int(t2), "v_d": float(v_d), "n": int(rows.shape[0]),
                    "I_mean": float(i_bob.mean()),
                    "I_stderr": _stderr_of_mean(i_bob),
                    "one_minus_I": float(1.0 - i_bob.mean()),
                }
                points.append(point)
                rows_for_t2.append(point)
                prog.tick(f"t2={t2} v_d={v_d:g} I={point['I_mean']:.3f}")
            if out_dir is not None:
                stem = f"{label}_t2_{int(t2)}"
                two = Path(out_dir) / f"{stem}.csv"
                write_csv(two, ["Column1", "Column2"],
                          [np.array([p["v_d"] for p in rows_for_t2]),
                           np.array([p["I_mean"] for p in rows_for_t2])])
                ext = Path(out_dir) / f"{stem}_stats.csv"
                write_csv(ext, ["v_d", "mean", "stderr", "n", "one_minus_I"],
                          [np.array([p["v_d"] for p in rows_for_t2]),
                           np.array([p["I_mean"] for p in rows_for_t2]),
                           np.array([p["I_stderr"] for p in rows_for_t2]),
                           np.array([p["n"] for p in rows_for_t2]),
                           np.array([p["one_minus_I"] for p in rows_for_t2])])
                files += [two, ext]
    finally:
        if pool is not None:
            pool.shutdown()
    manifest = _write_manifest(out_dir, label, params_base, {
        "experiment": label, "v_ds": [float(v) for v in v_ds],
        "t2s": [int(t) for t in t2s], "realizations": realizations,
        "seed": master_seed}, files, prog)
    return SweepResult(points=points, files=files, manifest_path=manifest)


def run_front_ensemble(params: ModelParams, ts, realizations: int, master_seed: int,
                       workers: int = 1, no_impurity: bool = False) -> np.ndarray:
    """Front positions, shape (realizations, len(ts)); NO_FRONT where absent."""
    warmup()
    rows = run_point("front", params, master_seed, 0, realizations, workers,
                     extra={"ts": list(ts), "no_impurity": no_impurity})
    return rows


def run_hydro_sweep(params_base: ModelParams, v_ds, t_probe: int, realizations: int,
                    master_seed: int, workers: int = 1,
                    no_impurity: bool = False) -> list[dict]:
    """Comoving-point density versus v_d at fixed probe time."""
    warmup()
    points = []
    prog = Progress(len(list(v_ds)), "hydro")
    for k, v_d in enumerate(v_ds):
        params = params_base.with_(v_d=float(v_d))
        rows = run_point("hydro", params, master_seed, k, realizations, workers,
                         extra={"t_probe": t_probe, "no_impurity": no_impurity})
        dens = rows[:, 0]
        points.append({"v_d": float(v_d), "density": float(dens.mean()),
                       "stderr": _stderr_of_mean(dens), "n": int(rows.shape[0])})
        prog.tick(f"v_d={v_d:g} n_M={points[-1]['density']:.3f}")
    return points


def run_phase2d_points(params_base: ModelParams, grid: list[dict], realizations: int,
                       master_seed: int, workers: int = 1) -> list[dict]:
    """2D steady-state weight over explicit (p, v_d) points."""
    warmup()
    out = []
    prog = Progress(len(grid), "phase2d")
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork"))
    try:
        for k, g in enumerate(grid):
            params = params_base.with_(**g)
            rows = run_point("phase2d", params, master_seed, k, realizations,
                             workers, pool=pool)
            out.append({**g, "n": int(rows.shape[0]),
                        "N_I_mean": float(rows[:, 0].mean()),
                        "survival": float(rows[:, 1].mean())})
            prog.tick(f"{g} N_I={out[-1]['N_I_mean']:.3f}")
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def bisect_pc(params_base: ModelParams, p_lo: float, p_hi: float, iterations: int,
              realizations: int, master_seed: int, workers: int = 1,
              survival_target: float = 0.5) -> tuple[float, list[dict]]:
    """Bisect the swap rate where late-time survival crosses the target."""
    warmup()
    history = []
    point_index = 10_000  # separate stream region from grid points
    for it in range(iterations):
        p_mid = 0.5 * (p_lo + p_hi)
        rows = run_point("phase2d", params_base.with_(p=p_mid), master_seed,
                         point_index + it, realizations, workers)
        surv = float(rows[:, 1].mean())
        history.append({"p": p_mid, "survival": surv})
        print(f"[bisect] p={p_mid:.4f} survival={surv:.3f}", file=sys.stderr,
              flush=True)
        if surv > survival_target:
            p_lo = p_mid
        else:
            p_hi = p_mid
    return 0.5 * (p_lo + p_hi), history


def run_decoders_point(params: ModelParams, realizations: int, master_seed: int,
                       workers: int = 1, explicit_teleport: bool = False) -> dict:
    """Explicit tableau decoders at a single parameter point."""
    warmup()
    rows = run_point("decoders", params, master_seed, 0, realizations, workers,
                     extra={"explicit_teleport": explicit_teleport})
    out = {
        "v_d": params.v_d, "p": params.p, "n": int(rows.shape[0]),
        "I_mean": float(rows[:, 0].mean()),
        "F_echo_mean": float(rows[:, 1].mean()),
        "F_tele_mean": float(rows[:, 2].mean()),
        "max_residual_echo_identity": float(rows[:, 3].max()),
        "max_residual_complement": float(rows[:, 4].max()),
    }
    if explicit_teleport:
        out.update({
            "teleport_success_mean": float(rows[:, 5].mean()),
            "teleport_cond_fidelity_mean": float(rows[:, 6].mean()),
            "max_residual_success_vs_echo": float(rows[:, 7].max()),
        })
    return out


def write_manifest(out_dir, label: str, spec_echo: dict, files: list[Path],
                   params_base: ModelParams | None = None,
                   wall_time_s: float | None = None) -> Path:
    """One manifest per run; every emitted CSV is referenced by exactly one."""
    payload = {
        "spec": spec_echo,
        "files": [str(Path(f).name) for f in files],
        "content_hash": spec_hash(spec_echo),
        "version": __version__,
    }
    if params_base is not None:
        payload["base_params"] = json.loads(
            json.dumps(params_base.__dict__, default=str))
    if wall_time_s is not None:
        payload["wall_time_s"] = round(wall_time_s, 3)
    path = Path(out_dir) / f"{label}_manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _write_manifest(out_dir, label, params_base: ModelParams, spec_echo: dict,
                    files: list[Path], prog: Progress) -> Path | None:
    if out_dir is None:
        return None
    return write_manifest(out_dir, label, spec_echo, files,
                          params_base=params_base,
                          wall_time_s=time.time() - prog.start)
