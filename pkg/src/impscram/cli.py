"""Command-line harness mirroring the experiments behind the result figures.

Subcommands: backflow, backflow-truncated, phase2d, info, decoders, vb,
collapse, hydro-fit.  Every value in a config file (flat key = value lines)
can be overridden by the flag of the same name; --seed is mandatory for
sweeps, there is no wall-clock seeding.  Progress goes to stderr, data to
files under --out (or stdout for single reports).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .geometry import ModelParams, parse_config
from .hydro import collapse, estimate_vB, fit_erf_profile
from .otoc import NO_FRONT
from .sweep import (bisect_pc, read_two_column, resolve_workers, run_backflow_sweep,
                    run_decoders_point, run_front_ensemble, run_hydro_sweep,
                    run_info_sweep, run_phase2d_points, write_csv, write_manifest)


def _parse_range(spec: str) -> list[float]:
    """a:b:step inclusive grid with decimal-safe rounding."""
    try:
        a, b, step = (float(tok) for tok in spec.split(":"))
    except ValueError:
        raise SystemExit(f"bad range '{spec}', expected a:b:step")
    if step <= 0 or b < a:
        raise SystemExit(f"bad range '{spec}'")
    n = int(round((b - a) / step))
    vals = [round(a + k * step, 10) for k in range(n + 1)]
    return [v for v in vals if v <= b + 1e-9]


def _add_common(sub: argparse.ArgumentParser, t2_default: int = 1000,
                realizations_default: int = 1000):
    sub.add_argument("--config", type=Path, help="flat key = value config file")
    sub.add_argument("--p", type=float, default=0.1)
    sub.add_argument("--vd", type=float, default=None)
    sub.add_argument("--vd-range", dest="vd_range", default=None, metavar="A:B:STEP")
    sub.add_argument("--dmax", type=int, default=20)
    sub.add_argument("--t1", type=int, default=100)
    sub.add_argument("--t2", type=int, default=t2_default)
    sub.add_argument("--t2-list", dest="t2_list", default=None,
                     help="comma-separated t2 values")
    sub.add_argument("--realizations", type=int, default=realizations_default)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--drift", choices=["binomial", "deterministic"], default="binomial")
    sub.add_argument("--boundary", choices=["open", "truncated"], default="open")
    sub.add_argument("--interaction", choices=["swap", "clifford"], default="swap")
    sub.add_argument("--n-impurity", dest="n_impurity", type=int, default=1)
    sub.add_argument("--out", type=Path, default=Path("out"))
    sub.add_argument("--workers", type=int, default=None)


def _apply_config(args: argparse.Namespace, parser_defaults: dict) -> None:
    """Config supplies values only where the command line kept the default."""
    if not getattr(args, "config", None):
        return
    kv = parse_config(Path(args.config).read_text())
    alias = {"v_d": "vd", "d_max": "dmax", "drift_mode": "drift",
             "boundary_mode": "boundary", "interaction_mode": "interaction"}
    for key, raw in kv.items():
        dest = alias.get(key, key).replace("-", "_")
        if not hasattr(args, dest):
            continue
        if getattr(args, dest) != parser_defaults.get(dest):
            continue  # explicit flag wins
        if dest == "t1" and raw.lower() in ("none", ""):
            setattr(args, dest, None)
        else:
            setattr(args, dest, _auto_cast(raw))


def _auto_cast(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    return raw


def _params_from_args(args, t1=None, no_reset=False) -> ModelParams:
    return ModelParams(
        p=args.p,
        v_d=args.vd if args.vd is not None else 0.0,
        d_max=args.dmax,
        t1=None if no_reset else (args.t1 if t1 is None else t1),
        t2=args.t2,
        drift_mode=args.drift,
        boundary_mode=args.boundary,
        interaction_mode=args.interaction,
        n_impurity=args.n_impurity,
        seed=args.seed,
    )


def _vd_grid(args) -> list[float]:
    if args.vd_range:
        return _parse_range(args.vd_range)
    if args.vd is not None:
        return [args.vd]
    raise SystemExit("need --vd or --vd-range")


def _t2_list(args) -> list[int]:
    if args.t2_list:
        return [int(tok) for tok in args.t2_list.split(",") if tok]
    return [args.t2]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="impscram",
                                     description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("backflow", "backflow-truncated"):
        sub = subs.add_parser(name, help="1D backflow order parameter sweep")
        _add_common(sub)

    sub = subs.add_parser("info", help="coherent-information sweep")
    _add_common(sub, realizations_default=400)

    sub = subs.add_parser("decoders", help="explicit echo/teleportation decoders")
    _add_common(sub, t2_default=200, realizations_default=100)
    sub.add_argument("--explicit-teleport", action="store_true",
                     help="also run the probabilistic teleportation decoder")

    sub = subs.add_parser("vb", help="butterfly velocity / diffusion estimate")
    _add_common(sub, t2_default=220, realizations_default=1000)
    sub.add_argument("--t-min", type=int, default=None, help="fit window start")
    sub.add_argument("--no-impurity", action="store_true",
                     help="seed the operator directly in the medium")

    sub = subs.add_parser("hydro-fit", help="comoving density profile fit")
    _add_common(sub, t2_default=160, realizations_default=600)
    sub.add_argument("--t", dest="t_probe", type=int, default=150)
    sub.add_argument("--no-impurity", action="store_true",
                     help="seed the deposit at the origin instead of swapping")

    sub = subs.add_parser("phase2d", help="2D percolating/absorbing phase scan")
    _add_common(sub, t2_default=300, realizations_default=200)
    sub.add_argument("--p-range", dest="p_range", default=None, metavar="A:B:STEP")
    sub.add_argument("--bisect-pc", dest="bisect_pc", action="store_true")
    sub.add_argument("--bisect-iters", type=int, default=9)
    sub.add_argument("--survival-target", dest="survival_target", type=float,
                     default=0.4, help="late-time survival level defining p_c")

    sub = subs.add_parser("collapse", help="finite-time scaling collapse")
    sub.add_argument("--in", dest="inputs", nargs="+", required=True, type=Path)
    sub.add_argument("--t2-list", dest="t2_list", required=True,
                     help="t2 of each input CSV, comma-separated")
    sub.add_argument("--t1", type=int, default=100)
    sub.add_argument("--alpha", type=float, default=0.0)
    sub.add_argument("--grid", default="0.8:1.6:0.01", metavar="A:B:STEP")
    sub.add_argument("--out", type=Path, default=Path("out"))

    args = parser.parse_args(argv)
    defaults = {a.dest: a.default for g in subs.choices.values() for a in g._actions}
    _apply_config(args, defaults)
    if getattr(args, "realizations", 1) < 1:
        raise SystemExit("realizations must be >= 1")
    cmd = args.command

    if cmd in ("backflow", "backflow-truncated"):
        truncated = cmd == "backflow-truncated" or args.boundary == "truncated"
        params = _params_from_args(args)
        label = "backflow_truncated" if truncated else "backflow"
        res = run_backflow_sweep(params, _vd_grid(args), _t2_list(args),
                                 args.realizations, args.seed, args.out,
                                 resolve_workers(args.workers), truncated=truncated,
                                 label=label)
        print(json.dumps({"files": [str(f) for f in res.files]}, indent=2))
        return 0

    if cmd == "info":
        params = _params_from_args(args)
        res = run_info_sweep(params, _vd_grid(args), _t2_list(args),
                             args.realizations, args.seed, args.out,
                             resolve_workers(args.workers))
        print(json.dumps({"files": [str(f) for f in res.files]}, indent=2))
        return 0

    if cmd == "decoders":
        rows = []
        for v_d in _vd_grid(args):
            params = _params_from_args(args).with_(v_d=v_d)
            rows.append(run_decoders_point(params, args.realizations, args.seed,
                                           resolve_workers(args.workers),
                                           explicit_teleport=args.explicit_teleport))
        out = Path(args.out) / "decoders.csv"
        keys = list(rows[0].keys())
        write_csv(out, keys, [np.array([r[k] for r in rows]) for k in keys])
        write_manifest(args.out, "decoders",
                       {"experiment": "decoders", "seed": args.seed,
                        "realizations": args.realizations,
                        "v_ds": _vd_grid(args)}, [out])
        print(json.dumps(rows, indent=2))
        return 0

    if cmd == "vb":
        params = _params_from_args(args, no_reset=True)
        t_max = params.total_steps
        t_min = args.t_min if args.t_min is not None else t_max // 2
        ts = np.arange(1, t_max + 1)
        fronts = run_front_ensemble(params, ts, args.realizations, args.seed,
                                    resolve_workers(args.workers),
                                    no_impurity=args.no_impurity)
        valid = fronts > NO_FRONT / 2
        win = (ts >= t_min) & (ts <= t_max)
        keep = valid[:, win].all(axis=1)
        fit = estimate_vB(ts[win], fronts[np.ix_(keep, win)],
                          window=(float(t_min), float(t_max)))
        out = Path(args.out)
        mean_front = np.where(valid, fronts, np.nan)
        with np.errstate(invalid="ignore"):
            mean_front = np.nanmean(mean_front, axis=0)
        write_csv(out / "front_mean.csv", ["Column1", "Column2"],
                  [ts, mean_front])
        report = {"v_B": fit.v_b, "D": fit.diffusion,
                  "n_realizations": fit.n_realizations,
                  "window": [int(t_min), int(t_max)]}
        (out / "vb_report.json").write_text(json.dumps(report, indent=2) + "\n")
        write_manifest(out, "vb", {"experiment": "vb", "seed": args.seed,
                                   "realizations": args.realizations},
                       [out / "front_mean.csv"])
        print(json.dumps(report, indent=2))
        return 0

    if cmd == "hydro-fit":
        params = _params_from_args(args, no_reset=True)
        if args.t_probe >= params.total_steps:
            raise SystemExit("--t must be < t2 for a no-reset profile run")
        v_ds = _vd_grid(args)
        pts = run_hydro_sweep(params, v_ds, args.t_probe, args.realizations,
                              args.seed, resolve_workers(args.workers),
                              no_impurity=args.no_impurity)
        fit = fit_erf_profile(np.array([q["v_d"] for q in pts]),
                              np.array([q["density"] for q in pts]), args.t_probe)
        out = Path(args.out)
        write_csv(out / "hydro_profile.csv", ["Column1", "Column2"],
                  [np.array([q["v_d"] for q in pts]),
                   np.array([q["density"] for q in pts])])
        report = {"v_B": fit.v_b, "D": fit.diffusion, "amplitude": fit.amplitude,
                  "R2": fit.r_squared, "t": args.t_probe}
        (out / "hydro_report.json").write_text(json.dumps(report, indent=2) + "\n")
        write_manifest(out, "hydro", {"experiment": "hydro", "seed": args.seed,
                                      "realizations": args.realizations,
                                      "t": args.t_probe, "v_ds": v_ds},
                       [out / "hydro_profile.csv"])
        print(json.dumps(report, indent=2))
        return 0

    if cmd == "phase2d":
        params = _params_from_args(args, no_reset=True)
        workers = resolve_workers(args.workers)
        if args.bisect_pc:
            p_c, history = bisect_pc(params, 0.05, 0.5, args.bisect_iters,
                                     args.realizations, args.seed, workers,
                                     survival_target=args.survival_target)
            print(json.dumps({"p_c": p_c, "history": history}, indent=2))
            return 0
        if args.p_range:
            grid = [{"p": p} for p in _parse_range(args.p_range)]
            xkey = "p"
        else:
            grid = [{"v_d": v} for v in _vd_grid(args)]
            xkey = "v_d"
        pts = run_phase2d_points(params, grid, args.realizations, args.seed, workers)
        out = Path(args.out)
        write_csv(out / "phase2d.csv",
                  [xkey, "N_I_mean", "survival", "n"],
                  [np.array([q[xkey] for q in pts]),
                   np.array([q["N_I_mean"] for q in pts]),
                   np.array([q["survival"] for q in pts]),
                   np.array([q["n"] for q in pts])])
        write_manifest(out, "phase2d",
                       {"experiment": "phase2d", "seed": args.seed,
                        "realizations": args.realizations,
                        "grid": [list(g.items()) for g in grid]},
                       [out / "phase2d.csv"])
        print(json.dumps(pts, indent=2))
        return 0

    if cmd == "collapse":
        t2s = [int(tok) for tok in args.t2_list.split(",") if tok]
        if len(t2s) != len(args.inputs):
            raise SystemExit("--t2-list length must match --in inputs")
        if len(args.inputs) < 3:
            raise SystemExit("collapse needs at least 3 datasets")
        curves = []
        for path, t2 in zip(args.inputs, t2s):
            rows = np.genfromtxt(path, delimiter=",", names=True)
            names = rows.dtype.names
            if names and "stderr" in names:
                pts = list(zip(np.atleast_1d(rows["v_d"]),
                               np.atleast_1d(rows["mean"]),
                               np.atleast_1d(rows["stderr"])))
            else:
                xs, ys = read_two_column(path)
                pts = list(zip(xs, ys))
            curves.append((args.t1 + t2, pts))
        grid = _parse_range(args.grid)
        result = collapse(curves, args.alpha, np.asarray(grid))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for (path, t2), (T, pts) in zip(zip(args.inputs, t2s), curves):
            xs = np.array([q[0] for q in pts])
            ys = np.array([q[1] for q in pts])
            write_csv(out / f"rescaled_{Path(path).stem}.csv",
                      ["Column1", "Column2"],
                      [(xs - result.v_star) * np.sqrt(T), ys * T**args.alpha])
        report = {"v_star": result.v_star, "alpha": result.alpha,
                  "quality": result.quality,
                  "quality_unscaled": result.quality_unscaled}
        (out / "collapse_report.json").write_text(json.dumps(report, indent=2) + "\n")
        write_manifest(out, "collapse",
                       {"experiment": "collapse", "alpha": args.alpha,
                        "t1": args.t1, "t2s": t2s,
                        "inputs": [str(pth) for pth in args.inputs]},
                       sorted(out.glob("rescaled_*.csv")))
        print(json.dumps(report, indent=2))
        return 0

    raise SystemExit(f"unknown command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
