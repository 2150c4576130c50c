"""Hydrodynamic reference curves, butterfly-velocity fits, data collapse.

The front of the operator cloud performs a biased random walk, so the density
at a point comoving with the impurity follows an error-function profile in
(v_d - v_B) sqrt(t); the truncated-circuit variant picks up an extra 1/sqrt(t)
prefactor.  Collapse quality is a leave-one-dataset-out master-curve residual,
normalized by the overall variance so that scaled and unscaled objectives are
comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special


def erf_profile(v: float | np.ndarray, t: float, diffusion: float):
    """Front-passage probability at offset velocity v = v_d - v_B."""
    if t <= 0 or diffusion <= 0:
        raise ValueError("need t > 0 and diffusion > 0")
    v = np.asarray(v, dtype=float)
    out = 0.5 * (1.0 - special.erf(v * np.sqrt(t) / (2.0 * np.sqrt(diffusion))))
    return float(out) if out.ndim == 0 else out


def p1_profile(v: float | np.ndarray, t: float, diffusion: float):
    """Comoving density for the truncated circuit; sqrt(t) * p1 is scale-free."""
    if t <= 0 or diffusion <= 0:
        raise ValueError("need t > 0 and diffusion > 0")
    v = np.asarray(v, dtype=float)
    arg = v * np.sqrt(t) / (2.0 * np.sqrt(diffusion))
    out = np.exp(-(v**2) * t / (4.0 * diffusion)) / (
        np.sqrt(np.pi * diffusion * t) * (1.0 + special.erf(arg)))
    return float(out) if out.ndim == 0 else out


@dataclass
class FrontFit:
    v_b: float
    diffusion: float
    n_realizations: int
    window: tuple[int, int]


def estimate_vB(ts: np.ndarray, fronts: np.ndarray, min_realizations: int = 50,
                window: tuple[float, float] | None = None) -> FrontFit:
    """Butterfly velocity and diffusion constant from ensemble front positions.

    fronts has shape (n_realizations, len(ts)).  The mean front position is
    fitted linearly over the late-time window (default [t_max/2, t_max]); the
    front-position variance growth gives 2 D t.
    """
    ts = np.asarray(ts, dtype=float)
    fronts = np.asarray(fronts, dtype=float)
    if fronts.ndim != 2 or fronts.shape[1] != ts.size:
        raise ValueError("fronts must be (n_realizations, len(ts))")
    n_real = fronts.shape[0]
    if n_real < min_realizations:
        raise ValueError(
            f"only {n_real} realizations; at least {min_realizations} required "
            "(500+ recommended for a stable fit)")
    if window is None:
        window = (ts.max() / 2.0, ts.max())
    sel = (ts >= window[0]) & (ts <= window[1])
    if sel.sum() < 3:
        raise ValueError(f"fit window {window} covers {int(sel.sum())} < 3 time points")
    tw = ts[sel]
    mean = fronts[:, sel].mean(axis=0)
    var = fronts[:, sel].var(axis=0, ddof=1)
    v_b = float(np.polyfit(tw, mean, 1)[0])
    dvar = float(np.polyfit(tw, var, 1)[0])
    return FrontFit(v_b=v_b, diffusion=dvar / 2.0, n_realizations=n_real,
                    window=(int(window[0]), int(window[1])))


@dataclass
class ProfileFit:
    v_b: float
    diffusion: float
    amplitude: float
    r_squared: float


def fit_erf_profile(v_ds: np.ndarray, densities: np.ndarray, t: float) -> ProfileFit:
    """Fit a * erf_profile(v_d - v_B, t, D) to comoving densities.

    The amplitude absorbs the scrambled-equilibrium non-identity density
    (12/15 for pair-local equilibrium); v_B and D are unaffected by it.
    """
    v_ds = np.asarray(v_ds, dtype=float)
    densities = np.asarray(densities, dtype=float)

    def model(v_d, v_b, diff, amp):
        return amp * erf_profile(v_d - v_b, t, diff)

    p0 = (1.2, 0.6, max(densities.max(), 0.1))
    popt, _ = optimize.curve_fit(model, v_ds, densities, p0=p0,
                                 bounds=([0.1, 0.01, 0.05], [2.0, 5.0, 1.0]),
                                 maxfev=20000)
    resid = densities - model(v_ds, *popt)
    ss_res = float((resid**2).sum())
    ss_tot = float(((densities - densities.mean())**2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return ProfileFit(v_b=float(popt[0]), diffusion=float(popt[1]),
                      amplitude=float(popt[2]), r_squared=r2)


@dataclass
class CollapseResult:
    v_star: float
    alpha: float
    quality: float
    quality_unscaled: float
    grid: np.ndarray
    objective: np.ndarray


def _master_curve_residual(xs_list, ys_list, es_list=None) -> float:
    """Mean squared distance of each dataset to the others' joint curve.

    With standard errors the distances are measured in units of the combined
    statistical error (a reduced chi-square: ~1 for a perfect collapse);
    without them the normalization is the overall y variance.
    """
    total = 0.0
    count = 0
    noise_norm = es_list is not None
    if noise_norm:
        pos = np.concatenate(es_list)
        pos = pos[pos > 0]
        floor = (0.5 * float(np.median(pos)))**2 if pos.size else 1e-18
    else:
        var = float(np.concatenate(ys_list).var())
        if var == 0.0:
            return 0.0
    for k in range(len(xs_list)):
        others = [j for j in range(len(xs_list)) if j != k]
        ox = np.concatenate([xs_list[j] for j in others])
        oy = np.concatenate([ys_list[j] for j in others])
        order = np.argsort(ox, kind="stable")
        ox, oy = ox[order], oy[order]
        inside = (xs_list[k] >= ox[0]) & (xs_list[k] <= ox[-1])
        if inside.any():
            # never interpolate across holes in the master curve
            dx = np.diff(ox)
            pos = dx[dx > 0]
            med_dx = float(np.median(pos)) if pos.size else np.inf
            j = np.clip(np.searchsorted(ox, xs_list[k], side="right"), 1, ox.size - 1)
            gap = ox[j] - ox[j - 1]
            on_node = np.isin(xs_list[k], ox)
            inside &= on_node | (gap <= 10 * med_dx)
        if not inside.any():
            continue
        xin = xs_list[k][inside]
        dev2 = (ys_list[k][inside] - np.interp(xin, ox, oy))**2
        if noise_norm:
            oe2 = np.concatenate([es_list[j]**2 for j in others])[order]
            sig2 = es_list[k][inside]**2 + np.interp(xin, ox, oe2)
            total += float((dev2 / np.maximum(sig2, floor)).sum())
        else:
            total += float((dev2 / var).sum())
        count += int(inside.sum())
    if count == 0:
        raise ValueError("rescaled x-ranges do not overlap between datasets")
    return total / count


def collapse(curves, alpha: float, v_star_grid=None) -> CollapseResult:
    """Finite-time collapse x = (v_d - v*) sqrt(T), y = mean * T^alpha.

    curves: list of (T, points) with points among (v_d, mean) or
    (v_d, mean, stderr) rows.  Returns the grid argmin with its objective
    landscape; quality_unscaled evaluates the same objective on raw curves.
    """
    if len(curves) < 3:
        raise ValueError(f"collapse needs >= 3 datasets, got {len(curves)}")
    if v_star_grid is None:
        v_star_grid = np.arange(0.8, 1.6 + 1e-9, 0.01)
    v_star_grid = np.asarray(v_star_grid, dtype=float)
    ts = [float(T) for T, _ in curves]
    vds = [np.asarray([row[0] for row in pts], dtype=float) for _, pts in curves]
    means = [np.asarray([row[1] for row in pts], dtype=float) for _, pts in curves]
    has_err = all(len(row) > 2 for _, pts in curves for row in pts)
    errs = None
    if has_err:
        errs = [np.asarray([row[2] for row in pts], dtype=float) for _, pts in curves]

    raw_quality = _master_curve_residual(vds, means, errs)

    ys = [m * T**alpha for m, T in zip(means, ts)]
    es = None if errs is None else [e * T**alpha for e, T in zip(errs, ts)]
    objective = np.empty(v_star_grid.size)
    for i, v_star in enumerate(v_star_grid):
        xs = [(v - v_star) * np.sqrt(T) for v, T in zip(vds, ts)]
        objective[i] = _master_curve_residual(xs, ys, es)
    best = int(np.argmin(objective))
    return CollapseResult(v_star=float(v_star_grid[best]), alpha=float(alpha),
                          quality=float(objective[best]),
                          quality_unscaled=float(raw_quality),
                          grid=v_star_grid, objective=objective)
