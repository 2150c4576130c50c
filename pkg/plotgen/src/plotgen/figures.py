"""Figure rendering from the harness's CSV outputs.

Everything here is presentation: axis transforms (finite-time rescaling given
v* and the prefactor exponent) and fixed styling.  No analysis happens in this
package; critical velocities and exponents are inputs.  Rendering is a pure
function of (spec, CSV bytes): fixed style, no timestamps, byte-identical
reruns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURES = (
    "fig4_backflow",
    "fig5_collapse",
    "fig6_phasediagram",
    "fig7_info",
    "fig10_infocollapse-style",
    "fig11_truncated_collapse",
)

_STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.0,
    "legend.fontsize": 8,
}

P_C_REFERENCE = 0.206
V_STAR_REFERENCE = 1.2


@dataclass
class FigureSpec:
    figure: str
    inputs: list[Path]
    output: Path
    t1: int = 100
    t2_list: list[int] = field(default_factory=list)
    v_star: float = V_STAR_REFERENCE
    alpha: float = 0.0
    log_y: bool = True

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; choose from {FIGURES}")
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)


def read_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column (Column1, Column2) or extended (v_d, mean, ...) CSV."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV not found: {path}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rows = np.genfromtxt(path, delimiter=",", names=True)
        names = rows.dtype.names
        if names is None or len(names) < 2:
            raise ValueError
        if "mean" in names:
            xs, ys = rows[names[0]], rows["mean"]
        else:
            xs, ys = rows[names[0]], rows[names[1]]
        xs, ys = np.atleast_1d(xs).astype(float), np.atleast_1d(ys).astype(float)
    except Exception as exc:
        raise ValueError(f"malformed CSV {path}: {exc}") from exc
    if xs.size == 0 or not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise ValueError(f"malformed CSV {path}: empty or non-numeric data")
    return xs, ys


def rescale(xs, ys, T, v_star, alpha):
    """The finite-time axis transform: x -> (v_d - v*) sqrt(T), y -> y T^a."""
    return (xs - v_star) * np.sqrt(T), ys * T**alpha


def _shade(k, n):
    return plt.get_cmap("Blues")(0.45 + 0.5 * (k + 1) / max(n, 1))


def _new_fig(n_panels):
    return plt.subplots(1, n_panels, figsize=(4.2 * n_panels, 3.2),
                        constrained_layout=True)


def _single_curve(spec, xlabel, ylabel):
    xs, ys = read_csv(spec.inputs[0])
    fig, ax = _new_fig(1)
    ax.plot(xs, ys, marker="o", color="#1f4e79")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig


def _collapse_panels(spec, ylabel):
    if not spec.t2_list or len(spec.t2_list) != len(spec.inputs):
        raise ValueError("need --t2-list matching the input CSVs")
    fig, (ax_raw, ax_sc) = _new_fig(2)
    n = len(spec.inputs)
    for k, (path, t2) in enumerate(zip(spec.inputs, spec.t2_list)):
        xs, ys = read_csv(path)
        color = _shade(k, n)
        ax_raw.plot(xs, ys, marker="o", color=color, label=str(t2))
        T = spec.t1 + t2
        xr, yr = rescale(xs, ys, T, spec.v_star, spec.alpha)
        ax_sc.plot(xr, yr, marker="o", color=color)
    if spec.log_y:
        floor = 1e-4
        ax_raw.set_yscale("log")
        ax_sc.set_yscale("log")
        ax_raw.set_ylim(bottom=floor)
        ax_sc.set_ylim(bottom=floor)
    ax_raw.set_xlabel("drift velocity")
    ax_raw.set_ylabel(ylabel)
    ax_raw.legend(title="t2", loc="lower left")
    suffix = " * sqrt(T)" if spec.alpha == 0.5 else ""
    ax_sc.set_xlabel("(v_d - v*) sqrt(T)")
    ax_sc.set_ylabel(ylabel + suffix)
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure; deterministic bytes for identical inputs."""
    with plt.rc_context(_STYLE):
        if spec.figure == "fig4_backflow":
            fig = _single_curve(spec, "drift velocity", "mean backflow")
        elif spec.figure == "fig7_info":
            fig = _single_curve(spec, "drift velocity", "mean coherent information")
        elif spec.figure == "fig5_collapse":
            fig = _collapse_panels(spec, "mean backflow")
        elif spec.figure == "fig10_infocollapse-style":
            fig = _collapse_panels(spec, "1 - mean coherent information")
        elif spec.figure == "fig11_truncated_collapse":
            if spec.alpha == 0.0:
                spec.alpha = 0.5  # truncated-circuit prefactor
            fig = _collapse_panels(spec, "mean backflow")
        elif spec.figure == "fig6_phasediagram":
            xs, ys = read_csv(spec.inputs[0])  # boundary: (v_d, critical p)
            fig, ax = _new_fig(1)
            ax.plot(xs, ys, color="black", marker="o")
            ax.fill_between(xs, ys, 1.0, color="#f4cccc")
            ax.axhline(P_C_REFERENCE, color="red", linestyle="--",
                       label=f"p_c = {P_C_REFERENCE}")
            ax.axvline(V_STAR_REFERENCE, color="black", linestyle="-.",
                       label=f"v* = {V_STAR_REFERENCE}")
            ax.set_xlim(0, max(4.0, float(xs.max())))
            ax.set_ylim(0, 1)
            ax.set_xlabel("drift velocity")
            ax.set_ylabel("swap rate")
            ax.text(0.22, 0.18, "Percolating", transform=ax.transAxes, ha="center")
            ax.text(0.72, 0.72, "Absorbing", transform=ax.transAxes, ha="center")
            ax.legend(loc="lower right")
        else:  # pragma: no cover - guarded by FigureSpec
            raise ValueError(spec.figure)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, format="png", metadata={"Software": None})
        plt.close(fig)
    return spec.output
