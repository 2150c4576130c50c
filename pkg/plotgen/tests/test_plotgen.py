"""Rendering smoke tests, determinism, error exits, and the overlap check."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotgen import FIGURES, FigureSpec, render, rescale
from plotgen.cli import main as cli_main


def write_csv(path: Path, xs, ys):
    lines = ["Column1,Column2"] + [f"{x:.10g},{y:.10g}" for x, y in zip(xs, ys)]
    path.write_text("\n".join(lines) + "\n")


def sigmoid_data(T, v_star=1.2, amp=0.5, width=0.35):
    xs = np.round(np.arange(0.8, 1.601, 0.05), 10)
    ys = amp / (1 + np.exp((xs - v_star) * np.sqrt(T) / width))
    return xs, ys


@pytest.fixture
def curves(tmp_path):
    files, t2s = [], [125, 250, 500]
    for t2 in t2s:
        f = tmp_path / f"backflow_t2_{t2}.csv"
        write_csv(f, *sigmoid_data(100 + t2))
        files.append(f)
    return files, t2s


def test_single_panel_smoke(tmp_path, curves):
    files, _ = curves
    out = render(FigureSpec("fig4_backflow", [files[0]], tmp_path / "f4.png"))
    assert out.exists() and out.stat().st_size > 2000


def test_all_figures_render(tmp_path, curves):
    files, t2s = curves
    boundary = tmp_path / "boundary.csv"
    write_csv(boundary, [0.0, 1.2, 2.0, 4.0], [0.9, 0.8, 0.3, 0.19])
    info = tmp_path / "info.csv"
    write_csv(info, *sigmoid_data(225, amp=-2.3))
    for name in FIGURES:
        out = tmp_path / f"{name}.png"
        if name in ("fig5_collapse", "fig10_infocollapse-style",
                    "fig11_truncated_collapse"):
            spec = FigureSpec(name, files, out, t1=100, t2_list=t2s, v_star=1.2)
        elif name == "fig6_phasediagram":
            spec = FigureSpec(name, [boundary], out)
        elif name == "fig7_info":
            spec = FigureSpec(name, [info], out, log_y=False)
        else:
            spec = FigureSpec(name, [files[0]], out)
        assert render(spec).stat().st_size > 2000


def test_render_is_byte_deterministic(tmp_path, curves):
    files, t2s = curves
    outs = []
    for k in range(2):
        out = tmp_path / f"rep{k}.png"
        render(FigureSpec("fig5_collapse", files, out, t1=100, t2_list=t2s))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    # and across a fresh interpreter
    script = (
        "from plotgen import FigureSpec, render;"
        f"render(FigureSpec('fig5_collapse', {[str(f) for f in files]!r},"
        f" '{tmp_path / 'rep2.png'}', t1=100, t2_list={t2s!r}))"
    )
    subprocess.run([sys.executable, "-c", script], check=True)
    assert (tmp_path / "rep2.png").read_bytes() == outs[0]


def test_rescale_transform_matches_collapse_geometry(curves):
    """Overlap metric on the rescaled panel agrees with the numeric collapse
    from the analysis package (the external cross-check of criterion 12)."""
    impscram_hydro = pytest.importorskip("impscram.hydro")
    files, t2s = curves
    curves_pts = []
    rescaled = []
    for f, t2 in zip(files, t2s):
        rows = np.genfromtxt(f, delimiter=",", names=True)
        xs, ys = rows["Column1"], rows["Column2"]
        curves_pts.append((100 + t2, list(zip(xs, ys))))
        rescaled.append(rescale(xs, ys, 100 + t2, 1.2, 0.0))
    res = impscram_hydro.collapse(curves_pts, alpha=0.0,
                                  v_star_grid=np.arange(1.0, 1.4, 0.01))
    assert abs(res.v_star - 1.2) < 0.03
    # overlap of the figure's rescaled curves, measured the same way
    metric = impscram_hydro._master_curve_residual(
        [r[0] for r in rescaled], [r[1] for r in rescaled])
    assert metric <= 1.5 * res.quality + 1e-12


def test_missing_and_malformed_inputs(tmp_path):
    rc = cli_main(["--figure", "fig4_backflow", "--in", str(tmp_path / "no.csv"),
                   "--out", str(tmp_path / "x.png")])
    assert rc != 0
    bad = tmp_path / "bad.csv"
    bad.write_text("")
    rc = cli_main(["--figure", "fig4_backflow", "--in", str(bad),
                   "--out", str(tmp_path / "x.png")])
    assert rc != 0
    bad.write_text("Column1,Column2\noops,1\n")
    rc = cli_main(["--figure", "fig4_backflow", "--in", str(bad),
                   "--out", str(tmp_path / "x.png")])
    assert rc != 0


def test_bad_figure_name_rejected(tmp_path):
    with pytest.raises(SystemExit):
        cli_main(["--figure", "nope", "--in", "x", "--out", "y"])


def test_cli_end_to_end(tmp_path, curves):
    files, t2s = curves
    out = tmp_path / "cli5.png"
    rc = cli_main(["--figure", "fig5_collapse",
                   "--in", *[str(f) for f in files],
                   "--out", str(out), "--t1", "100",
                   "--t2-list", ",".join(str(t) for t in t2s),
                   "--vstar", "1.2"])
    assert rc == 0 and out.exists()


def test_collapse_panel_needs_t2_list(tmp_path, curves):
    files, _ = curves
    rc = cli_main(["--figure", "fig5_collapse", "--in", *[str(f) for f in files],
                   "--out", str(tmp_path / "x.png")])
    assert rc != 0
