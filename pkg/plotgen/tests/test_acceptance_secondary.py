"""Secondary acceptance: all six figures from real harness outputs,
overlap metric agreement, byte-identical reruns."""

from pathlib import Path

import numpy as np
import pytest

from plotgen import FIGURES, FigureSpec, render, rescale

impscram_cli = pytest.importorskip("impscram.cli")
impscram_hydro = pytest.importorskip("impscram.hydro")


@pytest.fixture(scope="module")
def harness_outputs(tmp_path_factory):
    """Small real sweeps through the primary CLI (schema-true inputs)."""
    out = tmp_path_factory.mktemp("harness")
    t2s = "60,120,240"
    rc = impscram_cli.main([
        "backflow", "--seed", "12", "--p", "0.15", "--t1", "60",
        "--t2-list", t2s, "--vd-range", "0.8:1.6:0.1",
        "--realizations", "400", "--out", str(out / "bf")])
    assert rc == 0
    rc = impscram_cli.main([
        "backflow-truncated", "--seed", "13", "--p", "0.15", "--t1", "60",
        "--t2-list", t2s, "--vd-range", "0.8:1.6:0.1",
        "--realizations", "400", "--out", str(out / "bt")])
    assert rc == 0
    rc = impscram_cli.main([
        "info", "--seed", "14", "--p", "0.15", "--t1", "60",
        "--t2-list", t2s, "--vd-range", "0.8:1.6:0.1",
        "--realizations", "200", "--out", str(out / "info")])
    assert rc == 0
    # boundary curve for the phase diagram: two-column (v_d, critical p)
    boundary = out / "boundary.csv"
    boundary.write_text("Column1,Column2\n0,0.95\n0.6,0.9\n1.2,0.75\n"
                        "2,0.35\n3,0.22\n4,0.19\n")
    return out


def test_criterion_12_secondary(harness_outputs, tmp_path):
    out = harness_outputs
    t2s = [60, 120, 240]
    bf = [out / "bf" / f"backflow_t2_{t}.csv" for t in t2s]
    bt = [out / "bt" / f"backflow_truncated_t2_{t}.csv" for t in t2s]
    info_stats = [out / "info" / f"info_t2_{t}_stats.csv" for t in t2s]

    # numeric collapse of the same data fixes v* for the figure
    curves = []
    for f, t2 in zip(bf, t2s):
        rows = np.genfromtxt(f, delimiter=",", names=True)
        curves.append((60 + t2, list(zip(np.atleast_1d(rows["Column1"]),
                                         np.atleast_1d(rows["Column2"])))))
    num = impscram_hydro.collapse(curves, alpha=0.0)

    figs = tmp_path / "figs"
    specs = {
        "fig4_backflow": FigureSpec("fig4_backflow", [bf[-1]],
                                    figs / "fig4.png"),
        "fig5_collapse": FigureSpec("fig5_collapse", bf, figs / "fig5.png",
                                    t1=60, t2_list=t2s, v_star=num.v_star),
        "fig6_phasediagram": FigureSpec("fig6_phasediagram",
                                        [out / "boundary.csv"],
                                        figs / "fig6.png"),
        "fig7_info": FigureSpec("fig7_info", [info_stats[-1]],
                                figs / "fig7.png", log_y=False),
        "fig10_infocollapse-style": FigureSpec(
            "fig10_infocollapse-style",
            [_one_minus(f, tmp_path) for f in info_stats],
            figs / "fig10.png", t1=60, t2_list=t2s, v_star=num.v_star),
        "fig11_truncated_collapse": FigureSpec(
            "fig11_truncated_collapse", bt, figs / "fig11.png",
            t1=60, t2_list=t2s, v_star=num.v_star, alpha=0.5),
    }
    assert set(specs) == set(FIGURES)
    sizes = {}
    for name, spec in specs.items():
        path = render(spec)
        assert path.exists() and path.stat().st_size > 2000
        sizes[name] = path.stat().st_size

    # rescaled-panel overlap metric matches the numeric collapse result
    xs_list, ys_list = [], []
    for f, t2 in zip(bf, t2s):
        rows = np.genfromtxt(f, delimiter=",", names=True)
        xr, yr = rescale(np.atleast_1d(rows["Column1"]),
                         np.atleast_1d(rows["Column2"]),
                         60 + t2, num.v_star, 0.0)
        xs_list.append(xr)
        ys_list.append(yr)
    panel_metric = impscram_hydro._master_curve_residual(xs_list, ys_list)
    assert panel_metric <= 1.2 * num.quality + 1e-12
    assert 1.0 <= num.v_star <= 1.45

    # byte-identical rerun
    again = render(FigureSpec("fig5_collapse", bf, tmp_path / "again.png",
                              t1=60, t2_list=t2s, v_star=num.v_star))
    assert again.read_bytes() == (figs / "fig5.png").read_bytes()
    print("\n[criterion 12] PASS - six figures rendered "
          f"({sum(sizes.values())} bytes total), overlap metric "
          f"{panel_metric:.4f} vs numeric {num.quality:.4f}, reruns byte-identical")


def _one_minus(stats_csv: Path, tmp_path: Path) -> Path:
    """Two-column (v_d, 1 - I) file from an info stats CSV (axis transform)."""
    rows = np.genfromtxt(stats_csv, delimiter=",", names=True)
    out = tmp_path / (stats_csv.stem + "_oneminus.csv")
    lines = ["Column1,Column2"]
    for v, y in zip(np.atleast_1d(rows["v_d"]), np.atleast_1d(rows["one_minus_I"])):
        lines.append(f"{v:.10g},{y:.10g}")
    out.write_text("\n".join(lines) + "\n")
    return out
