"""Acceptance suite: one test per criterion, one printed verdict line each.

Desk-scale ensembles with fixed master seeds; every tolerance is stated
inline.  Heavier sweeps are shared between criteria through module-scoped
fixtures (the backflow sweep feeds both the transition location and the
collapse-quality checks).
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import paired_states, random_clifford_evolution
from impscram import sites
from impscram.dense import dense_bell_fidelity, dense_entropy, dense_postselect
from impscram.geometry import ModelParams, build_schedule
from impscram.hydro import collapse, estimate_vB, fit_erf_profile
from impscram.info import run_info, simulate_teleportation_decoder
from impscram.otoc import NO_FRONT, backflow_record
from impscram.sites import PauliString
from impscram.sweep import (bisect_pc, run_backflow_sweep, run_front_ensemble,
                            run_hydro_sweep, run_info_sweep, run_phase2d_points,
                            run_point, warmup)
from impscram.tableau import bell_fidelity, postselect, subsystem_entropy

SEED_SWEEP_OPEN = 20260810
SEED_SWEEP_TRUNC = 20260811
SEED_SWEEP_INFO = 20260812
V_GRID = [round(v, 10) for v in np.arange(0.8, 1.6001, 0.05)]
T2_SET = [125, 250, 500]


def report(num: int, ok: bool, detail: str):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def curves_from_points(points, key="B_mean", err="B_stderr", t1=100, vmax=1.61):
    cur = {}
    for pt in points:
        if pt["v_d"] <= vmax:
            cur.setdefault(pt["t2"], []).append(
                (pt["v_d"], pt[key], max(pt[err], 1e-9)))
    return [(t1 + t2, pts) for t2, pts in sorted(cur.items())]


@pytest.fixture(scope="module")
def open_sweep():
    warmup()
    params = ModelParams(p=0.1, v_d=1.0, t1=100, t2=125)
    start = time.time()
    res = run_backflow_sweep(params, V_GRID, T2_SET, 1000, SEED_SWEEP_OPEN,
                             out_dir=None, workers=1)
    return res, time.time() - start


@pytest.fixture(scope="module")
def truncated_sweep():
    warmup()
    params = ModelParams(p=0.1, v_d=1.0, t1=100, t2=125)
    return run_backflow_sweep(params, V_GRID, T2_SET, 4000, SEED_SWEEP_TRUNC,
                              out_dir=None, workers=1, truncated=True,
                              label="backflow_truncated")


@pytest.fixture(scope="module")
def front_fit():
    warmup()
    params = ModelParams(p=0.1, v_d=0.0, t1=None, t2=200)
    start = time.time()
    ts = np.arange(100, 201)
    fronts = run_front_ensemble(params, ts, 1000, master_seed=41, workers=1)
    keep = (fronts > NO_FRONT / 2).all(axis=1)
    return estimate_vB(ts, fronts[keep], window=(100.0, 200.0)), time.time() - start


def test_criterion_01_oracle_equivalence():
    """200 random circuits on <= 6 qubits, depth <= 30: tableau matches the
    dense oracle within 1e-9 everywhere; runtime < 1 min."""
    start = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for trial in range(200):
        n = int(rng.integers(4, 7))
        layout = []
        for x in range(n // 2):
            layout += [sites.medium(x), sites.ancilla_m(x)]
        if n % 2:
            layout.append(sites.discard_slot())
        st, ds = paired_states(layout)
        st, ds = random_clifford_evolution(layout, int(rng.integers(10, 31)),
                                           rng, tableau=st, dense=ds)
        for r in range(1, n):
            for comb in itertools.combinations(range(n), r):
                part = [layout[k] for k in comb]
                worst = max(worst, abs(subsystem_entropy(st, part)
                                       - dense_entropy(ds, part)))
        for _ in range(4):
            i, j = rng.choice(n, size=2, replace=False)
            worst = max(worst, abs(bell_fidelity(st, layout[i], layout[j])
                                   - dense_bell_fidelity(ds, layout[i], layout[j])))
        stc, dsc = st.copy(), ds.copy()
        for _ in range(3):
            k = int(rng.integers(1, 3))
            idx = rng.choice(n, size=k, replace=False)
            letters = {layout[q]: int(rng.integers(1, 4)) for q in idx}
            outcome = int(rng.choice([1, -1]))
            _, p_t = postselect(stc, PauliString(letters), outcome)
            p_d = dense_postselect(dsc, letters, outcome)
            worst = max(worst, abs(p_t - p_d))
            if p_t == 0.0:
                break
    wall = time.time() - start
    report(1, worst < 1e-9 and wall < 60,
           f"200 circuits, worst deviation {worst:.2e} (tol 1e-9), {wall:.0f}s (< 60s)")


def test_criterion_02_markovian_limit():
    """Deterministic v_d=3 > c=2: B=0, I(A->Bob)=1, F_echo=1 for every one of
    1000 realizations; runtime < 5 min."""
    warmup()
    start = time.time()
    params = ModelParams(p=0.1, v_d=3, t1=50, t2=200, drift_mode="deterministic")
    bad = 0
    for s in range(1000):
        seed = int(np.random.default_rng((2, s)).integers(2**63))
        sch = build_schedule(params, seed=seed)
        rec = run_info(sch)
        b = backflow_record(sch)
        if not (b.backflow == 0 and rec.i_bob == 1 and rec.f_echo == 1.0):
            bad += 1
    wall = time.time() - start
    report(2, bad == 0 and wall < 300,
           f"1000/1000 realizations exact (B=0, I=1, F=1), {wall:.0f}s (< 300s)")


def test_criterion_03_identity_suite():
    """Per-realization channel identities at v_d=0.8: I = 1 + log2 F (echo),
    I_charlie = -I_bob, F_tele = 1/(4F), tolerance 1e-12; the explicit
    teleportation decoder's success probability equals F_echo within 1e-9."""
    warmup()
    params = ModelParams(p=0.1, v_d=0.8, t1=50, t2=200)
    worst = 0.0
    for s in range(1000):
        seed = int(np.random.default_rng((3, s)).integers(2**63))
        rec = run_info(build_schedule(params, seed=seed))
        worst = max(worst,
                    abs(rec.i_bob - (1 + math.log2(rec.f_echo))),
                    abs(rec.i_charlie + rec.i_bob),
                    abs(rec.f_tele - 1 / (4 * rec.f_echo)))
    worst_tp = 0.0
    for s in range(150):
        seed = int(np.random.default_rng((3, s)).integers(2**63))
        sch = build_schedule(params, seed=seed)
        rec = run_info(sch, with_decoder=True)
        sp, _ = simulate_teleportation_decoder(sch)
        worst_tp = max(worst_tp, abs(sp - rec.f_echo))
    report(3, worst < 1e-12 and worst_tp < 1e-9,
           f"identities exact over 1000 realizations (worst {worst:.1e}, tol 1e-12); "
           f"teleport success == F_echo over 150 (worst {worst_tp:.1e}, tol 1e-9)")


def test_criterion_04_butterfly_velocity(front_fit):
    """Front-position fit over t in [100, 200], 1000 realizations; < 10 min."""
    fit, wall = front_fit
    ok = abs(fit.v_b - 1.20) <= 0.05 and wall < 600
    report(4, ok, f"v_B = {fit.v_b:.3f} (target 1.20 +/- 0.05), "
                  f"D = {fit.diffusion:.3f}, n = {fit.n_realizations}, "
                  f"{wall:.0f}s (< 600s)")


def test_criterion_05_backflow_transition_location(open_sweep):
    """Collapse of the desk-scale sweep locates v* in [1.1, 1.3]; < 1 h."""
    sweep, wall = open_sweep
    res = collapse(curves_from_points(sweep.points), alpha=0.0)
    ok = 1.1 <= res.v_star <= 1.3 and wall < 3600
    report(5, ok, f"collapse v* = {res.v_star:.2f} (required within [1.1, 1.3]), "
                  f"quality {res.quality:.3f}, sweep {wall:.0f}s (< 3600s)")


def test_criterion_06_collapse_quality(open_sweep, truncated_sweep):
    """Quality ratios: best v* beats unscaled and v* +/- 0.3 by 3x; on
    truncated data the sqrt(T)-prefactor collapse beats the bare one by 3x."""
    res = collapse(curves_from_points(open_sweep[0].points), alpha=0.0)
    r_unscaled = res.quality_unscaled / res.quality
    idx_p = int(np.argmin(np.abs(res.grid - (res.v_star + 0.3))))
    idx_m = int(np.argmin(np.abs(res.grid - (res.v_star - 0.3))))
    r_plus = res.objective[idx_p] / res.quality
    r_minus = res.objective[idx_m] / res.quality
    tr = curves_from_points(truncated_sweep.points)
    good = collapse(tr, alpha=0.5)
    bare = collapse(tr, alpha=0.0)
    r_alpha = bare.quality / good.quality
    ok = r_unscaled >= 3 and r_plus >= 3 and r_minus >= 3 and r_alpha >= 3
    report(6, ok, f"open: unscaled/best = {r_unscaled:.1f}, "
                  f"(v*+0.3)/best = {r_plus:.1f}, (v*-0.3)/best = {r_minus:.1f}; "
                  f"truncated: alpha0/alpha1/2 = {r_alpha:.1f} "
                  f"(alpha=1/2 v* = {good.v_star:.2f}); all required >= 3")


def test_criterion_07_letter_ratio():
    """Conditional on support at T, letters are X/Y/Z at 1/3 +/- 0.02 each,
    and B = (2/3) n_I within 2 sigma."""
    warmup()
    params = ModelParams(p=0.1, v_d=0.5, t1=50, t2=150)
    rows = run_point("backflow", params, 777, 0, 7000, workers=1)
    letters = rows[:, 2].astype(int)
    qualifying = letters[letters > 0]
    n_q = qualifying.size
    freqs = [float((qualifying == v).sum()) / n_q for v in (1, 3, 2)]
    d = rows[:, 0] - (2.0 / 3.0) * rows[:, 1]
    se = d.std(ddof=1) / np.sqrt(d.size)
    ok = n_q >= 5000 and all(abs(f - 1 / 3) < 0.02 for f in freqs) \
        and abs(d.mean()) <= 2 * se
    report(7, ok, f"{n_q} qualifying realizations; X/Y/Z = "
                  f"{freqs[0]:.3f}/{freqs[1]:.3f}/{freqs[2]:.3f} (tol 1/3 +/- 0.02); "
                  f"|B - (2/3) n_I| = {abs(d.mean()):.4f} <= 2se = {2*se:.4f}")


def test_criterion_08_hydrodynamic_profile(front_fit):
    """Comoving density vs v_d fits the erf front-passage form with R^2 > 0.98
    and a v_B consistent with criterion 4 within 0.1; the two D estimators
    agree within 20 percent on cleanly seeded ensembles."""
    warmup()
    t_probe = 150
    params = ModelParams(p=0.1, v_d=0.0, t1=None, t2=160)
    v_ds = [round(v, 10) for v in np.arange(0.0, 2.6001, 0.2)]
    pts = run_hydro_sweep(params, v_ds, t_probe, 400, 881, workers=1)
    fit = fit_erf_profile(np.array([q["v_d"] for q in pts]),
                          np.array([q["density"] for q in pts]), t_probe)
    # D cross-estimator on origin-seeded ensembles at later times
    ts = np.arange(150, 401, 5)
    fronts = run_front_ensemble(params.with_(t2=400), ts, 1200, 882, workers=1,
                                no_impurity=True)
    slope_fit = estimate_vB(ts, fronts, window=(200.0, 400.0))
    pts2 = run_hydro_sweep(params.with_(t2=360),
                           [round(v, 10) for v in np.arange(0.6, 1.9001, 0.1)],
                           350, 800, 883, workers=1, no_impurity=True)
    prof2 = fit_erf_profile(np.array([q["v_d"] for q in pts2]),
                            np.array([q["density"] for q in pts2]), 350)
    d_rel = abs(prof2.diffusion - slope_fit.diffusion) / slope_fit.diffusion
    ref_vb = front_fit[0].v_b
    ok = fit.r_squared > 0.98 and abs(fit.v_b - ref_vb) < 0.1 and d_rel < 0.2
    report(8, ok, f"R^2 = {fit.r_squared:.4f} (> 0.98), profile v_B = {fit.v_b:.3f} "
                  f"vs front v_B = {ref_vb:.3f} (|diff| < 0.1); "
                  f"D cross-check {prof2.diffusion:.3f} vs {slope_fit.diffusion:.3f} "
                  f"({100*d_rel:.0f}% < 20%)")


def test_criterion_09_phase2d():
    """(a) Markovian-limit critical swap rate within 0.206 +/- 0.05;
    (b) subsonic drift percolates for every p <= 0.9.  Runtime < 2 h."""
    warmup()
    start = time.time()
    base = ModelParams(p=0.2, v_d=4, t1=None, t2=300, n_impurity=32,
                       drift_mode="deterministic")
    p_c, _ = bisect_pc(base, 0.05, 0.5, iterations=9, realizations=200,
                       master_seed=9100, survival_target=0.4)
    base_b = ModelParams(p=0.2, v_d=0.6, t1=None, t2=300, n_impurity=32)
    grid = [{"p": round(p, 10)} for p in np.arange(0.1, 0.9001, 0.1)]
    pts = run_phase2d_points(base_b, grid, 200, master_seed=9200, workers=1)
    min_weight = min(q["N_I_mean"] for q in pts)
    wall = time.time() - start
    ok = abs(p_c - 0.206) <= 0.05 and min_weight > 0 and wall < 7200
    report(9, ok, f"(a) p_c = {p_c:.3f} (0.206 +/- 0.05); "
                  f"(b) subsonic min N_I(T) over p <= 0.9: {min_weight:.3f} > 0; "
                  f"{wall:.0f}s (< 7200s)")


def test_criterion_10_coherent_information_transition():
    """1 - I is zero within 2 sigma for v_d >= 2, exceeds 0.1 for v_d <= 0.8,
    and the 1 - I curves collapse at criterion-6 quality."""
    warmup()
    params = ModelParams(p=0.1, v_d=1.0, t1=100, t2=125)
    vds = V_GRID + [2.0, 2.2]
    res = run_info_sweep(params, vds, T2_SET, 400, SEED_SWEEP_INFO,
                         out_dir=None, workers=1)
    markov_ok = all(pt["one_minus_I"] <= 2 * pt["I_stderr"]
                    for pt in res.points if pt["v_d"] >= 2.0)
    slow_ok = all(pt["one_minus_I"] > 0.1
                  for pt in res.points if pt["v_d"] <= 0.8)
    cl = collapse(curves_from_points(res.points, key="one_minus_I",
                                     err="I_stderr"), alpha=0.0)
    r_unscaled = cl.quality_unscaled / cl.quality
    idx_p = int(np.argmin(np.abs(cl.grid - (cl.v_star + 0.3))))
    idx_m = int(np.argmin(np.abs(cl.grid - (cl.v_star - 0.3))))
    ratios_ok = (r_unscaled >= 3 and cl.objective[idx_p] >= 3 * cl.quality
                 and cl.objective[idx_m] >= 3 * cl.quality)
    ok = markov_ok and slow_ok and ratios_ok and 1.1 <= cl.v_star <= 1.3
    report(10, ok, f"1-I zero within 2 sigma at v_d >= 2: {markov_ok}; "
                   f"> 0.1 at v_d <= 0.8: {slow_ok}; collapse v* = {cl.v_star:.2f}, "
                   f"unscaled ratio {r_unscaled:.1f} (>= 3)")


def test_criterion_11_determinism(tmp_path):
    """Same seed, different worker counts: byte-identical CSVs."""
    warmup()
    params = ModelParams(p=0.15, v_d=1.0, t1=30, t2=40)
    blobs = []
    for workers in (1, 2, 3):
        out = tmp_path / f"w{workers}"
        run_backflow_sweep(params, [0.9, 1.2, 1.5], [40, 80], 90,
                           master_seed=606, out_dir=out, workers=workers)
        run_info_sweep(params, [0.9, 1.5], [40], 60, master_seed=607,
                       out_dir=out, workers=workers)
        blobs.append({f.name: f.read_bytes()
                      for f in sorted(out.iterdir()) if f.suffix == ".csv"})
    ok = blobs[0] == blobs[1] == blobs[2] and len(blobs[0]) == 6
    report(11, ok, f"{len(blobs[0])} CSVs byte-identical across worker counts 1/2/3")
