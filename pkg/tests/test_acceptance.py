"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
lines; every tolerance comes from the frozen thresholds file.
"""

import time

import numpy as np
import pytest

import opuckit as ok
from opuckit.experiments import ExperimentSpec, load_thresholds, run

THR = load_thresholds()
GRID = ok.CircleGrid(THR["orthonormality"]["grid_log2"])


def report(criterion: str, ok_flag: bool, detail: str):
    print(f"{'PASS' if ok_flag else 'FAIL'} {criterion}: {detail}")
    assert ok_flag, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def family_systems():
    cfg = THR["orthonormality"]
    out = {}
    for beta in cfg["betas"]:
        w = ok.make_weight("fisher_hartwig", {"beta": beta}, GRID)
        out[f"fisher_hartwig(beta={beta})"] = (w, ok.system_from_weight(w, 512))
    wb = ok.make_weight("bernstein_szego", {"a": cfg["bs_a"]}, GRID)
    out[f"bernstein_szego(a={cfg['bs_a']})"] = (wb, ok.system_from_weight(wb, 512))
    return out


def test_criterion_01_orthonormality(family_systems):
    cfg = THR["orthonormality"]
    worst, slowest = 0.0, 0.0
    for name, (w, sys) in family_systems.items():
        t0 = time.perf_counter()
        dev = float(np.max(np.abs(ok.gram_matrix(sys, cfg["nmax"]) - np.eye(cfg["nmax"] + 1))))
        elapsed = time.perf_counter() - t0
        worst = max(worst, dev)
        slowest = max(slowest, elapsed)
    ok_flag = worst < cfg["max_gram_deviation"] and slowest < cfg["max_seconds_per_family"]
    report("criterion 1 (orthonormality oracle)", ok_flag,
           f"max Gram deviation {worst:.3e} (tol {cfg['max_gram_deviation']}), "
           f"slowest family {slowest:.2f}s (cap {cfg['max_seconds_per_family']}s)")


def test_criterion_02_recursion_vs_gram_schmidt(family_systems):
    cfg = THR["recursion_oracle"]
    worst = 0.0
    for name, (w, sys) in family_systems.items():
        oracle = ok.gram_schmidt_monic(w.moments(cfg["nmax"]), cfg["nmax"])
        dev = float(np.max(np.abs(oracle - sys.monic[: cfg["nmax"] + 1, : cfg["nmax"] + 1])))
        worst = max(worst, dev)
    report("criterion 2 (recursion vs Gram-Schmidt)", worst < cfg["tol"],
           f"max monic coefficient deviation {worst:.3e} (tol {cfg['tol']}, n <= {cfg['nmax']})")


def test_criterion_03_fisher_hartwig_a2_laws():
    rec = run(ExperimentSpec(name="a2_scaling", grid_log2=GRID.log2_size))
    c = rec.checks
    detail = (f"slope {c['small_beta_slope']['value']:.4f} (2 +/- 0.15); "
              f"band {c['blowup_band']['value']} in {c['blowup_band']['threshold']}; "
              f"subarc rel err {c['subarc_identity']['value']:.2e} (tol 0.02)")
    report("criterion 3 (Fisher-Hartwig A2 laws)", rec.passed and not rec.flags, detail)


def test_criterion_04_growth_trichotomy():
    rec = run(ExperimentSpec(name="fh_growth", grid_log2=GRID.log2_size))
    devs = {k: abs(f["exponent"] - f["predicted_exponent"])
            for k, f in rec.fits.items()}
    detail = (f"max exponent deviation {max(devs.values()):.4f} (tol 0.05); "
              f"critical pair: {rec.checks['critical_log_class']['value']}; "
              f"runtime {rec.wall_time:.1f}s (cap 300s)")
    report("criterion 4 (growth trichotomy)", rec.passed and not rec.flags, detail)


def test_criterion_05_entropy_limit():
    rec = run(ExperimentSpec(name="entropy_limit", grid_log2=GRID.log2_size))
    c = rec.checks
    gaps = [c[k]["value"] for k in c if k.startswith("fh_gap")]
    detail = (f"constant |E| {c['constant_zero']['value']:.2e} (tol 1e-12); "
              f"max FH gap at n=512 {max(gaps):.2e} (tol 0.05); "
              f"BS gap {c['bs_gap']['value']:.2e} (tol 1e-6)")
    report("criterion 5 (entropy limit)", rec.passed and not rec.flags, detail)


def test_criterion_06_strong_szego():
    rec = run(ExperimentSpec(name="strong_szego", grid_log2=GRID.log2_size))
    c = rec.checks
    detail = (f"errors {['%.4f' % e for e in c['fh_decreasing']['value']]} decreasing; "
              f"final {c['fh_final']['value']:.4f} (tol 0.05); "
              f"BS {c['bs_exact']['value']:.2e} (tol 1e-8)")
    report("criterion 6 (strong Szego convergence)", rec.passed and not rec.flags, detail)


def test_criterion_07_normalization_sandwich(family_systems):
    cfg = THR["normalization_sandwich"]
    ok_flag = True
    worst_hi, worst_lo = 0.0, 0.0
    for name, (w, sys) in family_systems.items():
        inv_kappa = 1.0 / sys.kappa
        lower = float(np.exp(0.5 * np.mean(np.log(w.values))))
        worst_hi = max(worst_hi, float(np.max(inv_kappa)) - 1.0)
        worst_lo = max(worst_lo, lower - float(np.min(inv_kappa)))
        ok_flag = ok_flag and np.all(inv_kappa <= 1.0 + cfg["upper_slack"])
        ok_flag = ok_flag and np.all(inv_kappa >= lower - cfg["lower_slack"])
    report("criterion 7 (normalization sandwich)", bool(ok_flag),
           f"max(1/k_n - 1) = {worst_hi:.2e} (slack {cfg['upper_slack']}), "
           f"max(D0 - 1/k_n) = {worst_lo:.2e} (slack {cfg['lower_slack']}), all n <= 512")


def test_criterion_08_continuity_law():
    rec = run(ExperimentSpec(name="continuity", grid_log2=GRID.log2_size))
    c = rec.checks
    detail = (f"slope[cos] {c['slope[cos]']['value']:.4f} (1 +/- 0.1); "
              f"slope[log|1-xi|] {c['slope[log_singular]']['value']:.4f} (1 +/- 0.15); "
              f"p=2 exact band norms, band 64")
    report("criterion 8 (weight-continuity law)", rec.passed and not rec.flags, detail)


def test_criterion_09_q_algebra():
    cfg = THR["q_algebra"]
    w = ok.make_weight("fisher_hartwig", {"beta": cfg["beta"]}, GRID)
    sys = ok.system_from_weight(w, cfg["n"])
    n = cfg["n"]
    worst_fixed = 0.0
    for p in cfg["fixed_point_ps"]:
        q = ok.build_Q(w, p, n)
        zeta = w.values ** (1.0 / p) * ok.poly_values(GRID, sys.monic_coeffs(n))
        resid = zeta - q.apply(zeta) - w.values ** (1.0 / p) * np.exp(1j * n * GRID.nodes)
        worst_fixed = max(worst_fixed, float(np.max(np.abs(resid))))

    q2 = ok.build_Q(w, 2.0, n)
    rng = np.random.default_rng(0)
    worst_anti = 0.0
    for _ in range(4):
        f = rng.standard_normal(GRID.size) + 1j * rng.standard_normal(GRID.size)
        g = rng.standard_normal(GRID.size) + 1j * rng.standard_normal(GRID.size)
        ip = lambda a, b: np.mean(a * np.conj(b))
        scale = np.sqrt(abs(ip(f, f)) * abs(ip(g, g)))
        worst_anti = max(worst_anti, abs(ip(q2.apply(f), g) + ip(f, q2.apply(g))) / scale)

    M = ok.compress_band(q2, cfg["resolvent_band"])
    resolvent = 1.0 / np.linalg.svd(np.eye(len(M)) - M, compute_uv=False)[-1]

    ok_flag = (worst_fixed < cfg["fixed_point_tol"]
               and worst_anti < cfg["antisymmetry_tol"]
               and resolvent <= 1.0 + cfg["resolvent_slack"])
    report("criterion 9 (Q algebra)", bool(ok_flag),
           f"fixed point {worst_fixed:.2e} (tol 1e-6), antisymmetry {worst_anti:.2e} "
           f"(tol 1e-8), ||(I-Q)^-1|| = {resolvent:.12f} (<= 1 + 1e-8)")


def test_criterion_10_clark_duality():
    rec = run(ExperimentSpec(name="clark_duality", grid_log2=GRID.log2_size))
    c = rec.checks
    detail = (f"mass defects: smooth {c['mass_smooth']['value']:.1e}, "
              f"FH non-inverting {c['mass_fh_noninverting']['value']:.1e} (tol 1e-6); "
              f"dual A2 ratio cap {c['dual_a2_bounded']['value']:.3f} (<= 1.5), monotone; "
              f"dual-of-dual {c['dual_of_dual']['value']:.1e}; "
              f"psi-Gram {c['psi_gram_dual']['value']:.1e} (tol 1e-6); "
              f"K-invariance masked {c['k_invariance_masked']['value']:.2e} (tol 1e-4)")
    report("criterion 10 (Clark/duality)", rec.passed and not rec.flags, detail)


def test_criterion_11_projection_uniformity():
    rec = run(ExperimentSpec(name="projection_bound", grid_log2=GRID.log2_size))
    c = rec.checks["max_over_min"]
    probes = [r["probe"] for r in rec.rows]
    report("criterion 11 (projection uniformity surrogate)",
           rec.passed and not rec.flags,
           f"probes at p=2.1, n in 64..512: {['%.5f' % v for v in probes]}, "
           f"max/min {c['value']:.5f} (<= {c['threshold']})")


def test_criterion_12_pcr_upper_trend():
    rec = run(ExperimentSpec(name="pcr_upper_trend", grid_log2=GRID.log2_size))
    c = rec.checks["pstar_exponent"]
    spots = {k: v["value"] for k, v in rec.checks.items() if k.startswith("spot")}
    report("criterion 12 (p_cr upper trend)", rec.passed and not rec.flags,
           f"divergent-part exponent {c['value']:.4f} (-0.5 +/- 0.1, raw "
           f"{rec.fits['pstar_trend']['raw_exponent']:.4f}); spot thresholds {spots}")
