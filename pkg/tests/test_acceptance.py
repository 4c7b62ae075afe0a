"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from modxl import (CSI, ArrayGeometry, BeamformerSpec, DiskLayout, PolarLocation,
                   ScenarioConfig, Scheme, brute_force_grouping, combiner,
                   dirichlet_kernel, distance_resolution, evaluate_grouping,
                   fresnel, greedy_grouping, half_power_distance, pattern_ff_ff,
                   perfect_csi_sinr, random_grouping, sample_scenario, sinr)
from modxl.beampattern import (detect_grating_lobes, local_maxima, nf_ff_curve,
                               nf_nf_curve, numeric_distance_resolution)
from modxl.config import run_config_from_dict
from modxl.experiments import _numeric_r_hp, multiuser_rows, preset_config

FIG3 = ArrayGeometry(4, 4, 13, 0.1256, 0.0628)
SEC5 = ArrayGeometry(32, 4, 13, 0.1256, 0.0628)
FOCUS = PolarLocation(200.0, 0.0)
DELTA = np.linspace(-2.0, 2.0, 4001)
MMSE_NF = BeamformerSpec(Scheme.MMSE, CSI.NEAR_FIELD)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def paired_margin(a, b):
    """Mean of the paired difference ``a - b`` in units of its standard error."""
    diff = np.asarray(a) - np.asarray(b)
    se = diff.std(ddof=1) / math.sqrt(diff.size)
    return diff.mean(), se, diff.mean() / se


def test_criterion_01_product_form_matches_double_sum(report):
    y = FIG3.positions / FIG3.wavelength
    ref = np.abs(np.exp(2j * np.pi * np.outer(DELTA, y)).sum(axis=1)) / FIG3.size
    t0 = time.perf_counter()
    got = pattern_ff_ff(FIG3, DELTA)
    dt = time.perf_counter() - t0
    err = float(np.max(np.abs(got - ref)))
    report(1, err <= 1e-12 and dt < 1.0,
           f"max abs error {err:.2e} (<= 1e-12), runtime {dt:.4f} s (< 1 s)")


def test_criterion_02_collocated_degeneracy(report):
    g = ArrayGeometry(4, 4, 4, 0.1256, 0.0628)
    err = float(np.max(np.abs(pattern_ff_ff(g, DELTA)
                              - np.abs(dirichlet_kernel(16, 0.5, DELTA)))))
    report(2, err <= 1e-12, f"max abs error vs |H_16,0.5| {err:.2e} (<= 1e-12)")


def test_criterion_03_grating_lobe_geometry(report):
    step = DELTA[1] - DELTA[0]
    pos, weighted, _ = detect_grating_lobes(FIG3, DELTA)
    spacing = 1.0 / (FIG3.Gamma * FIG3.d_bar)
    expected = np.array([i * spacing for i in range(-12, 13) if i != 0])
    ok = len(pos) == len(expected)
    loc_err = float(np.max(np.abs(np.sort(pos) - expected))) if ok else math.inf
    h_err = float(np.max(np.abs(weighted - 1.0))) if ok else math.inf
    ok = ok and loc_err <= step and h_err <= 1e-3
    coll = FIG3.collocated()
    cpos, cheight = local_maxima(pattern_ff_ff(coll, DELTA), DELTA)
    side = cheight[np.abs(cpos) > 1.0 / (coll.N * coll.M * coll.d_bar)]
    worst_side = float(side.max()) if side.size else 0.0
    ok = ok and worst_side < 0.5
    report(3, ok, f"{len(pos)} lobes, max offset {loc_err / step:.3f} grid steps, "
                  f"weighted height error {h_err:.1e}, collocated max sidelobe "
                  f"{worst_side:.3f} (< 0.5)")


def _null_to_null(g):
    first = 1.0 / (g.N * g.Gamma * g.d_bar)
    f = lambda x: float(pattern_ff_ff(g, x))
    nulls = [minimize_scalar(f, bounds=sorted((s * 0.5 * first, s * 1.5 * first)),
                             method="bounded", options={"xatol": 1e-12}).x
             for s in (-1, 1)]
    return nulls[1] - nulls[0], 2 * first


def test_criterion_04_angular_resolution(report):
    parts, ok = [], True
    for name, g in (("fig3", FIG3), ("sec5", SEC5)):
        width, expect = _null_to_null(g)
        rel = abs(width - expect) / expect
        ok &= rel <= 0.01
        parts.append(f"{name} width {width:.6f} vs {expect:.6f} (rel {rel:.1e})")
    report(4, ok, "; ".join(parts) + " (<= 1%)")


def test_criterion_05_model_consistency(report):
    theta = np.linspace(-math.pi / 3, math.pi / 3, 4001)
    r = np.full_like(theta, 200.0)
    worst, parts = 0.0, []
    for label, fn in (("nf-ff", lambda v: nf_ff_curve(SEC5, 0.0, r, theta, v)),
                      ("nf-nf", lambda v: nf_nf_curve(SEC5, FOCUS, r, theta, v))):
        c = {v: fn(v) for v in ("exact", "distinct", "common")}
        dev = max(float(np.max(np.abs(c[a] - c[b])))
                  for a, b in (("exact", "distinct"), ("exact", "common"),
                               ("distinct", "common")))
        worst = max(worst, dev)
        parts.append(f"{label} {dev:.4f}")
    report(5, worst <= 0.05,
           f"max pairwise deviation exact/distinct/common: {', '.join(parts)} (<= 0.05)")


def test_criterion_06_fresnel_closed_form(report):
    p6, p7 = preset_config("fig6").pattern, preset_config("fig7").pattern
    grid6 = np.asarray(p6.grid)
    th6 = np.arcsin(FOCUS.sin_theta + grid6)
    r6 = np.full_like(grid6, p6.observe_r_m)
    dev6 = float(np.max(np.abs(nf_nf_curve(SEC5, FOCUS, r6, th6, "closed_form")
                               - nf_nf_curve(SEC5, FOCUS, r6, th6, "common"))))
    r7 = FOCUS.r + np.asarray(p7.grid)
    th7 = np.zeros_like(r7)
    dev7 = float(np.max(np.abs(nf_nf_curve(SEC5, FOCUS, r7, th7, "closed_form")
                               - nf_nf_curve(SEC5, FOCUS, r7, th7, "common"))))
    # same distance ring r = r' cos^2(theta) / cos^2(theta')
    th_ring = np.linspace(-1.2, 1.2, 2001)
    r_ring = FOCUS.r * np.cos(th_ring) ** 2
    ring = float(np.max(np.abs(
        nf_nf_curve(SEC5, FOCUS, r_ring, th_ring, "closed_form")
        - pattern_ff_ff(SEC5, np.sin(th_ring) - FOCUS.sin_theta))))
    ok = dev6 <= 1e-2 and dev7 <= 1e-2 and ring <= 1e-12
    report(6, ok, f"closed form vs common: angle grid {dev6:.4f}, distance grid "
                  f"{dev7:.4f} (<= 1e-2); ring branch {ring:.1e}")


def test_criterion_07_half_power_distance(report):
    parts, ok = [], True
    for th in (0.0, math.pi / 6, math.pi / 3):
        analytic = half_power_distance(SEC5, th)
        numeric = _numeric_r_hp(SEC5, th)
        rel = abs(numeric - analytic) / analytic
        ok &= rel <= 0.02
        parts.append(f"theta'={th:.3f}: numeric {numeric:.2f} m vs {analytic:.2f} m "
                     f"(rel {rel:.2%})")
    const = abs(fresnel(1.95) / 1.95)
    ok &= abs(const - 0.5) <= 0.005
    report(7, ok, "; ".join(parts) + f" (<= 2%); |F(1.95)/1.95| = {const:.5f}")


def test_criterion_08_distance_resolution(report):
    parts, ok = [], True
    for rp in (100.0, 200.0, 400.0):
        focus = PolarLocation(rp, 0.0)
        plus, minus = distance_resolution(SEC5, focus)
        nplus, nminus = numeric_distance_resolution(SEC5, focus, "exact", 1200)
        ep, em = abs(plus - nplus) / nplus, abs(minus - nminus) / nminus
        ok &= ep <= 0.05 and em <= 0.05
        parts.append(f"r'={rp:.0f}: +{ep:.2%} -{em:.2%}")
    r_hp = half_power_distance(SEC5, 0.0)
    probes = r_hp * np.array([0.5, 0.99, 1.0, 1.0 + 1e-12, 2.0, 10.0])
    branch = all(math.isinf(distance_resolution(SEC5, PolarLocation(rp, 0.0))[0])
                 == (rp >= r_hp) for rp in probes)
    # near focus both sides shrink like r'^2 / r_hp; far away both grow without bound
    small = [distance_resolution(SEC5, PolarLocation(rp, 0.0)) for rp in (1e-2, 1e-3)]
    near_ok = all(abs(p * r_hp / rp ** 2 - 1) < 1e-4 and abs(m * r_hp / rp ** 2 - 1) < 1e-4
                  for (p, m), rp in zip(small, (1e-2, 1e-3)))
    far = [distance_resolution(SEC5, PolarLocation(rp, 0.0)) for rp in (1e4, 1e6, 1e8)]
    far_ok = all(math.isinf(p) for p, _ in far) and far[0][1] < far[1][1] < far[2][1] \
        and far[2][1] > 1e7
    far_num = math.isinf(numeric_distance_resolution(
        SEC5, PolarLocation(2 * r_hp, 0.0), "exact", 400)[0])
    ok &= branch and near_ok and far_ok and far_num
    report(8, ok, f"rel errors {', '.join(parts)} (<= 5%); inf branch {branch}; "
                  f"limits r'->0 {near_ok}, r'->inf {far_ok and far_num}")


def test_criterion_09_beamformer_identities(report):
    ident = zf_res = 0.0
    order_ok = True
    for i in range(200):
        cfg = ScenarioConfig(K=2, Q=1, L=3, geometry=SEC5, seed=10_000 + i,
                             layout=DiskLayout(200.0, 20.0))
        ch = sample_scenario(cfg)
        H = np.array([c.h_nf for c in ch])
        P = cfg.powers()
        for k in range(2):
            s = {}
            for scheme in Scheme:
                v = combiner(scheme, k, H, P)
                s[scheme] = sinr(k, v, H, P)
                ref = perfect_csi_sinr(scheme, k, H, P)
                ident = max(ident, abs(s[scheme] - ref) / ref)
                if scheme is Scheme.ZF:
                    zf_res = max(zf_res, abs(np.vdot(v, H[1 - k])) / np.linalg.norm(H[1 - k]))
            order_ok &= s[Scheme.MMSE] >= max(s[Scheme.MRC], s[Scheme.ZF]) * (1 - 1e-12)
    ok = ident <= 1e-8 and zf_res <= 1e-9 and order_ok
    report(9, ok, f"closed-form SINR rel error {ident:.1e} (<= 1e-8), ZF residual "
                  f"{zf_res:.1e} (<= 1e-9), MMSE >= max(MRC, ZF) on all: {order_ok}")


def test_criterion_10_greedy_beats_random(report):
    t0 = time.perf_counter()
    greedy, rand = [], []
    for seed in range(20):
        cfg = ScenarioConfig(geometry=SEC5, seed=seed)
        ch, P = sample_scenario(cfg), cfg.powers()
        greedy.append(greedy_grouping(ch, P, cfg.Q, MMSE_NF, seed).sum_rate)
        rand.append(evaluate_grouping(random_grouping(cfg.K, cfg.Q, seed),
                                      ch, P, MMSE_NF).sum_rate)
    dt = time.perf_counter() - t0
    mean, se, z = paired_margin(greedy, rand)
    report(10, z >= 3 and dt <= 300,
           f"greedy {np.mean(greedy):.2f} vs random {np.mean(rand):.2f} bps/Hz, "
           f"paired diff {mean:.2f} = {z:.1f} SE (>= 3), runtime {dt:.0f} s (<= 300 s)")


def test_criterion_11_architecture_and_csi(report):
    cfg = run_config_from_dict({
        "experiment": "multiuser",
        "geometry": {"N": 32, "M": 4, "gamma": 13, "d_m": 0.0628, "wavelength_m": 0.1256},
        "scenario": {},
        "beamformers": [{"scheme": "mmse", "csi": "nf"}, {"scheme": "mmse", "csi": "ff"}],
        "grouping": ["greedy"], "architectures": ["modular", "collocated"],
        "sweep": {"variable": "r_max_m", "values": [1, 2, 5]},
        "seeds": list(range(20)), "threads": 4})
    rows = multiuser_rows(cfg)

    def series(value, arch, csi):
        sel = sorted((r[2], r[7]) for r in rows
                     if r[0] == value and r[3] == arch and r[6] == csi)
        return [x for _, x in sel]

    parts, ok = [], True
    for value in (1.0, 2.0, 5.0):
        _, _, z_arch = paired_margin(series(value, "modular", "nf"),
                                     series(value, "collocated", "nf"))
        _, _, z_csi = paired_margin(series(value, "modular", "nf"),
                                    series(value, "modular", "ff"))
        ok &= z_arch >= 2 and z_csi >= 3
        parts.append(f"r_max={value:g}: modular-collocated {z_arch:.1f} SE, "
                     f"nf-ff {z_csi:.1f} SE")
    report(11, ok, "; ".join(parts) + " (>= 2 SE and >= 3 SE)")


def test_criterion_12_greedy_vs_optimal(report):
    worst, over, slowest = math.inf, 0, 0.0
    for i in range(30):
        cfg = ScenarioConfig(K=6, Q=3, geometry=SEC5, seed=20_000 + i,
                             layout=DiskLayout(200.0, 5.0))
        ch, P = sample_scenario(cfg), cfg.powers()
        g = greedy_grouping(ch, P, 3, MMSE_NF, seed=i).sum_rate
        t0 = time.perf_counter()
        opt = brute_force_grouping(ch, P, 3, MMSE_NF).sum_rate
        slowest = max(slowest, time.perf_counter() - t0)
        over += g > opt * (1 + 1e-12)
        worst = min(worst, g / opt)
    ok = worst >= 0.8 and over == 0 and slowest <= 60
    report(12, ok, f"min greedy/optimal {worst:.4f} (>= 0.8), greedy above optimum "
                   f"{over}/30, slowest oracle {slowest:.2f} s (<= 60 s)")
