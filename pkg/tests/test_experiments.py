import json
import math
import random

import numpy as np
import pytest

from modxl import ArrayGeometry
from modxl.beampattern import half_power_distance
from modxl.config import ResolutionSpec, run_config_from_dict
from modxl.experiments import (multiuser_rows, pattern_sweep_rows, preset_config,
                               resolution_report_dict, run, summarize_multiuser)
from test_config_cli import SMALL_MULTIUSER


def read_csv(path):
    header, body = [], []
    for line in open(path).read().splitlines():
        (header if line.startswith("# ") else body).append(line)
    return json.loads("\n".join(l[2:] for l in header)), body


@pytest.mark.parametrize("name", ["fig3", "fig4", "fig6", "fig7"])
def test_pattern_presets_run(name, tmp_path):
    out = run(preset_config(name), str(tmp_path / "x.csv"))
    meta, body = read_csv(out)
    cfg = preset_config(name)
    assert meta["config"]["pattern"]["kind"] == cfg.pattern.kind
    assert len(body) - 1 == len(cfg.pattern.grid) * len(cfg.pattern.variants)
    gains = np.array([float(l.split(",")[-1]) for l in body[1:]])
    assert np.all((gains >= 0) & (gains <= 1 + 1e-9))


def test_map_preset_shape():
    cfg = preset_config("fig5", pattern={
        "kind": "nf_nf_map", "focus_r_m": 200.0, "variants": ["exact", "closed_form"],
        "grid": {"start": -0.1, "stop": 0.1, "points": 5},
        "r_grid": {"start": 150.0, "stop": 250.0, "points": 3}})
    cols, rows = pattern_sweep_rows(cfg)
    assert cols == ["r_m", "theta_rad", "variant", "gain"]
    assert len(rows) == 5 * 3 * 2
    focus = [r for r in rows if r[2] == "exact" and r[0] == 200.0 and r[1] == 0.0]
    assert focus[0][3] == pytest.approx(1.0)


def test_single_point_grid():
    cfg = preset_config("fig7", pattern={
        "kind": "nf_nf_distance", "focus_r_m": 200.0,
        "grid": {"start": 0.0, "stop": 0.0, "points": 1}, "variants": ["exact"]})
    cols, rows = pattern_sweep_rows(cfg)
    assert cols == ["delta_r_m", "variant", "gain"]
    assert len(rows) == 1 and rows[0][2] == pytest.approx(1.0)


def test_multiuser_header_and_summary(tmp_path):
    cfg = run_config_from_dict(dict(SMALL_MULTIUSER,
                                    sweep={"variable": "pt_db", "values": [70, 80]}))
    csv_path, summary_path = run(cfg, str(tmp_path / "m.csv"))
    meta, body = read_csv(csv_path)
    assert run_config_from_dict(meta["config"]).scenario == cfg.scenario
    assert len(body) - 1 == 2 * 2 * 2
    summary = json.load(open(summary_path))["summary"]
    assert [s["n"] for s in summary] == [2] * 4
    assert {s["sweep_value"] for s in summary} == {70.0, 80.0}


def test_summary_is_independent_of_seed_order():
    cfg = run_config_from_dict(dict(SMALL_MULTIUSER, seeds=[0, 1, 2, 3]))
    rows = multiuser_rows(cfg)
    shuffled = rows[:]
    random.Random(1).shuffle(shuffled)
    assert summarize_multiuser(rows) == summarize_multiuser(shuffled)
    rev = run_config_from_dict(dict(SMALL_MULTIUSER, seeds=[3, 2, 1, 0]))
    assert summarize_multiuser(multiuser_rows(rev)) == summarize_multiuser(rows)


def test_threads_do_not_change_results():
    one = run_config_from_dict(dict(SMALL_MULTIUSER, seeds=[0, 1, 2], threads=1))
    many = run_config_from_dict(dict(SMALL_MULTIUSER, seeds=[0, 1, 2], threads=3))
    assert multiuser_rows(one) == multiuser_rows(many)


def test_architectures_share_user_draws():
    cfg = run_config_from_dict(dict(SMALL_MULTIUSER,
                                    architectures=["modular", "collocated"],
                                    grouping=["random"], seeds=[4]))
    rows = multiuser_rows(cfg)
    assert {r[3] for r in rows} == {"modular", "collocated"}
    assert len({r[1] for r in rows}) == 1


def test_resolution_report_singular_direction():
    cfg = preset_config("resolution")
    cfg.resolution = ResolutionSpec(focus_r_m=(200.0,), focus_theta_rad=(0.0, math.pi / 2))
    entries = resolution_report_dict(cfg)["entries"]
    assert entries[0]["singular_direction"] is False
    assert "dist_res_plus_m" in entries[0]
    assert entries[1]["singular_direction"] is True
    assert "dist_res_plus_m" not in entries[1]


def test_r_hp_scales_with_squared_aperture():
    g = ArrayGeometry(16, 4, 13, 0.1256, 0.0628)
    big = ArrayGeometry(32, 4, 13, 0.1256, 0.0628)  # about twice the aperture
    ratio = half_power_distance(big, 0.3) / half_power_distance(g, 0.3)
    assert ratio == pytest.approx((32 / 16) ** 2)
    assert half_power_distance(g, math.pi / 2) == pytest.approx(0.0, abs=1e-12)


def test_resolution_report_file(tmp_path):
    out = run(preset_config("resolution"), str(tmp_path / "r.json"))
    doc = json.load(open(out))
    assert doc["config"]["experiment"] == "resolution"
    for e in doc["entries"]:
        assert e["r_hp_rel_err"] < 0.05
