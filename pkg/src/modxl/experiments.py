"""Experiment runners that write plot-ready CSV / JSON files.

Every output embeds the fully resolved configuration: CSV files start with
``#``-prefixed lines holding the config JSON, JSON files carry it under
``"config"``.
"""

from __future__ import annotations

import copy
import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import beampattern as pat
from .channel import DiskLayout, LineLayout, ScenarioConfig, sample_paths, synth_channels
from .config import RunConfig, run_config_from_dict, run_config_to_dict
from .errors import ConfigError
from .geometry import ArrayGeometry, PolarLocation

__all__ = [
    "PRESETS",
    "preset_config",
    "pattern_sweep_rows",
    "run_pattern_sweep",
    "resolution_report_dict",
    "run_resolution_report",
    "multiuser_rows",
    "summarize_multiuser",
    "run_multiuser_experiment",
    "run",
]

_FIG_GEOMETRY = {"N": 32, "M": 4, "gamma": 13, "d_m": 0.0628,
                 "wavelength_m": 0.1256}

PRESETS = {
    "fig3": {"experiment": "pattern",
             "geometry": {"N": 4, "M": 4, "gamma": 13, "d_m": 0.0628,
                          "wavelength_m": 0.1256},
             "pattern": {"kind": "ff_ff",
                         "grid": {"start": -2.0, "stop": 2.0, "points": 4001}}},
    "fig4": {"experiment": "pattern", "geometry": _FIG_GEOMETRY,
             "pattern": {"kind": "nf_ff", "focus_r_m": 200.0,
                         "focus_theta_rad": 0.0, "observe_r_m": 200.0,
                         "grid": {"start": -math.pi / 3, "stop": math.pi / 3,
                                  "points": 4001}}},
    "fig5": {"experiment": "pattern", "geometry": _FIG_GEOMETRY,
             "pattern": {"kind": "nf_nf_map", "focus_r_m": 200.0,
                         "variants": ["exact"],
                         "grid": {"start": -math.pi / 6, "stop": math.pi / 6,
                                  "points": 401},
                         "r_grid": {"start": 50.0, "stop": 400.0,
                                    "points": 141}}},
    "fig6": {"experiment": "pattern", "geometry": _FIG_GEOMETRY,
             "pattern": {"kind": "nf_nf_angle", "focus_r_m": 200.0,
                         "observe_r_m": 200.0,
                         "grid": {"start": -1.0, "stop": 1.0, "points": 4001}}},
    "fig7": {"experiment": "pattern", "geometry": _FIG_GEOMETRY,
             "pattern": {"kind": "nf_nf_distance", "focus_r_m": 200.0,
                         "observe_theta_rad": 0.0,
                         "grid": {"start": -100.0, "stop": 200.0,
                                  "points": 3001}}},
    "resolution": {"experiment": "resolution", "geometry": _FIG_GEOMETRY},
    "fig9": {"experiment": "multiuser", "geometry": _FIG_GEOMETRY,
             "scenario": {}, "beamformers": [{"scheme": "mmse", "csi": "nf"}],
             "grouping": ["greedy", "random"], "architectures": ["modular"],
             "sweep": {"variable": "pt_db", "values": [80, 85, 90, 95, 100]},
             "seeds": list(range(20))},
    "fig10": {"experiment": "multiuser", "geometry": _FIG_GEOMETRY,
              "scenario": {},
              "beamformers": [{"scheme": s, "csi": c} for c in ("nf", "ff")
                              for s in ("mrc", "zf", "mmse")],
              "grouping": ["greedy"], "architectures": ["modular", "collocated"],
              "sweep": {"variable": "r_max_m", "values": [1, 2, 5, 10, 20]},
              "seeds": list(range(20))},
    "fig11": {"experiment": "multiuser", "geometry": _FIG_GEOMETRY,
              "scenario": {"layout": {"kind": "line", "r_m_m": 100.0}},
              "beamformers": [{"scheme": "mmse", "csi": c} for c in ("nf", "ff")],
              "grouping": ["greedy"], "architectures": ["modular", "collocated"],
              "sweep": {"variable": "r_m_m", "values": [20, 50, 100, 200, 500]},
              "seeds": list(range(20))},
}


def preset_config(name: str, **overrides) -> RunConfig:
    """Configuration of a named figure preset; ``overrides`` replace
    top-level keys of the document before parsing."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    doc = copy.deepcopy(PRESETS[name])
    doc.update(overrides)
    return run_config_from_dict(doc)


def _header_lines(cfg: RunConfig, extra: dict | None = None) -> str:
    doc = {"config": run_config_to_dict(cfg)}
    if extra:
        doc.update(extra)
    text = json.dumps(doc, indent=1, sort_keys=True)
    return "".join(f"# {line}\n" for line in text.splitlines())


def _write_csv(path, header: str, columns: Sequence[str], rows) -> None:
    buf = io.StringIO()
    buf.write(header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                    for x in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


# pattern sweeps

def _variant_curve(g: ArrayGeometry, p, variant: str, r, theta):
    focus = PolarLocation(p.focus_r_m, p.focus_theta_rad)
    if variant == "collocated":
        g, variant = g.collocated(), "exact"
    if p.kind == "nf_ff":
        return pat.nf_ff_curve(g, p.focus_theta_rad, r, theta, variant)
    return pat.nf_nf_curve(g, focus, r, theta, variant, alias=p.alias)


def pattern_sweep_rows(cfg: RunConfig):
    """``(columns, rows)`` of a pattern sweep, one row per grid point per
    variant."""
    g, p = cfg.geometry, cfg.pattern
    grid = np.asarray(p.grid, dtype=float)
    rows = []
    if p.kind == "ff_ff":
        curves = {"modular": lambda: pat.pattern_ff_ff(g, grid),
                  "collocated": lambda: pat.pattern_ff_ff(g.collocated(), grid),
                  "envelope": lambda: pat.module_envelope(g, grid)}
        for v in p.variants:
            rows += [(x, v, y) for x, y in zip(grid, np.atleast_1d(curves[v]()))]
        return ["delta_theta", "variant", "gain"], rows
    if p.kind == "nf_nf_map":
        th, r = np.meshgrid(grid, np.asarray(p.r_grid), indexing="ij")
        for v in p.variants:
            gain = _variant_curve(g, p, v, r, th)
            rows += [(ri, ti, v, y) for ri, ti, y in
                     zip(r.ravel(), th.ravel(), np.ravel(gain))]
        return ["r_m", "theta_rad", "variant", "gain"], rows
    if p.kind == "nf_ff":
        r, theta = np.full_like(grid, p.observe_r_m), grid
    elif p.kind == "nf_nf_angle":
        s = math.sin(p.focus_theta_rad) + grid
        if np.any(np.abs(s) > 1):
            raise ConfigError("delta_theta grid leaves the visible region")
        r, theta = np.full_like(grid, p.observe_r_m), np.arcsin(s)
    else:
        r = p.focus_r_m + grid
        if np.any(r <= 0):
            raise ConfigError("delta_r_m grid reaches r <= 0")
        theta = np.full_like(grid, p.observe_theta_rad)
    for v in p.variants:
        gain = np.atleast_1d(_variant_curve(g, p, v, r, theta))
        rows += [(x, v, y) for x, y in zip(grid, gain)]
    return [p.grid_variable, "variant", "gain"], rows


def run_pattern_sweep(cfg: RunConfig, out=None) -> str:
    out = out or cfg.out or "pattern.csv"
    columns, rows = pattern_sweep_rows(cfg)
    _write_csv(out, _header_lines(cfg), columns, rows)
    return out


# resolution

def _rel(a, b):
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b) or b == 0:
        return math.inf
    return abs(a - b) / abs(b)


def _numeric_r_hp(g: ArrayGeometry, theta: float) -> float:
    """Half-power point of the closed-form distance pattern, returned as a
    distance ``1/z``."""
    c = pat._distance_scale(g, theta)
    if c == 0:
        return 0.0
    # |F(x)/x| = 1/2 at x ~ 1.95; bracket generously in z = (x/c)^2
    z_hp = pat.find_half_power(lambda z: pat.distance_pattern(g, theta, z),
                               0.0, (4.0 / c) ** 2, tol=1e-16)
    return 1.0 / z_hp


def _json_float(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def resolution_report_dict(cfg: RunConfig) -> dict:
    g, spec = cfg.geometry, cfg.resolution
    entries = []
    for th in spec.focus_theta_rad:
        r_hp = pat.half_power_distance(g, th)
        num_r_hp = _numeric_r_hp(g, th)
        for rp in spec.focus_r_m:
            focus = PolarLocation(rp, th)
            rep = pat.resolution_report(g, focus)
            entry = {"focus_r_m": rp, "focus_theta_rad": th,
                     "singular_direction": rep.singular_direction,
                     "angular_res": rep.angular_res,
                     "grating_directions": rep.grating_directions,
                     "r_hp_m": r_hp, "r_hp_numeric_m": num_r_hp,
                     "r_hp_rel_err": _rel(r_hp, num_r_hp)}
            if not rep.singular_direction:
                plus, minus = pat.numeric_distance_resolution(
                    g, focus, "exact", spec.samples)
                entry.update({
                    "dist_res_plus_m": rep.dist_res_plus,
                    "dist_res_minus_m": rep.dist_res_minus,
                    "bw_distance_m": rep.bw_distance,
                    "dist_res_plus_numeric_m": plus,
                    "dist_res_minus_numeric_m": minus,
                    "dist_res_plus_rel_err": _rel(rep.dist_res_plus, plus),
                    "dist_res_minus_rel_err": _rel(rep.dist_res_minus, minus),
                })
            entries.append({k: _json_float(v) for k, v in entry.items()})
    return {"config": run_config_to_dict(cfg), "entries": entries}


def run_resolution_report(cfg: RunConfig, out=None) -> str:
    out = out or cfg.out or "resolution.json"
    with open(out, "w") as fh:
        json.dump(resolution_report_dict(cfg), fh, indent=1)
    return out


# multi-user

def _apply_sweep(sc: ScenarioConfig, variable: str | None, value) -> ScenarioConfig:
    if variable is None:
        return sc
    if variable == "pt_db":
        return dataclasses.replace(sc, pt_db=float(value))
    lay = sc.layout
    if variable in ("r_max_m", "r_c_m"):
        if not isinstance(lay, DiskLayout):
            raise ConfigError(f"sweep {variable} needs a disk layout")
        key = "r_max" if variable == "r_max_m" else "r_c"
        return dataclasses.replace(sc, layout=dataclasses.replace(lay, **{key: float(value)}))
    if not isinstance(lay, LineLayout):
        raise ConfigError("sweep r_m_m needs a line layout")
    return dataclasses.replace(sc, layout=LineLayout(float(value)))


def _one_seed(cfg: RunConfig, sweep_value, seed: int) -> list:
    from .scheduler import evaluate_grouping, greedy_grouping, random_grouping

    var = cfg.sweep.variable if cfg.sweep else None
    sc = _apply_sweep(dataclasses.replace(cfg.scenario, seed=int(seed)), var,
                      sweep_value)
    paths = sample_paths(sc)
    powers = sc.powers()
    pr_db = sc.reference_receive_snr_db()
    rows = []
    for arch in cfg.architectures:
        geom = sc.geometry if arch == "modular" else sc.geometry.collocated()
        channels = synth_channels(geom, paths)
        for spec in cfg.beamformers:
            for method in cfg.grouping:
                if method == "greedy":
                    res = greedy_grouping(channels, powers, sc.Q, spec, seed)
                else:
                    res = evaluate_grouping(random_grouping(sc.K, sc.Q, seed),
                                            channels, powers, spec)
                rows.append((sweep_value, pr_db, int(seed), arch, method,
                             spec.scheme.value, spec.csi.value, res.sum_rate))
    return rows


MULTIUSER_COLUMNS = ["sweep_value", "pr_db", "seed", "architecture", "grouping",
                     "scheme", "csi", "sum_rate"]


def multiuser_rows(cfg: RunConfig) -> list:
    """Per-seed sum rates for every sweep point and combination."""
    values = cfg.sweep.values if cfg.sweep else (None,)
    tasks = [(v, s) for v in values for s in cfg.seeds]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            chunks = list(pool.map(lambda t: _one_seed(cfg, *t), tasks))
    else:
        chunks = [_one_seed(cfg, *t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def summarize_multiuser(rows: Sequence) -> list:
    """Mean and standard error per (sweep point, combination).

    Rows are sorted by seed before accumulation, so the result does not
    depend on the order seeds were run in.
    """
    groups = {}
    for row in rows:
        key = (row[0], row[3], row[4], row[5], row[6])
        groups.setdefault(key, []).append((row[2], row[7], row[1]))
    out = []
    for key in sorted(groups, key=lambda k: (k[0] is None, k[0] or 0.0, k[1:])):
        vals = sorted(groups[key])
        x = np.array([v[1] for v in vals])
        n = len(x)
        mean = math.fsum(x) / n
        se = (math.sqrt(math.fsum((x - mean) ** 2) / (n - 1) / n)
              if n > 1 else float("nan"))
        out.append({"sweep_value": key[0], "pr_db": vals[0][2],
                    "architecture": key[1], "grouping": key[2],
                    "scheme": key[3], "csi": key[4], "n": n,
                    "mean_sum_rate": mean, "stderr": se})
    return out


def run_multiuser_experiment(cfg: RunConfig, out=None) -> tuple:
    """Write ``<out>`` (per-seed CSV) and ``<out stem>_summary.json``."""
    out = out or cfg.out or "multiuser.csv"
    rows = multiuser_rows(cfg)
    _write_csv(out, _header_lines(cfg), MULTIUSER_COLUMNS, rows)
    summary_path = (out[:-4] if out.endswith(".csv") else out) + "_summary.json"
    with open(summary_path, "w") as fh:
        json.dump({"config": run_config_to_dict(cfg),
                   "summary": summarize_multiuser(rows)}, fh, indent=1)
    return out, summary_path


def run(cfg: RunConfig, out=None):
    if cfg.experiment == "pattern":
        return run_pattern_sweep(cfg, out)
    if cfg.experiment == "resolution":
        return run_resolution_report(cfg, out)
    return run_multiuser_experiment(cfg, out)
