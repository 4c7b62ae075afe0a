"""JSON run configuration.

Keys carry their units (``d_m``, ``r_c_m``, ``pt_db``, ``theta_rad``) and
unknown keys are rejected, so a typo never silently falls back to a default.
Missing keys take the reference-scenario defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .beamforming import CSI, BeamformerSpec, Scheme
from .channel import DiskLayout, LineLayout, ScenarioConfig
from .errors import ConfigError, DomainError
from .geometry import ArrayGeometry

__all__ = [
    "SweepSpec",
    "PatternSpec",
    "ResolutionSpec",
    "RunConfig",
    "geometry_to_dict",
    "geometry_from_dict",
    "scenario_config_to_dict",
    "scenario_config_from_dict",
    "run_config_from_dict",
    "run_config_to_dict",
    "load_run_config",
    "EXPERIMENTS",
    "PATTERN_KINDS",
    "SWEEP_VARIABLES",
]

EXPERIMENTS = ("pattern", "resolution", "multiuser")
PATTERN_KINDS = ("ff_ff", "nf_ff", "nf_nf_angle", "nf_nf_distance", "nf_nf_map")
SWEEP_VARIABLES = ("pt_db", "r_max_m", "r_c_m", "r_m_m")
GROUPING_METHODS = ("greedy", "random")
ARCHITECTURES = ("modular", "collocated")


def _strict(d: Any, allowed, where: str) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: "
                          f"{sorted(allowed)}")
    return d


def _wrap(fn, where):
    try:
        return fn()
    except ConfigError:
        raise
    except (DomainError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


# geometry

def geometry_to_dict(g: ArrayGeometry) -> dict:
    return {"N": g.N, "M": g.M, "gamma": g.Gamma, "d_m": g.d,
            "wavelength_m": g.wavelength}


def geometry_from_dict(d: dict | None) -> ArrayGeometry:
    ref = geometry_to_dict(ArrayGeometry.reference())
    d = _strict(d or {}, ref, "geometry")
    if "wavelength_m" in d and "d_m" not in d:
        d = dict(d, d_m=d["wavelength_m"] / 2)
    v = {**ref, **d}
    return _wrap(lambda: ArrayGeometry(v["N"], v["M"], v["gamma"],
                                       v["wavelength_m"], v["d_m"]), "geometry")


# scenario

def _layout_to_dict(layout) -> dict:
    if isinstance(layout, DiskLayout):
        return {"kind": "disk", "r_c_m": layout.r_c, "r_max_m": layout.r_max}
    return {"kind": "line", "r_m_m": layout.r_m}


def _layout_from_dict(d: dict | None):
    d = d or {"kind": "disk"}
    kind = d.get("kind", "disk")
    if kind == "disk":
        _strict(d, ("kind", "r_c_m", "r_max_m"), "scenario.layout")
        return _wrap(lambda: DiskLayout(d.get("r_c_m", 200.0),
                                        d.get("r_max_m", 20.0)), "layout")
    if kind == "line":
        _strict(d, ("kind", "r_m_m"), "scenario.layout")
        if "r_m_m" not in d:
            raise ConfigError("scenario.layout: line layout needs r_m_m")
        return _wrap(lambda: LineLayout(d["r_m_m"]), "layout")
    raise ConfigError(f"scenario.layout: unknown kind {kind!r}")


_SCENARIO_KEYS = ("K", "Q", "L", "layout", "pt_db", "seed", "geometry",
                  "scatterer_r_min_m", "scatterer_r_max_m",
                  "scatterer_theta_min_rad", "scatterer_theta_max_rad",
                  "rcs_min_m2", "rcs_max_m2", "beta0")


def scenario_config_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "K": cfg.K, "Q": cfg.Q, "L": cfg.L,
        "layout": _layout_to_dict(cfg.layout),
        "pt_db": cfg.pt_db,
        "seed": cfg.seed,
        "geometry": geometry_to_dict(cfg.geometry),
        "scatterer_r_min_m": cfg.scatterer_distance_range[0],
        "scatterer_r_max_m": cfg.scatterer_distance_range[1],
        "scatterer_theta_min_rad": cfg.scatterer_angle_range[0],
        "scatterer_theta_max_rad": cfg.scatterer_angle_range[1],
        "rcs_min_m2": cfg.rcs_range[0],
        "rcs_max_m2": cfg.rcs_range[1],
        "beta0": cfg.beta0,
    }


def scenario_config_from_dict(d: dict | None,
                              geometry: ArrayGeometry | None = None) -> ScenarioConfig:
    d = _strict(d or {}, _SCENARIO_KEYS, "scenario")
    base = ScenarioConfig()
    if "geometry" in d:
        geometry = geometry_from_dict(d["geometry"])
    geometry = geometry or base.geometry
    dist = base.scatterer_distance_range
    ang = base.scatterer_angle_range
    rcs = base.rcs_range

    def build():
        return ScenarioConfig(
            K=d.get("K", base.K), Q=d.get("Q", base.Q), L=d.get("L", base.L),
            layout=_layout_from_dict(d.get("layout")),
            pt_db=d.get("pt_db", base.pt_db),
            geometry=geometry,
            seed=d.get("seed", 0),
            scatterer_distance_range=(d.get("scatterer_r_min_m", dist[0]),
                                      d.get("scatterer_r_max_m", dist[1])),
            scatterer_angle_range=(d.get("scatterer_theta_min_rad", ang[0]),
                                   d.get("scatterer_theta_max_rad", ang[1])),
            rcs_range=(d.get("rcs_min_m2", rcs[0]), d.get("rcs_max_m2", rcs[1])),
            beta0=d.get("beta0"),
        )
    return _wrap(build, "scenario")


# sweeps and experiment blocks

@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple

    @classmethod
    def linspace(cls, variable, start, stop, points):
        return cls(variable, tuple(np.linspace(start, stop, int(points)).tolist()))


def _grid_from_dict(d, where, min_points):
    if "values" in d:
        _strict(d, ("variable", "values"), where)
        values = tuple(float(x) for x in d["values"])
    else:
        _strict(d, ("variable", "start", "stop", "points"), where)
        try:
            points = int(d["points"])
            values = tuple(np.linspace(float(d["start"]), float(d["stop"]),
                                       points).tolist())
        except KeyError as exc:
            raise ConfigError(f"{where}: missing {exc}") from exc
    if len(values) < min_points:
        raise ConfigError(f"{where}: need at least {min_points} point(s)")
    return values


def _grid_to_dict(variable, values):
    return {"variable": variable, "values": list(values)}


@dataclass(frozen=True)
class PatternSpec:
    """Pattern sweep: which pattern, the focus, and the observation grid.

    ``grid`` holds the swept coordinate named by ``grid_variable``; the
    ``nf_nf_map`` kind also sweeps ``r_grid`` (meters).
    """

    kind: str = "nf_nf_angle"
    focus_r_m: float = 200.0
    focus_theta_rad: float = 0.0
    observe_r_m: float = 200.0
    observe_theta_rad: float = 0.0
    grid_variable: str = "delta_theta"
    grid: tuple = tuple(np.linspace(-1.0, 1.0, 2001).tolist())
    r_grid: tuple = ()
    variants: tuple = ("exact",)
    alias: bool = True

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise ConfigError(f"pattern.kind must be one of {PATTERN_KINDS}")
        if self.kind == "nf_nf_map" and not self.r_grid:
            raise ConfigError("pattern: nf_nf_map needs r_grid")


_PATTERN_VARIANTS = {
    "ff_ff": ("modular", "collocated", "envelope"),
    "nf_ff": ("exact", "distinct", "common", "collocated"),
    "nf_nf_angle": ("exact", "distinct", "common", "closed_form", "collocated"),
    "nf_nf_distance": ("exact", "distinct", "common", "closed_form", "collocated"),
    "nf_nf_map": ("exact", "distinct", "common", "closed_form", "collocated"),
}
_GRID_VARIABLE = {"ff_ff": "delta_theta", "nf_ff": "theta_rad",
                  "nf_nf_angle": "delta_theta", "nf_nf_distance": "delta_r_m",
                  "nf_nf_map": "theta_rad"}


def _pattern_from_dict(d: dict) -> PatternSpec:
    d = _strict(d, ("kind", "focus_r_m", "focus_theta_rad", "observe_r_m",
                    "observe_theta_rad", "grid", "r_grid", "variants", "alias"),
                "pattern")
    kind = d.get("kind", "nf_nf_angle")
    if kind not in PATTERN_KINDS:
        raise ConfigError(f"pattern.kind must be one of {PATTERN_KINDS}")
    allowed = _PATTERN_VARIANTS[kind]
    variants = tuple(d.get("variants", allowed))
    bad = [v for v in variants if v not in allowed]
    if bad or not variants:
        raise ConfigError(f"pattern.variants {bad or variants} not in {allowed}")
    gvar = _GRID_VARIABLE[kind]
    if "grid" not in d:
        raise ConfigError("pattern: missing grid")
    if d["grid"].get("variable", gvar) != gvar:
        raise ConfigError(f"pattern.grid.variable must be {gvar!r} for {kind}")
    grid = _grid_from_dict(d["grid"], "pattern.grid", 1)
    r_grid = ()
    if "r_grid" in d:
        r_grid = _grid_from_dict(d["r_grid"], "pattern.r_grid", 1)
    base = PatternSpec
    return PatternSpec(kind=kind,
                       focus_r_m=float(d.get("focus_r_m", base.focus_r_m)),
                       focus_theta_rad=float(d.get("focus_theta_rad", 0.0)),
                       observe_r_m=float(d.get("observe_r_m", base.observe_r_m)),
                       observe_theta_rad=float(d.get("observe_theta_rad", 0.0)),
                       grid_variable=gvar, grid=grid, r_grid=r_grid,
                       variants=variants, alias=bool(d.get("alias", True)))


def _pattern_to_dict(p: PatternSpec) -> dict:
    out = {"kind": p.kind, "focus_r_m": p.focus_r_m,
           "focus_theta_rad": p.focus_theta_rad, "observe_r_m": p.observe_r_m,
           "observe_theta_rad": p.observe_theta_rad,
           "grid": _grid_to_dict(p.grid_variable, p.grid),
           "variants": list(p.variants), "alias": p.alias}
    if p.r_grid:
        out["r_grid"] = _grid_to_dict("r_m", p.r_grid)
    return out


@dataclass(frozen=True)
class ResolutionSpec:
    focus_r_m: tuple = (100.0, 200.0, 400.0)
    focus_theta_rad: tuple = (0.0, math.pi / 6, math.pi / 3)
    samples: int = 1200


def _resolution_from_dict(d: dict) -> ResolutionSpec:
    d = _strict(d, ("focus_r_m", "focus_theta_rad", "samples"), "resolution")
    base = ResolutionSpec()
    spec = ResolutionSpec(
        tuple(float(x) for x in d.get("focus_r_m", base.focus_r_m)),
        tuple(float(x) for x in d.get("focus_theta_rad", base.focus_theta_rad)),
        int(d.get("samples", base.samples)))
    if not spec.focus_r_m or not spec.focus_theta_rad:
        raise ConfigError("resolution: empty focus list")
    return spec


@dataclass
class RunConfig:
    experiment: str
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry.reference)
    scenario: ScenarioConfig | None = None
    beamformers: list = field(default_factory=lambda: [BeamformerSpec()])
    grouping: list = field(default_factory=lambda: ["greedy", "random"])
    architectures: list = field(default_factory=lambda: ["modular"])
    sweep: SweepSpec | None = None
    seeds: list = field(default_factory=lambda: [0])
    out: str | None = None
    pattern: PatternSpec | None = None
    resolution: ResolutionSpec | None = None
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if self.experiment == "multiuser":
            if not self.seeds:
                raise ConfigError("multiuser experiments need at least one seed")
            if self.scenario is None:
                self.scenario = ScenarioConfig(geometry=self.geometry)
        if self.experiment == "pattern" and self.pattern is None:
            raise ConfigError("pattern experiment needs a 'pattern' block")
        if self.experiment == "resolution" and self.resolution is None:
            self.resolution = ResolutionSpec()
        for s in self.seeds:
            if not (isinstance(s, (int, np.integer)) and 0 <= s < 2 ** 64):
                raise ConfigError(f"seed {s!r} is not an unsigned 64-bit integer")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


_RUN_KEYS = ("experiment", "geometry", "scenario", "beamformers", "grouping",
             "architectures", "sweep", "seeds", "out", "pattern", "resolution",
             "threads")


def _beamformer_from_dict(d: dict) -> BeamformerSpec:
    _strict(d, ("scheme", "csi"), "beamformers[]")
    return _wrap(lambda: BeamformerSpec(Scheme(d.get("scheme", "mmse")),
                                        CSI(d.get("csi", "nf"))), "beamformers")


def run_config_from_dict(d: dict) -> RunConfig:
    d = _strict(d, _RUN_KEYS, "config")
    if "experiment" not in d:
        raise ConfigError("config: missing 'experiment'")
    geometry = geometry_from_dict(d.get("geometry"))
    scenario = None
    if "scenario" in d:
        scenario = scenario_config_from_dict(d["scenario"], geometry)
    beamformers = [_beamformer_from_dict(b)
                   for b in d.get("beamformers", [{"scheme": "mmse", "csi": "nf"}])]
    grouping = list(d.get("grouping", ["greedy", "random"]))
    if not grouping or any(g not in GROUPING_METHODS for g in grouping):
        raise ConfigError(f"grouping must be a non-empty subset of {GROUPING_METHODS}")
    arch = list(d.get("architectures", ["modular"]))
    if not arch or any(a not in ARCHITECTURES for a in arch):
        raise ConfigError(f"architectures must be a non-empty subset of {ARCHITECTURES}")
    sweep = None
    if d.get("sweep") is not None:
        var = d["sweep"].get("variable")
        if var not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}")
        sweep = SweepSpec(var, _grid_from_dict(d["sweep"], "sweep", 2))
    seeds = d.get("seeds", [0])
    if not isinstance(seeds, list):
        raise ConfigError("seeds must be a list")
    return RunConfig(
        experiment=d["experiment"], geometry=geometry, scenario=scenario,
        beamformers=beamformers, grouping=grouping, architectures=arch,
        sweep=sweep, seeds=seeds, out=d.get("out"),
        pattern=_pattern_from_dict(d["pattern"]) if "pattern" in d else None,
        resolution=(_resolution_from_dict(d["resolution"])
                    if "resolution" in d else None),
        threads=int(d.get("threads", 1)),
    )


def run_config_to_dict(cfg: RunConfig) -> dict:
    """Fully resolved config; feeding it back reproduces the run."""
    out = {"experiment": cfg.experiment,
           "geometry": geometry_to_dict(cfg.geometry),
           "beamformers": [{"scheme": b.scheme.value, "csi": b.csi.value}
                           for b in cfg.beamformers],
           "grouping": list(cfg.grouping),
           "architectures": list(cfg.architectures),
           "seeds": [int(s) for s in cfg.seeds],
           "out": cfg.out,
           "threads": cfg.threads}
    if cfg.scenario is not None:
        sc = scenario_config_to_dict(cfg.scenario)
        sc.pop("geometry")
        sc.pop("seed")
        out["scenario"] = sc
    if cfg.sweep is not None:
        out["sweep"] = _grid_to_dict(cfg.sweep.variable, cfg.sweep.values)
    if cfg.pattern is not None:
        out["pattern"] = _pattern_to_dict(cfg.pattern)
    if cfg.resolution is not None:
        out["resolution"] = {"focus_r_m": list(cfg.resolution.focus_r_m),
                             "focus_theta_rad": list(cfg.resolution.focus_theta_rad),
                             "samples": cfg.resolution.samples}
    return out


def load_run_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return run_config_from_dict(doc)
