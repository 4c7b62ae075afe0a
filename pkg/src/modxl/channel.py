"""Multi-path user channels and random user/scatterer scenarios.

Each user has one LoS path (index 0) and ``L`` NLoS paths via point
scatterers.  Path gains follow free-space spreading,

* LoS:  ``alpha_0 = lambda / (4 pi r_0)``
* NLoS: ``alpha_l = lambda sqrt(sigma) / ((4 pi)^1.5 t r) exp(-j 2 pi t / lambda + j w)``

where ``r`` is the scatterer distance from the array center, ``t`` the
scatterer-to-user distance, ``sigma`` the radar cross section and ``w`` a
random phase.  The near-field channel sums USW responses, the far-field one
UPW responses of the same paths, each with its reference phase
``exp(-j 2 pi r / lambda)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import rng
from .errors import DomainError
from .geometry import ArrayGeometry, PolarLocation
from .response import upw_matrix, usw_matrix

__all__ = [
    "PathParams",
    "UserChannel",
    "DiskLayout",
    "LineLayout",
    "ScenarioConfig",
    "los_gain",
    "nlos_gain",
    "sample_paths",
    "synth_channels",
    "sample_scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "dump_scenario",
    "load_scenario",
    "SCENARIO_SCHEMA_VERSION",
]

SCENARIO_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PathParams:
    location: PolarLocation
    gain: complex
    is_los: bool = False
    scatterer_user_distance: float | None = None
    phase: float | None = None
    rcs: float | None = None


@dataclass
class UserChannel:
    paths: list
    h_nf: np.ndarray
    h_ff: np.ndarray

    @property
    def location(self) -> PolarLocation:
        return self.paths[0].location


@dataclass(frozen=True)
class DiskLayout:
    """Users uniform (by area) over a disk of radius ``r_max`` centered at
    ``(r_c, 0)``."""

    r_c: float = 200.0
    r_max: float = 20.0

    def __post_init__(self):
        if not 0 < self.r_max < self.r_c:
            raise DomainError(f"need 0 < r_max < r_c, got r_max={self.r_max}, "
                              f"r_c={self.r_c}")

    def sample(self, g: np.random.Generator) -> PolarLocation:
        u_rad, u_ang = g.random(2)
        rho = self.r_max * math.sqrt(u_rad)
        phi = 2 * math.pi * u_ang
        return PolarLocation.from_cartesian(self.r_c + rho * math.cos(phi),
                                            rho * math.sin(phi))


@dataclass(frozen=True)
class LineLayout:
    """Users uniform on the segment ``(0, r_m]`` of the positive x-axis."""

    r_m: float

    def __post_init__(self):
        if not self.r_m > 0:
            raise DomainError(f"r_m must be positive, got {self.r_m}")

    def sample(self, g: np.random.Generator) -> PolarLocation:
        return PolarLocation(self.r_m * (1.0 - g.random()), 0.0)


Layout = Union[DiskLayout, LineLayout]


def _check_range(name, rng_, lo_bound=-math.inf, hi_bound=math.inf):
    lo, hi = rng_
    if not (lo_bound <= lo < hi <= hi_bound):
        raise DomainError(f"invalid {name} range {rng_}")


@dataclass(frozen=True)
class ScenarioConfig:
    K: int = 30
    Q: int = 15
    L: int = 20
    layout: Layout = field(default_factory=DiskLayout)
    pt_db: float = 90.0
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry.reference)
    seed: int = 0
    scatterer_distance_range: tuple = (0.0, 200.0)
    scatterer_angle_range: tuple = (-math.pi / 2, math.pi / 2)
    rcs_range: tuple = (1.0, 40.0)
    beta0: float | None = None

    def __post_init__(self):
        if self.K < 1 or self.Q < 1 or self.L < 0:
            raise DomainError("K, Q must be positive and L non-negative")
        if self.Q >= self.K:
            raise DomainError(f"need Q < K, got Q={self.Q}, K={self.K}")
        _check_range("scatterer distance", self.scatterer_distance_range, 0.0)
        _check_range("scatterer angle", self.scatterer_angle_range,
                     -math.pi / 2, math.pi / 2)
        _check_range("rcs", self.rcs_range, 0.0)
        if self.beta0 is not None and not self.beta0 > 0:
            raise DomainError("beta0 must be positive")

    @property
    def transmit_snr(self) -> float:
        return 10.0 ** (self.pt_db / 10.0)

    def powers(self) -> np.ndarray:
        """Per-user transmit SNR (linear)."""
        return np.full(self.K, self.transmit_snr)

    def reference_receive_snr_db(self) -> float:
        """Receive SNR of a reference element at the layout's center distance."""
        r = self.layout.r_c if isinstance(self.layout, DiskLayout) else self.layout.r_m
        amp = _amplitude_ref(self.geometry.wavelength, self.beta0)
        return self.pt_db + 20.0 * math.log10(amp / r)


def _amplitude_ref(wavelength: float, beta0: float | None) -> float:
    """``sqrt(beta0)``; free-space ``lambda / (4 pi)`` unless overridden."""
    return wavelength / (4 * math.pi) if beta0 is None else math.sqrt(beta0)


def los_gain(loc: PolarLocation, wavelength: float,
             beta0: float | None = None) -> complex:
    return complex(_amplitude_ref(wavelength, beta0) / loc.r)


def nlos_gain(path: PathParams, wavelength: float,
              beta0: float | None = None) -> complex:
    t, r = path.scatterer_user_distance, path.location.r
    if not (t and t > 0 and r > 0):
        raise DomainError("NLoS gain needs positive distances")
    amp = (_amplitude_ref(wavelength, beta0) * math.sqrt(path.rcs)
           / (math.sqrt(4 * math.pi) * t * r))
    return amp * complex(np.exp(1j * (-2 * math.pi * t / wavelength + path.phase)))


def _uniform_open_low(g, lo, hi):
    # (lo, hi]: keeps distances strictly positive when lo == 0
    return hi - (hi - lo) * g.random()


def sample_paths(cfg: ScenarioConfig) -> list:
    """Draw the path list of every user; deterministic in ``cfg.seed``."""
    lam = cfg.geometry.wavelength
    users = []
    for k in range(cfg.K):
        g = rng.stream(cfg.seed, rng.user_stream(k))
        user = cfg.layout.sample(g)
        paths = [PathParams(user, los_gain(user, lam, cfg.beta0), is_los=True)]
        q_user = user.cartesian
        for _ in range(cfg.L):
            r = _uniform_open_low(g, *cfg.scatterer_distance_range)
            lo, hi = cfg.scatterer_angle_range
            theta = lo + (hi - lo) * g.random()
            phase = -math.pi + 2 * math.pi * g.random()
            lo, hi = cfg.rcs_range
            rcs = lo + (hi - lo) * g.random()
            loc = PolarLocation(r, theta)
            t = float(np.linalg.norm(loc.cartesian - q_user))
            p = PathParams(loc, 0j, False, t, phase, rcs)
            paths.append(PathParams(loc, nlos_gain(p, lam, cfg.beta0), False,
                                    t, phase, rcs))
        users.append(paths)
    return users


def _synth_one(g: ArrayGeometry, paths: Sequence[PathParams]) -> UserChannel:
    r = np.array([p.location.r for p in paths])
    s = np.sin([p.location.theta for p in paths])
    alpha = np.array([p.gain for p in paths], dtype=complex)
    h_nf = alpha @ usw_matrix(g, r, s)
    # each path keeps its own reference phase exp(-j 2 pi r / lambda),
    # which the phase-free UPW response leaves out
    ref_phase = np.exp(-2j * np.pi * r / g.wavelength)
    h_ff = (alpha * ref_phase) @ upw_matrix(g, s)
    return UserChannel(list(paths), h_nf, h_ff)


def synth_channels(geometry: ArrayGeometry, scenario) -> list:
    """Build near- and far-field channel vectors for every user.

    ``scenario`` is a list of per-user path lists (or of ``UserChannel``).
    """
    out = []
    for user in scenario:
        paths = user.paths if isinstance(user, UserChannel) else user
        out.append(_synth_one(geometry, paths))
    return out


def sample_scenario(cfg: ScenarioConfig) -> list:
    return synth_channels(cfg.geometry, sample_paths(cfg))


def _path_to_dict(p: PathParams) -> dict:
    return {
        "r_m": p.location.r,
        "theta_rad": p.location.theta,
        "gain_re": p.gain.real,
        "gain_im": p.gain.imag,
        "is_los": p.is_los,
        "t_m": p.scatterer_user_distance,
        "phase_rad": p.phase,
        "rcs_m2": p.rcs,
    }


def _path_from_dict(d: dict) -> PathParams:
    return PathParams(PolarLocation(d["r_m"], d["theta_rad"]),
                      complex(d["gain_re"], d["gain_im"]), bool(d["is_los"]),
                      d["t_m"], d["phase_rad"], d["rcs_m2"])


def scenario_to_dict(cfg: ScenarioConfig, scenario) -> dict:
    from .config import scenario_config_to_dict

    users = []
    for user in scenario:
        paths = user.paths if isinstance(user, UserChannel) else user
        users.append({"paths": [_path_to_dict(p) for p in paths]})
    return {
        "schema": "modxl.scenario",
        "schema_version": SCENARIO_SCHEMA_VERSION,
        "config": scenario_config_to_dict(cfg),
        "users": users,
    }


def scenario_from_dict(doc: dict) -> tuple:
    """Inverse of :func:`scenario_to_dict`; returns ``(cfg, channels)``."""
    from .config import scenario_config_from_dict
    from .errors import ConfigError

    if doc.get("schema") != "modxl.scenario":
        raise ConfigError("not a scenario document")
    if doc.get("schema_version") != SCENARIO_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {doc.get('schema_version')}")
    cfg = scenario_config_from_dict(doc["config"])
    paths = [[_path_from_dict(p) for p in u["paths"]] for u in doc["users"]]
    return cfg, synth_channels(cfg.geometry, paths)


def dump_scenario(cfg: ScenarioConfig, scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(cfg, scenario), fh, indent=1)


def load_scenario(path) -> tuple:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
