"""Self-checks of the library against independent oracles.

``validate_oracles("fast")`` runs the cheap analytic checks; ``"full"`` adds
an exhaustive grouping search on small instances.  Each check reports its
measured error next to the tolerance it was held to.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special as sps

from .beamforming import (BeamformerSpec, CSI, Scheme, combiner,
                          perfect_csi_sinr, sinr)
from .channel import DiskLayout, ScenarioConfig, sample_scenario
from .geometry import ArrayGeometry
from .beampattern import pattern_ff_ff
from .special import dirichlet_kernel, fresnel

__all__ = ["CheckResult", "ValidationReport", "validate_oracles",
           "DEFAULT_TOLERANCES"]

DEFAULT_TOLERANCES = {
    "ff_double_sum": 1e-12,
    "collocated_degeneracy": 1e-12,
    "fresnel_scipy": 1e-12,
    "sinr_reduction": 1e-8,
    "zf_nulling": 1e-9,
    "greedy_vs_optimal": 0.8,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    seconds: float
    detail: str = ""


@dataclass
class ValidationReport:
    level: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"level": self.level, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


def _ff_double_sum():
    g = ArrayGeometry(4, 4, 13, 0.1256, 0.0628)
    delta = np.linspace(-2, 2, 4001)
    y = g.positions / g.wavelength
    ref = np.abs(np.exp(2j * np.pi * np.outer(delta, y)).sum(axis=1)) / g.size
    return float(np.max(np.abs(pattern_ff_ff(g, delta) - ref))), ""


def _collocated():
    g = ArrayGeometry(4, 4, 4, 0.1256, 0.0628)
    delta = np.linspace(-2, 2, 4001)
    ref = np.abs(dirichlet_kernel(16, 0.5, delta))
    return float(np.max(np.abs(pattern_ff_ff(g, delta) - ref))), ""


def _fresnel_scipy():
    x = np.linspace(-30, 30, 6001)
    s, c = sps.fresnel(x * math.sqrt(2 / math.pi))
    ref = math.sqrt(math.pi / 2) * (c + 1j * s)
    return float(np.max(np.abs(fresnel(x) - ref))), "x in [-30, 30]"


def _small_instances(count, K, seed0=0):
    g = ArrayGeometry(8, 2, 5, 0.1256)
    for i in range(count):
        cfg = ScenarioConfig(K=K, Q=max(1, K - 1), L=2, geometry=g,
                             layout=DiskLayout(30.0, 3.0), pt_db=80.0,
                             seed=seed0 + i)
        yield cfg, sample_scenario(cfg)


def _reductions():
    worst = 0.0
    for cfg, ch in _small_instances(40, 2):
        H = np.array([c.h_nf for c in ch])
        P = cfg.powers()[:2]
        for scheme in Scheme:
            for k in range(2):
                v = combiner(scheme, k, H, P)
                a, b = sinr(k, v, H, P), perfect_csi_sinr(scheme, k, H, P)
                worst = max(worst, abs(a - b) / abs(b))
    return worst, "40 two-user instances"


def _zf_nulling():
    worst = 0.0
    for cfg, ch in _small_instances(20, 3, seed0=100):
        H = np.array([c.h_nf for c in ch])
        for k in range(3):
            v = combiner(Scheme.ZF, k, H, cfg.powers()[:3])
            for i in range(3):
                if i != k:
                    worst = max(worst, abs(np.vdot(v, H[i])) / np.linalg.norm(H[i]))
    return worst, "20 three-user instances"


def _greedy_vs_optimal():
    from .scheduler import brute_force_grouping, greedy_grouping

    g = ArrayGeometry.reference()
    spec = BeamformerSpec(Scheme.MMSE, CSI.NEAR_FIELD)
    worst = math.inf
    for i in range(10):
        cfg = ScenarioConfig(K=6, Q=3, L=20, geometry=g,
                             layout=DiskLayout(200.0, 5.0), seed=1000 + i)
        ch = sample_scenario(cfg)
        gr = greedy_grouping(ch, cfg.powers(), 3, spec, seed=i).sum_rate
        opt = brute_force_grouping(ch, cfg.powers(), 3, spec).sum_rate
        if gr > opt * (1 + 1e-12):
            return -math.inf, f"greedy {gr} exceeds optimum {opt}"
        worst = min(worst, gr / opt)
    return worst, "10 instances, K=6, Q=3; measured = min greedy/optimal"


_FAST = [("ff_double_sum", _ff_double_sum, "le"),
         ("collocated_degeneracy", _collocated, "le"),
         ("fresnel_scipy", _fresnel_scipy, "le"),
         ("sinr_reduction", _reductions, "le"),
         ("zf_nulling", _zf_nulling, "le")]
_FULL = [("greedy_vs_optimal", _greedy_vs_optimal, "ge")]


def validate_oracles(level: str = "fast", tolerances: dict | None = None) -> ValidationReport:
    """Run the oracle suite.

    Parameters
    ----------
    level : {"fast", "full"}
    tolerances : dict, optional
        Overrides of :data:`DEFAULT_TOLERANCES` by check name.
    """
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")
        tol.update(tolerances)
    report = ValidationReport(level)
    suite = _FAST + (_FULL if level == "full" else [])
    for name, fn, sense in suite:
        t0 = time.perf_counter()
        measured, detail = fn()
        ok = measured <= tol[name] if sense == "le" else measured >= tol[name]
        report.checks.append(CheckResult(name, bool(ok), float(measured),
                                         tol[name], time.perf_counter() - t0,
                                         detail))
    return report

