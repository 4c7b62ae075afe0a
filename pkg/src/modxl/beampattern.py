"""Beam and beam-focusing patterns of the modular XL-ULA.

A beamformer ``v`` designed for a focus location is evaluated at an
observation location through the normalized gain ``|v^H a| / (N M)``, where
``a`` is the USW response of the observation point.  Besides direct
evaluation this module provides the per-module (distinct / common AoA)
simplifications, the Fresnel closed form for near-field beamforming, and the
analytic angular / distance resolution and grating-lobe predictors.

Curves are vectorized: ``r`` and ``theta`` arguments broadcast.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .geometry import (ArrayGeometry, PolarLocation, module_distances,
                       module_sines)
from .response import upw_matrix, usw_matrix
from .special import dirichlet_kernel, fresnel

__all__ = [
    "PatternVariant",
    "ResolutionReport",
    "pattern",
    "pattern_ff_ff",
    "pattern_nf_ff",
    "pattern_nf_nf",
    "nf_ff_curve",
    "nf_nf_curve",
    "module_envelope",
    "angular_resolution",
    "grating_lobe_directions",
    "grating_lobe_count_formula",
    "distance_pattern",
    "half_power_distance",
    "distance_resolution",
    "find_half_power",
    "numeric_distance_resolution",
    "resolution_report",
    "local_maxima",
    "detect_grating_lobes",
    "HALF_POWER_FRACTION",
]

#: ``r_hp = HALF_POWER_FRACTION * cos^2(theta') * 2 D^2 / lambda``
HALF_POWER_FRACTION = 0.10

_SMALL_QUAD_PHASE = 5e-3


class PatternVariant(enum.Enum):
    EXACT = "exact"
    DISTINCT = "distinct"
    COMMON = "common"
    CLOSED_FORM = "closed_form"


def pattern(v, a) -> float:
    """Normalized gain ``|v^H a| / (N M)`` of beamformer ``v`` at response ``a``.

    ``a`` is expected to have unit-modulus entries; ``v`` is used as given.
    """
    v = np.asarray(v)
    a = np.asarray(a)
    if v.shape != a.shape or v.ndim != 1:
        raise DomainError(f"shape mismatch: {v.shape} vs {a.shape}")
    return float(abs(np.vdot(v, a)) / a.size)


def module_envelope(g: ArrayGeometry, delta):
    """``|H_{M, d_bar}(delta)|``, the pattern of one module."""
    return np.abs(dirichlet_kernel(g.M, g.d_bar, delta))


def pattern_ff_ff(g: ArrayGeometry, delta_theta):
    """Far-field pattern as a function of ``sin(theta) - sin(theta')``.

    Product of the sparse-array factor ``|H_{N, Gamma d_bar}|`` and the
    module envelope ``|H_{M, d_bar}|``.
    """
    sparse = np.abs(dirichlet_kernel(g.N, g.Gamma * g.d_bar, delta_theta))
    return sparse * module_envelope(g, delta_theta)


def _wavenumber(g: ArrayGeometry) -> float:
    return 2.0 * math.pi / g.wavelength


def nf_ff_curve(g: ArrayGeometry, focus_theta: float, r, theta,
                variant: PatternVariant = PatternVariant.EXACT):
    """Far-field (UPW) beamformer towards ``focus_theta`` observed at
    near-field points ``(r, theta)``."""
    variant = PatternVariant(variant)
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    s, sp = np.sin(theta), math.sin(focus_theta)
    k = _wavenumber(g)
    if variant is PatternVariant.EXACT:
        a = usw_matrix(g, r, s)
        v = upw_matrix(g, sp)
        return np.abs(a @ v.conj()) / g.size
    if variant is PatternVariant.CLOSED_FORM:
        raise DomainError("no closed form for far-field beamforming in the "
                          "near field")
    r_n = module_distances(g, r, s)
    weights = np.exp(-1j * k * (r_n + g.module_positions * sp))
    if variant is PatternVariant.DISTINCT:
        s_n = module_sines(g, r, s, r_n)
        h = dirichlet_kernel(g.M, g.d_bar, s_n - sp)
        return np.abs(np.sum(weights * h, axis=-1)) / g.N
    return (np.abs(np.sum(weights, axis=-1)) / g.N
            * module_envelope(g, s - sp))


def _closed_form(g: ArrayGeometry, focus: PolarLocation, r, theta, alias):
    delta_theta = np.sin(theta) - focus.sin_theta
    on_ring = np.cos(theta) ** 2 / r
    ring = on_ring - math.cos(focus.theta) ** 2 / focus.r
    # roundoff on the same distance ring would otherwise leave the exact branch
    ring = np.where(np.abs(ring) <= 1e-12 * (on_ring + 1.0 / focus.r), 0.0, ring)
    envelope = module_envelope(g, delta_theta)
    N = g.N
    nu = -math.pi * g.d_bar * g.Gamma ** 2 * g.d * ring
    mu = 2.0 * math.pi * g.d_bar * g.Gamma * delta_theta
    if alias:
        # the module sum is 2*pi periodic in mu (up to a unimodular factor)
        mu = mu - 2.0 * math.pi * np.rint(mu / (2.0 * math.pi))
    sparse = np.abs(dirichlet_kernel(N, g.Gamma * g.d_bar, delta_theta))
    out = np.array(sparse, dtype=float, copy=True)
    abs_nu = np.abs(nu)
    quad_phase = abs_nu * N * N / 4.0
    fres = (ring != 0) & (quad_phase >= _SMALL_QUAD_PHASE)
    if fres.any():
        sq = np.sqrt(abs_nu[fres])
        a = sq * N / 2.0
        b = mu[fres] / (2.0 * sq)
        out[fres] = np.abs((fresnel(a + b) + fresnel(a - b)) / (sq * N))
    small = (ring != 0) & ~fres
    if small.any():
        # Nearly linear phase: F(a+b)+F(a-b) cancels catastrophically, so the
        # underlying integral over [-1/2, 1/2] is evaluated by Gauss-Legendre.
        mu_s, nu_s = mu[small], nu[small]
        nodes = int(np.max(np.abs(mu_s)) * N / 2) + 64
        x, w = np.polynomial.legendre.leggauss(nodes)
        x = 0.5 * x
        ph = (nu_s[..., None] * (N * x) ** 2 + mu_s[..., None] * N * x)
        out[small] = np.abs(np.exp(1j * ph) @ (0.5 * w))
    return out * envelope


def nf_nf_curve(g: ArrayGeometry, focus: PolarLocation, r, theta,
                variant: PatternVariant = PatternVariant.EXACT, *,
                alias: bool = True):
    """Near-field (USW) beamformer focused at ``focus`` observed at ``(r, theta)``.

    ``CLOSED_FORM`` is the large-``N`` Fresnel-integral approximation of the
    common-AoA form.  With ``alias=True`` the spatial-frequency term is
    reduced modulo ``2 pi`` first, which the module sum is invariant to, so
    the closed form reproduces grating lobes as well as the main lobe.
    """
    variant = PatternVariant(variant)
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    s = np.sin(theta)
    k = _wavenumber(g)
    if variant is PatternVariant.EXACT:
        a = usw_matrix(g, r, s)
        v = usw_matrix(g, focus.r, focus.sin_theta)
        return np.abs(a @ v.conj()) / g.size
    if variant is PatternVariant.CLOSED_FORM:
        return _closed_form(g, focus, r, theta, alias)
    r_n = module_distances(g, r, s)
    rf_n = module_distances(g, focus.r, focus.sin_theta)
    weights = np.exp(-1j * k * (r_n - rf_n))
    if variant is PatternVariant.DISTINCT:
        s_n = module_sines(g, r, s, r_n)
        sf_n = module_sines(g, focus.r, focus.sin_theta, rf_n)
        h = dirichlet_kernel(g.M, g.d_bar, s_n - sf_n)
        return np.abs(np.sum(weights * h, axis=-1)) / g.N
    return (np.abs(np.sum(weights, axis=-1)) / g.N
            * module_envelope(g, s - focus.sin_theta))


def pattern_nf_ff(g: ArrayGeometry, focus_theta: float, observe: PolarLocation,
                  variant: PatternVariant = PatternVariant.EXACT) -> float:
    return float(nf_ff_curve(g, focus_theta, observe.r, observe.theta, variant))


def pattern_nf_nf(g: ArrayGeometry, focus: PolarLocation,
                  observe: PolarLocation,
                  variant: PatternVariant = PatternVariant.EXACT) -> float:
    return float(nf_nf_curve(g, focus, observe.r, observe.theta, variant))


def angular_resolution(g: ArrayGeometry, collocated: bool = False) -> float:
    """Half the null-to-null main-lobe width in spatial frequency.

    ``1 / (N Gamma d_bar)`` for the modular array, ``1 / (N M d_bar)`` for
    the collocated array with the same number of elements.
    """
    spacing = g.M if collocated else g.Gamma
    return 1.0 / (g.N * spacing * g.d_bar)


def grating_lobe_directions(g: ArrayGeometry) -> np.ndarray:
    """Spatial-frequency offsets ``i / (Gamma d_bar)`` of the grating lobes.

    Only offsets strictly inside ``(-2, 2)`` are returned; ``|delta| = 2`` is
    reachable only for the end-fire pair and is not counted.  Offsets that
    fall on a null of the module envelope are dropped, which is what makes
    the collocated array (``Gamma = M``) free of grating lobes.
    """
    period = 1.0 / (g.Gamma * g.d_bar)
    i_max = math.ceil(2.0 / period) + 1
    i = np.arange(-i_max, i_max + 1)
    lobes = (i[(i != 0) & (np.abs(i) * period < 2.0 - 1e-12)] * period).astype(float)
    return lobes[module_envelope(g, lobes) > 1e-9]


def grating_lobe_count_formula(spacing: float) -> int:
    """``floor(4 d - 1)`` lobes (main lobe included) for normalized spacing
    ``d > 1/2``; zero otherwise."""
    if spacing <= 0.5:
        return 0
    return math.floor(4.0 * spacing - 1.0 + 1e-12)


def _distance_scale(g: ArrayGeometry, theta_prime: float) -> float:
    return (g.N * g.Gamma * abs(math.cos(theta_prime)) / 2.0
            * math.sqrt(math.pi * g.d_bar * g.d))


def distance_pattern(g: ArrayGeometry, theta_prime: float, z):
    """Gain along the focus direction versus ``z = 1/r - 1/r'``.

    Evaluates ``|F(x) / x|`` with ``x = c sqrt(|z|)``; even in ``z`` and equal
    to 1 at ``z = 0``.
    """
    z = np.asarray(z, dtype=float)
    x = _distance_scale(g, theta_prime) * np.sqrt(np.abs(z))
    safe = np.where(x == 0, 1.0, x)
    out = np.where(x == 0, 1.0, np.abs(fresnel(safe) / safe))
    if out.ndim == 0:
        return float(out)
    return out


def half_power_distance(g: ArrayGeometry, theta_prime: float) -> float:
    """Half-power effective distance ``0.10 cos^2(theta') 2 D^2 / lambda``.

    Uses the large-``N`` aperture ``D = Gamma N d``.  Returns 0 at the
    singular directions ``theta' = +-pi/2``.
    """
    c2 = math.cos(theta_prime) ** 2
    if c2 < 1e-24:
        return 0.0
    D = g.Gamma * g.N * g.d
    return HALF_POWER_FRACTION * c2 * 2.0 * D * D / g.wavelength


def distance_resolution(g: ArrayGeometry,
                        focus: PolarLocation) -> tuple[float, float]:
    """Analytic half-power distance resolution ``(plus, minus)`` in meters.

    The far side is unbounded once the focus lies beyond ``r_hp``.
    """
    r_hp = half_power_distance(g, focus.theta)
    rp = focus.r
    plus = rp * rp / (r_hp - rp) if rp < r_hp else math.inf
    minus = rp * rp / (r_hp + rp)
    return plus, minus


def find_half_power(curve: Callable[[float], float], start: float, end: float,
                    tol: float = 1e-9, level: float = 0.5) -> float:
    """Bisection for ``curve(x) = level`` on a bracket with
    ``curve(start) > level > curve(end)``."""
    f_start, f_end = curve(start) - level, curve(end) - level
    if not (f_start > 0 > f_end):
        raise DomainError(f"invalid bracket: curve({start})={f_start + level}, "
                          f"curve({end})={f_end + level}")
    lo, hi = start, end
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= tol or mid in (lo, hi):
            break
        if curve(mid) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_crossing(curve, offsets, level=0.5):
    values = np.array([curve(x) for x in offsets])
    below = np.flatnonzero(values <= level)
    if below.size == 0:
        return math.inf
    i = below[0]
    if i == 0:
        raise DomainError("curve below half power at the first sample")
    scale = abs(offsets[i])
    return find_half_power(curve, offsets[i - 1], offsets[i],
                           tol=1e-12 * scale, level=level)


def numeric_distance_resolution(g: ArrayGeometry, focus: PolarLocation,
                                method: str = "exact",
                                samples: int = 1200) -> tuple[float, float]:
    """Half-power distance resolution by search instead of formula.

    ``method="exact"`` searches the directly summed near-field pattern;
    ``method="closed_form"`` searches :func:`distance_pattern` in ``z``.
    Returns ``(plus, minus)`` with ``plus = inf`` when the gain never drops to
    one half on the far side.
    """
    rp, th = focus.r, focus.theta
    if method == "exact":
        def gain(dr):
            return float(nf_nf_curve(g, focus, rp + dr, th))
    elif method == "closed_form":
        def gain(dr):
            return distance_pattern(g, th, 1.0 / (rp + dr) - 1.0 / rp)
    else:
        raise DomainError(f"unknown method {method!r}")
    far = rp * np.logspace(-6, 6, samples)
    near = -rp * np.logspace(-6, math.log10(1 - 1e-9), samples)
    plus = _first_crossing(gain, far)
    minus = -_first_crossing(gain, near)
    return plus, minus


@dataclass(frozen=True)
class ResolutionReport:
    angular_res: float
    grating_directions: list = field(default_factory=list)
    r_hp: float = 0.0
    dist_res_plus: float = math.inf
    dist_res_minus: float = 0.0
    bw_distance: float = math.inf
    singular_direction: bool = False


def resolution_report(g: ArrayGeometry, focus: PolarLocation) -> ResolutionReport:
    r_hp = half_power_distance(g, focus.theta)
    plus, minus = distance_resolution(g, focus)
    return ResolutionReport(
        angular_res=angular_resolution(g),
        grating_directions=grating_lobe_directions(g).tolist(),
        r_hp=r_hp,
        dist_res_plus=plus,
        dist_res_minus=minus,
        bw_distance=plus + minus,
        singular_direction=r_hp == 0.0,
    )


def local_maxima(y, x=None, refine: bool = True):
    """Strict interior local maxima of a sampled curve.

    Returns ``(positions, heights)``.  With ``refine`` each maximum is moved
    to the vertex of the parabola through it and its neighbours.
    """
    y = np.asarray(y, dtype=float)
    x = np.arange(y.size, dtype=float) if x is None else np.asarray(x, float)
    i = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    pos, height = x[i].copy(), y[i].copy()
    if refine and i.size:
        ym, y0, yp = y[i - 1], y[i], y[i + 1]
        den = ym - 2 * y0 + yp
        shift = np.where(den != 0, 0.5 * (ym - yp) / np.where(den != 0, den, 1), 0)
        step = 0.5 * (x[i + 1] - x[i - 1])
        pos = pos + shift * step
        height = y0 - 0.25 * (ym - yp) * shift
    return pos, height


def detect_grating_lobes(g: ArrayGeometry, delta_grid, threshold: float = 0.5):
    """Locate grating lobes of the far-field pattern on a sampled grid.

    The pattern is divided by the module envelope so that every lobe of the
    sparse-array factor has unit height regardless of how much the envelope
    attenuates it; maxima of the weighted curve at or above ``threshold``
    (other than the main lobe) are reported.

    Returns ``(positions, weighted_heights, raw_heights)``.
    """
    delta_grid = np.asarray(delta_grid, dtype=float)
    raw = pattern_ff_ff(g, delta_grid)
    env = module_envelope(g, delta_grid)
    weighted = np.where(env > 1e-9, raw / np.where(env > 1e-9, env, 1), 0.0)
    pos, height = local_maxima(weighted, delta_grid)
    keep = (height >= threshold) & (np.abs(pos) > 0.5 / (g.N * g.Gamma * g.d_bar))
    pos, height = pos[keep], height[keep]
    return pos, height, pattern_ff_ff(g, pos)
