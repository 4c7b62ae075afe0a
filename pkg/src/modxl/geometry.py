"""Modular extremely-large uniform linear array (XL-ULA) geometry.

The array lies on the y-axis, symmetric about the origin.  It consists of
``N`` modules of ``M`` elements each; elements inside a module are spaced
``d`` apart and the centers of neighbouring modules are ``Gamma * d`` apart.
Element ``(n, m)`` sits at ``y = (n * Gamma + m) * d`` where ``n`` and ``m``
run over the symmetric index sets ``{-(N-1)/2, ..., (N-1)/2}`` and
``{-(M-1)/2, ..., (M-1)/2}``.  For even counts these indices are
half-integers, which keeps the array centered and every closed form intact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError

__all__ = [
    "ArrayGeometry",
    "PolarLocation",
    "ApertureMetrics",
    "FieldRegion",
    "symmetric_indices",
    "element_position",
    "element_distance",
    "module_distance",
    "module_angle_sine",
    "aperture_metrics",
    "classify_region",
]

_INDEX_TOL = 1e-9


def symmetric_indices(count: int) -> np.ndarray:
    """Return ``-(count-1)/2, ..., (count-1)/2`` in ascending order."""
    return np.arange(count, dtype=float) - (count - 1) / 2.0


def _check_index(value: float, count: int, name: str) -> None:
    offset = value + (count - 1) / 2.0
    k = round(offset)
    if abs(offset - k) > _INDEX_TOL or not 0 <= k < count:
        half = (count - 1) / 2.0
        raise DomainError(f"{name}={value} is not in the index set "
                          f"{{-{half:g}, ..., {half:g}}}")


@dataclass(frozen=True)
class ArrayGeometry:
    """Parameters of a modular XL-ULA.

    Parameters
    ----------
    N : int
        Number of modules.
    M : int
        Number of elements per module.
    Gamma : int
        Module separation in multiples of ``d``; ``Gamma == M`` is the
        collocated (conventional ULA) special case.
    wavelength : float
        Carrier wavelength in meters.
    d : float, optional
        Inter-element spacing in meters; defaults to half a wavelength.
    """

    N: int
    M: int
    Gamma: int
    wavelength: float
    d: float | None = None

    def __post_init__(self):
        if self.d is None:
            object.__setattr__(self, "d", self.wavelength / 2.0)
        for name in ("N", "M", "Gamma"):
            value = getattr(self, name)
            if int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value}")
            object.__setattr__(self, name, int(value))
        if self.N < 1 or self.M < 1:
            raise DomainError("N and M must be positive")
        if self.Gamma < self.M:
            raise DomainError(f"Gamma={self.Gamma} must be >= M={self.M}")
        if not (self.d > 0 and self.wavelength > 0):
            raise DomainError("d and wavelength must be positive")

    @classmethod
    def reference(cls) -> "ArrayGeometry":
        """The 128-element modular array used in the multi-user scenarios."""
        return cls(N=32, M=4, Gamma=13, wavelength=0.1256, d=0.0628)

    def collocated(self) -> "ArrayGeometry":
        """Same modules packed contiguously (``Gamma = M``)."""
        return ArrayGeometry(self.N, self.M, self.M, self.wavelength, self.d)

    @property
    def size(self) -> int:
        return self.N * self.M

    @property
    def d_bar(self) -> float:
        """Element spacing normalized by the wavelength."""
        return self.d / self.wavelength

    @cached_property
    def module_indices(self) -> np.ndarray:
        return symmetric_indices(self.N)

    @cached_property
    def element_indices(self) -> np.ndarray:
        return symmetric_indices(self.M)

    @cached_property
    def module_positions(self) -> np.ndarray:
        """y-coordinates of the module reference (center) elements."""
        return self.module_indices * self.Gamma * self.d

    @cached_property
    def positions(self) -> np.ndarray:
        """y-coordinates of all elements, n-major / m-minor, length N*M."""
        n = self.module_indices[:, None]
        m = self.element_indices[None, :]
        return ((n * self.Gamma + m) * self.d).ravel()

    @cached_property
    def index_pairs(self) -> np.ndarray:
        """``(n, m)`` pairs in the same order as :attr:`positions`."""
        n, m = np.meshgrid(self.module_indices, self.element_indices,
                           indexing="ij")
        return np.column_stack([n.ravel(), m.ravel()])

    @property
    def module_size(self) -> float:
        return (self.M - 1) * self.d

    @property
    def aperture(self) -> float:
        return ((self.N - 1) * self.Gamma + (self.M - 1)) * self.d


@dataclass(frozen=True)
class PolarLocation:
    """Point ``q = [r cos(theta), r sin(theta)]`` in front of the array."""

    r: float
    theta: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")
        if not -math.pi / 2 - 1e-12 <= self.theta <= math.pi / 2 + 1e-12:
            raise DomainError(f"theta={self.theta} outside [-pi/2, pi/2]")

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def cartesian(self) -> np.ndarray:
        return np.array([self.r * math.cos(self.theta),
                         self.r * math.sin(self.theta)])

    @classmethod
    def from_cartesian(cls, x: float, y: float) -> "PolarLocation":
        return cls(math.hypot(x, y), math.atan2(y, x))


@dataclass(frozen=True)
class ApertureMetrics:
    S: float
    D: float
    rayleigh_full: float
    rayleigh_module: float
    extended_ff_bound: float
    amplitude_bound: float


class FieldRegion(enum.Enum):
    FAR_FIELD = "far_field"
    SUBARRAY_USW_COMMON_AOA = "subarray_usw_common_aoa"
    SUBARRAY_USW_DISTINCT_AOA = "subarray_usw_distinct_aoa"
    NUSW_NEAR = "nusw_near"


def element_position(g: ArrayGeometry, n: float, m: float) -> float:
    """y-coordinate of element ``m`` of module ``n`` in meters."""
    _check_index(n, g.N, "n")
    _check_index(m, g.M, "m")
    return (n * g.Gamma + m) * g.d


def _distance(r, sin_theta, y):
    return np.sqrt(r * r - 2.0 * r * y * sin_theta + y * y)


def element_distance(g: ArrayGeometry, loc: PolarLocation, n: float,
                     m: float) -> float:
    y = element_position(g, n, m)
    return float(_distance(loc.r, loc.sin_theta, y))


def module_distance(g: ArrayGeometry, loc: PolarLocation, n: float) -> float:
    """Distance from ``loc`` to the center of module ``n``.

    For odd ``M`` the center is the reference element ``m = 0``.
    """
    return float(_distance(loc.r, loc.sin_theta, _module_y(g, n)))


def _module_y(g: ArrayGeometry, n: float) -> float:
    _check_index(n, g.N, "n")
    return n * g.Gamma * g.d


def module_angle_sine(g: ArrayGeometry, loc: PolarLocation, n: float) -> float:
    """Sine of the direction of ``loc`` seen from module ``n``."""
    y_n = _module_y(g, n)
    r_n = float(_distance(loc.r, loc.sin_theta, y_n))
    return float(np.clip((loc.r * loc.sin_theta - y_n) / r_n, -1.0, 1.0))


def module_distances(g: ArrayGeometry, r, sin_theta):
    """Vectorized module distances; broadcasts ``r``/``sin_theta`` against
    a trailing module axis of length ``N``."""
    r = np.asarray(r, dtype=float)[..., None]
    s = np.asarray(sin_theta, dtype=float)[..., None]
    return _distance(r, s, g.module_positions)


def module_sines(g: ArrayGeometry, r, sin_theta, r_n=None):
    r = np.asarray(r, dtype=float)[..., None]
    s = np.asarray(sin_theta, dtype=float)[..., None]
    if r_n is None:
        r_n = _distance(r, s, g.module_positions)
    return np.clip((r * s - g.module_positions) / r_n, -1.0, 1.0)


def element_distances(g: ArrayGeometry, r, sin_theta):
    """Vectorized element distances with a trailing axis of length ``N*M``."""
    r = np.asarray(r, dtype=float)[..., None]
    s = np.asarray(sin_theta, dtype=float)[..., None]
    return _distance(r, s, g.positions)


def aperture_metrics(g: ArrayGeometry) -> ApertureMetrics:
    S, D, lam = g.module_size, g.aperture, g.wavelength
    if D <= 0:
        raise DomainError("a single-element array has no aperture")
    return ApertureMetrics(
        S=S,
        D=D,
        rayleigh_full=2 * D * D / lam,
        rayleigh_module=2 * S * S / lam,
        extended_ff_bound=max(5 * D, 4 * S * D / lam),
        amplitude_bound=1.2 * D,
    )


def classify_region(g: ArrayGeometry, r: float) -> FieldRegion:
    """Which array model applies at distance ``r``.

    Every region includes its lower boundary.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    a = aperture_metrics(g)
    if r >= a.rayleigh_full:
        return FieldRegion.FAR_FIELD
    if r >= a.extended_ff_bound:
        return FieldRegion.SUBARRAY_USW_COMMON_AOA
    if r >= a.rayleigh_module:
        return FieldRegion.SUBARRAY_USW_DISTINCT_AOA
    return FieldRegion.NUSW_NEAR
