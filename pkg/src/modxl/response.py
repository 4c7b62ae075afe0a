"""Array response vectors of the modular XL-ULA.

Entries are ordered n-major, m-minor over the ascending symmetric index
sets (see :mod:`modxl.geometry`).  The UPW response omits the common phase
``exp(-j 2 pi r / lambda)``; only magnitudes of inner products matter
downstream, so comparisons across models must use ``|a1^H a2|``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .geometry import (ArrayGeometry, PolarLocation, element_distances,
                       module_distances, module_sines)

__all__ = [
    "ResponseModel",
    "KernelKind",
    "ArrayResponse",
    "SteeringKernel",
    "response_nusw",
    "response_usw",
    "response_upw",
    "response_subarray_distinct",
    "response_subarray_common",
    "kernel_p",
    "kernel_b",
    "kernel_e",
    "usw_matrix",
    "upw_matrix",
    "write_response_csv",
]


class ResponseModel(enum.Enum):
    NUSW = "nusw"
    USW = "usw"
    UPW = "upw"
    SUBARRAY_DISTINCT = "subarray_distinct"
    SUBARRAY_COMMON = "subarray_common"


class KernelKind(enum.Enum):
    SPARSE_UPW_P = "p"
    COLLOCATED_UPW_B = "b"
    SPARSE_USW_E = "e"


@dataclass(frozen=True)
class ArrayResponse:
    entries: np.ndarray
    model: ResponseModel

    def __len__(self):
        return len(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class SteeringKernel:
    entries: np.ndarray
    kind: KernelKind

    def __len__(self):
        return len(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def _k(g: ArrayGeometry) -> float:
    return 2.0 * np.pi / g.wavelength


# Vectorized forms: r and sin_theta broadcast, trailing axis is the array.

def usw_matrix(g: ArrayGeometry, r, sin_theta) -> np.ndarray:
    """USW responses for many locations, shape ``(..., N*M)``."""
    return np.exp(-1j * _k(g) * element_distances(g, r, sin_theta))


def upw_matrix(g: ArrayGeometry, sin_theta) -> np.ndarray:
    """UPW responses for many directions, shape ``(..., N*M)``."""
    s = np.asarray(sin_theta, dtype=float)[..., None]
    return np.exp(1j * _k(g) * g.positions * s)


def response_nusw(g: ArrayGeometry, loc: PolarLocation) -> ArrayResponse:
    """Exact phase and amplitude; entry moduli are ``r / r_{n,m}``.

    The ``sqrt(beta0) / r`` prefix of the physical channel is left to the
    channel-synthesis layer.
    """
    dist = element_distances(g, loc.r, loc.sin_theta)
    return ArrayResponse(loc.r / dist * np.exp(-1j * _k(g) * dist),
                         ResponseModel.NUSW)


def response_usw(g: ArrayGeometry, loc: PolarLocation) -> ArrayResponse:
    return ArrayResponse(usw_matrix(g, loc.r, loc.sin_theta),
                         ResponseModel.USW)


def response_upw(g: ArrayGeometry, theta: float) -> ArrayResponse:
    return ArrayResponse(upw_matrix(g, np.sin(theta)), ResponseModel.UPW)


def kernel_p(g: ArrayGeometry, theta: float) -> SteeringKernel:
    """Far-field response of the N-element sparse array of module centers."""
    phase = _k(g) * g.module_positions * np.sin(theta)
    return SteeringKernel(np.exp(1j * phase), KernelKind.SPARSE_UPW_P)


def _b_from_sine(g: ArrayGeometry, sin_theta):
    s = np.asarray(sin_theta, dtype=float)[..., None]
    return np.exp(1j * _k(g) * g.element_indices * g.d * s)


def kernel_b(g: ArrayGeometry, theta: float = None, *,
             sin_theta: float = None) -> SteeringKernel:
    """Far-field response of one M-element module.

    Pass either ``theta`` or, for the per-module angles of the distinct-AoA
    model, ``sin_theta`` directly.
    """
    if (theta is None) == (sin_theta is None):
        raise TypeError("give exactly one of theta or sin_theta")
    s = np.sin(theta) if sin_theta is None else sin_theta
    return SteeringKernel(_b_from_sine(g, s), KernelKind.COLLOCATED_UPW_B)


def kernel_e(g: ArrayGeometry, loc: PolarLocation) -> SteeringKernel:
    """Spherical-wave response of the module centers, ``exp(-j k r_n)``."""
    r_n = module_distances(g, loc.r, loc.sin_theta)
    return SteeringKernel(np.exp(-1j * _k(g) * r_n), KernelKind.SPARSE_USW_E)


def response_subarray_distinct(g: ArrayGeometry,
                               loc: PolarLocation) -> ArrayResponse:
    """Spherical wave across modules, plane wave within each module, with
    the per-module arrival angle."""
    r_n = module_distances(g, loc.r, loc.sin_theta)
    s_n = module_sines(g, loc.r, loc.sin_theta, r_n)
    blocks = np.exp(-1j * _k(g) * r_n)[:, None] * _b_from_sine(g, s_n)
    return ArrayResponse(blocks.ravel(), ResponseModel.SUBARRAY_DISTINCT)


def response_subarray_common(g: ArrayGeometry,
                             loc: PolarLocation) -> ArrayResponse:
    e = kernel_e(g, loc).entries
    b = kernel_b(g, loc.theta).entries
    return ArrayResponse(np.kron(e, b), ResponseModel.SUBARRAY_COMMON)


def write_response_csv(g: ArrayGeometry, response: ArrayResponse, path) -> None:
    """Dump a response vector with columns ``n, m, re, im``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "re", "im"])
        for (n, m), a in zip(g.index_pairs, response.entries):
            w.writerow([f"{n:g}", f"{m:g}", repr(float(a.real)),
                        repr(float(a.imag))])
