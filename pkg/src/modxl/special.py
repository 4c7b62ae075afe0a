"""Special functions used by the beam-pattern formulas.

``fresnel`` is the complex Fresnel integral in the unnormalized convention

    F(x) = C(x) + j S(x) = integral_0^x exp(j t^2) dt,

which differs from ``scipy.special.fresnel`` (argument ``pi t^2 / 2``).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["fresnel", "dirichlet_kernel", "FRESNEL_LIMIT"]

#: ``F(+inf)``
FRESNEL_LIMIT = math.sqrt(math.pi / 8.0) * (1 + 1j)

_SERIES_MAX = 2.0
_ASYMPTOTIC_MIN = 6.0
_EPS = 1e-17
_CF_MAX_ITER = 2000


def _series(x: np.ndarray) -> np.ndarray:
    # exp(j t^2) = sum (j t^2)^k / k!, integrated term by term.
    x2j = 1j * x * x
    term = x.astype(complex)  # x^(2k+1) j^k / k!
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * x2j / k
        contrib = term / (2 * k + 1)
        total += contrib
        if np.all(np.abs(contrib) <= _EPS * np.abs(total)):
            return total


def _erfc_cf(z: np.ndarray) -> np.ndarray:
    """erfc(z) for Re z > 0 by the Laplace continued fraction (modified Lentz).

    erfc(z) = exp(-z^2) / sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    """
    tiny = 1e-300
    f = z.copy()
    c = z.copy()
    dd = np.zeros_like(z)
    done = np.zeros(z.shape, dtype=bool)
    for n in range(1, _CF_MAX_ITER):
        a = 0.5 * n
        dd = z + a * dd
        dd = np.where(np.abs(dd) < tiny, tiny, dd)
        c = z + a / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        dd = 1.0 / dd
        delta = c * dd
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all():
            break
    else:  # pragma: no cover - convergence is guaranteed for |z| >= 2
        raise RuntimeError("continued fraction did not converge")
    return np.exp(-z * z) / (math.sqrt(math.pi) * f)


def _continued_fraction(x: np.ndarray) -> np.ndarray:
    # F(x) = sqrt(pi)/2 e^{j pi/4} erf(e^{-j pi/4} x)
    rot = np.exp(-0.25j * math.pi)
    z = rot * x
    return 0.5 * math.sqrt(math.pi) / rot * (1.0 - _erfc_cf(z))


def _asymptotic(x: np.ndarray) -> np.ndarray:
    # integral_x^inf exp(j t^2) dt ~ j e^{j x^2} / (2x) sum (2k-1)!! / (2j x^2)^k
    # summed up to the smallest term.
    u = 1.0 / (2j * x * x)
    term = np.ones_like(u)
    total = term.copy()
    best = np.abs(term)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term = term * (2 * k - 1) * u
        mag = np.abs(term)
        active &= (mag < best) & (mag > _EPS * np.abs(total))
        total = np.where(active, total + term, total)
        best = np.where(active, mag, best)
    tail = 1j * np.exp(1j * x * x) / (2.0 * x) * total
    return FRESNEL_LIMIT - tail


def fresnel(x):
    """Complex Fresnel integral ``F(x) = C(x) + j S(x)``.

    Power series for ``|x| <= 2``, the continued fraction of the
    complementary error function for ``2 < |x| < 6`` and the auxiliary
    asymptotic expansion beyond.  Absolute error is about ``1e-14`` for
    moderate arguments; for very large ``|x|`` it is limited by rounding of
    the phase ``x**2``.

    Parameters
    ----------
    x : float or array_like
        Real argument(s).

    Returns
    -------
    complex or ndarray of complex
    """
    xa = np.asarray(x, dtype=float)
    flat = np.abs(xa).ravel()
    out = np.empty(flat.shape, dtype=complex)
    lo = flat <= _SERIES_MAX
    hi = flat >= _ASYMPTOTIC_MIN
    mid = ~(lo | hi)
    if lo.any():
        out[lo] = _series(flat[lo])
    if mid.any():
        out[mid] = _continued_fraction(flat[mid])
    if hi.any():
        out[hi] = _asymptotic(flat[hi])
    out = out.reshape(xa.shape) * np.sign(xa)
    out = np.where(xa == 0, 0j, out)
    if np.ndim(x) == 0:
        return complex(out)
    return out


def dirichlet_kernel(count, spacing, delta):
    """Signed Dirichlet kernel ``sin(pi K s D) / (K sin(pi s D))``.

    ``K`` is the element count, ``s`` the wavelength-normalized spacing and
    ``D`` the spatial-frequency difference.  At the removable singularities
    ``s * D = k`` (integer ``k``) the analytic limit ``(-1)^((K-1) k)`` is
    returned, so main and grating lobes evaluate to exactly +-1.
    """
    delta = np.asarray(delta, dtype=float)
    phase = math.pi * spacing * delta
    den = np.sin(phase)
    singular = np.abs(den) < 1e-12
    safe = np.where(singular, 1.0, den)
    val = np.sin(count * phase) / (count * safe)
    k = np.rint(spacing * delta)
    limit = np.where(((count - 1) * k) % 2 == 0, 1.0, -1.0)
    out = np.where(singular, limit, val)
    if out.ndim == 0:
        return float(out)
    return out
