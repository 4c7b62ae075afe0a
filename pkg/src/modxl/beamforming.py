"""Linear receive combining, SINR and sum rate of grouped users.

Users sharing a resource block (RB) interfere with each other.  The
combiner of user ``k`` is designed from an estimated channel set ``h_hat``
(near-field or far-field), while the resulting SINR

    gamma_k = P_k |v^H h_k|^2 / (sum_{i != k} P_i |v^H h_i|^2 + 1)

is always evaluated on the true near-field channels.  Powers are transmit
SNRs (noise-normalized), so the noise term is 1.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometryError, DomainError

__all__ = [
    "Scheme",
    "CSI",
    "BeamformerSpec",
    "GroupSinrReport",
    "channel_matrix",
    "combiner",
    "beamform",
    "sinr",
    "group_report",
    "correlation",
    "beta_mrc",
    "beta_zf",
    "beta_mmse",
    "perfect_csi_sinr",
    "normalize_groups",
    "sum_rate",
    "user_report_rows",
    "write_user_report_csv",
    "ZF_RANK_TOL",
]

#: relative singular-value threshold of the ZF interferer basis
ZF_RANK_TOL = 1e-10


class Scheme(enum.Enum):
    MRC = "mrc"
    ZF = "zf"
    MMSE = "mmse"


class CSI(enum.Enum):
    NEAR_FIELD = "nf"
    FAR_FIELD = "ff"


@dataclass(frozen=True)
class BeamformerSpec:
    scheme: Scheme = Scheme.MMSE
    csi: CSI = CSI.NEAR_FIELD

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "csi", CSI(self.csi))

    @property
    def label(self) -> str:
        return f"{self.csi.value}-{self.scheme.value}"


@dataclass
class GroupSinrReport:
    users: list
    beamformers: np.ndarray
    sinr: np.ndarray
    rate: np.ndarray

    @property
    def total_rate(self) -> float:
        return float(self.rate.sum())


def channel_matrix(channels: Sequence, csi: CSI = CSI.NEAR_FIELD) -> np.ndarray:
    """Stack ``h_nf`` (or ``h_ff``) of ``UserChannel`` objects as rows."""
    attr = "h_nf" if CSI(csi) is CSI.NEAR_FIELD else "h_ff"
    return np.array([getattr(c, attr) for c in channels], dtype=complex)


def _unit(x: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(x)
    if not n > 0:
        raise DomainError("cannot normalize a zero vector")
    return x / n


def _zf_direction(k: int, H_hat: np.ndarray) -> np.ndarray:
    h = H_hat[k]
    B = np.delete(H_hat, k, axis=0).T
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    if s[0] == 0 or s[-1] < ZF_RANK_TOL * s[0]:
        raise DegenerateGeometryError(
            f"ZF interferer matrix is rank deficient (sigma_min/sigma_max = "
            f"{s[-1] / s[0] if s[0] else 0.0:.3g})")
    x = h - U @ (U.conj().T @ h)
    if np.linalg.norm(x) <= ZF_RANK_TOL * np.linalg.norm(h):
        raise DegenerateGeometryError(
            f"user {k}'s channel lies in the span of its interferers")
    return x


def _mmse_direction(k: int, H_hat: np.ndarray, powers: np.ndarray) -> np.ndarray:
    others = np.delete(np.arange(len(H_hat)), k)
    Hi = H_hat[others]
    C = (Hi.T * powers[others]) @ Hi.conj() + np.eye(H_hat.shape[1])
    return np.linalg.solve(C, H_hat[k])


def combiner(scheme: Scheme, k: int, H_hat: np.ndarray, powers) -> np.ndarray:
    """Unit-norm combiner for group member ``k``.

    Parameters
    ----------
    scheme : Scheme
    k : int
        Position of the user within the group.
    H_hat : ndarray, shape (G, NM)
        Estimated channels of the group members, one per row.
    powers : array_like, shape (G,)
        Transmit SNRs of the group members (linear).
    """
    H_hat = np.atleast_2d(np.asarray(H_hat, dtype=complex))
    powers = np.asarray(powers, dtype=float)
    scheme = Scheme(scheme)
    if len(H_hat) == 0:
        raise DomainError("empty group")
    if len(H_hat) == 1 or scheme is Scheme.MRC:
        return _unit(H_hat[k])
    if scheme is Scheme.ZF:
        return _unit(_zf_direction(k, H_hat))
    return _unit(_mmse_direction(k, H_hat, powers))


def beamform(spec: BeamformerSpec, k: int, channels: Sequence, powers) -> np.ndarray:
    """Combiner of member ``k`` of a group of ``UserChannel`` objects."""
    return combiner(spec.scheme, k, channel_matrix(channels, spec.csi), powers)


def sinr(k: int, v: np.ndarray, H: np.ndarray, powers) -> float:
    """SINR of group member ``k`` with combiner ``v`` on true channels ``H``."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    powers = np.asarray(powers, dtype=float)
    g = np.abs(H.conj() @ v) ** 2 * powers
    return float(g[k] / (g.sum() - g[k] + 1.0))


def group_report(spec: BeamformerSpec, channels: Sequence, powers,
                 users: Sequence[int] | None = None) -> GroupSinrReport:
    """Design combiners and evaluate SINRs of every member of one group."""
    powers = np.asarray(powers, dtype=float)
    H_hat = channel_matrix(channels, spec.csi)
    H = channel_matrix(channels, CSI.NEAR_FIELD)
    G = len(H)
    V = np.empty_like(H)
    gam = np.empty(G)
    for k in range(G):
        V[k] = combiner(spec.scheme, k, H_hat, powers)
        gam[k] = sinr(k, V[k], H, powers)
    users = list(range(G)) if users is None else list(users)
    return GroupSinrReport(users, V, gam, np.log2(1.0 + gam))


def correlation(h_a: np.ndarray, h_b: np.ndarray) -> float:
    """Normalized channel correlation ``|h_a^H h_b| / (|h_a| |h_b|)``."""
    na, nb = np.linalg.norm(h_a), np.linalg.norm(h_b)
    if not (na > 0 and nb > 0):
        raise DomainError("correlation of a zero vector is undefined")
    return float(min(1.0, abs(np.vdot(h_a, h_b)) / (na * nb)))


# Perfect-CSI SNR loss factors: gamma_k = P_k |h_k|^2 (1 - beta_k).

def beta_mrc(k: int, H: np.ndarray, powers) -> float:
    H = np.asarray(H, dtype=complex)
    powers = np.asarray(powers, dtype=float)
    x = sum(powers[i] * correlation(H[k], H[i]) ** 2 * np.vdot(H[i], H[i]).real
            for i in range(len(H)) if i != k)
    return float(x / (x + 1.0))


def beta_zf(k: int, H: np.ndarray) -> float:
    H = np.asarray(H, dtype=complex)
    h = H[k]
    B = np.delete(H, k, axis=0).T
    if B.shape[1] == 0:
        return 0.0
    # A h = B (B^H B)^{-1} B^H h via a least-squares solve
    coef, *_ = np.linalg.lstsq(B, h, rcond=None)
    return float(np.vdot(h, B @ coef).real / np.vdot(h, h).real)


def beta_mmse(k: int, H: np.ndarray, powers) -> float:
    H = np.asarray(H, dtype=complex)
    powers = np.asarray(powers, dtype=float)
    others = np.delete(np.arange(len(H)), k)
    Hi = H[others]
    C = (Hi.T * powers[others]) @ Hi.conj() + np.eye(H.shape[1])
    h = H[k]
    hh = np.vdot(h, h).real
    return float((hh - np.vdot(h, np.linalg.solve(C, h)).real) / hh)


def perfect_csi_sinr(scheme: Scheme, k: int, H: np.ndarray, powers) -> float:
    """Closed-form SINR under perfect near-field CSI."""
    H = np.asarray(H, dtype=complex)
    powers = np.asarray(powers, dtype=float)
    scheme = Scheme(scheme)
    if scheme is Scheme.MRC:
        beta = beta_mrc(k, H, powers)
    elif scheme is Scheme.ZF:
        beta = beta_zf(k, H)
    else:
        beta = beta_mmse(k, H, powers)
    return float(powers[k] * np.vdot(H[k], H[k]).real * (1.0 - beta))


def normalize_groups(grouping, K: int, Q: int | None = None) -> list:
    """Turn a grouping into ``Q`` lists of user indices, checking that it
    partitions ``range(K)``.

    ``grouping`` is either a length-``K`` vector of RB indices or a
    sequence of user-index collections (one per RB).
    """
    arr = np.asarray(grouping, dtype=object)
    if arr.ndim == 1 and len(arr) == K and all(
            isinstance(x, (int, np.integer)) for x in arr):
        rb = np.asarray(grouping, dtype=int)
        if rb.min(initial=0) < 0:
            raise DomainError("RB indices must be non-negative")
        nq = int(rb.max(initial=-1)) + 1 if Q is None else Q
        if rb.max(initial=-1) >= nq:
            raise DomainError(f"RB index {rb.max()} out of range for Q={nq}")
        return [list(np.flatnonzero(rb == q)) for q in range(nq)]
    try:
        groups = [sorted(int(u) for u in g) for g in grouping]
    except TypeError:
        raise DomainError(f"grouping must be a length-{K} RB vector or a list "
                          "of groups") from None
    if Q is not None and len(groups) != Q:
        raise DomainError(f"expected {Q} groups, got {len(groups)}")
    flat = sorted(u for g in groups for u in g)
    if flat != list(range(K)):
        raise DomainError("grouping does not assign every user to exactly one RB")
    return groups


def sum_rate(grouping, channels: Sequence, powers, spec: BeamformerSpec,
             Q: int | None = None) -> float:
    """Total rate in bps/Hz over all RBs."""
    groups = normalize_groups(grouping, len(channels), Q)
    powers = np.asarray(powers, dtype=float)
    total = 0.0
    for g in groups:
        if g:
            total += group_report(spec, [channels[u] for u in g], powers[g],
                                  g).total_rate
    return total


def user_report_rows(grouping, channels: Sequence, powers,
                     spec: BeamformerSpec, Q: int | None = None) -> list:
    groups = normalize_groups(grouping, len(channels), Q)
    powers = np.asarray(powers, dtype=float)
    rows = []
    for q, g in enumerate(groups):
        if not g:
            continue
        rep = group_report(spec, [channels[u] for u in g], powers[g], g)
        for u, s, r in zip(rep.users, rep.sinr, rep.rate):
            rows.append({"user": u, "rb": q, "scheme": spec.scheme.value,
                         "csi": spec.csi.value,
                         "sinr_db": 10 * np.log10(s) if s > 0 else -np.inf,
                         "rate": r})
    rows.sort(key=lambda row: row["user"])
    return rows


def write_user_report_csv(rows: Sequence[dict], path) -> None:
    cols = ["user", "rb", "scheme", "csi", "sinr_db", "rate"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([row["user"], row["rb"], row["scheme"], row["csi"],
                        repr(float(row["sinr_db"])), repr(float(row["rate"]))])
