"""User grouping over orthogonal resource blocks (RBs).

``greedy_grouping`` visits users in a seeded random order and puts each one
into the RB that maximizes the total sum rate with the users placed so far.
``random_grouping`` is the uniform baseline and ``brute_force_grouping`` an
exhaustive oracle for tiny instances.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .beamforming import BeamformerSpec, group_report, normalize_groups
from .errors import DegenerateGeometryError, DomainError

__all__ = [
    "GroupingAssignment",
    "greedy_grouping",
    "random_grouping",
    "evaluate_grouping",
    "brute_force_grouping",
    "assignment_to_dict",
    "write_assignment_json",
]


@dataclass
class GroupingAssignment:
    """RB index (0-based) per user, plus the achieved rates if evaluated."""

    assignment: np.ndarray
    Q: int
    sum_rate: float | None = None
    per_rb_rates: list = field(default_factory=list)

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=int)
        if self.assignment.ndim != 1:
            raise DomainError("assignment must be a vector")
        if self.Q < 1:
            raise DomainError("Q must be positive")
        if len(self.assignment) and not (
                0 <= self.assignment.min() and self.assignment.max() < self.Q):
            raise DomainError("RB index out of range")

    @property
    def K(self) -> int:
        return len(self.assignment)

    @property
    def groups(self) -> list:
        return [list(np.flatnonzero(self.assignment == q)) for q in range(self.Q)]

    @property
    def indicator(self) -> np.ndarray:
        """Binary ``Q x K`` matrix ``x[q, k]``."""
        x = np.zeros((self.Q, self.K), dtype=int)
        x[self.assignment, np.arange(self.K)] = 1
        return x


def _group_rate(members: Sequence[int], channels, powers, spec) -> float:
    if not members:
        return 0.0
    members = list(members)
    return group_report(spec, [channels[u] for u in members], powers[members],
                        members).total_rate


def _candidate_rate(members, channels, powers, spec) -> float:
    try:
        return _group_rate(members, channels, powers, spec)
    except DegenerateGeometryError:
        # ZF cannot serve this group at all
        return -math.inf


def greedy_grouping(channels: Sequence, powers, Q: int, spec: BeamformerSpec,
                    seed: int, compare: str = "full") -> GroupingAssignment:
    """Greedy RB assignment.

    Parameters
    ----------
    channels : sequence of UserChannel
    powers : array_like
        Per-user transmit SNR (linear).
    Q : int
        Number of RBs.
    spec : BeamformerSpec
        Combiner design used in every rate evaluation.
    seed : int
        Seeds the user visiting order.
    compare : {"full", "delta"}
        ``"full"`` ranks candidates by the whole sum over all RBs;
        ``"delta"`` by the change of the candidate RB only.  Both pick the
        same RB.

    Notes
    -----
    Ties go to the lowest RB index.  Combiners are rebuilt from scratch
    for every candidate group.
    """
    K = len(channels)
    if K == 0:
        raise DomainError("no users to group")
    if Q < 1:
        raise DomainError("Q must be positive")
    if compare not in ("full", "delta"):
        raise ValueError(f"unknown compare mode {compare!r}")
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (K,))
    order = rng.stream(seed, rng.GREEDY_ORDER).permutation(K)
    groups = [[] for _ in range(Q)]
    rates = np.zeros(Q)
    for k in order:
        k = int(k)
        cand = np.array([_candidate_rate(groups[q] + [k], channels, powers, spec)
                         for q in range(Q)])
        # sum over all RBs with RB q replaced by its candidate rate
        totals = rates.sum() - rates + cand
        score = totals if compare == "full" else cand - rates
        best = int(np.argmax(score))  # first maximum on ties
        if not np.isfinite(score[best]):
            raise DegenerateGeometryError(f"no feasible RB for user {k}")
        assert totals[best] >= totals.max(), "greedy step is not optimal"
        groups[best].append(k)
        rates[best] = cand[best]
    assignment = np.empty(K, dtype=int)
    for q, g in enumerate(groups):
        assignment[g] = q
    return GroupingAssignment(assignment, Q, float(rates.sum()), rates.tolist())


def random_grouping(K: int, Q: int, seed: int) -> GroupingAssignment:
    """Each user picks an RB uniformly and independently."""
    if K < 0 or Q < 1:
        raise DomainError("need K >= 0 and Q >= 1")
    assignment = rng.stream(seed, rng.RANDOM_GROUPING).integers(0, Q, size=K)
    return GroupingAssignment(assignment, Q)


def evaluate_grouping(assignment, channels: Sequence, powers,
                      spec: BeamformerSpec, Q: int | None = None) -> GroupingAssignment:
    """Sum rate and per-RB rates of a fixed grouping."""
    K = len(channels)
    if isinstance(assignment, GroupingAssignment):
        Q = assignment.Q if Q is None else Q
        assignment = assignment.assignment
    groups = normalize_groups(assignment, K, Q)
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (K,))
    per_rb = [_group_rate(g, channels, powers, spec) for g in groups]
    vec = np.empty(K, dtype=int)
    for q, g in enumerate(groups):
        vec[g] = q
    return GroupingAssignment(vec, len(groups), float(sum(per_rb)), per_rb)


def brute_force_grouping(channels: Sequence, powers, Q: int,
                         spec: BeamformerSpec) -> GroupingAssignment:
    """Optimal grouping by enumerating every assignment.

    RB labels are exchangeable, so only assignments in canonical form
    (first occurrences in increasing label order) are evaluated, and group
    rates are memoized.
    """
    K = len(channels)
    if K == 0:
        raise DomainError("no users to group")
    if Q ** K > 10 ** 7:
        raise DomainError("instance too large for exhaustive search")
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (K,))
    cache = {}

    def rate(members):
        if members not in cache:
            cache[members] = _candidate_rate(list(members), channels, powers, spec)
        return cache[members]

    best, best_vec = -math.inf, None
    for vec in itertools.product(range(Q), repeat=K):
        if any(vec[i] > max(vec[:i], default=-1) + 1 for i in range(K)):
            continue
        total = sum(rate(tuple(i for i in range(K) if vec[i] == q))
                    for q in range(Q))
        if total > best:
            best, best_vec = total, vec
    if best_vec is None or not np.isfinite(best):
        raise DegenerateGeometryError("no feasible grouping")
    return evaluate_grouping(np.array(best_vec), channels, powers, spec, Q)


def assignment_to_dict(result: GroupingAssignment, seed, spec: BeamformerSpec) -> dict:
    return {
        "seed": seed,
        "scheme": spec.scheme.value,
        "csi": spec.csi.value,
        "assignment": result.assignment.tolist(),
        "sum_rate": result.sum_rate,
        "per_rb_rates": list(map(float, result.per_rb_rates)),
    }


def write_assignment_json(result: GroupingAssignment, seed, spec, path) -> None:
    with open(path, "w") as fh:
        json.dump(assignment_to_dict(result, seed, spec), fh, indent=1)
