"""Group-to-partition matching and per-group student selection."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .core import (
    DeviceGroup,
    DeviceProfile,
    FilterPartition,
    InfeasiblePlanError,
    StudentArch,
    ValidationError,
)
from .graph import FilterGraph, volume


def _members(g: DeviceGroup, devices: Sequence[DeviceProfile]) -> list[DeviceProfile]:
    by_id = {d.id: d for d in devices}
    try:
        return [by_id[m] for m in g.members]
    except KeyError as exc:
        raise ValidationError(f"group member {exc.args[0]!r} is not a known device") from None


def feasible_students(
    g: DeviceGroup, students: Sequence[StudentArch], devices: Sequence[DeviceProfile]
) -> list[StudentArch]:
    """Students whose parameters fit in the smallest member's memory."""
    cap = min(d.mem_bytes for d in _members(g, devices))
    return [s for s in students if s.param_bytes <= cap]


def partition_size(P: FilterPartition, g: FilterGraph | None = None, metric: str = "filter_count") -> float:
    if not P.members:
        raise ValidationError("empty partition")
    if metric == "filter_count":
        return float(len(P.members))
    if metric == "volume":
        if g is None:
            raise ValidationError("volume metric needs the filter graph")
        v = volume(g, P.members)
        if v <= 0:
            raise ValidationError(f"partition {list(P.members)} has zero volume")
        return v
    raise ValidationError(f"unknown partition size metric {metric!r}")


def device_delay(s: StudentArch, d: DeviceProfile) -> float:
    """Compute plus transmit time of one replica."""
    return s.flops / d.core_flops + s.output_bits / d.tran_bps


def group_delay(g: DeviceGroup, s: StudentArch, devices: Sequence[DeviceProfile]) -> float:
    """Completion time of a replica group: its fastest member finishes first."""
    return min(device_delay(s, d) for d in _members(g, devices))


def _ratio(s: StudentArch, size: float, delay: float) -> float:
    return s.flops / (size * delay)


def assignment_weight(
    g: DeviceGroup,
    P: FilterPartition,
    S_k: Sequence[StudentArch],
    graph: FilterGraph | None,
    devices: Sequence[DeviceProfile],
    metric: str = "filter_count",
) -> float:
    """Best accuracy-proxy-to-delay ratio over the feasible students; -inf if none."""
    if not S_k:
        return -math.inf
    size = partition_size(P, graph, metric)
    return max(_ratio(s, size, group_delay(g, s, devices)) for s in S_k)


def weight_matrix(
    groups: Sequence[DeviceGroup],
    partitions: Sequence[FilterPartition],
    students: Sequence[StudentArch],
    graph: FilterGraph | None,
    devices: Sequence[DeviceProfile],
    metric: str = "filter_count",
) -> np.ndarray:
    K = len(groups)
    if len(partitions) != K:
        raise ValidationError(f"{K} groups but {len(partitions)} partitions")
    W = np.empty((K, K))
    for k, g in enumerate(groups):
        S_k = feasible_students(g, students, devices)
        for kp, P in enumerate(partitions):
            W[k, kp] = assignment_weight(g, P, S_k, graph, devices, metric)
    return W


def select_student(
    g: DeviceGroup,
    P: FilterPartition,
    S_k: Sequence[StudentArch],
    graph: FilterGraph | None,
    devices: Sequence[DeviceProfile],
    metric: str = "filter_count",
) -> str:
    """Id of the student maximizing the weight ratio for this pairing.

    Ties go to the smaller parameter footprint, then the smaller id.
    """
    if not S_k:
        raise ValidationError(f"group {list(g.members)} has no feasible student")
    size = partition_size(P, graph, metric)
    best = min(
        S_k,
        key=lambda s: (-_ratio(s, size, group_delay(g, s, devices)), s.param_bytes, s.id),
    )
    return best.id


def _tie_tol(W: np.ndarray) -> float:
    finite = W[np.isfinite(W)]
    scale = float(np.max(np.abs(finite))) if finite.size else 1.0
    return 1e-9 * max(scale, 1.0) * max(W.shape[0], 1)


def _hungarian_min(C: np.ndarray):
    """Shortest-augmenting-path Hungarian method on a square cost matrix.

    ``inf`` entries are forbidden. Returns ``(row_to_col, u, v)`` with dual
    potentials satisfying ``u[i] + v[j] <= C[i, j]``, tight on the matching.
    Raises ``InfeasiblePlanError`` when no finite perfect matching exists.
    """
    n = C.shape[0]
    INF = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    a = [[0.0] * (n + 1)] + [[0.0] + [float(x) for x in row] for row in C]
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta, j1 = INF, -1
            row = a[i0]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            if delta == INF:
                raise InfeasiblePlanError(
                    "matching", "no perfect matching avoids infeasible group/partition pairs"
                )
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    match = [0] * n
    for j in range(1, n + 1):
        match[p[j] - 1] = j - 1
    return match, np.array(u[1:]), np.array(v[1:])


def _has_perfect_matching(adj: list[list[int]], rows: list[int], cols: set[int]) -> bool:
    owner: dict[int, int] = {}

    def augment(r, seen):
        for c in adj[r]:
            if c in cols and c not in seen:
                seen.add(c)
                if c not in owner or augment(owner[c], seen):
                    owner[c] = r
                    return True
        return False

    return all(augment(r, set()) for r in rows)


def km_match(W) -> tuple[int, ...]:
    """Maximum-total-weight perfect matching of rows to columns.

    ``-inf`` marks forbidden pairs. Among optimal matchings (totals equal
    within a small relative tolerance) the lexicographically smallest
    assignment vector is returned. Entry ``k`` of the result is the column
    matched to row ``k``.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValidationError(f"weight matrix must be square, got shape {W.shape}")
    K = W.shape[0]
    if K == 0:
        return ()
    if np.any(np.isnan(W)) or np.any(W == math.inf):
        raise ValidationError("weights must be finite or -inf")
    C = np.where(np.isfinite(W), -W, math.inf)
    _, u, v = _hungarian_min(C)

    # Optimal matchings are exactly the perfect matchings on tight edges.
    tol = _tie_tol(W)
    adj = [
        [j for j in range(K) if np.isfinite(C[i, j]) and C[i, j] - u[i] - v[j] <= tol]
        for i in range(K)
    ]
    chosen: list[int] = []
    free = set(range(K))
    for i in range(K):
        for j in adj[i]:
            if j in free and _has_perfect_matching(adj, list(range(i + 1, K)), free - {j}):
                chosen.append(j)
                free.discard(j)
                break
        else:  # pragma: no cover - tight graph always holds the Hungarian matching
            raise RuntimeError("tight-edge graph lost its perfect matching")
    return tuple(chosen)


def matching_total(W, matching: Sequence[int]) -> float:
    W = np.asarray(W, dtype=float)
    return float(sum(W[k, j] for k, j in enumerate(matching)))


def brute_force_match(W) -> tuple[int, ...]:
    """Exhaustive optimum over all permutations, same tie rule as ``km_match``."""
    W = np.asarray(W, dtype=float)
    K = W.shape[0]
    if K > 8:
        raise ValidationError(f"brute force limited to K <= 8, got {K}")
    if K == 0:
        return ()
    perms = np.array(list(itertools.permutations(range(K))), dtype=int)
    totals = W[np.arange(K)[None, :], perms].sum(axis=1)
    best = totals.max()
    if best == -math.inf:
        raise InfeasiblePlanError(
            "matching", "no perfect matching avoids infeasible group/partition pairs"
        )
    # permutations() yields lexicographic order, so the first near-best wins.
    first = int(np.flatnonzero(totals >= best - _tie_tol(W))[0])
    return tuple(int(j) for j in perms[first])
