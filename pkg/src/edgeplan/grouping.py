"""Reliability-constrained follow-the-leader grouping of edge devices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DeviceGroup, DeviceProfile, InfeasiblePlanError, PlannerConfig, ValidationError


def capacity_similarity(a: DeviceProfile, b: DeviceProfile) -> float:
    """Euclidean distance between the (memory, compute) points of two devices."""
    return math.hypot(a.mem_bytes - b.mem_bytes, a.core_flops - b.core_flops)


def centroid_similarity(g: DeviceGroup, d: DeviceProfile) -> float:
    return math.hypot(g.centroid[0] - d.mem_bytes, g.centroid[1] - d.core_flops)


def group_outage_product(g: DeviceGroup, devices: Sequence[DeviceProfile]) -> float:
    """Probability that every member of ``g`` loses its output."""
    by_id = {d.id: d for d in devices}
    try:
        return math.prod(by_id[m].p_out for m in g.members)
    except KeyError as exc:
        raise ValidationError(f"group member {exc.args[0]!r} is not a known device") from None


@dataclass(frozen=True)
class JoinEvent:
    """One step of the grouping pass: ``device`` went to ``group``.

    ``distance`` is the centroid distance seen at decision time (``None``
    when the device founded the group).
    """

    device: str
    group: int
    distance: float | None
    founded: bool


def _normalized_points(devices: Sequence[DeviceProfile]) -> list[DeviceProfile]:
    mem = np.array([d.mem_bytes for d in devices], dtype=float)
    core = np.array([d.core_flops for d in devices], dtype=float)

    def scale(x):
        span = x.max() - x.min()
        return (x - x.min()) / span if span > 0 else np.zeros_like(x)

    m, c = scale(mem), scale(core)
    return [
        DeviceProfile(d.id, float(ci), float(mi), d.tran_bps, d.p_out)
        for d, mi, ci in zip(devices, m, c)
    ]


def group_devices(
    devices: Sequence[DeviceProfile],
    cfg: PlannerConfig,
    return_trace: bool = False,
):
    """Group devices so each group is a set of mutual replicas.

    A seeded random device leads the first group; the rest are scanned in
    input order. A device joins the first group whose centroid lies within
    ``cfg.d_th`` and whose outage product is still above ``cfg.p_th``; it
    founds a new group otherwise. Groups stop accepting members once they
    are reliable enough.

    Raises ``InfeasiblePlanError`` (stage ``"grouping"``) if some group
    ends the pass with outage product above ``cfg.p_th``.
    """
    if not devices:
        raise ValidationError("need at least one device")
    points = _normalized_points(devices) if cfg.normalize_capacity else list(devices)
    by_id = {d.id: d for d in devices}

    rng = np.random.default_rng(cfg.seed)
    leader = int(rng.integers(len(devices)))
    order = [leader] + [i for i in range(len(devices)) if i != leader]

    members: list[list[int]] = []
    centroids: list[DeviceGroup] = []
    products: list[float] = []
    trace: list[JoinEvent] = []

    for i in order:
        d = points[i]
        for k in range(len(members)):
            dist = centroid_similarity(centroids[k], d)
            if dist <= cfg.d_th and products[k] > cfg.p_th:
                members[k].append(i)
                centroids[k] = DeviceGroup.from_devices([points[j] for j in members[k]])
                products[k] *= d.p_out
                trace.append(JoinEvent(d.id, k, dist, False))
                break
        else:
            members.append([i])
            centroids.append(DeviceGroup.from_devices([d]))
            products.append(d.p_out)
            trace.append(JoinEvent(d.id, len(members) - 1, None, True))

    groups = [DeviceGroup.from_devices([by_id[devices[j].id] for j in m]) for m in members]
    for k, g in enumerate(groups):
        prod = group_outage_product(g, devices)
        if prod > cfg.p_th:
            raise InfeasiblePlanError(
                "grouping",
                f"group {k} {list(g.members)} has outage product {prod:.6g} > p_th "
                f"{cfg.p_th:.6g}; p_th is too strict for the available devices",
            )
    if return_trace:
        return groups, trace
    return groups
