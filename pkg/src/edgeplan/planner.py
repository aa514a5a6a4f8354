"""End-to-end knowledge assignment: grouping, partitioning, matching."""

from __future__ import annotations

import math
from typing import Iterator, Sequence

from .assignment import (
    feasible_students,
    group_delay,
    km_match,
    select_student,
    weight_matrix,
)
from .core import (
    AssignmentPlan,
    DeviceGroup,
    DeviceProfile,
    FilterPartition,
    InfeasiblePlanError,
    PlannerConfig,
    StudentArch,
    ValidationError,
    validate_devices,
    validate_plan,
    validate_students,
)
from .graph import ActivationMatrix, build_filter_graph, ncut_value
from .grouping import group_devices
from .spectral import exhaustive_min_ncut, partition_filters

ACCURACY_NOTE = "not evaluated: requires student training"


def plan_latency(
    plan: AssignmentPlan, devices: Sequence[DeviceProfile], students: Sequence[StudentArch]
) -> float:
    """Inference completion time: the slowest group's fastest replica."""
    by_id = {s.id: s for s in students}
    return max(group_delay(g, by_id[sid], devices) for g, sid in zip(plan.groups, plan.student_choice))


def make_plan(
    devices: Sequence[DeviceProfile],
    acts: ActivationMatrix,
    students: Sequence[StudentArch],
    cfg: PlannerConfig,
) -> AssignmentPlan:
    """Run grouping, spectral partitioning and matching in sequence."""
    devices = validate_devices(devices)
    students = validate_students(students)
    if not students:
        raise ValidationError("need at least one student architecture")

    groups = group_devices(devices, cfg)
    K = len(groups)
    M = acts.n_filters
    if K > M:
        raise InfeasiblePlanError(
            "partition", f"{K} device groups but only {M} filters to partition"
        )

    graph = build_filter_graph(acts)
    partitions = partition_filters(graph, K, cfg)

    W = weight_matrix(groups, partitions, students, graph, devices, cfg.partition_size_metric)
    for k, g in enumerate(groups):
        if not feasible_students(g, students, devices):
            raise InfeasiblePlanError(
                "matching", f"group {k} {list(g.members)} fits no student in memory"
            )
    matching = km_match(W)
    choice = tuple(
        select_student(
            g,
            partitions[matching[k]],
            feasible_students(g, students, devices),
            graph,
            devices,
            cfg.partition_size_metric,
        )
        for k, g in enumerate(groups)
    )
    plan = AssignmentPlan(tuple(groups), tuple(partitions), tuple(matching), choice, 0.0)
    latency = plan_latency(plan, devices, students)
    report = validate_plan(plan, devices, students, M, cfg)
    metadata = {
        "constraints": report.summary(),
        "accuracy_loss": ACCURACY_NOTE,
        "ncut": _ncut_or_none(graph, partitions),
        "n_filters": M,
        "p_th": cfg.p_th,
        "d_th": cfg.d_th if math.isfinite(cfg.d_th) else None,
        "seed": cfg.seed,
        "partition_size_metric": cfg.partition_size_metric,
    }
    return AssignmentPlan(plan.groups, plan.partitions, plan.matching, choice, latency, metadata)


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1:]
        yield [[first]] + sub


def brute_force_plan(
    devices: Sequence[DeviceProfile],
    acts: ActivationMatrix,
    students: Sequence[StudentArch],
    cfg: PlannerConfig,
) -> AssignmentPlan:
    """Latency-optimal plan by enumeration, for toy instances only.

    The completion time depends only on the device groups and the student on
    each group, so the search enumerates every device set-partition that
    meets the outage bound and, per group, the fastest memory-feasible
    student. The filter partition (minimum Ncut) and the identity matching
    are then attached, since they cannot change the latency.
    """
    devices = validate_devices(devices)
    students = validate_students(students)
    M = acts.n_filters
    if len(devices) > 5 or M > 6 or len(students) > 3:
        raise ValidationError(
            f"brute force limited to N<=5, M<=6, J<=3 (got N={len(devices)}, M={M}, J={len(students)})"
        )

    best = None
    any_reliable = False
    for blocks in _set_partitions(list(devices)):
        if len(blocks) > M:
            continue
        if any(math.prod(d.p_out for d in b) > cfg.p_th for b in blocks):
            continue
        any_reliable = True
        groups = [DeviceGroup.from_devices(b) for b in blocks]
        choice, delays = [], []
        for g in groups:
            S_k = feasible_students(g, students, devices)
            if not S_k:
                break
            s = min(S_k, key=lambda s: (group_delay(g, s, devices), s.param_bytes, s.id))
            choice.append(s.id)
            delays.append(group_delay(g, s, devices))
        else:
            latency = max(delays)
            key = (latency, len(groups))
            if best is None or key < best[0]:
                best = (key, groups, choice)

    if best is None:
        if not any_reliable:
            raise InfeasiblePlanError("grouping", f"no device grouping meets p_th {cfg.p_th:.6g}")
        raise InfeasiblePlanError("matching", "no reliable grouping fits the student catalog")

    _, groups, choice = best
    K = len(groups)
    graph = build_filter_graph(acts)
    try:
        partitions, _ = exhaustive_min_ncut(graph, K)
    except ValidationError:  # K > 3 or no admissible cut; latency is unaffected
        partitions = _contiguous_partitions(M, K)
    plan = AssignmentPlan(tuple(groups), tuple(partitions), tuple(range(K)), tuple(choice), 0.0)
    latency = plan_latency(plan, devices, students)
    return AssignmentPlan(
        plan.groups, plan.partitions, plan.matching, plan.student_choice, latency,
        {"accuracy_loss": ACCURACY_NOTE, "oracle": True},
    )


def _ncut_or_none(graph, partitions):
    try:
        return ncut_value(graph, partitions)
    except ValidationError:
        return None


def _contiguous_partitions(M: int, K: int) -> list[FilterPartition]:
    bounds = [round(i * M / K) for i in range(K + 1)]
    return [FilterPartition(tuple(range(bounds[i], bounds[i + 1]))) for i in range(K)]
