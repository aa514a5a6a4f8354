"""Domain types shared by the planner, simulator and I/O layers.

Units are fixed throughout: FLOP for work, FLOP/s for compute rate, bytes
for memory, bit/s for link rate, bits for output size, seconds for time.
Filter indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant."""


class InfeasiblePlanError(RuntimeError):
    """No plan satisfies the constraints; ``stage`` names where it failed."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class DeviceProfile:
    id: str
    core_flops: float
    mem_bytes: float
    tran_bps: float
    p_out: float

    @property
    def capacity(self) -> tuple[float, float]:
        """(mem_bytes, core_flops), the point used for capacity similarity."""
        return (self.mem_bytes, self.core_flops)


@dataclass(frozen=True)
class StudentArch:
    id: str
    flops: float
    param_bytes: float
    output_bits: float


@dataclass(frozen=True)
class DeviceGroup:
    members: tuple[str, ...]
    centroid: tuple[float, float]

    @classmethod
    def from_devices(cls, devices: Sequence[DeviceProfile]) -> "DeviceGroup":
        if not devices:
            raise ValidationError("a device group needs at least one member")
        n = len(devices)
        mem = math.fsum(d.mem_bytes for d in devices) / n
        core = math.fsum(d.core_flops for d in devices) / n
        return cls(tuple(d.id for d in devices), (mem, core))


@dataclass(frozen=True)
class FilterPartition:
    members: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)


PARTITION_METRICS = ("filter_count", "volume")


@dataclass(frozen=True)
class PlannerConfig:
    """Knobs for one planning run.

    ``d_th`` is in the raw units of the capacity distance (bytes and FLOP/s
    mixed) unless ``normalize_capacity`` is set, in which case both axes are
    min-max scaled to [0, 1] over the device set first.
    """

    d_th: float = math.inf
    p_th: float = 0.25
    partition_size_metric: str = "filter_count"
    seed: int = 0
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 100
    eigen_tolerance: float = 1e-10
    normalize_capacity: bool = False
    normalize_rows: bool = False

    def __post_init__(self):
        if not self.d_th > 0:
            raise ValidationError(f"d_th must be > 0, got {self.d_th}")
        if not 0 < self.p_th <= 1:
            raise ValidationError(f"p_th must lie in (0, 1], got {self.p_th}")
        if not self.eigen_tolerance > 0:
            raise ValidationError("eigen_tolerance must be > 0")
        if self.partition_size_metric not in PARTITION_METRICS:
            raise ValidationError(
                f"unknown partition_size_metric {self.partition_size_metric!r}"
            )
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        if self.kmeans_restarts < 1 or self.kmeans_max_iters < 1:
            raise ValidationError("kmeans_restarts and kmeans_max_iters must be >= 1")


@dataclass(frozen=True)
class AssignmentPlan:
    """Joint output of the planner.

    ``matching[k]`` is the partition index served by group ``k`` and
    ``student_choice[k]`` the student id deployed on every member of group ``k``.
    """

    groups: tuple[DeviceGroup, ...]
    partitions: tuple[FilterPartition, ...]
    matching: tuple[int, ...]
    student_choice: tuple[str, ...]
    predicted_latency_s: float
    metadata: Mapping[str, object] = field(default_factory=dict, compare=True)

    @property
    def K(self) -> int:
        return len(self.groups)

    def partition_of(self, k: int) -> FilterPartition:
        return self.partitions[self.matching[k]]


def _check_positive(owner: str, name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{owner}: {name} must be a finite number > 0, got {value!r}")


def validate_devices(devices: Iterable[DeviceProfile]) -> tuple[DeviceProfile, ...]:
    devices = tuple(devices)
    seen: set[str] = set()
    for d in devices:
        if d.id in seen:
            raise ValidationError(f"duplicate device id {d.id!r}")
        seen.add(d.id)
        for name in ("core_flops", "mem_bytes", "tran_bps"):
            _check_positive(f"device {d.id!r}", name, getattr(d, name))
        if not (isinstance(d.p_out, (int, float)) and 0.0 <= d.p_out <= 1.0):
            raise ValidationError(
                f"device {d.id!r}: p_out must lie in [0, 1], got {d.p_out!r}"
            )
    return devices


def validate_students(students: Iterable[StudentArch]) -> tuple[StudentArch, ...]:
    students = tuple(students)
    seen: set[str] = set()
    for s in students:
        if s.id in seen:
            raise ValidationError(f"duplicate student id {s.id!r}")
        seen.add(s.id)
        for name in ("flops", "param_bytes", "output_bits"):
            _check_positive(f"student {s.id!r}", name, getattr(s, name))
    return students


@dataclass
class ConstraintCheck:
    name: str
    status: str  # "pass" | "fail" | "not_evaluated"
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class ConstraintReport:
    checks: list[ConstraintCheck]

    def __getitem__(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def summary(self) -> dict[str, str]:
        return {c.name: c.status for c in self.checks}

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = {"pass": "PASS", "fail": "FAIL", "not_evaluated": "SKIP"}[c.status]
            line = f"{tag} {c.name}"
            if c.violations:
                line += ": " + "; ".join(c.violations)
            out.append(line)
        return out


CONSTRAINTS = (
    "device_coverage",
    "filter_coverage",
    "device_disjoint",
    "filter_disjoint",
    "outage",
    "memory",
    "accuracy_loss",
)


def validate_plan(
    plan: AssignmentPlan,
    devices: Sequence[DeviceProfile],
    students: Sequence[StudentArch],
    n_filters: int,
    cfg: PlannerConfig,
) -> ConstraintReport:
    """Check a plan against every planning constraint.

    Structural problems (unknown ids, out-of-range filters, a matching that
    is not a bijection) raise ``ValidationError``; constraint violations are
    reported, not raised.
    """
    by_id = {d.id: d for d in devices}
    students_by_id = {s.id: s for s in students}
    K = len(plan.groups)

    if len(plan.partitions) != K:
        raise ValidationError(f"{K} groups but {len(plan.partitions)} partitions")
    if len(plan.student_choice) != K:
        raise ValidationError(f"{K} groups but {len(plan.student_choice)} student choices")
    if sorted(plan.matching) != list(range(K)):
        raise ValidationError(f"matching {list(plan.matching)} is not a bijection on 0..{K - 1}")
    for g in plan.groups:
        for m in g.members:
            if m not in by_id:
                raise ValidationError(f"plan references unknown device {m!r}")
    for sid in plan.student_choice:
        if sid not in students_by_id:
            raise ValidationError(f"plan references unknown student {sid!r}")
    for p in plan.partitions:
        for f in p.members:
            if not (isinstance(f, int) and 0 <= f < n_filters):
                raise ValidationError(f"plan references filter {f!r} outside 0..{n_filters - 1}")

    checks = []

    assigned = [m for g in plan.groups for m in g.members]
    missing = sorted(set(by_id) - set(assigned))
    checks.append(_check("device_coverage", [f"device {m!r} in no group" for m in missing]))

    covered = {f for p in plan.partitions for f in p.members}
    missing_f = sorted(set(range(n_filters)) - covered)
    checks.append(_check("filter_coverage", [f"filter {f} in no partition" for f in missing_f]))

    checks.append(_check("device_disjoint", _duplicates(assigned, "device")))
    filters = [f for p in plan.partitions for f in p.members]
    checks.append(_check("filter_disjoint", _duplicates(filters, "filter")))

    outage = []
    for k, g in enumerate(plan.groups):
        prod = math.prod(by_id[m].p_out for m in g.members)
        if prod > cfg.p_th:
            outage.append(f"group {k}: outage product {prod:.6g} > p_th {cfg.p_th:.6g}")
    checks.append(_check("outage", outage))

    memory = []
    for k, (g, sid) in enumerate(zip(plan.groups, plan.student_choice)):
        cap = min(by_id[m].mem_bytes for m in g.members)
        need = students_by_id[sid].param_bytes
        if need > cap:
            memory.append(f"group {k}: student {sid!r} needs {need:.6g} B > {cap:.6g} B")
    checks.append(_check("memory", memory))

    checks.append(ConstraintCheck("accuracy_loss", "not_evaluated", ["requires student training"]))
    return ConstraintReport(checks)


def _check(name: str, violations: list[str]) -> ConstraintCheck:
    return ConstraintCheck(name, "fail" if violations else "pass", violations)


def _duplicates(items: Sequence, kind: str) -> list[str]:
    seen, dup = set(), []
    for x in items:
        if x in seen and x not in dup:
            dup.append(x)
        seen.add(x)
    return [f"{kind} {x!r} appears more than once" for x in dup]
