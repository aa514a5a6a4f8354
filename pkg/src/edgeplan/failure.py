"""Monte Carlo failure injection against an assignment plan."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .assignment import device_delay
from .core import AssignmentPlan, DeviceProfile, StudentArch, ValidationError

MODES = ("outage_sampling", "crash_subset")
CHUNK_TRIALS = 8192
PERCENTILES = (50, 90, 99)


@dataclass(frozen=True)
class FailureScenario:
    mode: str = "outage_sampling"
    crash_count: int = 0
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown failure mode {self.mode!r}; expected one of {MODES}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.crash_count < 0:
            raise ValidationError("crash_count must be >= 0")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")


@dataclass
class SimReport:
    """Aggregates over all trials.

    ``coverage_rate`` counts trials where every partition came back;
    latency statistics are taken over those trials only. ``accuracy_proxy``
    is the mean fraction of partitions returned per trial, a stand-in for
    classification accuracy.
    """

    mode: str
    trials: int
    coverage_rate: float
    accuracy_proxy: float
    covered_trials: int
    partial_trials: int
    empty_trials: int
    latency_mean_s: float | None
    latency_percentiles_s: dict[str, float | None]
    group_loss_rates: list[float]
    crash_count: int = 0
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def metrics(self) -> list[tuple[str, float | int | None]]:
        """Flat (name, value) rows, one per metric."""
        rows = [
            ("trials", self.trials),
            ("coverage_rate", self.coverage_rate),
            ("accuracy_proxy", self.accuracy_proxy),
            ("covered_trials", self.covered_trials),
            ("partial_trials", self.partial_trials),
            ("empty_trials", self.empty_trials),
            ("latency_mean_s", self.latency_mean_s),
        ]
        rows += [(f"latency_p{k}_s", v) for k, v in self.latency_percentiles_s.items()]
        rows += [(f"group_loss_rate_{k}", r) for k, r in enumerate(self.group_loss_rates)]
        return rows


def _delay_table(plan: AssignmentPlan, devices: Sequence[DeviceProfile], students: Sequence[StudentArch]):
    """(group index per device, replica delay per device) in device order."""
    idx = {d.id: i for i, d in enumerate(devices)}
    by_sid = {s.id: s for s in students}
    group_of = np.full(len(devices), -1)
    delay = np.full(len(devices), np.inf)
    for k, (g, sid) in enumerate(zip(plan.groups, plan.student_choice)):
        for m in g.members:
            if m not in idx:
                raise ValidationError(f"plan references unknown device {m!r}")
            group_of[idx[m]] = k
            delay[idx[m]] = device_delay(by_sid[sid], devices[idx[m]])
    return group_of, delay


def _failures(scenario: FailureScenario, p_out: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    N = p_out.size
    if scenario.mode == "outage_sampling":
        return rng.random((n, N)) < p_out[None, :]
    order = np.argsort(rng.random((n, N)), axis=1)
    failed = np.zeros((n, N), dtype=bool)
    np.put_along_axis(failed, order[:, : scenario.crash_count], True, axis=1)
    return failed


def simulate(
    plan: AssignmentPlan,
    devices: Sequence[DeviceProfile],
    students: Sequence[StudentArch],
    scenario: FailureScenario,
) -> SimReport:
    """Inject failures trial by trial and aggregate coverage and latency.

    A group's partition survives a trial if any member survives; its time is
    the fastest surviving member's. Trials are drawn in fixed-size chunks,
    each from its own child of the scenario seed, so results do not depend
    on evaluation order.
    """
    devices = list(devices)
    N = len(devices)
    if scenario.mode == "crash_subset" and scenario.crash_count > N:
        raise ValidationError(f"crash_count {scenario.crash_count} exceeds device count {N}")
    K = plan.K
    group_of, delay = _delay_table(plan, devices, students)
    p_out = np.array([d.p_out for d in devices])
    members = [np.flatnonzero(group_of == k) for k in range(K)]

    n_chunks = math.ceil(scenario.trials / CHUNK_TRIALS)
    children = np.random.SeedSequence(scenario.seed).spawn(n_chunks)
    covered_lat, frac_sum = [], 0.0
    lost = np.zeros(K)
    n_full = n_empty = 0
    for c, child in enumerate(children):
        n = min(CHUNK_TRIALS, scenario.trials - c * CHUNK_TRIALS)
        rng = np.random.default_rng(child)
        alive = ~_failures(scenario, p_out, n, rng)
        # Per trial and group: fastest surviving replica, inf when the group is lost.
        group_t = np.column_stack(
            [np.where(alive[:, idx], delay[idx], np.inf).min(axis=1) for idx in members]
        )
        survived = np.isfinite(group_t)
        n_alive = survived.sum(axis=1)
        frac_sum += float((n_alive / K).sum())
        lost += (~survived).sum(axis=0)
        full = n_alive == K
        n_full += int(full.sum())
        n_empty += int((n_alive == 0).sum())
        covered_lat.append(group_t[full].max(axis=1))

    T = scenario.trials
    lat = np.concatenate(covered_lat) if covered_lat else np.array([])
    if lat.size:
        mean = float(lat.mean())
        pct = {f"p{q}": float(np.percentile(lat, q)) for q in PERCENTILES}
    else:
        mean, pct = None, {f"p{q}": None for q in PERCENTILES}
    return SimReport(
        mode=scenario.mode,
        trials=T,
        coverage_rate=n_full / T,
        accuracy_proxy=frac_sum / T,
        covered_trials=n_full,
        partial_trials=T - n_full - n_empty,
        empty_trials=n_empty,
        latency_mean_s=mean,
        latency_percentiles_s=pct,
        group_loss_rates=[float(x) / T for x in lost],
        crash_count=scenario.crash_count if scenario.mode == "crash_subset" else 0,
        seed=scenario.seed,
    )


def coverage_closed_form(plan: AssignmentPlan, devices: Sequence[DeviceProfile]) -> float:
    """Exact probability that every group returns at least one replica."""
    by_id = {d.id: d for d in devices}
    return math.prod(1.0 - math.prod(by_id[m].p_out for m in g.members) for g in plan.groups)


HET_FLOPS_RANGE = (0.0, 10e6, 15e6, 20e6, 25e6, 30e6)
HET_RATE_RANGE = (0.0, 100.0, 200.0, 300.0, 400.0, 500.0)
MID_FLOPS = 17.5e6
MID_RATE = 750.0


def heterogeneity_scenario(
    level: int,
    seed: int = 0,
    n: int = 8,
    mem_bytes: float = 1.5e6,
    p_out: float = 0.3,
) -> list[DeviceProfile]:
    """Devices whose compute and link rates spread over a band set by ``level``.

    Bands are centred on 17.5 MFLOP/s and 750 bit/s with total widths from
    the heterogeneity table; level 0 gives identical devices.
    """
    if level not in range(len(HET_FLOPS_RANGE)):
        raise ValidationError(f"heterogeneity level must be 0..5, got {level}")
    rng = np.random.default_rng(seed)
    fw, rw = HET_FLOPS_RANGE[level], HET_RATE_RANGE[level]
    core = MID_FLOPS + fw * (rng.random(n) - 0.5)
    rate = MID_RATE + rw * (rng.random(n) - 0.5)
    return [
        DeviceProfile(f"d{i}", float(core[i]), float(mem_bytes), float(rate[i]), float(p_out))
        for i in range(n)
    ]
