"""Acceptance suite: one test per criterion, each at its stated tolerance and
runtime budget. Every test records a PASS/FAIL line with the measured metric;
the lines are printed in the pytest terminal summary, or on stdout when the
file is run as a script.
"""

from __future__ import annotations

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from edgeplan import (
    DeviceProfile,
    FailureScenario,
    FilterGraph,
    InfeasiblePlanError,
    PlannerConfig,
    brute_force_match,
    brute_force_plan,
    coverage_closed_form,
    exhaustive_min_ncut,
    jacobi_eigh,
    km_match,
    make_plan,
    ncut_value,
    normalized_laplacian,
    preset_devices,
    preset_students,
    partition_filters,
    simulate,
    synth_activations,
    validate_plan,
)
from edgeplan.assignment import matching_total
from edgeplan.cli import main as cli_main

DATA = Path(__file__).parent / "data"
RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    ok = ok and elapsed < budget
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title}: {detail} ({elapsed:.2f} s / {budget:g} s)")
    assert ok, RESULTS[-1]


def test_01_matching_optimality():
    t0 = time.perf_counter()
    equal = total = 0
    for K in range(2, 8):
        rng = np.random.default_rng(1000 + K)
        for _ in range(100):
            W = rng.integers(0, 1000, size=(K, K)).astype(float)
            total += 1
            equal += matching_total(W, km_match(W)) == matching_total(W, brute_force_match(W))
    record(1, "matching optimality", equal == total, f"{equal}/{total} totals equal",
           time.perf_counter() - t0, 5)


def _planted(seed):
    rng = np.random.default_rng(seed)
    labels = np.zeros(10, dtype=int)
    labels[rng.permutation(10)[:5]] = 1
    A = np.where(labels[:, None] == labels[None, :], 1.0, 0.01)
    np.fill_diagonal(A, 0.0)
    return FilterGraph.from_weights(A), labels


def _random_graph(rng, M):
    A = np.triu(rng.random((M, M)), 1)
    return FilterGraph.from_weights(A + A.T)


def test_02_spectral_quality():
    t0 = time.perf_counter()
    recovered = 0
    for seed in range(100):
        g, labels = _planted(seed)
        parts = partition_filters(g, 2, PlannerConfig(seed=seed))
        truth = {frozenset(np.flatnonzero(labels == k).tolist()) for k in (0, 1)}
        recovered += {frozenset(p.members) for p in parts} == truth
    within = 0
    for seed in range(100):
        rng = np.random.default_rng(5000 + seed)
        g = _random_graph(rng, int(rng.integers(3, 11)))
        _, best = exhaustive_min_ncut(g, 2)
        within += ncut_value(g, partition_filters(g, 2, PlannerConfig(seed=seed))) <= 1.5 * best
    record(2, "spectral quality", recovered >= 95 and within >= 90,
           f"planted split recovered {recovered}/100, Ncut within 1.5x optimum {within}/100",
           time.perf_counter() - t0, 30)


def test_03_eigensolver_correctness():
    t0 = time.perf_counter()
    worst_res, worst_min = 0.0, 0.0
    for seed in range(50):
        rng = np.random.default_rng(9000 + seed)
        M = int(rng.integers(2, 65))
        L = normalized_laplacian(_random_graph(rng, M))
        w, V = jacobi_eigh(L)
        res = np.max(np.abs(L @ V - V * w[None, :]), axis=0)
        worst_res = max(worst_res, float(res.max()))
        worst_min = max(worst_min, abs(float(w.min())))
    record(3, "eigensolver correctness", worst_res <= 1e-8 and worst_min <= 1e-9,
           f"max column residual {worst_res:.2e}, max |lambda_min| {worst_min:.2e}",
           time.perf_counter() - t0, 10)


def test_04_constraint_soundness():
    t0 = time.perf_counter()
    students = preset_students()
    feasible = passed = seed = 0
    while feasible < 1000:
        rng = np.random.default_rng(seed)
        devices = preset_devices(int(rng.integers(1, 9)), seed=seed, success=float(rng.uniform(0.5, 0.95)))
        acts = synth_activations(16, 4, 5, seed=seed)
        cfg = PlannerConfig(p_th=float(rng.uniform(0.1, 0.5)), seed=seed)
        seed += 1
        try:
            plan = make_plan(devices, acts, students, cfg)
        except InfeasiblePlanError:
            continue
        feasible += 1
        passed += validate_plan(plan, devices, students, acts.n_filters, cfg).all_passed
    staged = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        p_th = float(rng.uniform(0.01, 0.5))
        solo = [DeviceProfile("solo", 1e7, 1e7, 1e3, float(rng.uniform(p_th, 1.0)) + 1e-9)]
        try:
            make_plan(solo, synth_activations(8, 2, seed=seed), students, PlannerConfig(p_th=p_th))
        except InfeasiblePlanError as exc:
            staged += exc.stage == "grouping"
    record(4, "constraint soundness", passed == 1000 and staged == 100,
           f"{passed}/1000 feasible plans valid, {staged}/100 infeasible instances raise at grouping",
           time.perf_counter() - t0, 60)


def tiny_instance(seed):
    rng = np.random.default_rng(seed)
    devices = preset_devices(int(rng.integers(2, 6)), seed=seed)
    M = int(rng.integers(2, 7))
    acts = synth_activations(M, int(rng.integers(1, M + 1)), 3, seed=seed)
    return devices, acts, preset_students(), PlannerConfig(p_th=0.25, seed=seed)


def test_05_joint_oracle_gap():
    t0 = time.perf_counter()
    n = matched = never_beaten = seed = 0
    gaps = []
    while n < 50:
        devices, acts, students, cfg = tiny_instance(seed)
        seed += 1
        try:
            heuristic = make_plan(devices, acts, students, cfg)
        except InfeasiblePlanError:
            continue
        oracle = brute_force_plan(devices, acts, students, cfg)
        h, o = heuristic.predicted_latency_s, oracle.predicted_latency_s
        n += 1
        never_beaten += o <= h * (1 + 1e-12)
        matched += math.isclose(o, h, rel_tol=1e-12)
        gaps.append(h / o - 1)
    rate = matched / n
    record(5, "joint-oracle gap", never_beaten == n and rate >= 0.5,
           f"oracle <= heuristic in {never_beaten}/{n}, heuristic reaches oracle in {matched}/{n} "
           f"({rate:.0%}), median gap {np.median(gaps):.1%}",
           time.perf_counter() - t0, 60)


def test_06_monte_carlo_calibration():
    t0 = time.perf_counter()
    students = preset_students()
    worst, plans, seed = 0.0, 0, 0
    while plans < 10:
        devices = preset_devices(8, seed=seed, success=0.6)
        try:
            plan = make_plan(devices, synth_activations(16, 4, seed=seed), students,
                             PlannerConfig(p_th=0.4, seed=seed))
        except InfeasiblePlanError:
            seed += 1
            continue
        rep = simulate(plan, devices, students, FailureScenario(trials=100_000, seed=seed))
        worst = max(worst, abs(rep.coverage_rate - coverage_closed_form(plan, devices)))
        plans += 1
        seed += 1
    record(6, "Monte Carlo calibration", worst <= 0.005,
           f"max |simulated - exact coverage| {worst:.4f} over 10 plans at 1e5 trials",
           time.perf_counter() - t0, 20)


def mean_latency(success, p_th, seeds=50):
    lats = []
    for seed in range(seeds):
        devices = preset_devices(8, seed=seed, success=success)
        try:
            plan = make_plan(devices, synth_activations(64, seed=seed), preset_students(),
                             PlannerConfig(p_th=p_th, seed=seed))
        except InfeasiblePlanError:
            continue
        lats.append(plan.predicted_latency_s)
    return float(np.mean(lats)), len(lats)


def test_07_latency_trend():
    t0 = time.perf_counter()
    lo_s, n_lo_s = mean_latency(0.5, 0.25)
    hi_s, n_hi_s = mean_latency(0.9, 0.25)
    lo_p, n_lo_p = mean_latency(0.7, 0.1)
    hi_p, n_hi_p = mean_latency(0.7, 0.4)
    ok_s = hi_s <= 1.02 * lo_s
    ok_p = hi_p <= 1.02 * lo_p
    record(7, "latency trend", ok_s and ok_p,
           f"success 0.9 vs 0.5: {hi_s:.3f} vs {lo_s:.3f} s ({'ok' if ok_s else 'reversed'}, "
           f"{n_hi_s}/{n_lo_s} feasible seeds); p_th 0.4 vs 0.1: {hi_p:.3f} vs {lo_p:.3f} s "
           f"({'ok' if ok_p else 'reversed'}, {n_hi_p}/{n_lo_p} feasible seeds)",
           time.perf_counter() - t0, 60)


def test_08_resilience_trend():
    t0 = time.perf_counter()
    students = preset_students()
    batches = strict = not_worse = seed = 0
    while batches < 20:
        devices = preset_devices(8, seed=seed)
        acts = synth_activations(64, seed=seed)
        try:
            plans = [make_plan(devices, acts, students, PlannerConfig(p_th=p, seed=seed)) for p in (0.25, 0.9)]
        except InfeasiblePlanError:
            seed += 1
            continue
        scenario = FailureScenario("crash_subset", crash_count=4, trials=30, seed=seed)
        replicated, lean = (simulate(p, devices, students, scenario).accuracy_proxy for p in plans)
        batches += 1
        strict += replicated > lean
        not_worse += replicated >= lean
        seed += 1
    record(8, "resilience trend", not_worse == batches and strict >= 0.8 * batches,
           f"p_th 0.25 plan >= p_th 0.9 plan in {not_worse}/{batches} batches, strictly in {strict}/{batches}",
           time.perf_counter() - t0, 60)


def test_09_fixture_golden(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "plan.json"
    rc = cli_main(["plan", "--devices", str(DATA / "fixture_devices.json"),
                   "--students", str(DATA / "fixture_students.json"),
                   "--activations", str(DATA / "fixture_activations.csv"),
                   "--d-th", "6e6", "--p-th", "0.25", "--seed", "0", "-o", str(out)])
    same = rc == 0 and out.read_bytes() == (DATA / "fixture_plan.json").read_bytes()
    # Slow pair on "small": min(10/4, 10/5) + 1 = 3.0 s; fast pair on "large": min(40/20, 40/25) + 1 = 2.6 s.
    hand = max(min(10 / 4, 10 / 5) + 1, min(40 / 20, 40 / 25) + 1)
    latency = json.loads(out.read_text())["predicted_latency_s"]
    rel = abs(latency - hand) / hand
    record(9, "hand-traced fixture", same and rel <= 1e-12,
           f"golden {'identical' if same else 'DIFFERS'}, latency {latency} vs hand {hand} (rel {rel:.1e})",
           time.perf_counter() - t0, 1)


def test_10_scale_smoke():
    devices = preset_devices(32, seed=0)
    acts = synth_activations(256, 16, 8, seed=0)
    t0 = time.perf_counter()
    plan = make_plan(devices, acts, preset_students(), PlannerConfig(p_th=0.25, seed=0))
    elapsed = time.perf_counter() - t0
    record(10, "scale smoke", plan.K >= 1, f"M=256, N=32 planned with K={plan.K}", elapsed, 30)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
