"""
Planning and stress-testing an assignment
=========================================

The full pipeline on the default evaluation setting (8 devices, 5-30
MFLOP/s, 0.5-1 kbit/s links), followed by failure injection: random
outages drawn from each device's p_out, then crashes of a fixed number of
devices.
"""

from edgeplan import (
    FailureScenario,
    PlannerConfig,
    coverage_closed_form,
    make_plan,
    preset_devices,
    preset_students,
    simulate,
    synth_activations,
)

devices = preset_devices(n=8, seed=0)
students = preset_students()
acts = synth_activations(64, seed=0)
plan = make_plan(devices, acts, students, PlannerConfig(p_th=0.25, seed=0))

for k, (g, sid) in enumerate(zip(plan.groups, plan.student_choice)):
    part = plan.partition_of(k)
    print(f"group {k} {g.members} runs {sid} on {len(part.members)} filters")
print(f"predicted latency {plan.predicted_latency_s:.3f} s, Ncut {plan.metadata['ncut']:.4f}")
print("constraints:", plan.metadata["constraints"])

###############################################################################
# Outage sampling. Coverage should match the exact product over groups.

rep = simulate(plan, devices, students, FailureScenario(trials=50_000, seed=1))
print(f"coverage {rep.coverage_rate:.4f} (exact {coverage_closed_form(plan, devices):.4f})")
print(f"latency over covered trials: mean {rep.latency_mean_s:.3f} s, p99 {rep.latency_percentiles_s['p99']:.3f} s")

###############################################################################
# Crash sweep: delete c devices at random, 30 draws each. Compare with a plan
# that keeps every device on its own (p_th = 0.9 needs no replicas).

lean = make_plan(devices, acts, students, PlannerConfig(p_th=0.9, seed=0))
print(f"replicated plan K={plan.K}, lean plan K={lean.K}")
for c in range(0, 9, 2):
    sc = FailureScenario("crash_subset", crash_count=c, trials=30, seed=c)
    a = simulate(plan, devices, students, sc).accuracy_proxy
    b = simulate(lean, devices, students, sc).accuracy_proxy
    print(f"crash {c}: covered fraction {a:.3f} replicated vs {b:.3f} lean")
