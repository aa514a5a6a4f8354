"""
How planned latency moves with reliability
==========================================

Mean planned latency over 50 device draws while the average success
probability and the outage bound ``p_th`` vary.

A group finishes with its fastest replica, and the matching weights favour
the heaviest student that fits in the group's smallest memory. More
reliable devices need fewer replicas, so groups shrink, more of them form,
and the slowest group gets slower. Latency therefore rises with success
probability and with ``p_th`` in this model, the opposite of what one might
expect from replication alone.
"""

import numpy as np

from edgeplan import InfeasiblePlanError, PlannerConfig, make_plan, preset_devices, preset_students, synth_activations

students = preset_students()


def mean_latency(success, p_th, seeds=50):
    lats, ks = [], []
    for seed in range(seeds):
        devices = preset_devices(8, seed=seed, success=success)
        try:
            plan = make_plan(devices, synth_activations(64, seed=seed), students, PlannerConfig(p_th=p_th, seed=seed))
        except InfeasiblePlanError:
            continue
        lats.append(plan.predicted_latency_s)
        ks.append(plan.K)
    return np.mean(lats), np.mean(ks), len(lats)


print("success  p_th  latency  groups  feasible")
for success in (0.5, 0.7, 0.9):
    for p_th in (0.1, 0.25, 0.4):
        lat, K, n = mean_latency(success, p_th)
        print(f"{success:7.1f} {p_th:5.2f} {lat:8.3f} {K:7.2f} {n:9d}")
