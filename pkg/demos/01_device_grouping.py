"""
Grouping unreliable devices into replica sets
=============================================

Eight devices, each losing its output with probability about 0.3. A group
returns its knowledge partition if any member survives, so we keep adding
similar devices to a group until the chance that every member fails drops
below ``p_th``.
"""

import numpy as np

from edgeplan import PlannerConfig, group_devices, group_outage_product, preset_devices

devices = preset_devices(n=8, seed=0, success=0.7)
for d in devices:
    print(f"{d.id}: {d.core_flops / 1e6:5.1f} MFLOP/s  {d.mem_bytes / 1e6:4.2f} MB  p_out {d.p_out:.3f}")

###############################################################################
# With no distance limit the pass simply chains replicas until each group is
# reliable. The trace shows who founded each group and who joined it.

cfg = PlannerConfig(p_th=0.25, seed=0)
groups, trace = group_devices(devices, cfg, return_trace=True)
for ev in trace:
    action = "founds" if ev.founded else f"joins (distance {ev.distance:.3g})"
    print(f"{ev.device} {action} group {ev.group}")

for k, g in enumerate(groups):
    print(f"group {k}: {g.members}  outage product {group_outage_product(g, devices):.4f}")

###############################################################################
# A distance threshold keeps replicas similar in (memory, compute). Groups
# then respect capacity, at the cost of feasibility: a tight threshold can
# leave a lone device that cannot meet p_th on its own.

for d_th in (np.inf, 1e7, 4e6):
    try:
        gs = group_devices(devices, PlannerConfig(d_th=d_th, p_th=0.25, seed=0))
        print(f"d_th {d_th:.3g}: {len(gs)} groups, sizes {[len(g.members) for g in gs]}")
    except Exception as exc:  # InfeasiblePlanError names the failing stage
        print(f"d_th {d_th:.3g}: infeasible ({exc})")

###############################################################################
# Loosening p_th asks for fewer replicas, so more groups appear.

for p_th in (0.1, 0.25, 0.4, 0.9):
    try:
        print(f"p_th {p_th}: {len(group_devices(devices, PlannerConfig(p_th=p_th, seed=0)))} groups")
    except Exception as exc:
        print(f"p_th {p_th}: infeasible ({exc})")
