"""Replica-aware knowledge assignment for distributed inference on edge devices.

Groups unreliable devices into replica sets, splits the teacher's final-layer
filters into knowledge partitions by normalized cut, matches groups to
partitions, and stress-tests the result by failure injection.
"""

from .assignment import (
    assignment_weight,
    brute_force_match,
    feasible_students,
    group_delay,
    km_match,
    partition_size,
    select_student,
    weight_matrix,
)
from .core import (
    AssignmentPlan,
    ConstraintReport,
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
from .failure import (
    FailureScenario,
    SimReport,
    coverage_closed_form,
    heterogeneity_scenario,
    simulate,
)
from .graph import ActivationMatrix, FilterGraph, build_filter_graph, cut_weight, ncut_value, volume
from .grouping import capacity_similarity, centroid_similarity, group_devices, group_outage_product
from .planner import brute_force_plan, make_plan, plan_latency
from .spectral import (
    EigenConvergenceError,
    SpectralEmbedding,
    exhaustive_min_ncut,
    jacobi_eigh,
    kmeans_rows,
    normalized_laplacian,
    partition_filters,
    smallest_k_eigen,
)
from .synth import preset_devices, preset_students, synth_activations

__version__ = "0.1.0"
