"""Command-line entry point: ``edgeplan {plan,simulate,eval,synth,graph}``.

Exit codes: 0 success, 1 I/O or file-format error, 2 infeasible plan or
failed constraint, 3 invalid arguments.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import fileio
from .core import InfeasiblePlanError, PlannerConfig, ValidationError, validate_plan
from .failure import FailureScenario, heterogeneity_scenario, simulate
from .graph import build_filter_graph, ncut_value
from .planner import make_plan, plan_latency
from .synth import CATALOGS, preset_devices, preset_students, synth_activations

EXIT_IO, EXIT_INFEASIBLE, EXIT_ARGS = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _planner_config(args) -> PlannerConfig:
    return PlannerConfig(
        d_th=args.d_th,
        p_th=args.p_th,
        partition_size_metric=args.metric,
        seed=args.seed,
        kmeans_restarts=args.kmeans_restarts,
        normalize_capacity=args.normalize_capacity,
        normalize_rows=args.normalize_rows,
    )


def cmd_plan(args) -> int:
    cfg = _planner_config(args)
    devices = fileio.load_devices(args.devices)
    students = fileio.load_students(args.students)
    acts = fileio.load_activations(args.activations)
    try:
        plan = make_plan(devices, acts, students, cfg)
    except InfeasiblePlanError as exc:
        print(f"infeasible at stage {exc.stage}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    fileio.save_plan(plan, args.output)
    print(f"wrote {args.output}: K={plan.K}, predicted latency {plan.predicted_latency_s:.6g} s")
    return 0


def cmd_simulate(args) -> int:
    mode = {"outage": "outage_sampling", "crash": "crash_subset"}[args.mode]
    scenario = FailureScenario(mode, args.crash_count, args.trials, args.seed)
    plan = fileio.load_plan(args.plan)
    devices = fileio.load_devices(args.devices)
    students = fileio.load_students(args.students)
    report = simulate(plan, devices, students, scenario)
    fileio.save_report(report, args.output, args.csv)
    print(f"wrote {args.output}: coverage {report.coverage_rate:.6g}, accuracy proxy {report.accuracy_proxy:.6g}")
    return 0


def cmd_eval(args) -> int:
    plan = fileio.load_plan(args.plan)
    devices = fileio.load_devices(args.devices)
    students = fileio.load_students(args.students)
    acts = fileio.load_activations(args.activations)
    p_th = args.p_th if args.p_th is not None else plan.metadata.get("p_th", 1.0)
    cfg = PlannerConfig(p_th=p_th)
    report = validate_plan(plan, devices, students, acts.n_filters, cfg)
    graph = build_filter_graph(acts)
    try:
        ncut = f"{ncut_value(graph, plan.partitions):.12g}"
    except ValidationError as exc:
        ncut = f"undefined ({exc})"
    print(f"ncut {ncut}")
    print(f"latency_s {plan_latency(plan, devices, students):.12g}")
    for line in report.lines():
        print(line)
    return 0 if report.all_passed else EXIT_INFEASIBLE


def cmd_synth(args) -> int:
    if args.kind == "devices":
        if args.het_level is not None:
            devices = heterogeneity_scenario(args.het_level, seed=args.seed, n=args.n)
        else:
            devices = preset_devices(n=args.n, seed=args.seed, success=args.success, preset=args.preset)
        fileio.save_devices(devices, args.output)
    elif args.kind == "students":
        fileio.save_students(preset_students(args.preset), args.output)
    else:
        acts = synth_activations(args.filters, args.classes, args.samples_per_class, args.sharpness, args.seed)
        fileio.save_activations(acts, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_graph(args) -> int:
    graph = build_filter_graph(fileio.load_activations(args.activations))
    fileio.save_edges(graph, args.output)
    print(f"wrote {args.output}")
    return 0


def _probability(text):
    x = float(text)
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {text}")
    return x


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return x


def _nonneg_int(text):
    x = int(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="edgeplan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("plan", help="compute an assignment plan")
    sp.add_argument("--devices", required=True)
    sp.add_argument("--activations", required=True)
    sp.add_argument("--students", required=True)
    sp.add_argument("--d-th", type=_positive, default=math.inf)
    sp.add_argument("--p-th", type=_probability, default=0.25)
    sp.add_argument("--seed", type=_nonneg_int, default=0)
    sp.add_argument("--metric", choices=["filter_count", "volume"], default="filter_count")
    sp.add_argument("--kmeans-restarts", type=int, default=10)
    sp.add_argument("--normalize-capacity", action="store_true")
    sp.add_argument("--normalize-rows", action="store_true")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_plan)

    ss = sub.add_parser("simulate", help="Monte Carlo failure injection on a plan")
    ss.add_argument("--plan", required=True)
    ss.add_argument("--devices", required=True)
    ss.add_argument("--students", required=True)
    ss.add_argument("--mode", choices=["outage", "crash"], default="outage")
    ss.add_argument("--crash-count", type=_nonneg_int, default=0)
    ss.add_argument("--trials", type=int, default=10_000)
    ss.add_argument("--seed", type=_nonneg_int, default=0)
    ss.add_argument("-o", "--output", required=True)
    ss.add_argument("--csv")
    ss.set_defaults(func=cmd_simulate)

    se = sub.add_parser("eval", help="report Ncut, latency and constraint checks for a plan")
    se.add_argument("--plan", required=True)
    se.add_argument("--devices", required=True)
    se.add_argument("--students", required=True)
    se.add_argument("--activations", required=True)
    se.add_argument("--p-th", type=_probability)
    se.set_defaults(func=cmd_eval)

    sy = sub.add_parser("synth", help="write synthetic inputs")
    sy.add_argument("kind", choices=["devices", "activations", "students"])
    sy.add_argument("--preset", choices=sorted(CATALOGS), default="paper-cifar")
    sy.add_argument("--het-level", type=int, choices=range(6))
    sy.add_argument("--n", type=int, default=8)
    sy.add_argument("--success", type=float, default=0.7)
    sy.add_argument("--filters", type=int, default=64)
    sy.add_argument("--classes", type=int, default=10)
    sy.add_argument("--samples-per-class", type=int, default=10)
    sy.add_argument("--sharpness", type=float, default=4.0)
    sy.add_argument("--seed", type=_nonneg_int, default=0)
    sy.add_argument("-o", "--output", required=True)
    sy.set_defaults(func=cmd_synth)

    sg = sub.add_parser("graph", help="export the filter graph as an edge list")
    sg.add_argument("--activations", required=True)
    sg.add_argument("-o", "--output", required=True)
    sg.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, fileio.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
