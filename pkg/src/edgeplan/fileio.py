"""File formats: devices/students/plan/report JSON and activation/edge/metric CSV.

JSON output is canonical: sorted keys, two-space indent, floats rounded to
12 significant digits, so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import (
    AssignmentPlan,
    DeviceGroup,
    DeviceProfile,
    FilterPartition,
    StudentArch,
    ValidationError,
    validate_devices,
    validate_students,
)
from .failure import SimReport
from .graph import ActivationMatrix, FilterGraph, edge_list

SIG_DIGITS = 12


class FormatError(ValueError):
    """A file could not be parsed or does not match its schema."""


def _round(x: float) -> float:
    if not math.isfinite(x):
        raise FormatError(f"cannot serialize non-finite float {x!r}")
    return float(format(x, f".{SIG_DIGITS}g"))


def canonical(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _read_json(path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _records(data, path, fields: dict[str, type]) -> list[dict]:
    if not isinstance(data, list):
        raise FormatError(f"{path}: expected a JSON array of objects")
    out = []
    for i, rec in enumerate(data):
        if not isinstance(rec, dict):
            raise FormatError(f"{path}: entry {i} is not an object")
        missing = sorted(set(fields) - set(rec))
        extra = sorted(set(rec) - set(fields))
        if missing or extra:
            raise FormatError(f"{path}: entry {i}: missing fields {missing}, unknown fields {extra}")
        for name, kind in fields.items():
            v = rec[name]
            ok = isinstance(v, str) if kind is str else (
                isinstance(v, (int, float)) and not isinstance(v, bool)
            )
            if not ok:
                raise FormatError(f"{path}: entry {i}: field {name!r} must be {kind.__name__}, got {v!r}")
        out.append(rec)
    return out


DEVICE_FIELDS = {"id": str, "core_flops": float, "mem_bytes": float, "tran_bps": float, "p_out": float}
STUDENT_FIELDS = {"id": str, "flops": float, "param_bytes": float, "output_bits": float}


def device_to_dict(d: DeviceProfile) -> dict:
    return {k: getattr(d, k) for k in DEVICE_FIELDS}


def student_to_dict(s: StudentArch) -> dict:
    return {k: getattr(s, k) for k in STUDENT_FIELDS}


def save_devices(devices: Sequence[DeviceProfile], path) -> None:
    _write(path, dumps([device_to_dict(d) for d in devices]))


def load_devices(path) -> list[DeviceProfile]:
    recs = _records(_read_json(path), path, DEVICE_FIELDS)
    devices = [DeviceProfile(r["id"], float(r["core_flops"]), float(r["mem_bytes"]),
                             float(r["tran_bps"]), float(r["p_out"])) for r in recs]
    try:
        return list(validate_devices(devices))
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from None


def save_students(students: Sequence[StudentArch], path) -> None:
    _write(path, dumps([student_to_dict(s) for s in students]))


def load_students(path) -> list[StudentArch]:
    recs = _records(_read_json(path), path, STUDENT_FIELDS)
    students = [StudentArch(r["id"], float(r["flops"]), float(r["param_bytes"]),
                            float(r["output_bits"])) for r in recs]
    try:
        return list(validate_students(students))
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from None


def activations_to_csv(acts: ActivationMatrix) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample"] + [f"f{m + 1}" for m in range(acts.n_filters)])
    labels = acts.samples or tuple(str(i) for i in range(acts.n_samples))
    for label, row in zip(labels, acts.values):
        w.writerow([label] + [repr(float(x)) for x in row])
    return buf.getvalue()


def save_activations(acts: ActivationMatrix, path) -> None:
    _write(path, activations_to_csv(acts))


def load_activations(path) -> ActivationMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = rows[0]
    M = len(header) - 1
    expected = ["sample"] + [f"f{m + 1}" for m in range(M)]
    if header != expected:
        raise FormatError(f"{path}: header must be 'sample,f1..fM', got {','.join(header)!r}")
    labels, values = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != M + 1:
            raise FormatError(f"{path}: row {r} has {len(row)} cells, expected {M + 1}")
        labels.append(row[0])
        vals = []
        for c, cell in enumerate(row[1:], start=1):
            try:
                vals.append(float(cell))
            except ValueError:
                raise FormatError(
                    f"{path}: row {r}, column {header[c]!r}: non-numeric value {cell!r}"
                ) from None
        values.append(vals)
    if not values:
        raise FormatError(f"{path}: no sample rows")
    try:
        return ActivationMatrix(np.array(values), tuple(labels))
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from None


def plan_to_dict(plan: AssignmentPlan) -> dict:
    return {
        "groups": [{"members": list(g.members), "centroid": list(g.centroid)} for g in plan.groups],
        "partitions": [list(p.members) for p in plan.partitions],
        "matching": list(plan.matching),
        "student_choice": list(plan.student_choice),
        "predicted_latency_s": plan.predicted_latency_s,
        "metadata": dict(plan.metadata),
    }


def plan_from_dict(data: dict, path="plan") -> AssignmentPlan:
    need = {"groups", "partitions", "matching", "student_choice", "predicted_latency_s"}
    if not isinstance(data, dict) or not need <= set(data):
        raise FormatError(f"{path}: plan must be an object with fields {sorted(need)}")
    try:
        groups = tuple(
            DeviceGroup(tuple(str(m) for m in g["members"]), (float(g["centroid"][0]), float(g["centroid"][1])))
            for g in data["groups"]
        )
        partitions = tuple(FilterPartition(tuple(int(f) for f in p)) for p in data["partitions"])
        matching = tuple(int(j) for j in data["matching"])
        choice = tuple(str(s) for s in data["student_choice"])
        latency = float(data["predicted_latency_s"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed plan ({exc})") from None
    if any(not g.members for g in groups) or any(not p.members for p in partitions):
        raise FormatError(f"{path}: empty group or partition")
    return AssignmentPlan(groups, partitions, matching, choice, latency, dict(data.get("metadata", {})))


def save_plan(plan: AssignmentPlan, path) -> None:
    _write(path, dumps(plan_to_dict(plan)))


def load_plan(path) -> AssignmentPlan:
    return plan_from_dict(_read_json(path), path)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(_round(v))
    return str(v)


def report_to_csv(report: SimReport) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    for name, value in report.metrics():
        w.writerow([name, _fmt(value)])
    return buf.getvalue()


def save_report(report: SimReport, path, csv_path=None) -> None:
    _write(path, dumps(report.to_dict()))
    if csv_path is not None:
        _write(csv_path, report_to_csv(report))


def load_report(path) -> SimReport:
    data = _read_json(path)
    try:
        return SimReport(**data)
    except TypeError as exc:
        raise FormatError(f"{path}: malformed report ({exc})") from None


def load_report_csv(path) -> dict[str, float | None]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["metric", "value"]:
        raise FormatError(f"{path}: header must be 'metric,value'")
    return {name: (float(v) if v != "" else None) for name, v in rows[1:]}


def save_edges(g: FilterGraph, path) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["filter_i", "filter_j", "weight"])
    for i, j, wt in edge_list(g):
        w.writerow([i, j, _fmt(wt)])
    _write(path, buf.getvalue())
