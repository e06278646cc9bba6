"""Workload memory demand: measured per-task access counts and rate grids."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

DEFAULT_ACCESS_WIDTH_BITS = 64

WORKLOAD_CSV_HEADER = (
    "name",
    "reads_per_task",
    "writes_per_task",
    "access_width_bits",
    "tasks_per_second",
    "target_task_latency_s",
    "accuracy_floor",
    "footprint_bytes",
)


class TrafficError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadSpec:
    """Per-task access counts plus optional rate, latency, and accuracy targets."""

    name: str
    reads_per_task: int
    writes_per_task: int
    access_width_bits: int = DEFAULT_ACCESS_WIDTH_BITS
    tasks_per_second: float | None = None
    target_task_latency_s: float | None = None
    accuracy_floor: float | None = None
    footprint_bytes: int | None = None

    def __post_init__(self):
        if self.reads_per_task < 0 or self.writes_per_task < 0:
            raise TrafficError("access counts must be non-negative")
        if self.reads_per_task + self.writes_per_task < 1:
            raise TrafficError("a workload must perform at least one access")
        if self.access_width_bits < 8:
            raise TrafficError("access width must be >= 8 bits")
        if self.tasks_per_second is not None and self.tasks_per_second <= 0:
            raise TrafficError("tasks_per_second must be > 0 when present")
        if self.accuracy_floor is not None and not 0 <= self.accuracy_floor <= 1:
            raise TrafficError("accuracy_floor must be in [0, 1]")


@dataclass(frozen=True)
class TrafficPattern:
    read_bytes_per_s: float
    write_bytes_per_s: float
    access_width_bits: int = DEFAULT_ACCESS_WIDTH_BITS

    def __post_init__(self):
        if self.read_bytes_per_s < 0 or self.write_bytes_per_s < 0:
            raise TrafficError("rates must be non-negative")
        if self.read_bytes_per_s == 0 and self.write_bytes_per_s == 0:
            raise TrafficError("at least one rate must be > 0")


def _log_axis(lo: float, hi: float, points: int) -> list[float]:
    if not (0 < lo <= hi):
        raise TrafficError(f"range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    if points < 1:
        raise TrafficError("points_per_axis must be >= 1")
    if points == 1:
        return [lo]
    ratio = hi / lo
    axis = [lo * ratio ** (i / (points - 1)) for i in range(points)]
    axis[0], axis[-1] = lo, hi  # endpoints exact, no fp drift
    return axis


def generate_generic_sweep(
    read_range: tuple[float, float],
    write_range: tuple[float, float],
    points_per_axis: int,
    access_width_bits: int = DEFAULT_ACCESS_WIDTH_BITS,
) -> list[TrafficPattern]:
    """Log-spaced rate grid, inclusive endpoints, read-major row order."""
    reads = _log_axis(read_range[0], read_range[1], points_per_axis)
    writes = _log_axis(write_range[0], write_range[1], points_per_axis)
    return [
        TrafficPattern(r, w, access_width_bits) for r in reads for w in writes
    ]


def workload_to_rates(workload: WorkloadSpec, tasks_per_second: float | None = None) -> TrafficPattern:
    """Convert per-task counts into sustained byte rates.

    ``tasks_per_second`` overrides the workload's own rate (used for
    intermittent operation, where the wake-up count sets the average rate).
    """
    rate = tasks_per_second if tasks_per_second is not None else workload.tasks_per_second
    if rate is None:
        raise TrafficError(f"workload {workload.name} has no tasks_per_second")
    bytes_per_access = workload.access_width_bits / 8.0
    return TrafficPattern(
        read_bytes_per_s=workload.reads_per_task * rate * bytes_per_access,
        write_bytes_per_s=workload.writes_per_task * rate * bytes_per_access,
        access_width_bits=workload.access_width_bits,
    )


def _parse_field(text: str, name: str, row_num: int, kind):
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise TrafficError(f"row {row_num}: {name} is not numeric: {text!r}") from None
    if not math.isfinite(value):
        raise TrafficError(f"row {row_num}: {name} must be finite")
    if kind is int:
        if value != int(value):
            raise TrafficError(f"row {row_num}: {name} must be an integer")
        return int(value)
    return value


def load_workloads(path) -> list[WorkloadSpec]:
    """Load workload rows from CSV (header as in WORKLOAD_CSV_HEADER)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if tuple(h.strip() for h in header) != WORKLOAD_CSV_HEADER:
            raise TrafficError(
                f"bad workload header: expected {','.join(WORKLOAD_CSV_HEADER)}"
            )
        workloads = []
        for row_num, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(WORKLOAD_CSV_HEADER):
                raise TrafficError(
                    f"row {row_num}: expected {len(WORKLOAD_CSV_HEADER)} fields"
                )
            named = dict(zip(WORKLOAD_CSV_HEADER, row))
            if not named["name"].strip():
                raise TrafficError(f"row {row_num}: name must be non-empty")
            try:
                workloads.append(
                    WorkloadSpec(
                        name=named["name"].strip(),
                        reads_per_task=_parse_field(named["reads_per_task"], "reads_per_task", row_num, int) or 0,
                        writes_per_task=_parse_field(named["writes_per_task"], "writes_per_task", row_num, int) or 0,
                        access_width_bits=_parse_field(named["access_width_bits"], "access_width_bits", row_num, int)
                        or DEFAULT_ACCESS_WIDTH_BITS,
                        tasks_per_second=_parse_field(named["tasks_per_second"], "tasks_per_second", row_num, float),
                        target_task_latency_s=_parse_field(
                            named["target_task_latency_s"], "target_task_latency_s", row_num, float
                        ),
                        accuracy_floor=_parse_field(named["accuracy_floor"], "accuracy_floor", row_num, float),
                        footprint_bytes=_parse_field(named["footprint_bytes"], "footprint_bytes", row_num, int),
                    )
                )
            except TrafficError as exc:
                msg = str(exc)
                raise TrafficError(msg if msg.startswith("row ") else f"row {row_num}: {exc}") from None
    return workloads
