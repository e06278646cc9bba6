"""Cross-product sweep execution and deterministic result tables.

expand() turns a parsed config into the ordered list of design points
(cell, capacity, target, bits-per-cell, traffic, use-case axis, buffer axis
-- buffer innermost). run() evaluates every point through the pipeline
(tentpole -> array optimization -> evaluation -> optional buffer transform ->
optional fault scoring) and emits a canonical, byte-deterministic table.

A failing point becomes a row whose ``error`` column carries the message;
``fail_fast`` turns the first failure into an exception instead. Points are
independent, so any thread count produces identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import evaluation as ev
from .arrays import (
    ArrayCharacterization,
    ArrayModelError,
    OptimizationTarget,
    optimize,
)
from .cells import (
    CellDefinition,
    CellError,
    NUMERIC_FIELDS,
    Polarity,
    build_tentpole,
    complete_record,
    load_cell_records,
    validate_cell,
)
from .config import SweepConfig
from .evaluation import EvaluationRow, StandbyPolicy, WriteBufferSpec
from .faults import (
    CLASSIFIER_ADAPTER,
    FaultError,
    FaultModel,
    GRAY,
    StoredTensor,
    adjacent_level_model,
    evaluate_accuracy,
    inject,
    load_quantized,
)
from .predicate import compile_predicate
from .traffic import TrafficError, TrafficPattern, WorkloadSpec, generate_generic_sweep, load_workloads, workload_to_rates

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Column:
    name: str
    unit: str
    kind: str  # "int" | "float" | "bool" | "categorical" | "string"


COLUMNS = (
    Column("row_id", "", "int"),
    Column("technology", "", "categorical"),
    Column("polarity", "", "categorical"),
    Column("capacity_bytes", "B", "int"),
    Column("bits_per_cell", "bit", "int"),
    Column("opt_target", "", "categorical"),
    Column("R", "rows", "int"),
    Column("C", "cols", "int"),
    Column("S", "subarrays", "int"),
    Column("read_latency_ns", "ns", "float"),
    Column("write_latency_ns", "ns", "float"),
    Column("read_energy_pj", "pJ", "float"),
    Column("write_energy_pj", "pJ", "float"),
    Column("leakage_mw", "mW", "float"),
    Column("area_mm2", "mm^2", "float"),
    Column("area_efficiency", "", "float"),
    Column("read_bytes_per_s", "B/s", "float"),
    Column("write_bytes_per_s", "B/s", "float"),
    Column("utilization", "s/s", "float"),
    Column("feasible", "", "bool"),
    Column("total_power_mw", "mW", "float"),
    Column("task_latency_s", "s", "float"),
    Column("meets_latency_target", "", "bool"),
    Column("lifetime_s", "s", "float"),
    Column("energy_per_task_j", "J", "float"),
    Column("tasks_per_day", "1/day", "float"),
    Column("energy_per_day_j", "J/day", "float"),
    Column("buffer_c", "", "float"),
    Column("accuracy", "", "float"),
    Column("error", "", "string"),
)

NUMERIC_COLUMN_NAMES = frozenset(
    c.name for c in COLUMNS if c.kind in ("int", "float", "bool")
)

_POINT_ERRORS = (CellError, ArrayModelError, TrafficError, ev.EvaluationError, FaultError)


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class DesignPoint:
    row_id: int
    cell_index: int
    capacity_bytes: int
    target: str
    bits_per_cell: int
    traffic_index: int
    tasks_per_day: float | None = None
    buffer_c: float | None = None

    def describe(self, context: "_RunContext") -> str:
        technology, polarity = context.config.cells[self.cell_index].label()
        parts = [
            f"cell={technology}/{polarity}",
            f"capacity={self.capacity_bytes}",
            f"target={self.target}",
            f"bpc={self.bits_per_cell}",
        ]
        if self.tasks_per_day is not None:
            parts.append(f"n/day={self.tasks_per_day:g}")
        if self.buffer_c is not None:
            parts.append(f"buffer_c={self.buffer_c:g}")
        return " ".join(parts)


def traffic_axis(config: SweepConfig, workloads: list[WorkloadSpec] | None = None):
    """The resolved traffic axis: TrafficPattern or WorkloadSpec items."""
    if config.generic_traffic is not None:
        g = config.generic_traffic
        return generate_generic_sweep(
            (g.read_lo, g.read_hi), (g.write_lo, g.write_hi), g.points_per_axis,
            access_width_bits=config.word_width_bits,
        )
    if workloads is None:
        workloads = load_workloads(config.resolve(config.workloads_path))
    if not workloads:
        raise SweepError(f"workload file {config.workloads_path} has no rows")
    return workloads


def expand(config: SweepConfig, workloads: list[WorkloadSpec] | None = None) -> list[DesignPoint]:
    """Full cross product in canonical order; row count is the axis product."""
    traffic_items = traffic_axis(config, workloads)
    day_axis: tuple = (None,)
    if config.use_case.kind == "intermittent":
        day_axis = config.use_case.tasks_per_day
    buffer_axis: tuple = (None,)
    if config.write_buffer is not None:
        buffer_axis = config.write_buffer.coalesce_fractions
    points = []
    row_id = 0
    for cell_index in range(len(config.cells)):
        for capacity in config.capacities_bytes:
            for target in config.optimization_targets:
                for bits in config.bits_per_cell:
                    for traffic_index in range(len(traffic_items)):
                        for n_per_day in day_axis:
                            for c in buffer_axis:
                                points.append(
                                    DesignPoint(
                                        row_id=row_id,
                                        cell_index=cell_index,
                                        capacity_bytes=capacity,
                                        target=target,
                                        bits_per_cell=bits,
                                        traffic_index=traffic_index,
                                        tasks_per_day=n_per_day,
                                        buffer_c=c,
                                    )
                                )
                                row_id += 1
    return points


@dataclass
class _RunContext:
    config: SweepConfig
    cells: list[CellDefinition | str]           # definition or error text per selector
    traffic_items: list
    chars: dict                                  # (cell_idx, capacity, target, bits) -> char | error str
    buffer_char: ArrayCharacterization | None
    accuracies: dict                             # (cell_idx, bits) -> float | None
    standby: StandbyPolicy | None


def _resolve_cell(selector, records) -> CellDefinition:
    if selector.definition is not None:
        values = dict(selector.definition)
        technology = values.pop("technology")
        definition = CellDefinition(
            technology=technology,
            polarity=Polarity(selector.polarity),
            provenance=tuple((name, "inline") for name in NUMERIC_FIELDS),
            bits_per_cell_max=int(values.pop("bits_per_cell_max")),
            **values,
        )
        report = validate_cell(definition)
        if not report.ok:
            raise CellError(f"inline cell invalid: {'; '.join(report.violations)}")
        return definition
    if selector.source_id is not None:
        matches = [r for r in records if r.source_id == selector.source_id]
        if not matches:
            raise CellError(f"no record with source_id {selector.source_id!r}")
        return complete_record(matches[0], Polarity(selector.polarity))
    return build_tentpole(records, selector.technology, Polarity(selector.polarity))


def _fault_model_for(config: SweepConfig, technology: str, polarity: str, bits: int):
    spec = config.faults
    if spec is None:
        return None
    body = spec.models.get(f"{technology}:{polarity}") or spec.models.get(technology)
    if body is None:
        return None
    if bits == 1:
        ber = body.get("slc_ber")
        return None if ber is None else FaultModel.slc(ber)
    q = body.get("mlc_adjacent_q")
    return None if q is None else adjacent_level_model(1 << bits, q)


def _fault_accuracy(config: SweepConfig, model: FaultModel, bits: int) -> float:
    weights_path = config.resolve(config.faults.weights)
    payload, _ = load_quantized(weights_path)
    tensor = StoredTensor(payload=payload, bits_per_cell=bits, level_coding=GRAY)
    total = 0.0
    for fault_seed in config.faults.seeds:
        mixed = (config.seed * 1000003 + fault_seed) & 0xFFFFFFFFFFFFFFFF
        result = inject(tensor, model, mixed)
        total += evaluate_accuracy(weights_path, result, config.faults.adapter)
    return total / len(config.faults.seeds)


def prepare(config: SweepConfig) -> _RunContext:
    """Resolve cells, arrays, buffer, and fault scores before the point loop.

    Per-axis failures are stored as error strings and surface on the rows
    that would have used them.
    """
    records = None
    needs_records = config.write_buffer is not None or any(
        s.definition is None for s in config.cells
    )
    if needs_records:
        records = load_cell_records(config.resolve(config.cell_records))

    cells: list[CellDefinition | str] = []
    for selector in config.cells:
        try:
            cells.append(_resolve_cell(selector, records))
        except _POINT_ERRORS as exc:
            cells.append(str(exc))

    traffic_items = traffic_axis(config)

    chars = {}
    for cell_index, cell in enumerate(cells):
        for capacity in config.capacities_bytes:
            for target in config.optimization_targets:
                for bits in config.bits_per_cell:
                    key = (cell_index, capacity, target, bits)
                    if isinstance(cell, str):
                        chars[key] = cell
                        continue
                    try:
                        _, char = optimize(
                            cell, capacity, config.word_width_bits,
                            OptimizationTarget(target), bits, config.calibration,
                        )
                        chars[key] = char
                    except _POINT_ERRORS as exc:
                        chars[key] = str(exc)

    buffer_char = None
    if config.write_buffer is not None:
        wb = config.write_buffer
        buffer_cell = build_tentpole(records, wb.technology, Polarity(wb.polarity))
        _, buffer_char = optimize(
            buffer_cell, wb.capacity_bytes, config.word_width_bits,
            OptimizationTarget(wb.optimization_target), 1, config.calibration,
        )

    accuracies = {}
    if config.faults is not None:
        for cell_index, cell in enumerate(cells):
            if isinstance(cell, str):
                continue
            technology, polarity = config.cells[cell_index].label()
            for bits in config.bits_per_cell:
                model = _fault_model_for(config, technology, polarity, bits)
                if model is None:
                    continue
                try:
                    accuracies[(cell_index, bits)] = _fault_accuracy(config, model, bits)
                except _POINT_ERRORS as exc:
                    accuracies[(cell_index, bits)] = str(exc)

    standby = None
    if config.use_case.kind == "intermittent":
        uc = config.use_case
        standby = StandbyPolicy(uc.standby_kind, uc.reload_energy_pj_per_bit)

    return _RunContext(
        config=config,
        cells=cells,
        traffic_items=traffic_items,
        chars=chars,
        buffer_char=buffer_char,
        accuracies=accuracies,
        standby=standby,
    )


def _array_columns(char: ArrayCharacterization) -> dict:
    org = char.organization
    return {
        "R": org.subarray_rows,
        "C": org.subarray_cols,
        "S": org.num_subarrays,
        "read_latency_ns": char.read_latency_ns,
        "write_latency_ns": char.write_latency_ns,
        "read_energy_pj": char.read_energy_pj,
        "write_energy_pj": char.write_energy_pj,
        "leakage_mw": char.leakage_mw,
        "area_mm2": char.area_mm2,
        "area_efficiency": char.area_efficiency,
    }


def _power_from_rates(char: ArrayCharacterization, read_bps: float, write_bps: float) -> float:
    r_acc = ev.accesses_per_second(char, read_bps)
    w_acc = ev.accesses_per_second(char, write_bps)
    return char.leakage_mw + (r_acc * char.read_energy_pj + w_acc * char.write_energy_pj) * 1e-9


def evaluate_point(context: _RunContext, point: DesignPoint) -> EvaluationRow:
    config = context.config
    technology, polarity = config.cells[point.cell_index].label()
    base = {
        "row_id": point.row_id,
        "technology": technology,
        "polarity": polarity,
        "capacity_bytes": point.capacity_bytes,
        "bits_per_cell": point.bits_per_cell,
        "opt_target": point.target,
        "tasks_per_day": point.tasks_per_day,
        "buffer_c": point.buffer_c,
    }

    cell = context.cells[point.cell_index]
    if isinstance(cell, str):
        return EvaluationRow(**base, error=cell)
    char = context.chars[(point.cell_index, point.capacity_bytes, point.target, point.bits_per_cell)]
    if isinstance(char, str):
        return EvaluationRow(**base, error=char)
    base.update(_array_columns(char))

    accuracy = context.accuracies.get((point.cell_index, point.bits_per_cell))
    if isinstance(accuracy, str):
        return EvaluationRow(**base, error=accuracy)
    base["accuracy"] = accuracy

    item = context.traffic_items[point.traffic_index]
    workload: WorkloadSpec | None = None
    if isinstance(item, WorkloadSpec):
        workload = item
        if point.tasks_per_day is not None:
            if point.tasks_per_day == 0:
                read_bps = write_bps = 0.0
            else:
                rates = workload_to_rates(workload, point.tasks_per_day / ev.SECONDS_PER_DAY)
                read_bps, write_bps = rates.read_bytes_per_s, rates.write_bytes_per_s
        else:
            rates = workload_to_rates(workload)
            read_bps, write_bps = rates.read_bytes_per_s, rates.write_bytes_per_s
    else:
        read_bps, write_bps = item.read_bytes_per_s, item.write_bytes_per_s
    base["read_bytes_per_s"] = read_bps
    base["write_bytes_per_s"] = write_bps

    buffered = None
    if point.buffer_c is not None:
        spec = WriteBufferSpec(
            buffer_char=context.buffer_char,
            coalesce_fraction=point.buffer_c,
            mask_latency=config.write_buffer.mask_latency,
        )
        if read_bps == 0.0 and write_bps == 0.0:
            buffered = None  # nothing flows; plain idle metrics below
        else:
            buffered = ev.apply_write_buffer(
                char, char.cell, TrafficPattern(read_bps, write_bps), spec
            )

    if buffered is not None:
        # report the binding occupancy so feasible <=> utilization <= 1 holds
        base["utilization"] = max(buffered.envm_utilization, buffered.buffer_utilization)
        base["feasible"] = buffered.feasible
        base["total_power_mw"] = (
            _power_from_rates(char, read_bps, buffered.envm_write_bytes_per_s)
            + buffered.added_power_mw
        )
        base["lifetime_s"] = buffered.lifetime_s
    elif read_bps == 0.0 and write_bps == 0.0:
        base["utilization"] = 0.0
        base["feasible"] = True
        base["total_power_mw"] = char.leakage_mw + (
            context.buffer_char.leakage_mw if point.buffer_c is not None else 0.0
        )
        base["lifetime_s"] = math.inf
    else:
        pole = ev.long_pole(char, TrafficPattern(read_bps, write_bps))
        base["utilization"] = pole.utilization
        base["feasible"] = pole.feasible
        base["total_power_mw"] = _power_from_rates(char, read_bps, write_bps)
        base["lifetime_s"] = ev.lifetime(char, char.cell, TrafficPattern(read_bps, write_bps))

    if workload is not None:
        reads_arr = workload.reads_per_task * workload.access_width_bits / config.word_width_bits
        writes_arr = workload.writes_per_task * workload.access_width_bits / config.word_width_bits
        if point.buffer_c is not None:
            c = point.buffer_c
            mask = config.write_buffer.mask_latency
            buf = context.buffer_char
            visible_latency_ns = buf.write_latency_ns if mask else char.write_latency_ns
            visible_writes = writes_arr if mask else (1.0 - c) * writes_arr
            latency_s = (
                reads_arr * char.read_latency_ns + visible_writes * visible_latency_ns
            ) * 1e-9
            writeback = (1.0 - c) * writes_arr
            access_j = (
                reads_arr * char.read_energy_pj
                + writeback * char.write_energy_pj
                + writes_arr * buf.write_energy_pj
                + writeback * buf.read_energy_pj
            ) * 1e-12
            leak_mw = char.leakage_mw + buf.leakage_mw
            task_j = access_j + leak_mw * 1e-3 * latency_s
        else:
            latency_s, _ = ev.task_latency(char, workload)
            task_j = ev.energy_per_task(char, workload)
            leak_mw = char.leakage_mw
        base["task_latency_s"] = latency_s
        if workload.target_task_latency_s is not None:
            base["meets_latency_target"] = latency_s <= workload.target_task_latency_s
        base["energy_per_task_j"] = task_j
        if point.tasks_per_day is not None:
            base["energy_per_day_j"] = ev.day_energy_from_components(
                point.tasks_per_day, task_j, latency_s, leak_mw,
                context.standby, workload.footprint_bytes,
            )
    return EvaluationRow(**base)


def run(config: SweepConfig, threads: int = 1, fail_fast: bool = False) -> "ResultTable":
    """Evaluate the whole sweep; identical config+seed gives identical bytes."""
    context = prepare(config)
    loaded = context.traffic_items if config.workloads_path is not None else None
    points = expand(config, workloads=loaded)

    def evaluate(point: DesignPoint) -> EvaluationRow:
        try:
            row = evaluate_point(context, point)
        except _POINT_ERRORS as exc:
            technology, polarity = config.cells[point.cell_index].label()
            row = EvaluationRow(
                row_id=point.row_id,
                technology=technology,
                polarity=polarity,
                capacity_bytes=point.capacity_bytes,
                bits_per_cell=point.bits_per_cell,
                opt_target=point.target,
                tasks_per_day=point.tasks_per_day,
                buffer_c=point.buffer_c,
                error=str(exc),
            )
        if fail_fast and row.error is not None:
            raise SweepError(f"design point [{point.describe(context)}]: {row.error}")
        return row

    if threads <= 1:
        rows = [evaluate(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(evaluate, points))
    rows.sort(key=lambda r: r.row_id)
    return ResultTable(rows=tuple(rows), config_fingerprint=config.fingerprint())


# --- result table ------------------------------------------------------------


def _format_float(value: float) -> str:
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return repr(value)


def _csv_cell(value, kind: str) -> str:
    if value is None:
        return ""
    if kind == "bool":
        return "1" if value else "0"
    if kind == "int":
        return str(int(value))
    if kind == "float":
        return _format_float(float(value))
    return str(value)


def _bundle_number(value: float) -> str:
    if value == math.inf:
        return '"inf"'
    if value == -math.inf:
        return '"-inf"'
    text = format(value, ".17g")
    return text


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[EvaluationRow, ...]
    config_fingerprint: str
    columns: tuple[Column, ...] = COLUMNS

    def filter(self, expression: str) -> "ResultTable":
        predicate = compile_predicate(expression, NUMERIC_COLUMN_NAMES)
        kept = tuple(
            row for row in self.rows if predicate(lambda name: getattr(row, name))
        )
        return replace(self, rows=kept)

    def to_csv_text(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([c.name for c in self.columns])
        for row in self.rows:
            writer.writerow(
                [_csv_cell(getattr(row, c.name), c.kind) for c in self.columns]
            )
        return out.getvalue()

    def to_bundle_text(self) -> str:
        column_manifest = ",".join(
            json.dumps({"name": c.name, "unit": c.unit, "kind": c.kind})
            for c in self.columns
        )
        encoded_rows = []
        for row in self.rows:
            cells = []
            for column in self.columns:
                value = getattr(row, column.name)
                if value is None:
                    cells.append("null")
                elif column.kind == "bool":
                    cells.append("1" if value else "0")
                elif column.kind == "int":
                    cells.append(str(int(value)))
                elif column.kind == "float":
                    cells.append(_bundle_number(float(value)))
                else:
                    cells.append(json.dumps(value))
            encoded_rows.append("[" + ",".join(cells) + "]")
        rows_text = ",\n".join(encoded_rows)
        return (
            "{\n"
            f'"schema_version": {SCHEMA_VERSION},\n'
            f'"config_fingerprint": {json.dumps(self.config_fingerprint)},\n'
            f'"columns": [{column_manifest}],\n'
            f'"rows": [\n{rows_text}\n]\n'
            "}\n"
        )

    @classmethod
    def from_bundle_text(cls, text: str) -> "ResultTable":
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SweepError(f"unsupported bundle schema version {data.get('schema_version')}")
        names = [c["name"] for c in data["columns"]]
        expected = [c.name for c in COLUMNS]
        if names != expected:
            raise SweepError("bundle column manifest does not match this version")
        rows = []
        for encoded in data["rows"]:
            values = {}
            for column, raw in zip(COLUMNS, encoded):
                if raw is None:
                    values[column.name] = None
                elif column.kind == "float":
                    values[column.name] = float(raw)  # "inf"/"-inf" strings included
                elif column.kind == "int":
                    values[column.name] = int(raw)
                elif column.kind == "bool":
                    values[column.name] = bool(raw)
                else:
                    values[column.name] = raw
            rows.append(EvaluationRow(**values))
        return cls(rows=tuple(rows), config_fingerprint=data["config_fingerprint"])


def export_per_technology_csvs(table: ResultTable, directory) -> list:
    """Optional split export: one CSV per (technology, bits-per-cell) group."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    groups: dict[tuple[str, int], list[EvaluationRow]] = {}
    for row in table.rows:
        key = (row.technology, row.bits_per_cell or 1)
        groups.setdefault(key, []).append(row)
    written = []
    for (technology, bits), rows in sorted(groups.items()):
        path = directory / f"{technology}_{bits}BPC-combined.csv"
        sub = replace(table, rows=tuple(rows))
        path.write_text(sub.to_csv_text(), encoding="utf-8")
        written.append(path)
    return written
