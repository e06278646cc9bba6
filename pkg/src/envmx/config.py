"""Declarative sweep configuration: strict parsing and canonicalization.

Configs are JSON. Validation is strict -- unknown keys anywhere are errors
(typo protection), and every message carries the JSON-pointer path of the
offending value. Parsing materializes all defaults into a canonical form
whose SHA-256 fingerprints the run; identical canonical configs produce
byte-identical result tables.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path

from .arrays import Calibration, OptimizationTarget
from .cells import NUMERIC_FIELDS, Polarity
from .evaluation import DEFAULT_RELOAD_ENERGY_PJ_PER_BIT
from .faults import CLASSIFIER_ADAPTER, MSE_ADAPTER

DEFAULT_CELL_RECORDS = "cells/survey.csv"
DEFAULT_WORD_WIDTH_BITS = 64
DEFAULT_WEIGHTS = "data/tiny_classifier/weights.bin"

_TARGET_NAMES = tuple(t.value for t in OptimizationTarget)
_TENTPOLE_POLARITIES = ("optimistic", "pessimistic")


class ConfigError(ValueError):
    """Schema violation; the message names the JSON-pointer path."""


def _fail(pointer: str, message: str):
    raise ConfigError(f"{pointer or '/'}: {message}")


def _expect_object(value, pointer, required=(), optional=()):
    if not isinstance(value, dict):
        _fail(pointer, f"expected an object, got {type(value).__name__}")
    allowed = set(required) | set(optional)
    for key in value:
        if key not in allowed:
            _fail(f"{pointer}/{key}", "unknown key")
    for key in required:
        if key not in value:
            _fail(pointer, f"missing required key {key!r}")
    return value


def _expect_list(value, pointer, nonempty=True):
    if not isinstance(value, list):
        _fail(pointer, f"expected a list, got {type(value).__name__}")
    if nonempty and not value:
        _fail(pointer, "must not be empty")
    return value


def _expect_number(value, pointer, minimum=None, maximum=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(pointer, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        _fail(pointer, "must be finite")
    if integer and int(value) != value:
        _fail(pointer, f"expected an integer, got {value}")
    if minimum is not None and value < minimum:
        _fail(pointer, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(pointer, f"must be <= {maximum}, got {value}")
    return int(value) if integer else float(value)


def _expect_string(value, pointer, choices=None, nonempty=True):
    if not isinstance(value, str):
        _fail(pointer, f"expected a string, got {type(value).__name__}")
    if nonempty and not value:
        _fail(pointer, "must not be empty")
    if choices is not None and value not in choices:
        _fail(pointer, f"must be one of {list(choices)}, got {value!r}")
    return value


def _expect_bool(value, pointer):
    if not isinstance(value, bool):
        _fail(pointer, f"expected a boolean, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class CellSelector:
    technology: str | None = None
    polarity: str = "optimistic"
    source_id: str | None = None
    definition: dict | None = None

    def label(self) -> tuple[str, str]:
        """(technology, polarity) identifiers for result rows."""
        if self.definition is not None:
            return self.definition["technology"], self.polarity
        return self.technology, self.polarity

    def to_canonical(self) -> dict:
        if self.definition is not None:
            return {"definition": dict(self.definition), "polarity": self.polarity}
        entry = {"technology": self.technology, "polarity": self.polarity}
        if self.source_id is not None:
            entry["source_id"] = self.source_id
        return entry


@dataclass(frozen=True)
class GenericTrafficSpec:
    read_lo: float
    read_hi: float
    write_lo: float
    write_hi: float
    points_per_axis: int


@dataclass(frozen=True)
class UseCaseSpec:
    kind: str  # "continuous" | "intermittent"
    tasks_per_day: tuple[float, ...] = ()
    standby_kind: str = "retain"
    reload_energy_pj_per_bit: float = DEFAULT_RELOAD_ENERGY_PJ_PER_BIT


@dataclass(frozen=True)
class WriteBufferSpecConfig:
    technology: str
    polarity: str
    capacity_bytes: int
    coalesce_fractions: tuple[float, ...]
    mask_latency: bool
    optimization_target: str


@dataclass(frozen=True)
class FaultSpecConfig:
    models: dict  # "TECH" or "TECH:polarity" -> {"slc_ber":..., "mlc_adjacent_q":...}
    adapter: str
    weights: str
    seeds: tuple[int, ...]
    accuracy_floor: float | None


@dataclass(frozen=True)
class SweepConfig:
    name: str
    seed: int
    cell_records: str
    cells: tuple[CellSelector, ...]
    capacities_bytes: tuple[int, ...]
    word_width_bits: int
    optimization_targets: tuple[str, ...]
    bits_per_cell: tuple[int, ...]
    generic_traffic: GenericTrafficSpec | None
    workloads_path: str | None
    use_case: UseCaseSpec
    write_buffer: WriteBufferSpecConfig | None
    faults: FaultSpecConfig | None
    calibration: Calibration
    output_directory: str
    base_dir: Path

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self.base_dir / path

    def to_canonical(self) -> dict:
        traffic = (
            {
                "generic": {
                    "read_bytes_per_s": [self.generic_traffic.read_lo, self.generic_traffic.read_hi],
                    "write_bytes_per_s": [self.generic_traffic.write_lo, self.generic_traffic.write_hi],
                    "points_per_axis": self.generic_traffic.points_per_axis,
                }
            }
            if self.generic_traffic is not None
            else {"workloads": self.workloads_path}
        )
        use_case = {"kind": self.use_case.kind}
        if self.use_case.kind == "intermittent":
            use_case["tasks_per_day"] = list(self.use_case.tasks_per_day)
            policy = {"kind": self.use_case.standby_kind}
            if self.use_case.standby_kind == "reload_from_off_chip":
                policy["reload_energy_pj_per_bit"] = self.use_case.reload_energy_pj_per_bit
            use_case["standby_policy"] = policy
        buffer = None
        if self.write_buffer is not None:
            buffer = {
                "technology": self.write_buffer.technology,
                "polarity": self.write_buffer.polarity,
                "capacity_bytes": self.write_buffer.capacity_bytes,
                "coalesce_fractions": list(self.write_buffer.coalesce_fractions),
                "mask_latency": self.write_buffer.mask_latency,
                "optimization_target": self.write_buffer.optimization_target,
            }
        faults = None
        if self.faults is not None:
            faults = {
                "models": {k: dict(v) for k, v in sorted(self.faults.models.items())},
                "adapter": self.faults.adapter,
                "weights": self.faults.weights,
                "seeds": list(self.faults.seeds),
            }
            if self.faults.accuracy_floor is not None:
                faults["accuracy_floor"] = self.faults.accuracy_floor
        return {
            "name": self.name,
            "seed": self.seed,
            "cell_records": self.cell_records,
            "cells": [c.to_canonical() for c in self.cells],
            "capacities_bytes": list(self.capacities_bytes),
            "word_width_bits": self.word_width_bits,
            "optimization_targets": list(self.optimization_targets),
            "bits_per_cell": list(self.bits_per_cell),
            "traffic": traffic,
            "use_case": use_case,
            "write_buffer": buffer,
            "faults": faults,
            "calibration": {
                f.name: getattr(self.calibration, f.name) for f in dc_fields(Calibration)
            },
            "output": {"directory": self.output_directory},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_canonical(), sort_keys=True, indent=2) + "\n"

    def fingerprint(self) -> str:
        compact = json.dumps(self.to_canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def _parse_cell_entry(entry, pointer) -> CellSelector:
    _expect_object(entry, pointer, optional=("technology", "polarity", "source_id", "definition"))
    if "definition" in entry:
        if "technology" in entry or "source_id" in entry:
            _fail(pointer, "definition entries take no technology/source_id keys")
        polarity = _expect_string(
            entry.get("polarity", "custom"), f"{pointer}/polarity",
            choices=tuple(p.value for p in Polarity),
        )
        definition = _expect_object(
            entry["definition"], f"{pointer}/definition",
            required=("technology",) + NUMERIC_FIELDS,
        )
        parsed = {"technology": _expect_string(definition["technology"], f"{pointer}/definition/technology")}
        for name in NUMERIC_FIELDS:
            raw = definition[name]
            if raw == "inf" and name == "endurance_cycles":
                parsed[name] = math.inf
                continue
            parsed[name] = _expect_number(raw, f"{pointer}/definition/{name}", minimum=0)
        return CellSelector(polarity=polarity, definition=parsed)
    if "technology" not in entry:
        _fail(pointer, "cell entries need a technology (or an inline definition)")
    technology = _expect_string(entry["technology"], f"{pointer}/technology")
    if "source_id" in entry:
        source = _expect_string(entry["source_id"], f"{pointer}/source_id")
        polarity = _expect_string(
            entry.get("polarity", "reference"), f"{pointer}/polarity",
            choices=tuple(p.value for p in Polarity),
        )
        return CellSelector(technology=technology, polarity=polarity, source_id=source)
    polarity = _expect_string(
        entry.get("polarity", "optimistic"), f"{pointer}/polarity",
        choices=_TENTPOLE_POLARITIES,
    )
    return CellSelector(technology=technology, polarity=polarity)


def _parse_traffic(raw, pointer):
    _expect_object(raw, pointer, optional=("generic", "workloads"))
    if ("generic" in raw) == ("workloads" in raw):
        _fail(pointer, "traffic needs exactly one of 'generic' or 'workloads'")
    if "workloads" in raw:
        return None, _expect_string(raw["workloads"], f"{pointer}/workloads")
    generic = _expect_object(
        raw["generic"], f"{pointer}/generic",
        required=("read_bytes_per_s", "write_bytes_per_s", "points_per_axis"),
    )
    ranges = {}
    for axis in ("read_bytes_per_s", "write_bytes_per_s"):
        pair = _expect_list(generic[axis], f"{pointer}/generic/{axis}")
        if len(pair) != 2:
            _fail(f"{pointer}/generic/{axis}", "expected [lo, hi]")
        lo = _expect_number(pair[0], f"{pointer}/generic/{axis}/0", minimum=0)
        hi = _expect_number(pair[1], f"{pointer}/generic/{axis}/1", minimum=0)
        if not 0 < lo <= hi:
            _fail(f"{pointer}/generic/{axis}", f"need 0 < lo <= hi, got [{lo}, {hi}]")
        ranges[axis] = (lo, hi)
    points = _expect_number(
        generic["points_per_axis"], f"{pointer}/generic/points_per_axis",
        minimum=1, integer=True,
    )
    spec = GenericTrafficSpec(
        read_lo=ranges["read_bytes_per_s"][0],
        read_hi=ranges["read_bytes_per_s"][1],
        write_lo=ranges["write_bytes_per_s"][0],
        write_hi=ranges["write_bytes_per_s"][1],
        points_per_axis=points,
    )
    return spec, None


def _parse_use_case(raw, pointer) -> UseCaseSpec:
    _expect_object(raw, pointer, required=("kind",), optional=("tasks_per_day", "standby_policy"))
    kind = _expect_string(raw["kind"], f"{pointer}/kind", choices=("continuous", "intermittent"))
    if kind == "continuous":
        for key in ("tasks_per_day", "standby_policy"):
            if key in raw:
                _fail(f"{pointer}/{key}", "only valid for intermittent use")
        return UseCaseSpec(kind="continuous")
    if "tasks_per_day" not in raw:
        _fail(pointer, "intermittent use needs tasks_per_day")
    counts = _expect_list(raw["tasks_per_day"], f"{pointer}/tasks_per_day")
    tasks = tuple(
        _expect_number(v, f"{pointer}/tasks_per_day/{i}", minimum=0)
        for i, v in enumerate(counts)
    )
    standby_kind = "retain"
    reload_energy = DEFAULT_RELOAD_ENERGY_PJ_PER_BIT
    if "standby_policy" in raw:
        policy = _expect_object(
            raw["standby_policy"], f"{pointer}/standby_policy",
            required=("kind",), optional=("reload_energy_pj_per_bit",),
        )
        standby_kind = _expect_string(
            policy["kind"], f"{pointer}/standby_policy/kind",
            choices=("power_off", "retain", "reload_from_off_chip"),
        )
        if "reload_energy_pj_per_bit" in policy:
            if standby_kind != "reload_from_off_chip":
                _fail(f"{pointer}/standby_policy/reload_energy_pj_per_bit",
                      "only valid for reload_from_off_chip")
            reload_energy = _expect_number(
                policy["reload_energy_pj_per_bit"],
                f"{pointer}/standby_policy/reload_energy_pj_per_bit",
            )
            if reload_energy <= 0:
                _fail(f"{pointer}/standby_policy/reload_energy_pj_per_bit", "must be > 0")
    return UseCaseSpec(kind="intermittent", tasks_per_day=tasks,
                       standby_kind=standby_kind, reload_energy_pj_per_bit=reload_energy)


def _parse_write_buffer(raw, pointer) -> WriteBufferSpecConfig:
    _expect_object(
        raw, pointer,
        required=("technology", "polarity", "capacity_bytes", "coalesce_fractions"),
        optional=("mask_latency", "optimization_target"),
    )
    fractions = tuple(
        _expect_number(v, f"{pointer}/coalesce_fractions/{i}", minimum=0.0, maximum=1.0)
        for i, v in enumerate(_expect_list(raw["coalesce_fractions"], f"{pointer}/coalesce_fractions"))
    )
    return WriteBufferSpecConfig(
        technology=_expect_string(raw["technology"], f"{pointer}/technology"),
        polarity=_expect_string(raw["polarity"], f"{pointer}/polarity", choices=_TENTPOLE_POLARITIES),
        capacity_bytes=_expect_number(raw["capacity_bytes"], f"{pointer}/capacity_bytes",
                                      minimum=1024, integer=True),
        coalesce_fractions=fractions,
        mask_latency=_expect_bool(raw.get("mask_latency", True), f"{pointer}/mask_latency"),
        optimization_target=_expect_string(
            raw.get("optimization_target", "WriteEDP"),
            f"{pointer}/optimization_target", choices=_TARGET_NAMES,
        ),
    )


def _parse_faults(raw, pointer) -> FaultSpecConfig:
    _expect_object(
        raw, pointer,
        required=("models",),
        optional=("adapter", "weights", "seeds", "accuracy_floor"),
    )
    models_raw = raw["models"]
    if not isinstance(models_raw, dict) or not models_raw:
        _fail(f"{pointer}/models", "expected a non-empty object keyed by technology")
    models = {}
    for key, body in models_raw.items():
        body_ptr = f"{pointer}/models/{key}"
        _expect_object(body, body_ptr, optional=("slc_ber", "mlc_adjacent_q"))
        if not body:
            _fail(body_ptr, "needs slc_ber and/or mlc_adjacent_q")
        parsed = {}
        if "slc_ber" in body:
            parsed["slc_ber"] = _expect_number(body["slc_ber"], f"{body_ptr}/slc_ber",
                                               minimum=0.0, maximum=1.0)
        if "mlc_adjacent_q" in body:
            parsed["mlc_adjacent_q"] = _expect_number(
                body["mlc_adjacent_q"], f"{body_ptr}/mlc_adjacent_q",
                minimum=0.0, maximum=0.5,
            )
        models[key] = parsed
    seeds = tuple(
        _expect_number(v, f"{pointer}/seeds/{i}", minimum=0, integer=True)
        for i, v in enumerate(_expect_list(raw.get("seeds", [1]), f"{pointer}/seeds"))
    )
    floor = None
    if "accuracy_floor" in raw:
        floor = _expect_number(raw["accuracy_floor"], f"{pointer}/accuracy_floor",
                               minimum=0.0, maximum=1.0)
    return FaultSpecConfig(
        models=models,
        adapter=_expect_string(raw.get("adapter", CLASSIFIER_ADAPTER), f"{pointer}/adapter",
                               choices=(MSE_ADAPTER, CLASSIFIER_ADAPTER)),
        weights=_expect_string(raw.get("weights", DEFAULT_WEIGHTS), f"{pointer}/weights"),
        seeds=seeds,
        accuracy_floor=floor,
    )


TOP_LEVEL_KEYS = (
    "name", "seed", "cell_records", "cells", "capacities_bytes", "word_width_bits",
    "optimization_targets", "bits_per_cell", "traffic", "use_case", "write_buffer",
    "faults", "calibration", "output",
)


def parse_config_dict(data: dict, base_dir=".", name: str = "",
                      seed_override: int | None = None) -> SweepConfig:
    _expect_object(data, "", required=("cells", "capacities_bytes", "optimization_targets", "traffic"),
                   optional=tuple(k for k in TOP_LEVEL_KEYS
                                  if k not in ("cells", "capacities_bytes", "optimization_targets", "traffic")))
    seed = _expect_number(data.get("seed", 0), "/seed", minimum=0, integer=True)
    if seed_override is not None:
        seed = seed_override
    cells = tuple(
        _parse_cell_entry(entry, f"/cells/{i}")
        for i, entry in enumerate(_expect_list(data["cells"], "/cells"))
    )
    capacities = tuple(
        _expect_number(v, f"/capacities_bytes/{i}", minimum=1024, integer=True)
        for i, v in enumerate(_expect_list(data["capacities_bytes"], "/capacities_bytes"))
    )
    targets = tuple(
        _expect_string(v, f"/optimization_targets/{i}", choices=_TARGET_NAMES)
        for i, v in enumerate(_expect_list(data["optimization_targets"], "/optimization_targets"))
    )
    bits = tuple(
        _expect_number(v, f"/bits_per_cell/{i}", minimum=1, integer=True)
        for i, v in enumerate(_expect_list(data.get("bits_per_cell", [1]), "/bits_per_cell"))
    )
    word_width = _expect_number(data.get("word_width_bits", DEFAULT_WORD_WIDTH_BITS),
                                "/word_width_bits", minimum=8, integer=True)
    for i, b in enumerate(bits):
        if word_width % b:
            _fail(f"/bits_per_cell/{i}", f"word width {word_width} not divisible by {b}")
    generic, workloads_path = _parse_traffic(data["traffic"], "/traffic")
    use_case = _parse_use_case(data.get("use_case", {"kind": "continuous"}), "/use_case")
    if use_case.kind == "intermittent" and workloads_path is None:
        _fail("/use_case", "intermittent use needs workload traffic (per-task counts)")
    write_buffer = None
    if data.get("write_buffer") is not None:
        write_buffer = _parse_write_buffer(data["write_buffer"], "/write_buffer")
    faults = None
    if data.get("faults") is not None:
        faults = _parse_faults(data["faults"], "/faults")
    calibration_raw = data.get("calibration", {})
    _expect_object(calibration_raw, "/calibration",
                   optional=tuple(f.name for f in dc_fields(Calibration)))
    overrides = {
        key: _expect_number(value, f"/calibration/{key}")
        for key, value in calibration_raw.items()
    }
    output = _expect_object(data.get("output", {}), "/output", optional=("directory",))
    output_dir = _expect_string(output.get("directory", "out"), "/output/directory")

    return SweepConfig(
        name=_expect_string(data.get("name", name), "/name", nonempty=False),
        seed=seed,
        cell_records=_expect_string(data.get("cell_records", DEFAULT_CELL_RECORDS), "/cell_records"),
        cells=cells,
        capacities_bytes=capacities,
        word_width_bits=word_width,
        optimization_targets=targets,
        bits_per_cell=bits,
        generic_traffic=generic,
        workloads_path=workloads_path,
        use_case=use_case,
        write_buffer=write_buffer,
        faults=faults,
        calibration=Calibration.from_overrides(overrides),
        output_directory=output_dir,
        base_dir=Path(base_dir),
    )


def parse_config(path, seed_override: int | None = None) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    return parse_config_dict(data, base_dir=path.parent, name=path.stem,
                             seed_override=seed_override)
