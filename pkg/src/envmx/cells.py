"""Cell-technology records, bounding ("tentpole") definitions, and validation.

A survey CSV holds partially-specified memory-cell parameters collected from
publications, one row per published result.  This module loads those records,
constructs fully-specified bounding cell definitions per technology class
(the optimistic / pessimistic extremes of storage density, with missing
parameters filled by the best / worst published value), and validates
definitions against the bundled per-technology parameter ranges.

Everything here is a frozen value type; instances can be shared freely across
concurrent evaluators.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources

from . import celldefaults

KNOWN_TECHNOLOGIES = ("SRAM", "STT", "SOT", "RRAM", "PCM", "CTT", "FeRAM", "FeFET")

_CANONICAL_TECH = {t.lower(): t for t in KNOWN_TECHNOLOGIES}


class Polarity(str, Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
    REFERENCE = "reference"
    CUSTOM = "custom"


# Fill direction per numeric field: a "cost" field takes its minimum published
# value in an optimistic construction (maximum in a pessimistic one); a
# "benefit" field the reverse.  The implementation node is treated cost-like
# for fills only -- it is excluded from the optimistic/pessimistic dominance
# property, which is defined over the lists below.
FIELD_FILL_KIND = {
    "cell_area_f2": "cost",
    "tech_node_nm": "cost",
    "bits_per_cell_max": "benefit",
    "read_latency_ns": "cost",
    "write_latency_ns": "cost",
    "read_energy_pj": "cost",
    "write_energy_pj": "cost",
    "endurance_cycles": "benefit",
    "retention_s": "benefit",
    "standby_power_per_cell_nw": "cost",
}

NUMERIC_FIELDS = tuple(FIELD_FILL_KIND)

# Dominance property field lists (Optimistic <= Pessimistic on costs, >= on
# benefits; density is derived as bits_per_cell_max / cell_area_f2).
DOMINANCE_COST_FIELDS = (
    "read_latency_ns",
    "write_latency_ns",
    "read_energy_pj",
    "write_energy_pj",
    "standby_power_per_cell_nw",
)
DOMINANCE_BENEFIT_FIELDS = ("endurance_cycles", "retention_s")

CSV_HEADER = ("technology", "source_id") + NUMERIC_FIELDS


class CellError(ValueError):
    """Schema violation in cell records or an impossible tentpole request."""


def normalize_technology(name: str) -> str:
    """Map known technology names case-insensitively to their canonical form.

    Any other non-empty string is accepted as a custom technology and kept
    verbatim.
    """
    name = name.strip()
    if not name:
        raise CellError("technology name must be non-empty")
    return _CANONICAL_TECH.get(name.lower(), name)


@dataclass(frozen=True)
class CellRecord:
    """One partially-specified survey entry. Missing fields are None."""

    technology: str
    source_id: str
    cell_area_f2: float | None = None
    tech_node_nm: float | None = None
    bits_per_cell_max: int | None = None
    read_latency_ns: float | None = None
    write_latency_ns: float | None = None
    read_energy_pj: float | None = None
    write_energy_pj: float | None = None
    endurance_cycles: float | None = None
    retention_s: float | None = None
    standby_power_per_cell_nw: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "technology", normalize_technology(self.technology))
        if not self.source_id:
            raise CellError("source_id must be non-empty")
        for name in NUMERIC_FIELDS:
            value = getattr(self, name)
            if value is None:
                continue
            _check_field_value(name, value)
        if self.bits_per_cell_max is not None:
            object.__setattr__(self, "bits_per_cell_max", int(self.bits_per_cell_max))


def _check_field_value(name: str, value: float) -> None:
    if name == "endurance_cycles":
        if math.isnan(value) or value <= 0:
            raise CellError(f"{name} must be > 0 (inf allowed), got {value}")
        return
    if name == "standby_power_per_cell_nw":
        if not math.isfinite(value) or value < 0:
            raise CellError(f"{name} must be finite and >= 0, got {value}")
        return
    if name == "bits_per_cell_max":
        if not math.isfinite(value) or value < 1 or int(value) != value:
            raise CellError(f"{name} must be an integer >= 1, got {value}")
        return
    if not math.isfinite(value) or value <= 0:
        raise CellError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class CellDefinition:
    """A fully-specified cell usable by the array model.

    Unlike CellRecord every numeric field is mandatory. ``provenance`` maps
    each numeric field to the source_id that supplied it ("default" for
    values taken from the documented per-technology defaults).

    Construction does not hard-validate so that validate_cell() can report on
    malformed definitions; build_tentpole() output always passes validation.
    """

    technology: str
    polarity: Polarity
    cell_area_f2: float
    tech_node_nm: float
    bits_per_cell_max: int
    read_latency_ns: float
    write_latency_ns: float
    read_energy_pj: float
    write_energy_pj: float
    endurance_cycles: float
    retention_s: float
    standby_power_per_cell_nw: float
    provenance: tuple[tuple[str, str], ...] = ()

    @property
    def storage_density_bits_per_f2(self) -> float:
        return self.bits_per_cell_max / self.cell_area_f2

    def as_record(self, source_id: str = "self") -> CellRecord:
        return CellRecord(
            technology=self.technology,
            source_id=source_id,
            **{name: getattr(self, name) for name in NUMERIC_FIELDS},
        )

    def value_key(self) -> tuple:
        """Field values only (no provenance); used for value equality."""
        return (self.technology, self.polarity) + tuple(
            getattr(self, name) for name in NUMERIC_FIELDS
        )

    def to_json_dict(self) -> dict:
        out = {"technology": self.technology, "polarity": self.polarity.value}
        for name in NUMERIC_FIELDS:
            value = getattr(self, name)
            out[name] = "inf" if value == math.inf else value
        out["storage_density_bits_per_f2"] = self.storage_density_bits_per_f2
        out["provenance"] = [list(pair) for pair in self.provenance]
        return out


def _parse_cell(text: str, name: str, row_num: int) -> float | None:
    text = text.strip()
    if text == "":
        return None
    if text.lower() in ("inf", "+inf", "infinity"):
        if name != "endurance_cycles":
            raise CellError(f"row {row_num}: {name} must be finite")
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise CellError(f"row {row_num}: {name} is not numeric: {text!r}") from None
    return value


def load_cell_records(path) -> list[CellRecord]:
    """Load survey records from CSV; empty cells mean the field is absent.

    Rows are returned in file order. The first malformed row aborts the load
    with its row number (header is row 1) and the offending field.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        header = [h.strip() for h in header]
        if tuple(header) != CSV_HEADER:
            raise CellError(
                f"bad cell record header: expected {','.join(CSV_HEADER)}"
            )
        records = []
        for row_num, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise CellError(
                    f"row {row_num}: expected {len(CSV_HEADER)} fields, got {len(row)}"
                )
            named = dict(zip(CSV_HEADER, row))
            values = {}
            for name in NUMERIC_FIELDS:
                values[name] = _parse_cell(named[name], name, row_num)
            try:
                record = CellRecord(
                    technology=named["technology"],
                    source_id=named["source_id"].strip(),
                    **values,
                )
            except CellError as exc:
                raise CellError(f"row {row_num}: {exc}") from None
            records.append(record)
    return records


def _density(record: CellRecord) -> float:
    bits = record.bits_per_cell_max if record.bits_per_cell_max is not None else 1
    return bits / record.cell_area_f2


def _fill_extreme(candidates, want_max: bool):
    """Extreme (value, source_id) with ties broken by smallest source_id."""
    if want_max:
        return sorted(candidates, key=lambda t: (-t[0], t[1]))[0]
    return sorted(candidates, key=lambda t: (t[0], t[1]))[0]


def build_tentpole(
    records: list[CellRecord],
    technology: str,
    polarity: Polarity,
) -> CellDefinition:
    """Construct the bounding cell definition for one technology.

    Step 1: the anchor record is the density extreme (bits_per_cell_max /
    cell_area_f2, missing bit counts treated as 1) over records of the
    technology -- maximum for optimistic, minimum for pessimistic; density
    ties break on lower cell area, then lexicographic source_id.
    Step 2: fields missing on the anchor are filled with the best (optimistic)
    or worst (pessimistic) value of that field across all matching records.
    Step 3: fields missing across every record take the documented
    per-technology defaults and are flagged "default" in provenance.
    """
    if polarity not in (Polarity.OPTIMISTIC, Polarity.PESSIMISTIC):
        raise CellError(f"tentpole polarity must be optimistic or pessimistic, got {polarity}")
    technology = normalize_technology(technology)
    matching = [r for r in records if r.technology == technology]
    if not matching:
        raise CellError(f"no records for technology {technology}")
    anchored = [r for r in matching if r.cell_area_f2 is not None]
    if not anchored:
        raise CellError(f"no record with cell area for technology {technology}")

    optimistic = polarity is Polarity.OPTIMISTIC
    sign = -1.0 if optimistic else 1.0
    anchor = sorted(
        anchored, key=lambda r: (sign * _density(r), r.cell_area_f2, r.source_id)
    )[0]

    values: dict[str, float] = {}
    provenance: list[tuple[str, str]] = []
    for name in NUMERIC_FIELDS:
        value = getattr(anchor, name)
        if value is not None:
            values[name] = value
            provenance.append((name, anchor.source_id))
            continue
        candidates = [
            (getattr(r, name), r.source_id)
            for r in matching
            if getattr(r, name) is not None
        ]
        if candidates:
            want_max = (FIELD_FILL_KIND[name] == "benefit") == optimistic
            value, source = _fill_extreme(candidates, want_max)
            values[name] = value
            provenance.append((name, source))
            continue
        default = celldefaults.default_value(
            technology, name, tech_node_nm=values.get("tech_node_nm")
        )
        if default is None:
            raise CellError(
                f"no survey data and no default for {name} of technology {technology}"
            )
        values[name] = default
        provenance.append((name, "default"))

    values["bits_per_cell_max"] = int(values["bits_per_cell_max"])
    return CellDefinition(
        technology=technology,
        polarity=polarity,
        provenance=tuple(provenance),
        **values,
    )


def complete_record(
    record: CellRecord, polarity: Polarity = Polarity.REFERENCE
) -> CellDefinition:
    """Promote a single record to a full definition (defaults fill the gaps).

    Used for reference cells and single-publication what-if studies.
    """
    base = build_tentpole([record], record.technology, Polarity.OPTIMISTIC)
    return replace(base, polarity=polarity)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


_RANGES = None


def survey_ranges() -> dict:
    """Bundled per-technology parameter ranges used for validation warnings."""
    global _RANGES
    if _RANGES is None:
        text = resources.files("envmx").joinpath("data/survey_ranges.json").read_text()
        _RANGES = json.loads(text)
    return _RANGES


def validate_cell(definition: CellDefinition) -> ValidationReport:
    """Report every violated definition invariant plus out-of-range warnings.

    Range warnings compare each field against the bundled survey range for
    the definition's technology; they flag unusual values without failing
    validation. Custom technologies have no ranges and produce no warnings.
    """
    violations = []
    for name in NUMERIC_FIELDS:
        value = getattr(definition, name)
        if value is None:
            violations.append(f"{name}: missing")
            continue
        try:
            _check_field_value(name, value)
        except CellError as exc:
            violations.append(str(exc))
    if not definition.technology:
        violations.append("technology: must be non-empty")
    if definition.cell_area_f2 and definition.cell_area_f2 > 0:
        density = definition.storage_density_bits_per_f2
        if not (math.isfinite(density) and density > 0):
            violations.append(f"storage density must be finite and > 0, got {density}")
    covered = {name for name, _ in definition.provenance}
    missing = [name for name in NUMERIC_FIELDS if name not in covered]
    if missing:
        violations.append(f"provenance missing for: {', '.join(missing)}")

    warnings = []
    ranges = survey_ranges().get(definition.technology, {})
    for name, (lo, hi) in ranges.items():
        value = getattr(definition, name, None)
        if value is None or not math.isfinite(value):
            continue
        if value < lo or value > hi:
            warnings.append(
                f"{name}={value:g} outside surveyed {definition.technology} "
                f"range [{lo:g}, {hi:g}]"
            )
    return ValidationReport(tuple(violations), tuple(warnings))
