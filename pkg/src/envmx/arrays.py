"""Analytical array model: cell definition + capacity -> array characteristics.

The model maps a fully-specified cell onto a subarray grid organization and
computes per-access latency and energy, leakage, area, and area efficiency
from closed-form calibrated terms.  It is a deliberately small surrogate for
a circuit-level array simulator: the constants below are tuned for
qualitative fidelity (relative orderings and trade-off directions), not for
matching any fabricated array, and all of them can be overridden through the
sweep config's ``calibration`` block.

Model, per subarray grid point (R rows x C cols, S subarrays, word width W
bits, B bits per cell, node n nm, scale = n/22):

  cell_area_um2      = cell_area_f2 * (n * 1e-3)^2
  capacity_cells     = capacity_bits / B
  data_area_mm2      = capacity_cells * cell_area_um2 * 1e-6
  overhead_cells     = k_dec*R + k_sense*C + k_fixed        (per subarray,
                       each overhead cell costed at 100 F^2)
  periphery_area_mm2 = S * overhead_cells * 100 * (n * 1e-3)^2 * 1e-6
  periphery_delay_ns = scale * (d0 + d1*log2(S) + d2*R/1024 + d3*C/1024)
  access_latency     = cell_latency * m_lat^(B-1) + periphery_delay
  access_energy_pj   = (W/B) * cell_energy * m_en^(B-1)
                       + scale^2 * (e0 + e1*C/1024 + e2*log2(S))
  leakage_mw         = capacity_cells * standby_nw * 1e-6
                       + leak_per_mm2 * periphery_area_mm2

All functions are pure and reentrant; sweeps may call them from any number
of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

from .cells import CellDefinition

SUBARRAY_GRID = (128, 256, 512, 1024, 2048)

MIN_CAPACITY_BYTES = 1024


class ArrayModelError(ValueError):
    pass


class OptimizationTarget(str, Enum):
    READ_LATENCY = "ReadLatency"
    READ_ENERGY = "ReadEnergy"
    READ_EDP = "ReadEDP"
    WRITE_LATENCY = "WriteLatency"
    WRITE_ENERGY = "WriteEnergy"
    WRITE_EDP = "WriteEDP"
    AREA = "Area"
    LEAKAGE = "Leakage"


@dataclass(frozen=True)
class Calibration:
    """Surrogate constants; see the module docstring for where each lands."""

    k_dec: float = 16.0        # decoder overhead cells per row
    k_sense: float = 32.0      # sense/driver overhead cells per column
    k_fixed: float = 4096.0    # fixed per-subarray overhead cells
    d0: float = 0.2            # ns, fixed periphery delay at 22 nm
    d1: float = 0.05           # ns per log2(S)
    d2: float = 0.5            # ns per 1024 rows
    d3: float = 0.3            # ns per 1024 cols
    e0: float = 0.5            # pJ, fixed periphery energy at 22 nm
    e1: float = 0.4            # pJ per 1024 cols
    e2: float = 0.2            # pJ per log2(S)
    leak_per_mm2_mw: float = 5.0
    mlc_latency_factor: float = 1.5   # per extra bit per cell
    mlc_energy_factor: float = 1.5

    @classmethod
    def from_overrides(cls, overrides: dict | None) -> "Calibration":
        if not overrides:
            return cls()
        allowed = {f.name for f in fields(cls)}
        unknown = set(overrides) - allowed
        if unknown:
            raise ArrayModelError(f"unknown calibration constants: {sorted(unknown)}")
        return cls(**overrides)


@dataclass(frozen=True)
class ArrayOrganization:
    subarray_rows: int
    subarray_cols: int
    num_subarrays: int
    word_width_bits: int
    bits_per_cell: int

    def __post_init__(self):
        if self.subarray_rows not in SUBARRAY_GRID or self.subarray_cols not in SUBARRAY_GRID:
            raise ArrayModelError(
                f"subarray dimensions must be in {SUBARRAY_GRID}, "
                f"got {self.subarray_rows}x{self.subarray_cols}"
            )
        if self.num_subarrays < 1:
            raise ArrayModelError("num_subarrays must be >= 1")
        if self.bits_per_cell < 1:
            raise ArrayModelError("bits_per_cell must be >= 1")
        if self.word_width_bits < 8 or self.word_width_bits % self.bits_per_cell:
            raise ArrayModelError(
                f"word width must be >= 8 and divisible by bits_per_cell, "
                f"got W={self.word_width_bits} B={self.bits_per_cell}"
            )

    @property
    def cell_capacity_bits(self) -> int:
        return (
            self.num_subarrays
            * self.subarray_rows
            * self.subarray_cols
            * self.bits_per_cell
        )


@dataclass(frozen=True)
class ArrayCharacterization:
    read_latency_ns: float
    write_latency_ns: float
    read_energy_pj: float     # per word access
    write_energy_pj: float
    leakage_mw: float
    area_mm2: float
    area_efficiency: float
    capacity_bytes: int
    organization: ArrayOrganization
    cell: CellDefinition


def enumerate_organizations(
    capacity_bytes: int, word_width_bits: int, bits_per_cell: int = 1
) -> list[ArrayOrganization]:
    """All grid organizations covering the capacity, (R asc, C asc) order."""
    if capacity_bytes < MIN_CAPACITY_BYTES:
        raise ArrayModelError(f"capacity must be >= {MIN_CAPACITY_BYTES} bytes")
    if bits_per_cell < 1:
        raise ArrayModelError("bits_per_cell must be >= 1")
    if word_width_bits < 8 or word_width_bits % bits_per_cell:
        raise ArrayModelError(
            f"word width must be >= 8 and divisible by bits_per_cell, "
            f"got W={word_width_bits} B={bits_per_cell}"
        )
    capacity_bits = capacity_bytes * 8
    orgs = []
    for rows in SUBARRAY_GRID:
        for cols in SUBARRAY_GRID:
            subarrays = max(1, math.ceil(capacity_bits / (bits_per_cell * rows * cols)))
            orgs.append(
                ArrayOrganization(rows, cols, subarrays, word_width_bits, bits_per_cell)
            )
    return orgs


def characterize(
    cell: CellDefinition,
    org: ArrayOrganization,
    capacity_bytes: int,
    calibration: Calibration | None = None,
) -> ArrayCharacterization:
    """Apply the surrogate formulas to one organization. Deterministic."""
    calib = calibration or Calibration()
    if org.cell_capacity_bits < capacity_bytes * 8:
        raise ArrayModelError("organization too small for requested capacity")
    if org.bits_per_cell > cell.bits_per_cell_max:
        raise ArrayModelError(
            f"{cell.technology} cell supports at most {cell.bits_per_cell_max} "
            f"bits per cell, got {org.bits_per_cell}"
        )

    node = cell.tech_node_nm
    scale = node / 22.0
    capacity_bits = capacity_bytes * 8
    capacity_cells = capacity_bits / org.bits_per_cell
    cell_area_um2 = cell.cell_area_f2 * (node * 1e-3) ** 2
    data_area_mm2 = capacity_cells * cell_area_um2 * 1e-6

    overhead_cells = (
        calib.k_dec * org.subarray_rows
        + calib.k_sense * org.subarray_cols
        + calib.k_fixed
    )
    periphery_area_mm2 = (
        org.num_subarrays * overhead_cells * 100.0 * (node * 1e-3) ** 2 * 1e-6
    )
    area_mm2 = data_area_mm2 + periphery_area_mm2

    log2_s = math.log2(org.num_subarrays)
    periphery_delay_ns = scale * (
        calib.d0
        + calib.d1 * log2_s
        + calib.d2 * org.subarray_rows / 1024.0
        + calib.d3 * org.subarray_cols / 1024.0
    )
    mlc_extra = org.bits_per_cell - 1
    lat_factor = calib.mlc_latency_factor**mlc_extra
    en_factor = calib.mlc_energy_factor**mlc_extra

    cells_per_word = org.word_width_bits / org.bits_per_cell
    periphery_energy_pj = scale**2 * (
        calib.e0 + calib.e1 * org.subarray_cols / 1024.0 + calib.e2 * log2_s
    )
    leakage_mw = (
        capacity_cells * cell.standby_power_per_cell_nw * 1e-6
        + calib.leak_per_mm2_mw * periphery_area_mm2
    )
    return ArrayCharacterization(
        read_latency_ns=cell.read_latency_ns * lat_factor + periphery_delay_ns,
        write_latency_ns=cell.write_latency_ns * lat_factor + periphery_delay_ns,
        read_energy_pj=cells_per_word * cell.read_energy_pj * en_factor
        + periphery_energy_pj,
        write_energy_pj=cells_per_word * cell.write_energy_pj * en_factor
        + periphery_energy_pj,
        leakage_mw=leakage_mw,
        area_mm2=area_mm2,
        area_efficiency=data_area_mm2 / area_mm2,
        capacity_bytes=capacity_bytes,
        organization=org,
        cell=cell,
    )


def target_metric(char: ArrayCharacterization, target: OptimizationTarget) -> float:
    if target is OptimizationTarget.READ_LATENCY:
        return char.read_latency_ns
    if target is OptimizationTarget.READ_ENERGY:
        return char.read_energy_pj
    if target is OptimizationTarget.READ_EDP:
        return char.read_energy_pj * char.read_latency_ns
    if target is OptimizationTarget.WRITE_LATENCY:
        return char.write_latency_ns
    if target is OptimizationTarget.WRITE_ENERGY:
        return char.write_energy_pj
    if target is OptimizationTarget.WRITE_EDP:
        return char.write_energy_pj * char.write_latency_ns
    if target is OptimizationTarget.AREA:
        return char.area_mm2
    if target is OptimizationTarget.LEAKAGE:
        return char.leakage_mw
    raise ArrayModelError(f"unhandled optimization target {target}")


def optimize(
    cell: CellDefinition,
    capacity_bytes: int,
    word_width_bits: int,
    target: OptimizationTarget,
    bits_per_cell: int = 1,
    calibration: Calibration | None = None,
) -> tuple[ArrayOrganization, ArrayCharacterization]:
    """Exhaustive scan over the organization grid; argmin of the target.

    Ties break toward smaller area, then fewer subarrays, then (R, C)
    lexicographic, making the result fully deterministic.
    """
    best = None
    best_key = None
    for org in enumerate_organizations(capacity_bytes, word_width_bits, bits_per_cell):
        char = characterize(cell, org, capacity_bytes, calibration)
        key = (
            target_metric(char, target),
            char.area_mm2,
            org.num_subarrays,
            org.subarray_rows,
            org.subarray_cols,
        )
        if best_key is None or key < best_key:
            best, best_key = char, key
    return best.organization, best
