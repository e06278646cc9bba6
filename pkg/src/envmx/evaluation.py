"""Application-level analytical models over array characterizations.

Operating power, bandwidth-occupancy ("long-pole") feasibility, per-task
latency and energy, endurance-limited lifetime, duty-cycled (intermittent)
day energy, and the write-buffer transformation.  Every function is linear
algebra over a handful of scalars: all are pure, exactly reproducible, and
cheap enough to evaluate millions of design points.

Unit conventions: latencies ns, energies pJ, power mW, rates bytes/s,
capacities bytes, times s.  A word access moves ``word_width_bits`` bits, so
an access stream of ``bytes/s`` issues ``bytes*8/W`` accesses per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .arrays import ArrayCharacterization
from .cells import CellDefinition
from .traffic import TrafficPattern, WorkloadSpec

SECONDS_PER_DAY = 86400.0

DEFAULT_RELOAD_ENERGY_PJ_PER_BIT = 10.0


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class StandbyPolicy:
    """What the memory does between tasks under intermittent operation.

    power_off: non-volatile storage is simply unpowered (no standby cost).
    retain: the array stays powered, paying its leakage for the idle time.
    reload_from_off_chip: state is dropped and re-fetched on every wake-up
    at ``reload_energy_pj_per_bit`` (stand-in for an off-chip transfer cost).
    """

    kind: str  # "power_off" | "retain" | "reload_from_off_chip"
    reload_energy_pj_per_bit: float = DEFAULT_RELOAD_ENERGY_PJ_PER_BIT

    def __post_init__(self):
        if self.kind not in ("power_off", "retain", "reload_from_off_chip"):
            raise EvaluationError(f"unknown standby policy {self.kind!r}")
        if self.kind == "reload_from_off_chip" and self.reload_energy_pj_per_bit <= 0:
            raise EvaluationError("reload energy must be > 0")

    @classmethod
    def power_off(cls) -> "StandbyPolicy":
        return cls("power_off")

    @classmethod
    def retain(cls) -> "StandbyPolicy":
        return cls("retain")

    @classmethod
    def reload_from_off_chip(
        cls, energy_pj_per_bit: float = DEFAULT_RELOAD_ENERGY_PJ_PER_BIT
    ) -> "StandbyPolicy":
        return cls("reload_from_off_chip", energy_pj_per_bit)


def accesses_per_second(char: ArrayCharacterization, bytes_per_s: float) -> float:
    return bytes_per_s * 8.0 / char.organization.word_width_bits


def memory_power(char: ArrayCharacterization, traffic: TrafficPattern) -> float:
    """Total operating power in mW: leakage plus access-energy throughput."""
    r_acc = accesses_per_second(char, traffic.read_bytes_per_s)
    w_acc = accesses_per_second(char, traffic.write_bytes_per_s)
    dynamic_mw = (r_acc * char.read_energy_pj + w_acc * char.write_energy_pj) * 1e-9
    return char.leakage_mw + dynamic_mw


class LongPoleResult(NamedTuple):
    utilization: float
    feasible: bool
    total_latency_s_per_s: float


def long_pole(char: ArrayCharacterization, traffic: TrafficPattern) -> LongPoleResult:
    """Bandwidth-occupancy model with single-port serialization.

    Utilization is seconds of access-time demand per second of execution;
    demand above 1 s/s means the array cannot sustain the traffic.
    """
    r_acc = accesses_per_second(char, traffic.read_bytes_per_s)
    w_acc = accesses_per_second(char, traffic.write_bytes_per_s)
    utilization = (
        r_acc * char.read_latency_ns * 1e-9 + w_acc * char.write_latency_ns * 1e-9
    )
    return LongPoleResult(utilization, utilization <= 1.0, utilization)


def _array_accesses_per_task(char: ArrayCharacterization, workload: WorkloadSpec):
    # Rescale workload access counts when the workload's access width differs
    # from the array word width (byte volume is conserved).
    factor = workload.access_width_bits / char.organization.word_width_bits
    return workload.reads_per_task * factor, workload.writes_per_task * factor


def task_latency(
    char: ArrayCharacterization, workload: WorkloadSpec
) -> tuple[float, bool | None]:
    """Aggregate access latency for one task, and whether it meets the target."""
    reads, writes = _array_accesses_per_task(char, workload)
    latency_s = (
        reads * char.read_latency_ns * 1e-9 + writes * char.write_latency_ns * 1e-9
    )
    meets = None
    if workload.target_task_latency_s is not None:
        meets = latency_s <= workload.target_task_latency_s
    return latency_s, meets


def lifetime(
    char: ArrayCharacterization, cell: CellDefinition, traffic: TrafficPattern
) -> float:
    """Endurance-limited lifetime in seconds under ideal wear leveling."""
    write_bits_per_s = traffic.write_bytes_per_s * 8.0
    if cell.endurance_cycles == math.inf or write_bits_per_s == 0.0:
        return math.inf
    capacity_bits = char.capacity_bytes * 8.0
    return cell.endurance_cycles * capacity_bits / write_bits_per_s


def energy_per_task(char: ArrayCharacterization, workload: WorkloadSpec) -> float:
    """Joules per task: access energy plus leakage over the active window.

    The active window is the long-pole task latency (leakage accrues at
    least while the memory is busy).
    """
    reads, writes = _array_accesses_per_task(char, workload)
    access_j = (reads * char.read_energy_pj + writes * char.write_energy_pj) * 1e-12
    active_s, _ = task_latency(char, workload)
    return access_j + char.leakage_mw * 1e-3 * active_s


def day_energy_from_components(
    tasks_per_day: float,
    task_energy_j: float,
    active_s_per_task: float,
    leakage_mw: float,
    policy: StandbyPolicy,
    footprint_bytes: int | None,
) -> float:
    """n tasks' energy plus the policy's standby term, from raw components.

    Shared by the plain and write-buffered pipelines (the buffered one folds
    buffer leakage and access energy into the components first).
    """
    if tasks_per_day < 0:
        raise EvaluationError("tasks_per_day must be non-negative")
    if tasks_per_day * active_s_per_task > SECONDS_PER_DAY:
        raise EvaluationError(
            f"day overcommitted: {tasks_per_day:g} tasks x {active_s_per_task:g} s "
            f"exceeds {SECONDS_PER_DAY:g} s"
        )
    if policy.kind == "power_off":
        standby_j = 0.0
    elif policy.kind == "retain":
        idle_s = SECONDS_PER_DAY - tasks_per_day * active_s_per_task
        standby_j = leakage_mw * 1e-3 * idle_s
    else:
        if footprint_bytes is None:
            raise EvaluationError(
                "reload_from_off_chip policy needs the workload footprint"
            )
        standby_j = (
            tasks_per_day * footprint_bytes * 8.0 * policy.reload_energy_pj_per_bit * 1e-12
        )
    return tasks_per_day * task_energy_j + standby_j


def intermittent_energy_per_day(
    char: ArrayCharacterization,
    cell: CellDefinition,
    workload: WorkloadSpec,
    tasks_per_day: float,
    policy: StandbyPolicy,
) -> float:
    """Joules per day for n wake-ups under the given standby policy."""
    active_s, _ = task_latency(char, workload)
    return day_energy_from_components(
        tasks_per_day,
        energy_per_task(char, workload),
        active_s,
        char.leakage_mw,
        policy,
        workload.footprint_bytes,
    )


def day_energy_affine(
    char: ArrayCharacterization,
    cell: CellDefinition,
    workload: WorkloadSpec,
    policy: StandbyPolicy,
) -> tuple[float, float]:
    """(fixed, slope) of the affine day-energy model E(n) = fixed + slope*n."""
    task_j = energy_per_task(char, workload)
    active_s, _ = task_latency(char, workload)
    leak_w = char.leakage_mw * 1e-3
    if policy.kind == "power_off":
        return 0.0, task_j
    if policy.kind == "retain":
        return SECONDS_PER_DAY * leak_w, task_j - leak_w * active_s
    if workload.footprint_bytes is None:
        raise EvaluationError("reload_from_off_chip policy needs the workload footprint")
    reload_j = workload.footprint_bytes * 8.0 * policy.reload_energy_pj_per_bit * 1e-12
    return 0.0, task_j + reload_j


def crossover_tasks_per_day(
    solution_a: tuple[ArrayCharacterization, CellDefinition],
    solution_b: tuple[ArrayCharacterization, CellDefinition],
    workload: WorkloadSpec,
    policy: StandbyPolicy,
) -> float | None:
    """Wake-up count where the two solutions' day energies cross, if any.

    Solves E_a(n) = E_b(n) for the affine model; returns the root when it is
    positive and within the day's task capacity for both solutions, else None
    (parallel, identical, or out-of-range lines).
    """
    char_a, cell_a = solution_a
    char_b, cell_b = solution_b
    fixed_a, slope_a = day_energy_affine(char_a, cell_a, workload, policy)
    fixed_b, slope_b = day_energy_affine(char_b, cell_b, workload, policy)
    if slope_a == slope_b:
        return None
    root = (fixed_b - fixed_a) / (slope_a - slope_b)
    if not root > 0:
        return None
    slowest = max(task_latency(char_a, workload)[0], task_latency(char_b, workload)[0])
    if slowest > 0 and root * slowest > SECONDS_PER_DAY:
        return None
    return root


@dataclass(frozen=True)
class WriteBufferSpec:
    """A faster front array absorbing the write stream.

    ``coalesce_fraction`` is the share of writes merged in place inside the
    buffer (never reaching the backing array); ``mask_latency`` hides the
    backing array's write latency behind the buffer's on the visible path.
    """

    buffer_char: ArrayCharacterization
    coalesce_fraction: float
    mask_latency: bool = True

    def __post_init__(self):
        if not 0.0 <= self.coalesce_fraction <= 1.0:
            raise EvaluationError("coalesce_fraction must be in [0, 1]")


@dataclass(frozen=True)
class BufferedWriteEffect:
    """Evaluation deltas from fronting the array with a write buffer."""

    envm_read_bytes_per_s: float
    envm_write_bytes_per_s: float   # (1-c) x incoming write rate
    visible_write_latency_ns: float
    coalesce_fraction: float
    mask_latency: bool
    envm_utilization: float
    buffer_utilization: float
    feasible: bool
    added_power_mw: float           # buffer leakage + buffer access streams
    lifetime_s: float

    @property
    def effective_traffic(self) -> TrafficPattern:
        return TrafficPattern(self.envm_read_bytes_per_s, self.envm_write_bytes_per_s)


def apply_write_buffer(
    envm_char: ArrayCharacterization,
    cell: CellDefinition,
    traffic: TrafficPattern,
    buffer: WriteBufferSpec,
) -> BufferedWriteEffect:
    """Transform traffic and metrics for a coalescing write buffer.

    The buffer absorbs the full write stream; a (1-c) fraction is written
    back to the backing array (read back out of the buffer first).  Backing
    array utilization uses its internal write latency at the reduced rate;
    overall feasibility requires both arrays to sustain their streams.
    """
    c = buffer.coalesce_fraction
    buf = buffer.buffer_char
    reduced_write_bytes = (1.0 - c) * traffic.write_bytes_per_s

    r_acc = accesses_per_second(envm_char, traffic.read_bytes_per_s)
    w_acc_reduced = accesses_per_second(envm_char, reduced_write_bytes)
    envm_util = (
        r_acc * envm_char.read_latency_ns * 1e-9
        + w_acc_reduced * envm_char.write_latency_ns * 1e-9
    )

    buf_w_acc = accesses_per_second(buf, traffic.write_bytes_per_s)
    buf_r_acc = accesses_per_second(buf, reduced_write_bytes)  # writeback readout
    buffer_util = (
        buf_w_acc * buf.write_latency_ns * 1e-9 + buf_r_acc * buf.read_latency_ns * 1e-9
    )

    added_power = (
        buf.leakage_mw
        + (buf_w_acc * buf.write_energy_pj + buf_r_acc * buf.read_energy_pj) * 1e-9
    )

    visible_write_latency = (
        buf.write_latency_ns if buffer.mask_latency else envm_char.write_latency_ns
    )
    if cell.endurance_cycles == math.inf or reduced_write_bytes == 0.0:
        life = math.inf
    else:
        life = (
            cell.endurance_cycles
            * (envm_char.capacity_bytes * 8.0)
            / (reduced_write_bytes * 8.0)
        )
    return BufferedWriteEffect(
        envm_read_bytes_per_s=traffic.read_bytes_per_s,
        envm_write_bytes_per_s=reduced_write_bytes,
        visible_write_latency_ns=visible_write_latency,
        coalesce_fraction=c,
        mask_latency=buffer.mask_latency,
        envm_utilization=envm_util,
        buffer_utilization=buffer_util,
        feasible=envm_util <= 1.0 and buffer_util <= 1.0,
        added_power_mw=added_power,
        lifetime_s=life,
    )


@dataclass(frozen=True)
class EvaluationRow:
    """One design point's full metric vector (the result-table row)."""

    row_id: int
    technology: str
    polarity: str
    capacity_bytes: int | None = None
    bits_per_cell: int | None = None
    opt_target: str | None = None
    R: int | None = None
    C: int | None = None
    S: int | None = None
    read_latency_ns: float | None = None
    write_latency_ns: float | None = None
    read_energy_pj: float | None = None
    write_energy_pj: float | None = None
    leakage_mw: float | None = None
    area_mm2: float | None = None
    area_efficiency: float | None = None
    read_bytes_per_s: float | None = None
    write_bytes_per_s: float | None = None
    utilization: float | None = None
    feasible: bool | None = None
    total_power_mw: float | None = None
    task_latency_s: float | None = None
    meets_latency_target: bool | None = None
    lifetime_s: float | None = None
    energy_per_task_j: float | None = None
    tasks_per_day: float | None = None
    energy_per_day_j: float | None = None
    buffer_c: float | None = None
    accuracy: float | None = None
    error: str | None = None
