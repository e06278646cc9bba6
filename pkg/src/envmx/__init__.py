"""envmx: design-space exploration for embedded non-volatile on-chip memory."""

from .arrays import (
    ArrayCharacterization,
    ArrayOrganization,
    Calibration,
    OptimizationTarget,
    characterize,
    enumerate_organizations,
    optimize,
)
from .cells import (
    CellDefinition,
    CellRecord,
    Polarity,
    build_tentpole,
    complete_record,
    load_cell_records,
    validate_cell,
)
from .config import SweepConfig, parse_config, parse_config_dict
from .evaluation import (
    EvaluationRow,
    StandbyPolicy,
    WriteBufferSpec,
    apply_write_buffer,
    crossover_tasks_per_day,
    energy_per_task,
    intermittent_energy_per_day,
    lifetime,
    long_pole,
    memory_power,
    task_latency,
)
from .faults import (
    FaultModel,
    InjectionResult,
    StoredTensor,
    accuracy_filter,
    adjacent_level_model,
    evaluate_accuracy,
    inject,
)
from .sweep import ResultTable, expand, run
from .traffic import (
    TrafficPattern,
    WorkloadSpec,
    generate_generic_sweep,
    load_workloads,
    workload_to_rates,
)

__version__ = "0.1.0"
