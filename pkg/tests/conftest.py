import math
import random
from pathlib import Path

import pytest

from envmx.arrays import ArrayCharacterization, ArrayOrganization
from envmx.cells import NUMERIC_FIELDS, CellDefinition, CellRecord, Polarity, load_cell_records

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def survey_records():
    return load_cell_records(REPO_ROOT / "cells" / "survey.csv")


def make_cell(technology="Custom-X", polarity=Polarity.CUSTOM, **overrides) -> CellDefinition:
    values = {
        "cell_area_f2": 20.0,
        "tech_node_nm": 22.0,
        "bits_per_cell_max": 2,
        "read_latency_ns": 5.0,
        "write_latency_ns": 20.0,
        "read_energy_pj": 1.0,
        "write_energy_pj": 2.0,
        "endurance_cycles": 1e8,
        "retention_s": 1e8,
        "standby_power_per_cell_nw": 0.0,
    }
    values.update(overrides)
    return CellDefinition(
        technology=technology,
        polarity=polarity,
        provenance=tuple((name, "test") for name in NUMERIC_FIELDS),
        **values,
    )


def make_char(
    read_latency_ns=5.0,
    write_latency_ns=20.0,
    read_energy_pj=1.0,
    write_energy_pj=2.0,
    leakage_mw=0.0,
    capacity_bytes=1 << 20,
    word_width_bits=64,
    cell=None,
    area_mm2=1.0,
    area_efficiency=0.8,
) -> ArrayCharacterization:
    """Directly assembled characterization for formula-level tests."""
    bits = capacity_bytes * 8
    subarrays = max(1, math.ceil(bits / (128 * 128)))
    org = ArrayOrganization(128, 128, subarrays, word_width_bits, 1)
    return ArrayCharacterization(
        read_latency_ns=read_latency_ns,
        write_latency_ns=write_latency_ns,
        read_energy_pj=read_energy_pj,
        write_energy_pj=write_energy_pj,
        leakage_mw=leakage_mw,
        area_mm2=area_mm2,
        area_efficiency=area_efficiency,
        capacity_bytes=capacity_bytes,
        organization=org,
        cell=cell if cell is not None else make_cell(),
    )


def random_partial_records(rng: random.Random, count: int, technology="STT"):
    """Synthetic partial records: every record keeps its area so anchoring is
    well-defined; other fields drop out independently."""
    records = []
    for i in range(count):
        fields = {
            "cell_area_f2": rng.uniform(1.0, 200.0),
            "tech_node_nm": rng.choice([None, rng.uniform(7.0, 130.0)]),
            "bits_per_cell_max": rng.choice([None, 1, 2, 3]),
            "read_latency_ns": rng.choice([None, rng.uniform(0.5, 2000.0)]),
            "write_latency_ns": rng.choice([None, rng.uniform(0.5, 1e5)]),
            "read_energy_pj": rng.choice([None, rng.uniform(1e-3, 40.0)]),
            "write_energy_pj": rng.choice([None, rng.uniform(1e-3, 40.0)]),
            "endurance_cycles": rng.choice([None, 10.0 ** rng.uniform(3, 15), math.inf]),
            "retention_s": rng.choice([None, 10.0 ** rng.uniform(3, 10)]),
            "standby_power_per_cell_nw": rng.choice([None, rng.uniform(0.0, 2.0)]),
        }
        records.append(CellRecord(technology=technology, source_id=f"rec-{i:03d}", **fields))
    return records
