"""Documented per-technology defaults for survey fields missing everywhere.

When a tentpole construction finds a field absent from every survey record of
a technology, the value comes from here and is flagged "default" in the
definition's provenance.  Every number in this module is a declared
calibration stand-in, not a measurement: the published record for these
fields is either proprietary or missing, and users with better data should
extend the survey CSV instead of editing these.

Conventions baked in:
  * Non-volatile technologies draw no per-cell standby power; array leakage
    then comes from periphery alone, which is what makes SRAM leakage
    dominate at matched capacity.
  * SRAM endurance is unlimited. Its standby power defaults to
    1 nW/cell at a 22 nm implementation, scaled by (node/22)^2.
  * Retention defaults to 1e8 s, the most common surveyed value for
    non-volatile classes. SRAM retention is nominal (it holds state only
    while powered); the value never enters the evaluation formulas.
"""

from __future__ import annotations

import math

SRAM_STANDBY_NW_PER_CELL_AT_22NM = 1.0

# Field defaults shared by every technology unless overridden below.
COMMON_DEFAULTS = {
    "bits_per_cell_max": 1,
    "retention_s": 1e8,
    "standby_power_per_cell_nw": 0.0,
}

# Per-technology stand-ins for fields the survey never reports.
TECHNOLOGY_DEFAULTS = {
    "SRAM": {
        "endurance_cycles": math.inf,
    },
    "PCM": {
        # Access energies are rarely reported at cell level; mid-range guesses
        # consistent with PCM's write-energy-hungry reputation.
        "read_energy_pj": 2.0,
        "write_energy_pj": 15.0,
    },
    "SOT": {
        "read_energy_pj": 1.0,
        "endurance_cycles": 1e10,
    },
    "CTT": {
        "read_latency_ns": 10.0,
        "read_energy_pj": 1.0,
        "write_energy_pj": 5.0,
    },
    "FeFET": {
        # Read path is unreported in the survey window; FET sensing is fast
        # but energy-hungry relative to resistive reads.
        "read_latency_ns": 5.0,
        "read_energy_pj": 3.0,
    },
    "FeRAM": {
        "write_energy_pj": 1.0,
    },
}


def default_value(technology: str, name: str, tech_node_nm: float | None = None):
    """Default for one field, or None when no default is defined.

    The SRAM standby default needs the definition's resolved node; callers
    resolve tech_node_nm before standby (field order guarantees it).
    """
    if technology == "SRAM" and name == "standby_power_per_cell_nw":
        node = tech_node_nm if tech_node_nm is not None else 22.0
        return SRAM_STANDBY_NW_PER_CELL_AT_22NM * (node / 22.0) ** 2
    specific = TECHNOLOGY_DEFAULTS.get(technology, {})
    if name in specific:
        return specific[name]
    return COMMON_DEFAULTS.get(name)
