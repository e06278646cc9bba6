"""Independent oracles the test suite checks the implementation against.

Everything here is written from the model definitions directly, structured
differently from the package code (dict-based scans, unit conversions done
in a different order), and deliberately shares no helpers with it.  Keep it
that way: these are the referees, not the players.
"""

from __future__ import annotations

import math

FIELDS = (
    "cell_area_f2",
    "tech_node_nm",
    "bits_per_cell_max",
    "read_latency_ns",
    "write_latency_ns",
    "read_energy_pj",
    "write_energy_pj",
    "endurance_cycles",
    "retention_s",
    "standby_power_per_cell_nw",
)

# Direction each field moves under an optimistic fill ("lo" = smaller is
# better). Matches the documented construction rules.
_OPT_DIRECTION = {
    "cell_area_f2": "lo",
    "tech_node_nm": "lo",
    "bits_per_cell_max": "hi",
    "read_latency_ns": "lo",
    "write_latency_ns": "lo",
    "read_energy_pj": "lo",
    "write_energy_pj": "lo",
    "endurance_cycles": "hi",
    "retention_s": "hi",
    "standby_power_per_cell_nw": "lo",
}


def record_dict(record) -> dict:
    """Plain dict view of a CellRecord (None for absent fields)."""
    return {
        "technology": record.technology,
        "source_id": record.source_id,
        **{name: getattr(record, name) for name in FIELDS},
    }


def brute_force_tentpole(records: list[dict], technology: str, optimistic: bool,
                         defaults: dict | None = None) -> dict:
    """Field-by-field scan over all matching records; the reference result.

    ``defaults`` maps field name -> value for fields absent everywhere.
    Raises ValueError where construction is impossible.
    """
    matching = [r for r in records if r["technology"] == technology]
    if not matching:
        raise ValueError("no records")
    with_area = [r for r in matching if r["cell_area_f2"] is not None]
    if not with_area:
        raise ValueError("no record with cell area")

    def density(rec):
        bits = rec["bits_per_cell_max"] if rec["bits_per_cell_max"] is not None else 1
        return bits / rec["cell_area_f2"]

    ranked = sorted(
        with_area,
        key=lambda r: (
            -density(r) if optimistic else density(r),
            r["cell_area_f2"],
            r["source_id"],
        ),
    )
    anchor = ranked[0]

    out = {"technology": technology, "provenance": {}}
    for name in FIELDS:
        if anchor[name] is not None:
            out[name] = anchor[name]
            out["provenance"][name] = anchor["source_id"]
            continue
        present = [(r[name], r["source_id"]) for r in matching if r[name] is not None]
        if present:
            want_hi = (_OPT_DIRECTION[name] == "hi") == optimistic
            if want_hi:
                choice = sorted(present, key=lambda p: (-p[0], p[1]))[0]
            else:
                choice = sorted(present, key=lambda p: (p[0], p[1]))[0]
            out[name] = choice[0]
            out["provenance"][name] = choice[1]
            continue
        if defaults is None or name not in defaults:
            raise ValueError(f"no value and no default for {name}")
        out[name] = defaults[name]
        out["provenance"][name] = "default"
    return out


# --- evaluation formula oracles (spreadsheet style, SI units throughout) ----


def power_watts(read_bps, write_bps, word_bits, read_pj, write_pj, leak_mw):
    reads_per_s = read_bps * 8 / word_bits
    writes_per_s = write_bps * 8 / word_bits
    joules_per_s = reads_per_s * read_pj * 1e-12 + writes_per_s * write_pj * 1e-12
    return leak_mw / 1000.0 + joules_per_s


def occupancy_s_per_s(read_bps, write_bps, word_bits, t_read_ns, t_write_ns):
    reads_per_s = read_bps * 8 / word_bits
    writes_per_s = write_bps * 8 / word_bits
    return (reads_per_s * t_read_ns + writes_per_s * t_write_ns) / 1e9


def task_seconds(reads, writes, access_bits, word_bits, t_read_ns, t_write_ns):
    read_accesses = reads * access_bits / word_bits
    write_accesses = writes * access_bits / word_bits
    return (read_accesses * t_read_ns + write_accesses * t_write_ns) / 1e9


def lifetime_seconds(endurance, capacity_bytes, write_bps):
    if math.isinf(endurance) or write_bps == 0:
        return math.inf
    total_bit_writes = endurance * capacity_bytes * 8
    return total_bit_writes / (write_bps * 8)


def task_joules(reads, writes, access_bits, word_bits, read_pj, write_pj,
                leak_mw, t_read_ns, t_write_ns):
    read_accesses = reads * access_bits / word_bits
    write_accesses = writes * access_bits / word_bits
    access_j = (read_accesses * read_pj + write_accesses * write_pj) / 1e12
    busy_s = task_seconds(reads, writes, access_bits, word_bits, t_read_ns, t_write_ns)
    return access_j + (leak_mw / 1000.0) * busy_s


def day_joules_retain(n, task_j, active_s, leak_mw, seconds_per_day=86400.0):
    return n * task_j + (leak_mw / 1000.0) * (seconds_per_day - n * active_s)


def bisect_root(fn, lo, hi, iterations=200):
    """Plain bisection; assumes fn(lo) and fn(hi) have opposite signs."""
    f_lo = fn(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0:
            return mid
        if (f_lo < 0) == (f_mid < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def min_feasible_coalesce(read_occupancy, write_occupancy):
    """Closed-form smallest c with read_occ + (1-c)*write_occ <= 1."""
    return 1.0 - (1.0 - read_occupancy) / write_occupancy


def mlc_expected_bit_error_rate(transition, coding_bits, gray: bool) -> float:
    """Expected payload BER for uniform-random cells, by full enumeration."""
    levels = len(transition)

    def to_code(level):
        return level ^ (level >> 1) if gray else level

    total = 0.0
    for start in range(levels):
        for end in range(levels):
            flipped = bin(to_code(start) ^ to_code(end)).count("1")
            total += transition[start][end] * flipped
    return total / (levels * coding_bits)
