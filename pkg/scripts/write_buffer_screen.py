#!/usr/bin/env python3
"""How much write coalescing does each technology need to sustain a workload?

Screens the bundled tentpoles against the graph-BFS workloads: reports the
unbuffered occupancy and the minimal coalesce fraction (if any) that brings
the backing array under full utilization with a small SRAM write cache.

Usage: python scripts/write_buffer_screen.py [--buffer-kib 64]
"""

import argparse
from pathlib import Path

from envmx.arrays import OptimizationTarget, optimize
from envmx.cells import Polarity, build_tentpole, load_cell_records
from envmx.evaluation import WriteBufferSpec, apply_write_buffer, long_pole
from envmx.traffic import load_workloads, workload_to_rates

ROOT = Path(__file__).resolve().parent.parent
CANDIDATES = (
    ("STT", Polarity.OPTIMISTIC),
    ("STT", Polarity.PESSIMISTIC),
    ("RRAM", Polarity.OPTIMISTIC),
    ("FeFET", Polarity.OPTIMISTIC),
    ("FeFET", Polarity.PESSIMISTIC),
    ("PCM", Polarity.PESSIMISTIC),
)


def minimal_coalesce(char, cell, traffic, buffer_char) -> float | None:
    if long_pole(char, traffic).feasible:
        return 0.0
    if not apply_write_buffer(char, cell, traffic,
                              WriteBufferSpec(buffer_char, 1.0)).feasible:
        return None
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if apply_write_buffer(char, cell, traffic, WriteBufferSpec(buffer_char, mid)).feasible:
            hi = mid
        else:
            lo = mid
    return hi


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--buffer-kib", type=int, default=64)
    args = parser.parse_args()

    records = load_cell_records(ROOT / "cells" / "survey.csv")
    sram = build_tentpole(records, "SRAM", Polarity.OPTIMISTIC)
    _, buffer_char = optimize(sram, args.buffer_kib * 1024, 64, OptimizationTarget.WRITE_EDP)

    for workload in load_workloads(ROOT / "workloads" / "graph_bfs.csv"):
        traffic = workload_to_rates(workload)
        print(f"\n{workload.name}: read {traffic.read_bytes_per_s / 1e9:.2f} GB/s, "
              f"write {traffic.write_bytes_per_s / 1e6:.1f} MB/s, "
              f"{workload.footprint_bytes >> 20} MiB array")
        for tech, polarity in CANDIDATES:
            cell = build_tentpole(records, tech, polarity)
            _, char = optimize(cell, workload.footprint_bytes, 64,
                               OptimizationTarget.READ_ENERGY)
            utilization = long_pole(char, traffic).utilization
            needed = minimal_coalesce(char, cell, traffic, buffer_char)
            if needed is None:
                verdict = "infeasible even with full coalescing"
            elif needed == 0.0:
                verdict = "feasible unbuffered"
            else:
                verdict = f"needs coalesce fraction >= {needed:.3f}"
            print(f"  {tech:6s} {polarity.value:12s} U={utilization:7.3f}  {verdict}")


if __name__ == "__main__":
    main()
