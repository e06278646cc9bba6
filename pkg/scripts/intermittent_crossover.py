#!/usr/bin/env python3
"""Where does the preferred technology flip under intermittent operation?

For each bundled intermittent workload, builds optimistic tentpoles, sizes an
array to the workload footprint, and solves for the wake-ups-per-day count at
which each technology pair's total day energy crosses under the retain
standby policy.

Usage: python scripts/intermittent_crossover.py [--target ReadEnergy]
"""

import argparse
from itertools import combinations
from pathlib import Path

from envmx.arrays import OptimizationTarget, optimize
from envmx.cells import Polarity, build_tentpole, load_cell_records
from envmx.evaluation import StandbyPolicy, crossover_tasks_per_day, intermittent_energy_per_day
from envmx.traffic import load_workloads

ROOT = Path(__file__).resolve().parent.parent
TECHNOLOGIES = ("FeFET", "STT", "RRAM", "PCM")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--target", default="ReadEnergy",
                        choices=[t.value for t in OptimizationTarget])
    args = parser.parse_args()

    records = load_cell_records(ROOT / "cells" / "survey.csv")
    policy = StandbyPolicy.retain()
    target = OptimizationTarget(args.target)

    for workload in load_workloads(ROOT / "workloads" / "dnn_inference.csv"):
        capacity = workload.footprint_bytes
        print(f"\n{workload.name}: {capacity >> 20} MiB arrays, optimized for {target.value}")
        solutions = {}
        for tech in TECHNOLOGIES:
            cell = build_tentpole(records, tech, Polarity.OPTIMISTIC)
            _, char = optimize(cell, capacity, 64, target)
            solutions[tech] = (char, cell)
            print(f"  {tech:6s} leak {char.leakage_mw:8.3f} mW  "
                  f"read {char.read_energy_pj:8.2f} pJ/word")
        for tech_a, tech_b in combinations(TECHNOLOGIES, 2):
            crossover = crossover_tasks_per_day(
                solutions[tech_a], solutions[tech_b], workload, policy
            )
            if crossover is None:
                print(f"  {tech_a} vs {tech_b}: no crossover in range")
                continue
            below = intermittent_energy_per_day(*solutions[tech_a], workload,
                                                crossover * 0.5, policy)
            other = intermittent_energy_per_day(*solutions[tech_b], workload,
                                                crossover * 0.5, policy)
            low_winner = tech_a if below < other else tech_b
            high_winner = tech_b if low_winner == tech_a else tech_a
            print(f"  {tech_a} vs {tech_b}: crossover at {crossover:,.0f}/day "
                  f"({low_winner} below, {high_winner} above)")


if __name__ == "__main__":
    main()
