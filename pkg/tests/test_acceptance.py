"""Acceptance suite: one test per release criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are fixed here and nowhere else.
"""

import functools
import json
import math
import random
import subprocess
import sys
import time

import pytest

from envmx import evaluation as ev
from envmx.arrays import (
    Calibration,
    OptimizationTarget,
    SUBARRAY_GRID,
    characterize,
    enumerate_organizations,
    optimize,
)
from envmx.cells import CellRecord, Polarity, build_tentpole, complete_record, load_cell_records
from envmx.config import parse_config
from envmx.faults import FaultModel, GRAY, StoredTensor, adjacent_level_model, inject
from envmx.sweep import expand, run as run_sweep
from envmx.traffic import TrafficPattern, WorkloadSpec, load_workloads, workload_to_rates

from conftest import make_cell, make_char, random_partial_records
from oracles import (
    bisect_root,
    brute_force_tentpole,
    lifetime_seconds,
    min_feasible_coalesce,
    occupancy_s_per_s,
    power_watts,
    record_dict,
    task_joules,
    task_seconds,
)

MIB = 1 << 20
CLI = [sys.executable, "-m", "envmx"]


def criterion(number, name):
    def wrap(fn):
        @functools.wraps(fn)
        def run_criterion(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number} {name}: FAIL")
                raise
            print(f"ACCEPTANCE {number} {name}: PASS")
        return run_criterion
    return wrap


@criterion(1, "tentpole oracle equivalence")
def test_criterion_1_tentpole_oracle_equivalence():
    from envmx import celldefaults

    started = time.perf_counter()
    rng = random.Random(20240817)
    defaults = {
        name: value
        for name in record_dict(CellRecord("STT", "x", cell_area_f2=1.0))
        if name not in ("technology", "source_id")
        and (value := celldefaults.default_value("STT", name)) is not None
    }
    checked = 0
    for index in range(100):
        records = random_partial_records(rng, rng.randint(1, 9))
        # one fully-specified record guarantees construction succeeds, so
        # every set yields a comparable result on both sides
        records.append(CellRecord(
            technology="STT", source_id=f"full-{index:03d}",
            cell_area_f2=rng.uniform(1, 200), tech_node_nm=rng.uniform(7, 130),
            bits_per_cell_max=rng.choice([1, 2]),
            read_latency_ns=rng.uniform(0.5, 2000), write_latency_ns=rng.uniform(0.5, 1e5),
            read_energy_pj=rng.uniform(1e-3, 40), write_energy_pj=rng.uniform(1e-3, 40),
            endurance_cycles=10.0 ** rng.uniform(3, 15), retention_s=10.0 ** rng.uniform(3, 10),
            standby_power_per_cell_nw=rng.uniform(0, 2),
        ))
        dicts = [record_dict(r) for r in records]
        for polarity, optimistic in ((Polarity.OPTIMISTIC, True), (Polarity.PESSIMISTIC, False)):
            expected = brute_force_tentpole(dicts, "STT", optimistic, defaults)
            built = build_tentpole(records, "STT", polarity)
            for name, value in expected.items():
                if name in ("technology", "provenance"):
                    continue
                assert getattr(built, name) == value, (name, polarity)
            assert dict(built.provenance) == expected["provenance"]
            checked += 1
    elapsed = time.perf_counter() - started
    assert checked == 200
    assert elapsed < 1.0, f"oracle sweep took {elapsed:.2f}s"


@criterion(2, "survey fidelity via cmd_tentpole")
def test_criterion_2_survey_fidelity(repo_root):
    def tentpole(tech, polarity):
        result = subprocess.run(
            CLI + ["tentpole", "cells/survey.csv", "--tech", tech, "--polarity", polarity],
            cwd=repo_root, capture_output=True, text=True, timeout=60,
        )
        assert result.returncode == 0, result.stderr
        return json.loads(result.stdout)

    assert tentpole("STT", "optimistic")["cell_area_f2"] == 14
    assert tentpole("STT", "pessimistic")["cell_area_f2"] == 75
    assert tentpole("FeFET", "pessimistic")["cell_area_f2"] == 103


@criterion(3, "evaluation formula oracles")
def test_criterion_3_formula_oracles():
    rng = random.Random(31415)
    rel = 1e-12

    for _ in range(20):  # memory_power
        read_bps = rng.uniform(1e3, 1e10)
        write_bps = rng.uniform(0, 1e9)
        char = make_char(read_energy_pj=rng.uniform(0.01, 50),
                         write_energy_pj=rng.uniform(0.01, 50),
                         leakage_mw=rng.uniform(0, 20))
        expected_w = power_watts(read_bps, write_bps, 64, char.read_energy_pj,
                                 char.write_energy_pj, char.leakage_mw)
        actual = ev.memory_power(char, TrafficPattern(read_bps, write_bps))
        assert actual * 1e-3 == pytest.approx(expected_w, rel=rel)

    for _ in range(20):  # long_pole
        read_bps = rng.uniform(1e3, 1e10)
        write_bps = rng.uniform(0, 1e8)
        char = make_char(read_latency_ns=rng.uniform(0.5, 100),
                         write_latency_ns=rng.uniform(0.5, 1e4))
        expected = occupancy_s_per_s(read_bps, write_bps, 64,
                                     char.read_latency_ns, char.write_latency_ns)
        assert ev.long_pole(char, TrafficPattern(read_bps, write_bps)).utilization == \
            pytest.approx(expected, rel=rel)

    for _ in range(20):  # task_latency
        reads = rng.randint(1, 10**8)
        writes = rng.randint(0, 10**7)
        width = rng.choice([32, 64, 128])
        char = make_char(read_latency_ns=rng.uniform(0.5, 100),
                         write_latency_ns=rng.uniform(0.5, 1e4))
        w = WorkloadSpec("v", reads_per_task=reads, writes_per_task=writes,
                         access_width_bits=width)
        expected = task_seconds(reads, writes, width, 64,
                                char.read_latency_ns, char.write_latency_ns)
        assert ev.task_latency(char, w)[0] == pytest.approx(expected, rel=rel)

    for _ in range(20):  # lifetime
        capacity = rng.choice([MIB, 2 * MIB, 8 * MIB, 16 * MIB])
        endurance = 10.0 ** rng.uniform(3, 15)
        write_bps = rng.uniform(1e3, 1e9)
        char = make_char(capacity_bytes=capacity)
        cell = make_cell(endurance_cycles=endurance)
        expected = lifetime_seconds(endurance, capacity, write_bps)
        assert ev.lifetime(char, cell, TrafficPattern(0.0, write_bps)) == \
            pytest.approx(expected, rel=rel)

    for _ in range(20):  # energy_per_task
        reads = rng.randint(1, 10**7)
        writes = rng.randint(0, 10**6)
        char = make_char(read_energy_pj=rng.uniform(0.01, 50),
                         write_energy_pj=rng.uniform(0.01, 50),
                         leakage_mw=rng.uniform(0, 20),
                         read_latency_ns=rng.uniform(0.5, 100),
                         write_latency_ns=rng.uniform(0.5, 1e4))
        w = WorkloadSpec("v", reads_per_task=reads, writes_per_task=writes)
        expected = task_joules(reads, writes, 64, 64, char.read_energy_pj,
                               char.write_energy_pj, char.leakage_mw,
                               char.read_latency_ns, char.write_latency_ns)
        assert ev.energy_per_task(char, w) == pytest.approx(expected, rel=rel)

    # exact structural properties on randomized inputs
    for _ in range(50):
        read_bps = rng.uniform(1e3, 1e10)
        write_bps = rng.uniform(1e2, 1e9)
        char = make_char(read_energy_pj=rng.uniform(0.01, 50),
                         write_energy_pj=rng.uniform(0.01, 50),
                         leakage_mw=0.0,
                         read_latency_ns=rng.uniform(0.5, 100),
                         capacity_bytes=4 * MIB)
        cell = make_cell(endurance_cycles=10.0 ** rng.uniform(3, 12))
        single = TrafficPattern(read_bps, write_bps)
        double = TrafficPattern(2 * read_bps, 2 * write_bps)
        assert ev.memory_power(char, double) == 2 * ev.memory_power(char, single)
        assert ev.long_pole(char, double).utilization == 2 * ev.long_pole(char, single).utilization
        assert ev.lifetime(char, cell, double) == ev.lifetime(char, cell, single) / 2


@criterion(4, "feasibility boundary")
def test_criterion_4_feasibility_boundary():
    char = make_char(read_latency_ns=2.0, word_width_bits=64)
    result = ev.long_pole(char, TrafficPattern(4e8 * 8, 0.0))
    assert result.utilization == 0.8
    assert result.feasible

    exact = make_char(read_latency_ns=2.5, word_width_bits=8)
    at_one = ev.long_pole(exact, TrafficPattern(4e8, 0.0))
    assert at_one.utilization == 1.0
    assert at_one.feasible

    over = make_char(read_latency_ns=2.5 * (1.0 + 1e-9), word_width_bits=8)
    above = ev.long_pole(over, TrafficPattern(4e8, 0.0))
    assert above.utilization > 1.0
    assert not above.feasible


@criterion(5, "intermittent crossover")
def test_criterion_5_intermittent_crossover(repo_root):
    rng = random.Random(555)
    w = WorkloadSpec("t", reads_per_task=1_000_000, writes_per_task=0)
    retain = ev.StandbyPolicy.retain()

    def solution(leak_mw, task_pj_total):
        char = make_char(read_latency_ns=1e-12, read_energy_pj=task_pj_total / 1e6,
                         leakage_mw=leak_mw)
        return char, make_cell()

    checked = 0
    while checked < 50:
        leak_a = rng.uniform(0.05, 3.0)
        leak_b = leak_a * rng.uniform(1.2, 5.0)
        task_b = rng.uniform(1e8, 2e9)
        task_a = task_b * rng.uniform(1.2, 5.0)
        a, b = solution(leak_a, task_a), solution(leak_b, task_b)
        closed = ev.crossover_tasks_per_day(a, b, w, retain)
        if closed is None:
            continue

        def gap(n):
            return (ev.intermittent_energy_per_day(a[0], a[1], w, n, retain)
                    - ev.intermittent_energy_per_day(b[0], b[1], w, n, retain))

        assert gap(closed * 0.5) * gap(closed * 1.5) < 0
        root = bisect_root(gap, closed * 0.5, closed * 1.5)
        assert closed == pytest.approx(root, rel=1e-3)
        checked += 1

        # PowerOff: differing per-task energies never cross at n > 0
        assert ev.crossover_tasks_per_day(a, b, w, ev.StandbyPolicy.power_off()) is None

    # qualitative reproduction with the bundled tentpoles
    records = load_cell_records(repo_root / "cells" / "survey.csv")
    fefet = build_tentpole(records, "FeFET", Polarity.OPTIMISTIC)
    stt = build_tentpole(records, "STT", Polarity.OPTIMISTIC)
    workloads = load_workloads(repo_root / "workloads" / "dnn_inference.csv")
    inference = next(wl for wl in workloads if wl.name == "resnet26-inference")
    capacity = inference.footprint_bytes
    _, char_f = optimize(fefet, capacity, 64, OptimizationTarget.READ_ENERGY)
    _, char_s = optimize(stt, capacity, 64, OptimizationTarget.READ_ENERGY)
    crossover = ev.crossover_tasks_per_day((char_f, fefet), (char_s, stt), inference, retain)
    assert crossover is not None and crossover > 0
    below = crossover * 0.5
    above = crossover * 1.5
    assert (ev.intermittent_energy_per_day(char_f, fefet, inference, below, retain)
            < ev.intermittent_energy_per_day(char_s, stt, inference, below, retain))
    assert (ev.intermittent_energy_per_day(char_s, stt, inference, above, retain)
            < ev.intermittent_energy_per_day(char_f, fefet, inference, above, retain))


@criterion(6, "write-buffer reproduction")
def test_criterion_6_write_buffer(repo_root):
    rng = random.Random(66)
    zero_cost = make_char(read_latency_ns=1e-12, write_latency_ns=1e-12,
                          read_energy_pj=0.0, write_energy_pj=0.0,
                          leakage_mw=0.0, capacity_bytes=65536)

    # exact halving and lifetime doubling at c = 0.5
    envm = make_char(write_latency_ns=300.0, capacity_bytes=4 * MIB)
    cell = make_cell(endurance_cycles=1e7)
    traffic = TrafficPattern(1e8, 3e7)
    effect = ev.apply_write_buffer(envm, cell, traffic, ev.WriteBufferSpec(zero_cost, 0.5))
    assert effect.envm_write_bytes_per_s == traffic.write_bytes_per_s / 2
    assert effect.lifetime_s == 2 * ev.lifetime(envm, cell, traffic)

    # closed-form minimal feasibility coalesce fraction on 50 randomized cases
    for _ in range(50):
        t_read = rng.uniform(1.0, 20.0)
        t_write = rng.uniform(100.0, 5e4)
        machine = make_char(read_latency_ns=t_read, write_latency_ns=t_write)
        read_occ = rng.uniform(0.05, 0.8)
        write_occ = rng.uniform(max(0.3, 1.05 - read_occ), 4.0)
        read_bps = read_occ / (t_read * 1e-9) * 8
        write_bps = write_occ / (t_write * 1e-9) * 8
        stream = TrafficPattern(read_bps, write_bps)
        assert not ev.long_pole(machine, stream).feasible
        c_star = min_feasible_coalesce(
            occupancy_s_per_s(read_bps, 0, 64, t_read, t_write),
            occupancy_s_per_s(0, write_bps, 64, t_read, t_write),
        )
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            spec = ev.WriteBufferSpec(zero_cost, mid)
            if ev.apply_write_buffer(machine, cell, stream, spec).feasible:
                hi = mid
            else:
                lo = mid
        assert hi == pytest.approx(c_star, abs=1e-9)

    # bundled pessimistic FeFET + graph-BFS stand-in becomes feasible by c=0.5
    records = load_cell_records(repo_root / "cells" / "survey.csv")
    fefet = build_tentpole(records, "FeFET", Polarity.PESSIMISTIC)
    sram = build_tentpole(records, "SRAM", Polarity.OPTIMISTIC)
    bfs = next(w for w in load_workloads(repo_root / "workloads" / "graph_bfs.csv")
               if w.name == "Facebook-Graph-BFS")
    stream = workload_to_rates(bfs)
    _, char_f = optimize(fefet, bfs.footprint_bytes, 64, OptimizationTarget.READ_ENERGY)
    _, char_buf = optimize(sram, 65536, 64, OptimizationTarget.WRITE_EDP)
    assert not ev.long_pole(char_f, stream).feasible
    rescued = ev.apply_write_buffer(char_f, fefet, stream, ev.WriteBufferSpec(char_buf, 0.5))
    assert rescued.feasible


@criterion(7, "fault statistics")
def test_criterion_7_fault_statistics():
    n_bits = 100_000
    payload = bytes(n_bits // 8)
    tensor = StoredTensor(payload=payload, bits_per_cell=1)
    for ber in (0.01, 0.2, 0.5):
        bound = 4 * math.sqrt(ber * (1 - ber) / n_bits)
        for seed in range(30):
            observed = inject(tensor, FaultModel.slc(ber), seed).bit_error_rate
            assert abs(observed - ber) <= bound, (ber, seed)

    # Gray adjacency: one payload bit per adjacent-level move, exhaustively
    for bits in (2, 3):
        levels = 1 << bits
        for level in range(levels - 1):
            a = level ^ (level >> 1)
            b = (level + 1) ^ ((level + 1) >> 1)
            assert bin(a ^ b).count("1") == 1

    rng_payload = bytes(range(256)) * 12
    slc_tensor = StoredTensor(payload=rng_payload, bits_per_cell=1)
    assert inject(slc_tensor, FaultModel.slc(0.0), 7).corrupted == rng_payload
    mlc_tensor = StoredTensor(payload=rng_payload, bits_per_cell=2, level_coding=GRAY)
    assert inject(mlc_tensor, adjacent_level_model(4, 0.0), 7).corrupted == rng_payload

    model = adjacent_level_model(4, 0.03)
    first = inject(mlc_tensor, model, 1234)
    second = inject(mlc_tensor, model, 1234)
    assert first.corrupted == second.corrupted


@criterion(8, "array-model properties")
def test_criterion_8_array_model(repo_root):
    records = load_cell_records(repo_root / "cells" / "survey.csv")
    rram_opt = build_tentpole(records, "RRAM", Polarity.OPTIMISTIC)
    rram_pess = build_tentpole(records, "RRAM", Polarity.PESSIMISTIC)
    rram_ref = complete_record(
        next(r for r in records if r.source_id == "rram-survey-ref")
    )
    capacity = 2 * MIB

    # latency monotone in R at fixed C (S recomputed from capacity)
    for cols in SUBARRAY_GRID:
        latencies = []
        for rows in SUBARRAY_GRID:
            org = next(o for o in enumerate_organizations(capacity, 64, 1)
                       if o.subarray_rows == rows and o.subarray_cols == cols)
            latencies.append(characterize(rram_ref, org, capacity).read_latency_ns)
        assert all(a < b for a, b in zip(latencies, latencies[1:])), cols

    # area efficiency monotone in R*C along the diagonal
    efficiencies = []
    for size in SUBARRAY_GRID:
        org = next(o for o in enumerate_organizations(capacity, 64, 1)
                   if o.subarray_rows == size and o.subarray_cols == size)
        efficiencies.append(characterize(rram_ref, org, capacity).area_efficiency)
    assert all(a < b for a, b in zip(efficiencies, efficiencies[1:]))

    # tentpole coverage: optimistic <= reference <= pessimistic on every cost output
    for org in enumerate_organizations(capacity, 64, 1):
        chars = [characterize(c, org, capacity) for c in (rram_opt, rram_ref, rram_pess)]
        for metric in ("read_latency_ns", "write_latency_ns", "read_energy_pj",
                       "write_energy_pj", "leakage_mw", "area_mm2"):
            lo, mid, hi = (getattr(c, metric) for c in chars)
            assert lo <= mid <= hi, (metric, org)

    # optimizer tie-break determinism: zero periphery ties every org on
    # ReadLatency; smallest area (then S, then R, C) must win
    flat = Calibration(d0=0, d1=0, d2=0, d3=0, e0=0, e1=0, e2=0)
    org, char = optimize(rram_ref, capacity, 64, OptimizationTarget.READ_LATENCY,
                         calibration=flat)
    scan = [
        (characterize(rram_ref, o, capacity, flat).read_latency_ns,
         characterize(rram_ref, o, capacity, flat).area_mm2,
         o.num_subarrays, o.subarray_rows, o.subarray_cols)
        for o in enumerate_organizations(capacity, 64, 1)
    ]
    winner = min(scan)
    assert (org.subarray_rows, org.subarray_cols, org.num_subarrays) == \
        (winner[3], winner[4], winner[2])

    # soft calibration check (documented as calibration-dependent): optimistic
    # STT total power at least 2x below iso-capacity SRAM under the bundled
    # 60 FPS single-task stand-in, ReadEnergy-optimized arrays
    stt = build_tentpole(records, "STT", Polarity.OPTIMISTIC)
    sram = build_tentpole(records, "SRAM", Polarity.OPTIMISTIC)
    workload = next(w for w in load_workloads(repo_root / "workloads" / "dnn_continuous.csv")
                    if w.name == "resnet26-single-weights")
    traffic = workload_to_rates(workload)
    _, char_stt = optimize(stt, capacity, 64, OptimizationTarget.READ_ENERGY)
    _, char_sram = optimize(sram, capacity, 64, OptimizationTarget.READ_ENERGY)
    power_stt = ev.memory_power(char_stt, traffic)
    power_sram = ev.memory_power(char_sram, traffic)
    assert power_sram >= 2.0 * power_stt, (power_sram, power_stt)


@criterion(9, "sweep determinism and scale")
def test_criterion_9_sweep_determinism(repo_root, tmp_path):
    started = time.perf_counter()
    outputs = {}
    for label, extra in {"first": [], "second": [], "threads8": ["--threads", "8"]}.items():
        out = tmp_path / label
        result = subprocess.run(
            CLI + ["run", "configs/dnn_study.json", "--out", str(out), "--seed", "3", *extra],
            cwd=repo_root, capture_output=True, text=True, timeout=120,
        )
        assert result.returncode == 0, result.stderr
        outputs[label] = (
            (out / "results.csv").read_bytes(),
            (out / "bundle.json").read_bytes(),
        )
    assert outputs["first"] == outputs["second"]
    assert outputs["first"] == outputs["threads8"]

    config = parse_config(repo_root / "configs" / "dnn_study.json")
    analytic = (
        len(config.cells) * len(config.capacities_bytes)
        * len(config.optimization_targets) * len(config.bits_per_cell) * 4
    )
    assert len(expand(config)) == analytic
    csv_rows = outputs["first"][0].decode().strip().splitlines()
    assert len(csv_rows) - 1 == analytic

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"criterion 9 took {elapsed:.1f}s"
