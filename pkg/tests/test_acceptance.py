"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -q -rA`` to see every line.
The random-instance corpus (30x30, n = 15, densities 10-70%) is generated
once per session and shared across criteria.
"""

import time
from itertools import permutations

import numpy as np
import pytest

from conftest import parsed_from_instance
from polyrecon.cli import main
from polyrecon.errors import Stuck
from polyrecon.grid import Configuration, GridMap
from polyrecon.instances import (
    gen_c_shape,
    gen_obstacle_detour,
    gen_random_map,
    standin_instances,
)
from polyrecon.matching import distance_matrix, min_weight_perfect_matching, solve_assignment
from polyrecon.planners import (
    glc_solve,
    mwpm_expand_solve,
    mwpm_expand_step,
    sequence_costs,
)
from polyrecon.records import RunRecord
from polyrecon.rrt import PlannerParams, dynamic_bias, heuristic, plan, Tree
from polyrecon.validate import validate_record, validate_sequence

DENSITIES = (0.1, 0.3, 0.5, 0.7)
PER_DENSITY = 50


def report(num, name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def corpus():
    """200 seeded feasible instances, 50 per density."""
    instances = {}
    for d_i, density in enumerate(DENSITIES):
        per = []
        seed = 0
        while len(per) < PER_DENSITY:
            per.append(gen_random_map(30, 30, 15, density, seed=1000 * d_i + seed))
            seed += 1
        instances[density] = per
    return instances


@pytest.fixture(scope="module")
def glc_results(corpus):
    results = {}
    for density, instances in corpus.items():
        per = []
        for inst in instances:
            t0 = time.perf_counter()
            steps = glc_solve(inst.start, inst.goal, inst.grid)
            elapsed = time.perf_counter() - t0
            per.append((inst, steps, elapsed))
        results[density] = per
    return results


def test_criterion_1_glc_completeness(glc_results):
    solved = 0
    total = 0
    slowest = 0.0
    all_valid = True
    for density, rows in glc_results.items():
        for inst, steps, elapsed in rows:
            total += 1
            slowest = max(slowest, elapsed)
            if steps is None or elapsed >= 1.0:
                all_valid = False
                continue
            if steps and steps[-1].after.tiles != inst.goal.tiles:
                all_valid = False
                continue
            rep = validate_sequence(
                inst.grid,
                inst.start.tiles,
                inst.goal.tiles,
                [st.dropoff for st in steps],
            )
            if not rep.ok:
                all_valid = False
                continue
            solved += 1
    report(
        1,
        "GLC solves 100% of 200 random feasible instances, connected "
        "throughout, under 1 s each",
        solved == total == 200 and all_valid,
        f"solved {solved}/{total}, slowest {slowest * 1e3:.0f} ms",
    )


def test_criterion_2_mwpm_stuck_behavior(corpus, glc_results, stuck_instance):
    grid, s, g = stuck_instance
    with pytest.raises(Stuck):
        mwpm_expand_step(s, g, grid)
    paper_solved, paper_steps = mwpm_expand_solve(s, g, grid)
    paper_ok = not paper_solved and paper_steps == []

    translation_ok = True
    for shift in ((3, 0), (0, 3), (4, 2)):
        tgrid = GridMap(12, 12)
        start = Configuration.of([(2, 2), (3, 2), (2, 3), (3, 3)])
        goal = Configuration.of(
            [(x + shift[0], y + shift[1]) for x, y in start.tiles]
        )
        solved, steps = mwpm_expand_solve(start, goal, tgrid)
        if not solved or steps[-1].after.tiles != goal.tiles:
            translation_ok = False

    strictly_below = True
    rates = {}
    for density, instances in corpus.items():
        glc_rate = sum(
            1 for _, steps, _ in glc_results[density] if steps is not None
        ) / len(instances)
        wins = 0
        for inst in instances:
            solved, _ = mwpm_expand_solve(inst.start, inst.goal, inst.grid)
            wins += int(solved)
        mwpm_rate = wins / len(instances)
        rates[density] = (mwpm_rate, glc_rate)
        if not mwpm_rate < glc_rate:
            strictly_below = False
    report(
        2,
        "MWPMexpand: stuck on the middle-tile instance, solves pure "
        "translations, success strictly below GLC at every density <= 70%",
        paper_ok and translation_ok and strictly_below,
        "; ".join(
            f"d={d:g}: mwpm {m:.0%} vs glc {g:.0%}" for d, (m, g) in rates.items()
        ),
    )


def test_criterion_3_matching_optimality(rng):
    def brute(cost):
        n = cost.shape[0]
        return min(
            sum(int(cost[i, p[i]]) for i in range(n))
            for p in permutations(range(n))
        )

    exact = 0
    for _ in range(100):
        n = int(rng.integers(1, 8))
        cost = rng.integers(0, 40, size=(n, n))
        _, total = solve_assignment(cost)
        exact += int(total == brute(cost))
    report(3, "Hungarian equals the permutation oracle on 100 matrices up to 7x7",
           exact == 100, f"{exact}/100 exact")


def test_criterion_4_lower_bound_scaling():
    sweep = (24, 48, 96)
    mwpm = {}
    glc_total = {}
    for n in sweep:
        inst = gen_c_shape(n)
        mwpm[n] = min_weight_perfect_matching(
            distance_matrix(inst.grid, inst.start, inst.goal)
        ).total_cost
        glc_total[n] = sequence_costs(glc_solve(inst.start, inst.goal, inst.grid))[2]
    constant = len(set(mwpm.values())) == 1
    ratio = glc_total[96] / glc_total[24]
    slope = np.polyfit(sweep, [glc_total[n] for n in sweep], 1)[0]

    detour = [
        min_weight_perfect_matching(
            distance_matrix(*(lambda i: (i.grid, i.start, i.goal))(
                gen_obstacle_detour(6, k)
            ))
        ).total_cost
        for k in range(9)
    ]
    monotone = all(a <= b for a, b in zip(detour, detour[1:]))
    report(
        4,
        "c-shape: constant MWPM vs linear-or-steeper GLC cost; detour MWPM "
        "monotone in wall length",
        constant and ratio >= 2.7 and slope > 0 and monotone,
        f"mwpm={sorted(set(mwpm.values()))}, ratio={ratio:.2f}, "
        f"slope={slope:.2f}, detour={detour}",
    )


DESK_NODES = 2000
DESK_SEEDS = 5


@pytest.fixture(scope="module")
def standin_runs():
    """Desk-scale runs on the five stand-in maps for both bias settings."""
    runs = {}
    for label, inst in standin_instances().items():
        for bias_max in (0.1, 0.75):
            for seed in range(DESK_SEEDS):
                params = PlannerParams(
                    bias_base=0.1,
                    bias_max=bias_max,
                    rad=1,
                    max_nodes=DESK_NODES,
                    seed=seed,
                )
                record = plan(
                    inst.start, inst.goal, inst.grid, params, instance=label
                )
                runs[(label, bias_max, seed)] = (inst, record)
    return runs


def test_criterion_5_rrt_qualitative(standin_runs):
    labels = sorted({k[0] for k in standin_runs})
    all_solved = all(rec.status == "solved" for _, rec in standin_runs.values())

    faster_maps = 0
    means = {}
    for label in labels:
        by_bias = {}
        for bias_max in (0.1, 0.75):
            firsts = [
                standin_runs[(label, bias_max, seed)][1].nodes_to_first_solution
                for seed in range(DESK_SEEDS)
            ]
            if any(f is None for f in firsts):
                by_bias[bias_max] = float("inf")
            else:
                by_bias[bias_max] = sum(firsts) / len(firsts)
        means[label] = by_bias
        if by_bias[0.75] <= by_bias[0.1]:
            faster_maps += 1

    monotone = True
    for _, record in standin_runs.values():
        costs = [c for _, c in record.checkpoints if c is not None]
        if any(a < b for a, b in zip(costs, costs[1:])):
            monotone = False

    all_valid = True
    for inst, record in standin_runs.values():
        if record.status != "solved":
            continue
        if not validate_record(parsed_from_instance(inst), record).ok:
            all_valid = False

    detail = "; ".join(
        f"{label}: {means[label][0.75]:.0f} vs {means[label][0.1]:.0f} nodes"
        for label in labels
    )
    report(
        5,
        "RRT* desk-scale: bias 0.75 finds first solutions no later than "
        "0.1 on >= 4/5 maps, best cost non-increasing, all solutions "
        "replay-valid",
        all_solved and faster_maps >= 4 and monotone and all_valid,
        f"faster on {faster_maps}/5 maps; {detail}",
    )


def test_criterion_6_initial_solution_seeding():
    improved_or_kept = 0
    worsened = []
    total = 0
    for label, inst in standin_instances().items():
        glc_steps = glc_solve(inst.start, inst.goal, inst.grid)
        best_steps, best_cost = glc_steps, sequence_costs(glc_steps)[2]
        solved, mwpm_steps = mwpm_expand_solve(inst.start, inst.goal, inst.grid)
        if solved:
            mwpm_cost = sequence_costs(mwpm_steps)[2]
            if mwpm_cost < best_cost:
                best_steps, best_cost = mwpm_steps, mwpm_cost
        for seed in range(100, 100 + DESK_SEEDS):
            total += 1
            params = PlannerParams(
                bias_base=0.1, bias_max=0.75, rad=1, max_nodes=DESK_NODES, seed=seed
            )
            record = plan(
                inst.start,
                inst.goal,
                inst.grid,
                params,
                initial_solution=best_steps,
                instance=label,
            )
            assert record.status == "solved"
            assert validate_record(parsed_from_instance(inst), record).ok
            if record.total_cost <= best_cost:
                improved_or_kept += 1
            else:
                # the documented worsening: report both accountings
                worsened.append(
                    f"{label}/s{seed}: injected {best_cost}, tree claims "
                    f"{record.tree_cost}, replay-true {record.total_cost}"
                )
    detail = f"{improved_or_kept}/{total} runs at or below the injected cost"
    if worsened:
        detail += "; worsened: " + " | ".join(worsened)
    report(6, "seeded RRT* stays at or below the injected cost in >= 80% of "
              "25 desk-scale runs, recomputed cost reported otherwise",
           improved_or_kept >= 0.8 * total, detail)


def test_criterion_7_equation_spot_checks():
    tiles15 = Configuration.of([(x, y) for x in range(5) for y in range(3)])
    checks = [
        abs(heuristic(tiles15, tiles15) - 160.0),
        abs(
            heuristic(Configuration.of([(0, 0)]), Configuration.of([(5, 0)])) - 0.2
        ),
    ]
    a = Configuration.of([(x, 0) for x in range(20)])
    b = Configuration.of(
        [(0, 0), (1, 0), (2, 0)] + [(-x, 0) for x in range(1, 17)] + [(324, 0)]
    )
    checks.append(abs(heuristic(a, b) - 40.0))

    grid = GridMap(12, 12)
    goal = Configuration.of([(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)])
    params = PlannerParams(bias_base=0.1, bias_max=0.75, max_nodes=10)
    zero = Tree(grid, Configuration.of([(x, 7) for x in range(5)]), goal)
    checks.append(abs(dynamic_bias(zero, goal, params) - 0.1))
    full = Tree(grid, goal, goal)
    checks.append(abs(dynamic_bias(full, goal, params) - 0.75))
    partial = Tree(
        grid, Configuration.of([(0, 0), (0, 1), (1, 1), (2, 1), (3, 1)]), goal
    )
    partial.add_node(
        Configuration.of([(0, 0), (1, 0), (2, 0), (2, 1), (3, 1)]), 0, (), 0, None
    )
    checks.append(abs(dynamic_bias(partial, goal, params) - 0.36))
    report(7, "heuristic and dynamic-bias hand values reproduce exactly",
           max(checks) <= 1e-12, f"max deviation {max(checks):.2e}")


SWEEP_SPEC = """random_width = 16
random_height = 16
random_tiles = 8
random_densities = 0.25
random_maps_per_density = 2
planners = rrt-glc, glc
bias_base = 0.1
bias_max = 0.75
rad = 1
seeds_per_cell = 2
max_nodes = 200
master_seed = 33
time_limit = 120
"""


def test_criterion_8_determinism(tmp_path):
    inst_path = str(tmp_path / "inst.map")
    assert main(["gen", "random", "--width", "20", "--height", "20", "--n", "10",
                 "--density", "0.3", "--seed", "2", "--out", inst_path]) == 0
    rec_a = tmp_path / "a.json"
    rec_b = tmp_path / "b.json"
    for out in (rec_a, rec_b):
        code = main([
            "solve", inst_path, "--planner", "rrt-glc", "--seed", "6",
            "--max-nodes", "400", "--out", str(out),
        ])
        assert code == 0
    records_identical = rec_a.read_bytes() == rec_b.read_bytes()

    spec_path = tmp_path / "sweep.spec"
    spec_path.write_text(SWEEP_SPEC)
    sweeps_identical = True
    for name in ("records.jsonl", "summary.csv", "curves.csv", "methods.csv"):
        pass
    out_a, out_b = tmp_path / "sa", tmp_path / "sb"
    assert main(["sweep", str(spec_path), "--out", str(out_a)]) == 0
    assert main(["sweep", str(spec_path), "--out", str(out_b)]) == 0
    for name in ("records.jsonl", "summary.csv", "curves.csv", "methods.csv"):
        if (out_a / name).read_bytes() != (out_b / name).read_bytes():
            sweeps_identical = False
    report(8, "identical inputs and seeds give byte-identical records and "
              "sweep outputs",
           records_identical and sweeps_identical)
