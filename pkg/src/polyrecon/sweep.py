"""Seeded benchmark sweeps over maps, planners, bias values, and rad values.

A sweep spec is a flat key/value text file (``key = value``, ``#``
comments).  Map sources are either explicit map files or a random family
(width/height/tiles/densities/maps per density).  Every cell's RNG seed is
derived from the master seed and the cell's indices, so reruns of the same
spec produce byte-identical outputs; records are sorted by cell key before
writing and no timing data enters the canonical files.

Outputs in the chosen directory:
    records.jsonl     one canonical RunRecord per line
    summary.csv       per-cell aggregates (success %, mean cost, mean nodes)
    curves.csv        best-cost-vs-nodes checkpoints for tree planners
    methods.csv       per-group best-method shares and success rates
    maps/             generated random instances, as map files
"""

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, ParseError, PolyreconError
from .instances import gen_random_map
from .maptext import format_map_text, load_map
from .planners import glc_solve, mwpm_expand_solve, sequence_costs
from .records import (
    STATUS_INFEASIBLE,
    STATUS_SOLVED,
    STATUS_STUCK,
    RunRecord,
)
from .rrt import PlannerParams, plan

GLOBAL_PLANNERS = ("glc", "mwpm-expand")
TREE_PLANNERS = ("rrt-glc", "rrt-mwpm")
KNOWN_PLANNERS = GLOBAL_PLANNERS + TREE_PLANNERS


@dataclass
class SweepSpec:
    map_files: list = field(default_factory=list)
    random_width: int = 30
    random_height: int = 30
    random_tiles: int = 15
    random_densities: list = field(default_factory=list)
    random_maps_per_density: int = 0
    planners: list = field(default_factory=list)
    bias_base: float = 0.1
    bias_max: list = field(default_factory=lambda: [0.75])
    rad: list = field(default_factory=lambda: [1])
    seeds_per_cell: int = 1
    max_nodes: int = 10_000
    master_seed: int = 0
    time_limit: float = 60.0
    initial_solution: str = "none"  # none | best

    def validate(self):
        if not self.planners:
            raise ValueError("planner matrix is empty")
        for p in self.planners:
            if p not in KNOWN_PLANNERS:
                raise ValueError(f"unknown planner {p!r}")
        if not self.map_files and not (
            self.random_densities and self.random_maps_per_density > 0
        ):
            raise ValueError("no map source: set maps or a random family")
        if self.seeds_per_cell < 1 or self.max_nodes < 1:
            raise ValueError("budgets must be positive")
        if not self.bias_max or not self.rad:
            raise ValueError("bias_max and rad lists must be non-empty")
        if self.initial_solution not in ("none", "best"):
            raise ValueError("initial_solution must be 'none' or 'best'")


def parse_sweep_spec(text):
    spec = SweepSpec()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key == "maps":
                spec.map_files = [p.strip() for p in value.split(",") if p.strip()]
            elif key == "random_width":
                spec.random_width = int(value)
            elif key == "random_height":
                spec.random_height = int(value)
            elif key == "random_tiles":
                spec.random_tiles = int(value)
            elif key == "random_densities":
                spec.random_densities = [float(v) for v in value.split(",") if v.strip()]
            elif key == "random_maps_per_density":
                spec.random_maps_per_density = int(value)
            elif key == "planners":
                spec.planners = [p.strip() for p in value.split(",") if p.strip()]
            elif key == "bias_base":
                spec.bias_base = float(value)
            elif key == "bias_max":
                spec.bias_max = [float(v) for v in value.split(",") if v.strip()]
            elif key == "rad":
                spec.rad = [int(v) for v in value.split(",") if v.strip()]
            elif key == "seeds_per_cell":
                spec.seeds_per_cell = int(value)
            elif key == "max_nodes":
                spec.max_nodes = int(value)
            elif key == "master_seed":
                spec.master_seed = int(value)
            elif key == "time_limit":
                spec.time_limit = float(value)
            elif key == "initial_solution":
                spec.initial_solution = value
            else:
                raise ParseError(f"unknown key {key!r}", line=lineno)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", line=lineno) from None
    spec.validate()
    return spec


def _cell_seed(master, *indices):
    seq = np.random.SeedSequence([master, *indices])
    return int(seq.generate_state(1)[0])


def _load_instances(spec):
    """Yield (map_idx, label, density, grid, start, goal-or-error)."""
    instances = []
    idx = 0
    for path in spec.map_files:
        parsed = load_map(path)
        label = os.path.splitext(os.path.basename(path))[0]
        instances.append(
            (idx, label, None, parsed.grid, parsed.start_cells, parsed.goal_cells, None)
        )
        idx += 1
    for d_i, density in enumerate(spec.random_densities):
        for m_i in range(spec.random_maps_per_density):
            seed = _cell_seed(spec.master_seed, 1_000 + d_i, m_i)
            label = f"random-d{density:g}-{m_i}"
            try:
                inst = gen_random_map(
                    spec.random_width,
                    spec.random_height,
                    spec.random_tiles,
                    density,
                    seed,
                )
            except Infeasible as exc:
                instances.append((idx, label, density, None, None, None, str(exc)))
            else:
                instances.append(
                    (
                        idx,
                        label,
                        density,
                        inst.grid,
                        frozenset(inst.start.tiles),
                        frozenset(inst.goal.tiles),
                        None,
                    )
                )
            idx += 1
    return instances


def _global_solve(planner, grid, start, goal, time_limit):
    from .grid import Configuration

    s = Configuration(start)
    g = Configuration(goal)
    if planner == "glc":
        steps = glc_solve(s, g, grid)
        carry, empty, total = sequence_costs(steps)
        return STATUS_SOLVED, [st.dropoff for st in steps], carry, empty, total
    solved, steps = mwpm_expand_solve(s, g, grid)
    carry, empty, total = sequence_costs(steps)
    status = STATUS_SOLVED if solved else STATUS_STUCK
    return status, [st.dropoff for st in steps], carry, empty, total


def _best_initial(grid, start, goal):
    """Best solved sequence among the two global planners, or None."""
    from .grid import Configuration

    s = Configuration(start)
    g = Configuration(goal)
    best = None
    try:
        steps = glc_solve(s, g, grid)
        best = ("glc", steps, sequence_costs(steps)[2])
    except PolyreconError:
        pass
    try:
        solved, steps = mwpm_expand_solve(s, g, grid)
        if solved:
            total = sequence_costs(steps)[2]
            if best is None or total < best[2]:
                best = ("mwpm-expand", steps, total)
    except PolyreconError:
        pass
    return best


def run_cell(cell):
    """Execute one sweep cell; returns (sort_key, row_dict, record_json)."""
    (
        key,
        label,
        density,
        grid,
        start,
        goal,
        planner,
        bias_base,
        bias_max,
        rad,
        max_nodes,
        seed,
        time_limit,
        initial_mode,
        instance_error,
    ) = cell
    row = {
        "map": label,
        "density": "" if density is None else f"{density:g}",
        "planner": planner,
        "bias_max": "" if planner in GLOBAL_PLANNERS else f"{bias_max:g}",
        "rad": "" if planner in GLOBAL_PLANNERS else str(rad),
        "rep": key[-1],
        "seed": seed,
        "status": STATUS_INFEASIBLE,
        "total_cost": "",
        "tree_cost": "",
        "initial_cost": "",
        "nodes_to_first_solution": "",
        "checkpoints": [],
    }
    if instance_error is not None:
        record = RunRecord(
            instance=label,
            planner=planner,
            params={"error": instance_error},
            seed=seed,
            status=STATUS_INFEASIBLE,
        )
        return key, row, record.to_json()
    try:
        if planner in GLOBAL_PLANNERS:
            status, seq, carry, empty, total = _global_solve(
                planner, grid, start, goal, time_limit
            )
            record = RunRecord(
                instance=label,
                planner=planner,
                params={"robot_start": None},
                seed=seed,
                status=status,
                sequence=seq,
                carry_time=carry,
                empty_travel_time=empty,
                total_cost=total,
            )
        else:
            local = "glc" if planner == "rrt-glc" else "mwpm-expand"
            initial = None
            initial_cost = None
            if initial_mode == "best":
                best = _best_initial(grid, start, goal)
                if best is not None:
                    initial = best[1]
                    initial_cost = best[2]
            params = PlannerParams(
                bias_base=bias_base,
                bias_max=bias_max,
                rad=rad,
                max_nodes=max_nodes,
                seed=seed,
            )
            from .grid import Configuration

            record = plan(
                Configuration(start),
                Configuration(goal),
                grid,
                params,
                local_planner=local,
                initial_solution=initial,
                time_limit=time_limit,
                instance=label,
                planner_id=planner,
            )
            if initial_cost is not None:
                record.params["initial_cost"] = initial_cost
                row["initial_cost"] = initial_cost
            row["nodes_to_first_solution"] = (
                "" if record.nodes_to_first_solution is None
                else record.nodes_to_first_solution
            )
            row["checkpoints"] = record.checkpoints
            row["tree_cost"] = "" if record.tree_cost is None else record.tree_cost
    except PolyreconError as exc:
        record = RunRecord(
            instance=label,
            planner=planner,
            params={"error": str(exc)},
            seed=seed,
            status=STATUS_INFEASIBLE,
        )
        return key, row, record.to_json()
    row["status"] = record.status
    if record.status == STATUS_SOLVED:
        row["total_cost"] = record.total_cost
    return key, row, record.to_json()


def _build_cells(spec, instances):
    cells = []
    for inst in instances:
        idx, label, density, grid, start, goal, error = inst
        for p_i, planner in enumerate(spec.planners):
            if planner in GLOBAL_PLANNERS:
                bias_list = [None]
                rad_list = [None]
            else:
                bias_list = spec.bias_max
                rad_list = spec.rad
            for b_i, bias in enumerate(bias_list):
                for r_i, rad in enumerate(rad_list):
                    for rep in range(spec.seeds_per_cell):
                        key = (idx, p_i, b_i, r_i, rep)
                        seed = _cell_seed(spec.master_seed, *key)
                        cells.append(
                            (
                                key,
                                label,
                                density,
                                grid,
                                start,
                                goal,
                                planner,
                                spec.bias_base,
                                bias if bias is not None else 0.0,
                                rad if rad is not None else 1,
                                spec.max_nodes,
                                seed,
                                spec.time_limit,
                                spec.initial_solution,
                                error,
                            )
                        )
    return cells


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _mean(values):
    return f"{sum(values) / len(values):.6f}" if values else ""


def _summaries(spec, rows):
    groups = {}
    for row in rows:
        key = (row["map"], row["density"], row["planner"], row["bias_max"], row["rad"])
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        cell_rows = groups[key]
        solved = [r for r in cell_rows if r["status"] == STATUS_SOLVED]
        costs = [r["total_cost"] for r in solved]
        nodes = [
            r["nodes_to_first_solution"]
            for r in solved
            if r["nodes_to_first_solution"] != ""
        ]
        out.append(
            list(key)
            + [
                len(cell_rows),
                len(solved),
                f"{100.0 * len(solved) / len(cell_rows):.2f}",
                _mean(costs),
                _mean(nodes),
            ]
        )
    header = [
        "map",
        "density",
        "planner",
        "bias_max",
        "rad",
        "runs",
        "solved",
        "success_pct",
        "mean_cost",
        "mean_nodes_to_first_solution",
    ]
    return header, out


def _methods_table(spec, rows):
    """Per-group best-method shares (Table I shape): for every instance and
    rep, the planner(s) achieving the cheapest solved cost split a point."""
    planners = spec.planners
    group_of = {}
    for row in rows:
        group = row["density"] if row["density"] != "" else row["map"]
        inst = (row["map"], row["rep"])
        group_of.setdefault(group, {}).setdefault(inst, {}).setdefault(
            row["planner"], []
        ).append(row)
    header = (
        ["group"]
        + [f"best_pct_{p}" for p in planners]
        + [f"success_pct_{p}" for p in planners]
    )
    if spec.initial_solution == "best":
        header += [
            f"improves_initial_pct_{p}" for p in planners if p in TREE_PLANNERS
        ]
    out = []
    for group in sorted(group_of):
        insts = group_of[group]
        best_share = {p: 0.0 for p in planners}
        success = {p: [0, 0] for p in planners}
        improves = {p: [0, 0] for p in planners}
        for inst, per_planner in insts.items():
            best_cost = {}
            for p in planners:
                cell_rows = per_planner.get(p, [])
                solved_costs = [
                    r["total_cost"] for r in cell_rows if r["status"] == STATUS_SOLVED
                ]
                success[p][1] += 1 if cell_rows else 0
                if solved_costs:
                    success[p][0] += 1
                    best_cost[p] = min(solved_costs)
                for r in cell_rows:
                    if r["initial_cost"] != "" and r["status"] == STATUS_SOLVED:
                        improves[p][1] += 1
                        if r["total_cost"] < r["initial_cost"]:
                            improves[p][0] += 1
            if best_cost:
                winning = min(best_cost.values())
                winners = [p for p, c in best_cost.items() if c == winning]
                for p in winners:
                    best_share[p] += 1.0 / len(winners)
        n_insts = len(insts)
        line = [group]
        line += [f"{100.0 * best_share[p] / n_insts:.2f}" for p in planners]
        line += [
            f"{100.0 * success[p][0] / success[p][1]:.2f}" if success[p][1] else ""
            for p in planners
        ]
        if spec.initial_solution == "best":
            line += [
                f"{100.0 * improves[p][0] / improves[p][1]:.2f}"
                if improves[p][1]
                else ""
                for p in planners
                if p in TREE_PLANNERS
            ]
        out.append(line)
    return header, out


def run_sweep(spec, out_dir, jobs=1):
    """Execute the whole sweep matrix deterministically; returns row count."""
    os.makedirs(out_dir, exist_ok=True)
    instances = _load_instances(spec)

    maps_dir = os.path.join(out_dir, "maps")
    os.makedirs(maps_dir, exist_ok=True)
    for inst in instances:
        idx, label, density, grid, start, goal, error = inst
        if density is not None and error is None:
            with open(
                os.path.join(maps_dir, f"{label}.map"), "w", encoding="utf-8"
            ) as fh:
                fh.write(format_map_text(grid, start, goal))

    cells = _build_cells(spec, instances)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, cells, chunksize=1))
    else:
        results = [run_cell(cell) for cell in cells]
    results.sort(key=lambda item: item[0])

    with open(os.path.join(out_dir, "records.jsonl"), "w", encoding="utf-8") as fh:
        for _, _, record_json in results:
            fh.write(record_json + "\n")

    rows = [row for _, row, _ in results]
    header, summary = _summaries(spec, rows)
    _write_csv(os.path.join(out_dir, "summary.csv"), header, summary)

    curve_rows = []
    for _, row, _ in results:
        for nodes, best in row["checkpoints"]:
            curve_rows.append(
                [
                    row["map"],
                    row["density"],
                    row["planner"],
                    row["bias_max"],
                    row["rad"],
                    row["rep"],
                    row["seed"],
                    nodes,
                    "" if best is None else best,
                ]
            )
    _write_csv(
        os.path.join(out_dir, "curves.csv"),
        ["map", "density", "planner", "bias_max", "rad", "rep", "seed", "nodes", "best_cost"],
        curve_rows,
    )

    header, methods = _methods_table(spec, rows)
    _write_csv(os.path.join(out_dir, "methods.csv"), header, methods)
    return len(rows)
