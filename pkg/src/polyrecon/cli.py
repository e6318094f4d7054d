"""Command-line front end.

Subcommands: ``solve`` one instance, ``validate`` a record against its map,
``sweep`` a benchmark matrix, ``frames`` a move-by-move replay, ``gen``
instance files.  Exit codes: 0 solved/ok, 2 stuck, 3 not-found,
4 infeasible, 5 parse error (1 is left to unexpected crashes).
"""

import argparse
import sys
import time

from .errors import (
    Infeasible,
    NoMoveFound,
    ParseError,
    PolyreconError,
    SeparateComponents,
    SizeMismatch,
    TooSmall,
)
from .frames import write_frames
from .grid import Configuration, is_connected
from .instances import (
    gen_c_shape,
    gen_cc_shape,
    gen_obstacle_detour,
    gen_random_map,
    standin_instances,
)
from .maptext import format_map_text, load_map, save_map
from .planners import glc_solve, mwpm_expand_solve, sequence_costs
from .records import (
    EXIT_CODES,
    EXIT_PARSE_ERROR,
    STATUS_INFEASIBLE,
    STATUS_SOLVED,
    STATUS_STUCK,
    RunRecord,
    load_record,
)
from .rrt import PlannerParams, plan
from .sweep import parse_sweep_spec, run_sweep
from .validate import validate_record

PLANNERS = ("glc", "mwpm-expand", "rrt-glc", "rrt-mwpm")

_INFEASIBLE_ERRORS = (SeparateComponents, SizeMismatch, NoMoveFound, Infeasible)


def _parse_cell(text):
    try:
        x, y = text.split(",")
        return (int(x), int(y))
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'x,y'") from None


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polyrecon",
        description="Connected polyomino reconfiguration planning amid obstacles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance")
    p_solve.add_argument("map", help="map file with S/G/B cells")
    p_solve.add_argument("--planner", choices=PLANNERS, default="rrt-glc")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--out", help="record file (default: stdout)")
    p_solve.add_argument("--bias-base", type=float, default=0.1)
    p_solve.add_argument("--bias-max", type=float, default=0.75)
    p_solve.add_argument("--rad", type=int, default=1)
    p_solve.add_argument("--max-nodes", type=int, default=10_000)
    p_solve.add_argument("--cost-threshold", type=int, default=None)
    p_solve.add_argument("--time-limit", type=float, default=None)
    p_solve.add_argument(
        "--initial-solution",
        choices=("none", "glc", "mwpm-expand", "best"),
        default="none",
    )
    p_solve.add_argument("--robot-start", type=_parse_cell, default=None)
    p_solve.add_argument("--frames-dir", help="also dump replay frames")
    p_solve.add_argument(
        "--timing", action="store_true", help="embed wall time in the record"
    )

    p_val = sub.add_parser("validate", help="replay-check a record")
    p_val.add_argument("map")
    p_val.add_argument("record")

    p_sweep = sub.add_parser("sweep", help="run a benchmark sweep")
    p_sweep.add_argument("spec", help="flat key=value sweep spec file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_frames = sub.add_parser("frames", help="export replay frames")
    p_frames.add_argument("map")
    p_frames.add_argument("record")
    p_frames.add_argument("--out", required=True, help="output directory")

    p_gen = sub.add_parser("gen", help="generate instance files")
    gen_sub = p_gen.add_subparsers(dest="family", required=True)
    g_detour = gen_sub.add_parser("detour", help="two rows with an obstacle wall")
    g_detour.add_argument("--n", type=int, required=True)
    g_detour.add_argument("--k", type=int, required=True)
    g_detour.add_argument("--out", required=True)
    g_c = gen_sub.add_parser("c", help="c-shape lower-bound instance")
    g_c.add_argument("--n", type=int, required=True)
    g_c.add_argument("--out", required=True)
    g_cc = gen_sub.add_parser("cc", help="mirrored double-c instance")
    g_cc.add_argument("--n", type=int, required=True)
    g_cc.add_argument("--out", required=True)
    g_rand = gen_sub.add_parser("random", help="random obstacle map")
    g_rand.add_argument("--width", type=int, default=30)
    g_rand.add_argument("--height", type=int, default=30)
    g_rand.add_argument("--n", type=int, default=15)
    g_rand.add_argument("--density", type=float, required=True)
    g_rand.add_argument("--seed", type=int, default=0)
    g_rand.add_argument("--out", required=True)
    g_standins = gen_sub.add_parser("standins", help="the five benchmark maps")
    g_standins.add_argument("--out", required=True, help="output directory")
    return parser


def _load_instance(path):
    parsed = load_map(path)
    if not parsed.start_cells or not parsed.goal_cells:
        raise SizeMismatch("map must contain both S and G cells")
    if len(parsed.start_cells) != len(parsed.goal_cells):
        raise SizeMismatch(
            f"|S|={len(parsed.start_cells)} vs |G|={len(parsed.goal_cells)}"
        )
    if not is_connected(parsed.start_cells):
        raise SeparateComponents("start configuration is not connected")
    # goal connectivity is not prechecked: planners degrade gracefully and
    # the matching-based planner must report Stuck on such instances
    return parsed


def _initial_solution(kind, s, g, grid):
    best = None
    if kind in ("glc", "best"):
        try:
            steps = glc_solve(s, g, grid)
            best = (steps, sequence_costs(steps)[2])
        except PolyreconError:
            pass
    if kind in ("mwpm-expand", "best"):
        try:
            solved, steps = mwpm_expand_solve(s, g, grid)
            if solved:
                total = sequence_costs(steps)[2]
                if best is None or total < best[1]:
                    best = (steps, total)
        except PolyreconError:
            pass
    return best


def _cmd_solve(args):
    try:
        parsed = _load_instance(args.map)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except _INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_CODES[STATUS_INFEASIBLE]

    grid = parsed.grid
    s = Configuration(parsed.start_cells)
    g = Configuration(parsed.goal_cells)
    label = args.map
    t0 = time.perf_counter()
    try:
        if args.planner in ("glc", "mwpm-expand"):
            if args.planner == "glc":
                steps = glc_solve(s, g, grid, robot_start=args.robot_start)
                status = STATUS_SOLVED
            else:
                solved, steps = mwpm_expand_solve(
                    s, g, grid, robot_start=args.robot_start
                )
                status = STATUS_SOLVED if solved else STATUS_STUCK
            carry, empty, total = sequence_costs(steps)
            record = RunRecord(
                instance=label,
                planner=args.planner,
                params={
                    "robot_start": list(args.robot_start)
                    if args.robot_start
                    else None
                },
                seed=args.seed,
                status=status,
                sequence=[st.dropoff for st in steps],
                carry_time=carry,
                empty_travel_time=empty,
                total_cost=total,
            )
        else:
            initial = None
            if args.initial_solution != "none":
                best = _initial_solution(args.initial_solution, s, g, grid)
                if best is not None:
                    initial = best[0]
            params = PlannerParams(
                bias_base=args.bias_base,
                bias_max=args.bias_max,
                rad=args.rad,
                max_nodes=args.max_nodes,
                seed=args.seed,
                cost_threshold=args.cost_threshold,
            )
            record = plan(
                s,
                g,
                grid,
                params,
                local_planner="glc" if args.planner == "rrt-glc" else "mwpm-expand",
                initial_solution=initial,
                robot_start=args.robot_start,
                time_limit=args.time_limit,
                instance=label,
                planner_id=args.planner,
            )
            if initial is not None:
                record.params["initial_cost"] = sequence_costs(initial)[2]
    except _INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        record = RunRecord(
            instance=label,
            planner=args.planner,
            params={"error": str(exc)},
            seed=args.seed,
            status=STATUS_INFEASIBLE,
        )
        _emit_record(record, args)
        return EXIT_CODES[STATUS_INFEASIBLE]

    record.wall_time = time.perf_counter() - t0
    print(
        f"{record.status}: cost={record.total_cost} "
        f"(carry={record.carry_time}, empty={record.empty_travel_time}) "
        f"in {record.wall_time:.3f}s",
        file=sys.stderr,
    )
    _emit_record(record, args)
    if args.frames_dir:
        write_frames(
            args.frames_dir, grid, parsed.start_cells, parsed.goal_cells, record.sequence
        )
    return EXIT_CODES[record.status]


def _emit_record(record, args):
    text = record.to_json(include_timing=getattr(args, "timing", False))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_validate(args):
    try:
        parsed = load_map(args.map)
        record = load_record(args.record)
    except (ParseError, ValueError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    report = validate_record(parsed, record)
    for step in report.steps:
        if not step.ok:
            print(f"step {step.index}: FAIL {step.message}")
    print(
        f"{'PASS' if report.ok else 'FAIL'}: "
        f"recomputed carry={report.carry_time} empty={report.empty_travel_time} "
        f"total={report.total_cost}"
        + (f" ({report.message})" if report.message else "")
    )
    return 0 if report.ok else 1


def _cmd_sweep(args):
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec = parse_sweep_spec(fh.read())
    except (ParseError, ValueError, OSError) as exc:
        print(f"bad sweep spec: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    count = run_sweep(spec, args.out, jobs=args.jobs)
    print(f"{count} runs written to {args.out}", file=sys.stderr)
    return 0


def _cmd_frames(args):
    try:
        parsed = load_map(args.map)
        record = load_record(args.record)
    except (ParseError, ValueError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    paths = write_frames(
        args.out, parsed.grid, parsed.start_cells, parsed.goal_cells, record.sequence
    )
    print(f"{len(paths)} frames written to {args.out}", file=sys.stderr)
    return 0


def _cmd_gen(args):
    try:
        if args.family == "detour":
            inst = gen_obstacle_detour(args.n, args.k)
        elif args.family == "c":
            inst = gen_c_shape(args.n)
        elif args.family == "cc":
            inst = gen_cc_shape(args.n)
        elif args.family == "random":
            inst = gen_random_map(
                args.width, args.height, args.n, args.density, args.seed
            )
        else:  # standins
            import os

            os.makedirs(args.out, exist_ok=True)
            for label, spec in standin_instances().items():
                save_map(
                    os.path.join(args.out, f"{label}.map"),
                    spec.grid,
                    spec.start.tiles,
                    spec.goal.tiles,
                )
            print(f"5 maps written to {args.out}", file=sys.stderr)
            return 0
    except (TooSmall, Infeasible, ValueError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_CODES[STATUS_INFEASIBLE]
    save_map(args.out, inst.grid, inst.start.tiles, inst.goal.tiles)
    print(f"{inst.label} written to {args.out}", file=sys.stderr)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "frames":
        return _cmd_frames(args)
    if args.command == "gen":
        return _cmd_gen(args)
    return 1


if __name__ == "__main__":
    sys.exit(main())
