"""Replay validator: self-consistency on real solutions, injected faults."""

from dataclasses import replace

from conftest import parsed_from_instance
from polyrecon.grid import Configuration, GridMap
from polyrecon.instances import gen_random_map
from polyrecon.planners import Dropoff, glc_solve, sequence_costs
from polyrecon.records import RunRecord
from polyrecon.validate import validate_record, validate_sequence


def solved_record(inst, steps):
    carry, empty, total = sequence_costs(steps)
    return RunRecord(
        instance=inst.label,
        planner="glc",
        params={"robot_start": None},
        seed=0,
        status="solved",
        sequence=[st.dropoff for st in steps],
        carry_time=carry,
        empty_travel_time=empty,
        total_cost=total,
    )


def test_planner_output_passes(rng):
    inst = gen_random_map(18, 18, 9, 0.25, seed=17)
    steps = glc_solve(inst.start, inst.goal, inst.grid)
    record = solved_record(inst, steps)
    report = validate_record(parsed_from_instance(inst), record)
    assert report.ok
    assert report.total_cost == record.total_cost
    assert all(s.ok for s in report.steps)


def test_tampered_dropoff_distance_fails_at_step(rng):
    inst = gen_random_map(18, 18, 9, 0.25, seed=17)
    steps = glc_solve(inst.start, inst.goal, inst.grid)
    record = solved_record(inst, steps)
    bad = len(record.sequence) // 2
    move = record.sequence[bad]
    record.sequence[bad] = replace(move, dropoff_dist=move.dropoff_dist - 1)
    report = validate_record(parsed_from_instance(inst), record)
    assert not report.ok
    failure = report.first_failure()
    assert failure.index == bad
    assert "dropoff_dist" in failure.message


def test_non_leaf_pickup_fails_with_illegal_pickup():
    grid = GridMap(5, 2)
    start = {(0, 0), (1, 0), (2, 0)}
    moves = [Dropoff((1, 0), (3, 0), 0, 2)]  # middle tile is a cut vertex
    report = validate_sequence(grid, start, frozenset(), moves)
    assert not report.ok
    assert "IllegalPickup" in report.first_failure().message


def test_pickup_distance_mismatch_detected():
    grid = GridMap(6, 2)
    start = {(0, 0), (1, 0)}
    moves = [
        Dropoff((0, 0), (2, 0), 0, 2),
        Dropoff((1, 0), (3, 0), 5, 2),  # true pickup walk is 1
    ]
    report = validate_sequence(grid, start, frozenset(), moves)
    assert not report.ok
    assert report.first_failure().index == 1
    assert "pickup_dist" in report.first_failure().message


def test_final_configuration_must_match_goal():
    grid = GridMap(6, 2)
    start = {(0, 0), (1, 0)}
    goal = {(4, 0), (5, 0)}
    moves = [Dropoff((0, 0), (2, 0), 0, 2)]
    report = validate_sequence(grid, start, goal, moves)
    assert not report.ok
    assert "does not match the goal" in report.message


def test_total_mismatch_detected(rng):
    inst = gen_random_map(16, 16, 8, 0.2, seed=23)
    steps = glc_solve(inst.start, inst.goal, inst.grid)
    record = solved_record(inst, steps)
    record.total_cost += 1
    record.carry_time += 1
    report = validate_record(parsed_from_instance(inst), record)
    assert not report.ok
    assert "total mismatch" in report.message


def test_disconnected_start_rejected():
    grid = GridMap(5, 1)
    report = validate_sequence(grid, {(0, 0), (2, 0)}, frozenset(), [])
    assert not report.ok
    assert "not connected" in report.message


def test_robot_start_honored():
    grid = GridMap(6, 2)
    start = {(0, 0), (1, 0)}
    # with a configured robot start the first pickup walk is nonzero
    moves = [Dropoff((0, 0), (2, 0), 1, 2)]
    report = validate_sequence(grid, start, frozenset(), moves, robot_start=(1, 0))
    assert report.ok
    report = validate_sequence(grid, start, frozenset(), moves, robot_start=None)
    assert not report.ok
