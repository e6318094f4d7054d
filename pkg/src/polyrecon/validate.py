"""Independent replay checker for solution records.

This module deliberately reimplements connectivity and BFS with plain
Python sets instead of calling the grid kernels, so it can serve as an
oracle for every planner: a record passes only if each move picks up a
removable tile, places it adjacent to the remaining structure, keeps the
tiles connected, and carries exactly the distances the record claims.
"""

from collections import deque
from dataclasses import dataclass, field


def _neighbors(cell):
    x, y = cell
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def _connected(cells):
    cells = set(cells)
    if len(cells) <= 1:
        return True
    seed = next(iter(cells))
    seen = {seed}
    queue = deque([seed])
    while queue:
        cur = queue.popleft()
        for nb in _neighbors(cur):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(cells)


def _bfs_dist(allowed, src, dst):
    """Hop count from src to dst moving only on ``allowed`` cells."""
    if src == dst:
        return 0
    seen = {src: 0}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        d = seen[cur] + 1
        for nb in _neighbors(cur):
            if nb in allowed and nb not in seen:
                if nb == dst:
                    return d
                seen[nb] = d
                queue.append(nb)
    return None


@dataclass
class StepReport:
    index: int
    ok: bool
    message: str = ""


@dataclass
class ValidationReport:
    ok: bool
    steps: list = field(default_factory=list)
    carry_time: int = 0
    empty_travel_time: int = 0
    total_cost: int = 0
    final_matches_goal: bool | None = None
    message: str = ""

    def first_failure(self):
        for step in self.steps:
            if not step.ok:
                return step
        return None


def validate_sequence(grid, start_cells, goal_cells, moves, robot_start=None):
    """Replay ``moves`` from the start cells and check every dropoff.

    ``moves`` is an iterable of objects with source/target/pickup_dist/
    dropoff_dist.  When ``goal_cells`` is nonempty the final configuration
    must equal it (for solved records).
    """
    tiles = set(start_cells)
    robot = robot_start
    report = ValidationReport(ok=True)
    in_bounds = lambda c: 0 <= c[0] < grid.width and 0 <= c[1] < grid.height

    if not _connected(tiles):
        report.ok = False
        report.message = "start configuration is not connected"
        return report

    for i, move in enumerate(moves):
        src = tuple(move.source)
        tgt = tuple(move.target)

        def fail(msg):
            report.steps.append(StepReport(i, False, msg))
            report.ok = False

        if src not in tiles:
            fail(f"pickup {src} is not a tile")
            break
        rest = tiles - {src}
        if not _connected(rest):
            fail(f"IllegalPickup: removing {src} disconnects the tiles")
            break
        if tgt == src:
            fail("placement equals pickup cell")
            break
        if not in_bounds(tgt) or tgt in grid.obstacles:
            fail(f"IllegalPlacement: {tgt} is blocked or out of bounds")
            break
        if tgt in rest:
            fail(f"IllegalPlacement: {tgt} is occupied")
            break
        if not any(nb in rest for nb in _neighbors(tgt)):
            fail(f"IllegalPlacement: {tgt} touches only the picked-up tile")
            break
        expected_pickup = 0 if robot is None else _bfs_dist(tiles, robot, src)
        if expected_pickup is None:
            fail("robot cannot reach the pickup tile")
            break
        if move.pickup_dist != expected_pickup:
            fail(
                f"pickup_dist mismatch: recorded {move.pickup_dist}, "
                f"recomputed {expected_pickup}"
            )
            break
        carry_cells = tiles | {tgt}
        expected_carry = _bfs_dist(carry_cells, src, tgt)
        if expected_carry is None:
            fail("no carry path to the placement cell")
            break
        if move.dropoff_dist != expected_carry:
            fail(
                f"dropoff_dist mismatch: recorded {move.dropoff_dist}, "
                f"recomputed {expected_carry}"
            )
            break
        tiles = rest | {tgt}
        if not _connected(tiles):
            fail("resulting configuration is disconnected")
            break
        robot = tgt
        report.steps.append(StepReport(i, True))
        report.empty_travel_time += expected_pickup
        report.carry_time += expected_carry

    report.total_cost = report.carry_time + report.empty_travel_time
    if report.ok and goal_cells:
        report.final_matches_goal = tiles == set(goal_cells)
        if not report.final_matches_goal:
            report.ok = False
            report.message = "final configuration does not match the goal"
    return report


def validate_record(parsed_map, record):
    """Validate a solved record against its map; other statuses only get
    their prefix replayed (no goal equality demanded)."""
    goal = parsed_map.goal_cells if record.status == "solved" else frozenset()
    robot_start = record.params.get("robot_start")
    if robot_start is not None:
        robot_start = tuple(robot_start)
    report = validate_sequence(
        parsed_map.grid,
        parsed_map.start_cells,
        goal,
        record.sequence,
        robot_start=robot_start,
    )
    if report.ok and record.status == "solved":
        if report.total_cost != record.total_cost:
            report.ok = False
            report.message = (
                f"total mismatch: recorded {record.total_cost}, "
                f"recomputed {report.total_cost}"
            )
        elif (
            report.carry_time != record.carry_time
            or report.empty_travel_time != record.empty_travel_time
        ):
            report.ok = False
            report.message = "carry/empty travel split mismatch"
    return report
