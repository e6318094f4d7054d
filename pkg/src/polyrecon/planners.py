"""Single-dropoff local planners and move application.

Two greedy planners are provided.  The component-growing planner is
complete: it either closes the gap between the configurations by one cell
per move or grows the largest shared component by one tile per move.  The
matching-based planner moves the leaf tile with the longest matched
distance toward its matched goal; it is not complete and reports Stuck.

Both planners choose a (pickup, placement) pair and leave distance
measurement to :func:`apply_dropoff`, which recomputes the pickup walk
(over the current tiles, from the robot position) and the carry walk (over
the tiles plus the placement cell, vacated cell included).
"""

from dataclasses import dataclass

from .errors import (
    AlreadyAtGoal,
    BrokenChain,
    BudgetExceeded,
    DisconnectedResult,
    IllegalPickup,
    IllegalPlacement,
    InfeasibleMatching,
    NoMoveFound,
    SeparateComponents,
    SizeMismatch,
    Stuck,
)
from .grid import (
    Configuration,
    bfs_free,
    carry_field,
    is_connected,
    largest_overlap_component,
    leaf_tiles,
    neighbors4,
    row_major_key,
    same_free_component,
    tile_field,
)
from .matching import Matching, distance_matrix, solve_assignment


@dataclass(frozen=True)
class Dropoff:
    """One atomic move: pick up ``source``, place at ``target``.

    Planner step functions return dropoffs with zeroed distances; the
    authoritative ``pickup_dist``/``dropoff_dist`` are filled in by
    :func:`apply_dropoff`.
    """

    source: tuple
    target: tuple
    pickup_dist: int = 0
    dropoff_dist: int = 0


@dataclass(frozen=True)
class RobotState:
    """Robot position marker; None means not placed yet (first move free)."""

    position: tuple | None = None


@dataclass(frozen=True)
class PlanStep:
    before: Configuration
    dropoff: Dropoff
    after: Configuration


def default_step_budget(n, grid):
    return 4 * n * (grid.width + grid.height)


def _free_neighbors(config, grid):
    """Free cells edge-adjacent to the configuration (not on it)."""
    cells = set()
    for tile in config.tiles:
        for nb in neighbors4(tile):
            if nb not in config.tiles and grid.is_free(nb):
                cells.add(nb)
    return sorted(cells, key=row_major_key)


def _placement_ok(config, source, target):
    """Target must touch a tile other than the one being picked up."""
    rest = config.tiles - {source}
    if target in rest:
        return False
    return any(nb in rest for nb in neighbors4(target))


def apply_dropoff(config, robot, move, grid):
    """Validate and apply one dropoff.

    Returns ``(after, robot_after, measured)`` where ``measured`` is the
    dropoff with recomputed pickup and carry distances.
    """
    src, tgt = move.source, move.target
    if src not in config.tiles or src not in leaf_tiles(config):
        raise IllegalPickup(f"{src} is not a leaf tile")
    if tgt == src:
        raise IllegalPlacement("placement equals pickup cell")
    if not grid.is_free(tgt):
        raise IllegalPlacement(f"{tgt} is an obstacle or out of bounds")
    rest = config.tiles - {src}
    if tgt in rest:
        raise IllegalPlacement(f"{tgt} is occupied")
    if rest and not any(nb in rest for nb in neighbors4(tgt)):
        raise IllegalPlacement(f"{tgt} would touch only the picked-up tile")
    if not rest:
        raise IllegalPlacement("single-tile configurations cannot be moved")
    after = Configuration(rest | {tgt})
    if not is_connected(after.tiles):
        raise DisconnectedResult(f"moving {src} to {tgt} disconnects the tiles")
    if robot.position is None:
        d_pickup = 0
    else:
        d_pickup = tile_field(config, robot.position).dist(src)
        if d_pickup is None:
            raise DisconnectedResult("robot cannot reach the pickup tile")
    d_carry = carry_field(config, tgt, src).dist(tgt)
    if d_carry is None:
        raise DisconnectedResult("no carry path to the placement cell")
    measured = Dropoff(src, tgt, d_pickup, d_carry)
    return after, RobotState(tgt), measured


def glc_step(s, g, grid):
    """One move of the component-growing planner.

    Without overlap, closes the start-goal gap by one cell; with overlap,
    moves a leaf tile from outside the largest shared component onto a goal
    cell adjacent to it.  Candidate pairs are tried closest-first and pairs
    violating the dropoff invariants are skipped.
    """
    if s.tiles == g.tiles:
        raise AlreadyAtGoal("start equals goal")
    if len(s) != len(g):
        raise SizeMismatch(f"|S|={len(s)} vs |G|={len(g)}")
    if len(s) == 1:
        raise NoMoveFound("single-tile configurations cannot be reconfigured")

    shared = s.tiles & g.tiles
    if not shared:
        return _glc_step_no_overlap(s, g, grid)
    return _glc_step_overlap(s, g, grid)


def _glc_step_no_overlap(s, g, grid):
    from_goal = bfs_free(grid, g.sorted_tiles)
    reachable = [
        (from_goal.dist(t), row_major_key(t), t)
        for t in s.sorted_tiles
        if from_goal.reachable(t)
    ]
    if not reachable:
        raise SeparateComponents("no free path between the configurations")
    s_end = min(reachable)[2]
    from_s_end = bfs_free(grid, [s_end])
    g_end = min(
        (from_s_end.dist(t), row_major_key(t), t)
        for t in g.sorted_tiles
        if from_s_end.reachable(t)
    )[2]

    from_g_end = bfs_free(grid, [g_end])
    targets = sorted(
        (
            (from_g_end.dist(c), row_major_key(c), c)
            for c in _free_neighbors(s, grid)
            if from_g_end.reachable(c)
        ),
    )
    leaves = leaf_tiles(s)
    for _, _, target in targets:
        carry = carry_field(s, target, target)
        candidates = sorted(
            (carry.dist(p), row_major_key(p), p)
            for p in leaves
            if carry.reachable(p)
        )
        for _, _, pick in candidates:
            if _placement_ok(s, pick, target):
                return Dropoff(pick, target)
    raise NoMoveFound("no valid dropoff in the no-overlap branch")


def _glc_step_overlap(s, g, grid):
    component = largest_overlap_component(s, g)
    growth_cells = sorted(
        (
            c
            for c in g.tiles - component
            if any(nb in component for nb in neighbors4(c))
        ),
        key=row_major_key,
    )
    movable = sorted(leaf_tiles(s) - component, key=row_major_key)
    if not growth_cells or not movable:
        raise NoMoveFound("overlap branch has no candidates (goal disconnected?)")
    candidates = []
    for target in growth_cells:
        carry = carry_field(s, target, target)
        for pick in movable:
            d = carry.dist(pick)
            if d is not None:
                candidates.append((d, row_major_key(pick), row_major_key(target), pick, target))
    candidates.sort()
    for _, _, _, pick, target in candidates:
        if _placement_ok(s, pick, target):
            return Dropoff(pick, target)
    raise NoMoveFound("no valid dropoff in the overlap branch")


def glc_solve(s, g, grid, step_budget=None, robot_start=None):
    """Iterate glc_step until the goal is reached.

    Complete on valid same-component instances; the budget only converts
    nontermination bugs into hard failures.
    """
    if len(s) != len(g):
        raise SizeMismatch(f"|S|={len(s)} vs |G|={len(g)}")
    if robot_start is not None and robot_start not in s.tiles:
        raise ValueError("robot_start must lie on the start configuration")
    if not same_free_component(grid, s, g):
        raise SeparateComponents("start and goal in different free components")
    if step_budget is None:
        step_budget = default_step_budget(len(s), grid)
    steps = []
    cur = s
    robot = RobotState(robot_start)
    while cur.tiles != g.tiles:
        if len(steps) >= step_budget:
            raise BudgetExceeded(f"no solution within {step_budget} steps")
        move = glc_step(cur, g, grid)
        after, robot, measured = apply_dropoff(cur, robot, move, grid)
        steps.append(PlanStep(cur, measured, after))
        cur = after
    return steps


def _settled_tiles_matching(grid, s, g):
    """Minimum-weight matching preferring tiles that are already home.

    Cost ties between optimal matchings are broken toward the fewest
    positive-distance pairs: a "shift chain" through settled tiles would
    otherwise mark them as mismatched and send the expansion planner
    oscillating around occupied goal cells.  Scaling the primary cost by
    n + 1 keeps it dominant over the at-most-n secondary term.
    """
    dm = distance_matrix(grid, s, g)
    n = dm.d.shape[0]
    combined = dm.d * (n + 1) + (dm.d > 0)
    cols, _ = solve_assignment(combined)
    pairs = []
    for i in range(n):
        dist = int(dm.d[i, cols[i]])
        if dist >= dm.sentinel:
            raise InfeasibleMatching(
                "every perfect matching pairs at least one unreachable tile"
            )
        pairs.append((dm.starts[i], dm.goals[int(cols[i])], dist))
    return Matching(pairs=tuple(pairs), total_cost=sum(p[2] for p in pairs))


def mwpm_expand_step(s, g, grid):
    """One move of the matching-based planner.

    Among matched pairs whose start tile is a leaf and whose distance is
    positive, moves the longest-distance one to the free neighbor cell of
    the configuration closest to its matched goal cell.
    """
    if s.tiles == g.tiles:
        raise AlreadyAtGoal("start equals goal")
    if len(s) != len(g):
        raise SizeMismatch(f"|S|={len(s)} vs |G|={len(g)}")
    matching = _settled_tiles_matching(grid, s, g)
    leaves = leaf_tiles(s)
    eligible = sorted(
        (
            (-dist, row_major_key(pick), row_major_key(goal_cell), pick, goal_cell)
            for pick, goal_cell, dist in matching.pairs
            if pick in leaves and dist > 0
        ),
    )
    if not eligible:
        raise Stuck("no matched leaf tile with positive distance")
    free_nbrs = _free_neighbors(s, grid)
    for _, _, _, pick, goal_cell in eligible:
        toward = bfs_free(grid, [goal_cell])
        targets = sorted(
            (toward.dist(c), row_major_key(c), c)
            for c in free_nbrs
            if toward.reachable(c)
        )
        for _, _, target in targets:
            if _placement_ok(s, pick, target):
                return Dropoff(pick, target)
    raise Stuck("no matched leaf pair admits a valid dropoff")


def mwpm_expand_solve(s, g, grid, step_budget=None, robot_start=None):
    """Iterate mwpm_expand_step until goal, stuck, or budget.

    Returns ``(solved, steps)``.  Stuck is reported on a planner Stuck, on
    revisiting a configuration (cycle), or on budget exhaustion.
    """
    if len(s) != len(g):
        raise SizeMismatch(f"|S|={len(s)} vs |G|={len(g)}")
    if robot_start is not None and robot_start not in s.tiles:
        raise ValueError("robot_start must lie on the start configuration")
    if not same_free_component(grid, s, g):
        raise SeparateComponents("start and goal in different free components")
    if step_budget is None:
        step_budget = default_step_budget(len(s), grid)
    steps = []
    cur = s
    robot = RobotState(robot_start)
    visited = {cur.tiles}
    while cur.tiles != g.tiles:
        if len(steps) >= step_budget:
            return False, steps
        try:
            move = mwpm_expand_step(cur, g, grid)
        except Stuck:
            return False, steps
        after, robot, measured = apply_dropoff(cur, robot, move, grid)
        steps.append(PlanStep(cur, measured, after))
        cur = after
        if cur.tiles in visited:
            return False, steps
        visited.add(cur.tiles)
    return True, steps


def sequence_costs(steps):
    """(carry_time, empty_travel_time, total) for a chained step list."""
    carry = 0
    empty = 0
    prev = None
    for step in steps:
        if prev is not None and step.before.tiles != prev.tiles:
            raise BrokenChain("step does not start from the previous result")
        expected = step.before.tiles - {step.dropoff.source} | {step.dropoff.target}
        if step.after.tiles != expected:
            raise BrokenChain("step result does not match its dropoff")
        carry += step.dropoff.dropoff_dist
        empty += step.dropoff.pickup_dist
        prev = step.after
    return carry, empty, carry + empty
