"""RRT* over tile configurations.

The tree's nodes are configurations; edges are chains of at most ``rad``
dropoffs produced by a local planner.  Sampling alternates between random
polyominoes and the goal, with a goal bias that rises as the tree's mean
overlap with the goal grows.  After each insertion the tree is rewired in
two passes: the new node adopts the cheapest feasible parent, then any
node that becomes cheaper through the new node is re-parented.

Re-parenting can move the robot position a chain ends on, which shifts the
pickup distance of the children's first moves.  Following the source
material's cost model, only immediate children are refreshed after a
re-parent; deeper descendants may carry stale cost fields.  Stored move
chains themselves always replay exactly, so the final reported sequence is
re-measured by replaying it from scratch; ``tree_cost`` preserves what the
tree bookkeeping claimed.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    AlreadyAtGoal,
    InfeasibleMatching,
    NoEligibleNode,
    NoMoveFound,
    NoRoom,
    SeparateComponents,
    SizeMismatch,
    Stuck,
)
from .grid import (
    Configuration,
    bfs_on_tiles,
    overlap,
    same_free_component,
    validate_configuration,
)
from .planners import (
    Dropoff,
    PlanStep,
    RobotState,
    apply_dropoff,
    glc_step,
    mwpm_expand_step,
    sequence_costs,
)
from .records import (
    STATUS_NOT_FOUND,
    STATUS_SOLVED,
    RunRecord,
)

CHECKPOINT_INTERVAL = 500
ITERATION_CAP_FACTOR = 20

LOCAL_PLANNERS = {"glc": glc_step, "mwpm-expand": mwpm_expand_step}

_STEP_FAILURES = (Stuck, NoMoveFound, SeparateComponents, SizeMismatch, InfeasibleMatching)


@dataclass(frozen=True)
class PlannerParams:
    bias_base: float = 0.1
    bias_max: float = 0.75
    rad: int = 1
    max_nodes: int = 10_000
    seed: int = 0
    cost_threshold: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.bias_base <= self.bias_max <= 1.0):
            raise ValueError("need 0 <= bias_base <= bias_max <= 1")
        if self.rad < 1:
            raise ValueError("rad must be >= 1")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")


@dataclass
class TreeNode:
    id: int
    config: Configuration
    parent: int | None
    moves: tuple
    cost: int
    robot: tuple | None
    extended_toward_goal: bool = False
    children: set = field(default_factory=set)


class Tree:
    """Search tree with packed tile masks for vectorized overlap queries."""

    def __init__(self, grid, root, goal, robot_start=None):
        self.grid = grid
        self.goal = goal
        self.n_tiles = len(root)
        self._nbits = grid.width * grid.height
        self._nwords = (self._nbits + 63) // 64
        self.nodes = []
        self.index = {}
        self.goal_id = None
        self.nodes_to_first_solution = None
        self.overlap_goal_sum = 0
        self.best_goal_cost_seen = None
        cap = 256
        self._packed = np.zeros((cap, self._nwords), np.uint64)
        self._coms = np.zeros((cap, 2), np.float64)
        self._flags = np.zeros(cap, np.bool_)
        self._goal_packed = self.pack(goal)
        self.add_node(root, None, (), 0, robot_start)

    def __len__(self):
        return len(self.nodes)

    def pack(self, config):
        flat = np.zeros(self._nbits, np.bool_)
        w = self.grid.width
        for x, y in config.tiles:
            flat[y * w + x] = True
        padded = np.zeros(self._nwords * 8, np.uint8)
        bits = np.packbits(flat)
        padded[: bits.size] = bits
        return padded.view(np.uint64)

    def overlaps_with(self, packed_row):
        """Vector of |node_config & other| over all current nodes."""
        return kernels.overlap_counts(
            self._packed[: len(self.nodes)], packed_row
        )

    def mark_extended(self, node_id):
        self.nodes[node_id].extended_toward_goal = True
        self._flags[node_id] = True

    def _grow(self, nid):
        cap = self._packed.shape[0]
        if nid >= cap:
            self._packed = np.vstack([self._packed, np.zeros_like(self._packed)])
            self._coms = np.vstack([self._coms, np.zeros_like(self._coms)])
            self._flags = np.concatenate([self._flags, np.zeros_like(self._flags)])

    def add_node(self, config, parent, moves, cost, robot):
        if config.tiles in self.index:
            raise ValueError("duplicate configuration in tree")
        nid = len(self.nodes)
        node = TreeNode(nid, config, parent, tuple(moves), int(cost), robot)
        self.nodes.append(node)
        self.index[config.tiles] = nid
        if parent is not None:
            self.nodes[parent].children.add(nid)
        self._grow(nid)
        self._packed[nid] = self.pack(config)
        self._coms[nid] = config.center
        self.overlap_goal_sum += int(
            kernels.overlap_counts(
                self._packed[nid : nid + 1], self._goal_packed
            )[0]
        )
        if config.tiles == self.goal.tiles:
            self.goal_id = nid
            if self.nodes_to_first_solution is None:
                self.nodes_to_first_solution = len(self.nodes)
            self._note_goal_cost(node.cost)
        return nid

    def _note_goal_cost(self, cost):
        if self.best_goal_cost_seen is None or cost < self.best_goal_cost_seen:
            self.best_goal_cost_seen = cost

    def goal_cost_current(self):
        return None if self.goal_id is None else self.nodes[self.goal_id].cost

    def is_ancestor(self, maybe_ancestor, below):
        node_id = below
        while node_id is not None:
            if node_id == maybe_ancestor:
                return True
            node_id = self.nodes[node_id].parent
        return False

    def reparent(self, node_id, new_parent, moves, cost, robot):
        node = self.nodes[node_id]
        if node.parent is not None:
            self.nodes[node.parent].children.discard(node_id)
        node.parent = new_parent
        node.moves = tuple(moves)
        node.cost = int(cost)
        node.robot = robot
        self.nodes[new_parent].children.add(node_id)
        if node_id == self.goal_id:
            self._note_goal_cost(node.cost)
        # The chain now ends on a possibly different robot cell; refresh the
        # first pickup distance and cost of immediate children only.
        for child_id in sorted(node.children):
            self._refresh_child(node_id, child_id)

    def _refresh_child(self, parent_id, child_id):
        parent = self.nodes[parent_id]
        child = self.nodes[child_id]
        moves = list(child.moves)
        first = moves[0]
        if parent.robot is None:
            d_pickup = 0
        else:
            d_pickup = bfs_on_tiles(parent.config.tiles, parent.robot).dist(first.source)
        moves[0] = Dropoff(first.source, first.target, int(d_pickup), first.dropoff_dist)
        child.moves = tuple(moves)
        child.cost = parent.cost + sum(m.pickup_dist + m.dropoff_dist for m in moves)
        if child_id == self.goal_id:
            self._note_goal_cost(child.cost)

    def path_ids(self, node_id):
        ids = []
        while node_id is not None:
            ids.append(node_id)
            node_id = self.nodes[node_id].parent
        return list(reversed(ids))


def heuristic(a, b):
    """Similarity between two configurations; larger means closer."""
    ov = overlap(a, b)
    acx, acy = a.center
    bcx, bcy = b.center
    dx = acx - bcx
    dy = acy - bcy
    dist = math.sqrt(dx * dx + dy * dy)
    return (ov + 1.0) / max(dist, 0.1)


def dynamic_bias(tree, g, params):
    """Goal-sampling probability rising with the tree's mean goal overlap."""
    if g.tiles == tree.goal.tiles:
        mean_ov = tree.overlap_goal_sum / len(tree)
    else:
        mean_ov = float(np.mean(tree.overlaps_with(tree.pack(g))))
    return params.bias_base + (params.bias_max - params.bias_base) * (
        mean_ov / len(g)
    )


def sample_random_config(grid, n, rng):
    """Random connected n-tile polyomino on free cells.

    Seeds a uniformly random free cell and grows by repeatedly absorbing a
    uniformly random frontier cell; seeds whose free component is too small
    are redrawn.  Deterministic for a given rng state.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    labels, sizes, free_cells = grid.free_components  # free cells row-major
    if sizes.size == 0 or int(sizes.max()) < n:
        raise NoRoom(f"no free component holds {n} tiles")
    while True:
        sy, sx = free_cells[int(rng.integers(free_cells.shape[0]))]
        if sizes[labels[sy, sx]] < n:
            continue  # restart with a new seed cell
        tiles = {(int(sx), int(sy))}
        frontier = []
        in_frontier = set()

        def absorb(cell):
            for nb in ((cell[0] + 1, cell[1]), (cell[0] - 1, cell[1]),
                       (cell[0], cell[1] + 1), (cell[0], cell[1] - 1)):
                if nb in tiles or nb in in_frontier or not grid.is_free(nb):
                    continue
                frontier.append(nb)
                in_frontier.add(nb)

        absorb((int(sx), int(sy)))
        while len(tiles) < n:
            cell = frontier.pop(int(rng.integers(len(frontier))))
            in_frontier.discard(cell)
            tiles.add(cell)
            absorb(cell)
        return Configuration(tiles)


def nearest_node(tree, q, exclude_extended_to_goal=False):
    """Id of the node maximizing the heuristic toward q; ties -> lowest id."""
    n = len(tree)
    ov = tree.overlaps_with(tree.pack(q))
    qcx, qcy = q.center
    dx = tree._coms[:n, 0] - qcx
    dy = tree._coms[:n, 1] - qcy
    dist = np.sqrt(dx * dx + dy * dy)
    h = (ov + 1.0) / np.maximum(dist, 0.1)
    if exclude_extended_to_goal:
        flags = tree._flags[:n]
        if flags.all():
            raise NoEligibleNode("all nodes already extended toward the goal")
        h[flags] = -np.inf
    return int(np.argmax(h))


def _advance(grid, config, robot_pos, target, rad, step_fn):
    """Apply up to ``rad`` local-planner dropoffs from config toward target.

    Returns (moves, end_config, end_robot, chain_cost, reached).
    """
    moves = []
    cur = config
    robot = RobotState(robot_pos)
    cost = 0
    reached = cur.tiles == target.tiles
    while not reached and len(moves) < rad:
        try:
            proposal = step_fn(cur, target, grid)
        except AlreadyAtGoal:
            reached = True
            break
        except _STEP_FAILURES:
            break
        cur, robot, measured = apply_dropoff(cur, robot, proposal, grid)
        moves.append(measured)
        cost += measured.pickup_dist + measured.dropoff_dist
        reached = cur.tiles == target.tiles
    return moves, cur, robot.position, cost, reached


def extend(tree, from_id, q, grid, params, step_fn):
    """Candidate node after extending ``from_id`` toward q, or None."""
    node = tree.nodes[from_id]
    moves, end, robot_pos, cost, _ = _advance(
        grid, node.config, node.robot, q, params.rad, step_fn
    )
    if not moves:
        return None
    return TreeNode(
        id=-1,
        config=end,
        parent=from_id,
        moves=tuple(moves),
        cost=node.cost + cost,
        robot=robot_pos,
    )


def insert_or_update(tree, cand):
    """Insert a candidate, or re-parent the node holding its configuration
    when the candidate path is cheaper.  Returns (outcome, node_id)."""
    existing_id = tree.index.get(cand.config.tiles)
    if existing_id is None:
        nid = tree.add_node(cand.config, cand.parent, cand.moves, cand.cost, cand.robot)
        return "inserted", nid
    node = tree.nodes[existing_id]
    if cand.cost < node.cost and not tree.is_ancestor(existing_id, cand.parent):
        tree.reparent(existing_id, cand.parent, cand.moves, cand.cost, cand.robot)
        return "updated", existing_id
    return "ignored", existing_id


def rewire(tree, new_id, grid, params, step_fn):
    """Two-pass rewiring around a freshly inserted node.

    Pass 1 re-parents the new node to the cheapest feasible parent; pass 2
    re-parents any node made cheaper through the new node.  Feasibility is
    a local-planner chain of at most ``rad`` dropoffs landing exactly on
    the target configuration.  Nodes overlapping by less than n - rad tiles
    cannot be within rad dropoffs and are skipped without a planner call.
    """
    rewired = 0
    node = tree.nodes[new_id]
    ov = tree.overlaps_with(tree._packed[new_id])
    candidates = np.flatnonzero(ov >= tree.n_tiles - params.rad)

    best_parent = node.parent
    best_cost = node.cost
    best_chain = None
    best_robot = None
    for t_id in candidates:
        t_id = int(t_id)
        if t_id == new_id or t_id == node.parent:
            continue
        t = tree.nodes[t_id]
        # a chain needs >= n - overlap dropoffs, each carrying >= one cell
        if t.cost + (tree.n_tiles - int(ov[t_id])) >= best_cost:
            continue
        moves, _, robot_pos, cost, reached = _advance(
            grid, t.config, t.robot, node.config, params.rad, step_fn
        )
        if reached and moves and t.cost + cost < best_cost:
            best_parent = t_id
            best_cost = t.cost + cost
            best_chain = tuple(moves)
            best_robot = robot_pos
    if best_chain is not None:
        tree.reparent(new_id, best_parent, best_chain, best_cost, best_robot)
        rewired += 1
        node = tree.nodes[new_id]

    for k_id in candidates:
        k_id = int(k_id)
        if k_id == new_id or k_id == 0:
            continue
        k = tree.nodes[k_id]
        if node.cost + (tree.n_tiles - int(ov[k_id])) >= k.cost:
            continue
        if tree.is_ancestor(k_id, new_id):
            continue
        moves, _, robot_pos, cost, reached = _advance(
            grid, node.config, node.robot, k.config, params.rad, step_fn
        )
        if reached and moves and node.cost + cost < k.cost:
            tree.reparent(k_id, new_id, tuple(moves), node.cost + cost, robot_pos)
            rewired += 1
    return rewired


def _inject_initial_solution(tree, steps, rad):
    """Pre-insert a solved step chain as nodes, chunked by rad."""
    parent = 0
    for i in range(0, len(steps), rad):
        chunk = steps[i : i + rad]
        config = chunk[-1].after
        moves = tuple(st.dropoff for st in chunk)
        cost = tree.nodes[parent].cost + sum(
            m.pickup_dist + m.dropoff_dist for m in moves
        )
        robot = chunk[-1].dropoff.target
        existing = tree.index.get(config.tiles)
        if existing is None:
            parent = tree.add_node(config, parent, moves, cost, robot)
        else:
            node = tree.nodes[existing]
            if cost < node.cost and not tree.is_ancestor(existing, parent):
                tree.reparent(existing, parent, moves, cost, robot)
            parent = existing


def _replay_path(tree, grid, start, robot_start):
    """Replay the best root-to-goal chain; returns measured PlanSteps."""
    steps = []
    cur = start
    robot = RobotState(robot_start)
    for nid in tree.path_ids(tree.goal_id):
        for move in tree.nodes[nid].moves:
            after, robot, measured = apply_dropoff(cur, robot, move, grid)
            steps.append(PlanStep(cur, measured, after))
            cur = after
    return steps


def plan(
    s,
    g,
    grid,
    params,
    local_planner="glc",
    initial_solution=None,
    robot_start=None,
    time_limit=None,
    instance="",
    planner_id=None,
):
    """Run the RRT* loop and return a RunRecord.

    Stops when ``max_nodes`` nodes exist, when a goal path with tree cost
    at or below ``cost_threshold`` exists, or when the optional wall-clock
    limit expires.  ``total_cost`` is measured by replaying the extracted
    sequence; ``tree_cost`` is the tree's (possibly stale) bookkeeping.
    """
    t0 = time.perf_counter()
    step_fn = LOCAL_PLANNERS[local_planner]
    if planner_id is None:
        planner_id = f"rrt-{local_planner}"
    if len(s) != len(g):
        raise SizeMismatch(f"|S|={len(s)} vs |G|={len(g)}")
    validate_configuration(s, grid)
    validate_configuration(g, grid, require_connected=False)
    if robot_start is not None and robot_start not in s.tiles:
        raise ValueError("robot_start must lie on the start configuration")
    if not same_free_component(grid, s, g):
        raise SeparateComponents("start and goal in different free components")

    rng = np.random.default_rng(params.seed)
    tree = Tree(grid, s, g, robot_start)
    checkpoints = []
    next_checkpoint = CHECKPOINT_INTERVAL

    if initial_solution:
        _inject_initial_solution(tree, initial_solution, params.rad)

    if s.tiles != g.tiles:
        iter_cap = ITERATION_CAP_FACTOR * params.max_nodes
        iters = 0
        while len(tree) < params.max_nodes and iters < iter_cap:
            if time_limit is not None and time.perf_counter() - t0 > time_limit:
                break
            current = tree.goal_cost_current()
            if (
                params.cost_threshold is not None
                and current is not None
                and current <= params.cost_threshold
            ):
                break
            iters += 1
            bias = dynamic_bias(tree, g, params)
            goal_directed = rng.random() < bias
            if goal_directed:
                try:
                    dad_id = nearest_node(tree, g, exclude_extended_to_goal=True)
                    q = g
                except NoEligibleNode:
                    goal_directed = False
                    q = sample_random_config(grid, len(s), rng)
                    dad_id = nearest_node(tree, q)
            else:
                q = sample_random_config(grid, len(s), rng)
                dad_id = nearest_node(tree, q)
            if goal_directed:
                tree.mark_extended(dad_id)
            cand = extend(tree, dad_id, q, grid, params, step_fn)
            if cand is None:
                continue
            outcome, nid = insert_or_update(tree, cand)
            if outcome == "inserted":
                rewire(tree, nid, grid, params, step_fn)
            while len(tree) >= next_checkpoint:
                checkpoints.append((next_checkpoint, tree.best_goal_cost_seen))
                next_checkpoint += CHECKPOINT_INTERVAL

    checkpoints.append((len(tree), tree.best_goal_cost_seen))

    params_dict = {
        "bias_base": params.bias_base,
        "bias_max": params.bias_max,
        "rad": params.rad,
        "max_nodes": params.max_nodes,
        "cost_threshold": params.cost_threshold,
        "local_planner": local_planner,
        "robot_start": list(robot_start) if robot_start else None,
        "time_limit": time_limit,
    }
    record = RunRecord(
        instance=instance,
        planner=planner_id,
        params=params_dict,
        seed=params.seed,
        status=STATUS_NOT_FOUND,
        nodes_created=len(tree),
        nodes_to_first_solution=tree.nodes_to_first_solution,
        checkpoints=checkpoints,
    )
    if tree.goal_id is not None:
        steps = _replay_path(tree, grid, s, robot_start)
        carry, empty, total = sequence_costs(steps)
        record.status = STATUS_SOLVED
        record.sequence = [st.dropoff for st in steps]
        record.carry_time = carry
        record.empty_travel_time = empty
        record.total_cost = total
        record.tree_cost = tree.goal_cost_current()
    record.wall_time = time.perf_counter() - t0
    return record
