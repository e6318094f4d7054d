"""Deterministic instance generators: lower-bound families, random maps,
and the five stand-in benchmark maps.

The detour family puts an obstacle wall between two parallel tile rows so
matched BFS distances grow with the wall length.  The c-shape family keeps
the matching cost constant while any actual reconfiguration must carry a
tile around a Theta(n) perimeter; mirroring the c doubles it into a shape
whose solutions also need Theta(n) empty travel between the two gaps.
"""

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, TooSmall
from .grid import Configuration, GridMap
from .rrt import sample_random_config


@dataclass(frozen=True)
class InstanceSpec:
    grid: GridMap
    start: Configuration
    goal: Configuration
    label: str


def gen_obstacle_detour(n, k):
    """Two horizontal n-tile rows two units apart with a centered k-long
    obstacle wall between them."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    wall_from = (n - k) // 2
    shift = 1 - min(0, wall_from)
    xs = range(shift, shift + n)
    wall = [(wall_from + shift + i, 1) for i in range(k)]
    width = max(shift + n - 1, wall_from + shift + k - 1 if k else 0) + 2
    grid = GridMap(width, 3, frozenset(wall))
    start = Configuration((x, 0) for x in xs)
    goal = Configuration((x, 2) for x in xs)
    return InstanceSpec(grid, start, goal, f"detour(n={n},k={k})")


def _rectangle_outline(x0, y0, w, h):
    cells = set()
    for x in range(x0, x0 + w):
        cells.add((x, y0))
        cells.add((x, y0 + h - 1))
    for y in range(y0, y0 + h):
        cells.add((x0, y))
        cells.add((x0 + w - 1, y))
    return cells

GAP = 2  # terminal gap height of the c families


def _c_dimensions(n):
    # outline tiles: 2w + 2h - 4, minus the 2-cell gap
    if n % 2 != 0 or n < 10:
        raise TooSmall(f"c-shape needs an even tile count >= 10, got {n}")
    total = (n + 4 + GAP) // 2  # w + h
    h = total // 2
    w = total - h
    if h < GAP + 2 or w < 3:
        raise TooSmall(f"c-shape cannot be formed with {n} tiles")
    return w, h


def gen_c_shape(n):
    """Square-like c: a rectangle outline with a 2-cell gap in its right
    edge; the goal shifts one terminal tile across the gap."""
    w, h = _c_dimensions(n)
    x0, y0 = 1, 1
    x_right = x0 + w - 1
    gap_top = y0 + (h - GAP) // 2
    cells = _rectangle_outline(x0, y0, w, h)
    cells -= {(x_right, gap_top), (x_right, gap_top + 1)}
    assert len(cells) == n
    start = Configuration(cells)
    terminal = (x_right, gap_top - 1)
    fill = (x_right, gap_top + 1)
    goal = Configuration(cells - {terminal} | {fill})
    grid = GridMap(w + 2, h + 2)
    return InstanceSpec(grid, start, goal, f"c-shape(n={n})")


def _cc_dimensions(n):
    # two outlines sharing the mirror column: 4w + 3h - 8 - 2*GAP tiles
    target = n + 8 + 2 * GAP
    best = None
    for h in range(GAP + 2, target // 3 + 1):
        rest = target - 3 * h
        if rest % 4 != 0:
            continue
        w = rest // 4
        if w < 3:
            continue
        if best is None or abs(w - h) < abs(best[0] - best[1]):
            best = (w, h)
    if best is None:
        raise TooSmall(f"cc-shape cannot be formed with {n} tiles")
    return best


def gen_cc_shape(n):
    """The c mirrored along its left edge: two gaps on the outer edges,
    and the goal shifts one terminal tile across each gap."""
    w, h = _cc_dimensions(n)
    y0 = 1
    mirror_x = w  # shared column; right half spans [mirror_x, mirror_x+w-1]
    right = _rectangle_outline(mirror_x, y0, w, h)
    left = _rectangle_outline(mirror_x - w + 1, y0, w, h)
    gap_top = y0 + (h - GAP) // 2
    x_right = mirror_x + w - 1
    x_left = mirror_x - w + 1
    cells = left | right
    cells -= {(x_right, gap_top), (x_right, gap_top + 1)}
    cells -= {(x_left, gap_top), (x_left, gap_top + 1)}
    assert len(cells) == n, (len(cells), n)
    start = Configuration(cells)
    goal_cells = set(cells)
    for x_side in (x_left, x_right):
        goal_cells -= {(x_side, gap_top - 1)}
        goal_cells |= {(x_side, gap_top + 1)}
    goal = Configuration(goal_cells)
    grid = GridMap(2 * w + 1, h + 2)
    return InstanceSpec(grid, start, goal, f"cc-shape(n={n})")


def gen_random_map(width, height, n, density, seed, max_retries=200):
    """Uniform i.i.d. obstacles at the given fraction of the whole grid,
    plus two n-tile polyominoes grown in one shared free component.

    Deterministic per seed.  Raises Infeasible when no layout within the
    retry budget can host both polyominoes (expected at extreme density).
    """
    if not 0.0 <= density < 1.0:
        raise ValueError("density must be in [0, 1)")
    rng = np.random.default_rng(seed)
    cell_count = width * height
    num_obstacles = round(density * cell_count)
    for _ in range(max_retries):
        chosen = rng.choice(cell_count, size=num_obstacles, replace=False)
        obstacles = frozenset(
            (int(i % width), int(i // width)) for i in chosen
        )
        grid = GridMap(width, height, obstacles)
        labels, sizes, _ = grid.free_components
        if sizes.size == 0 or int(sizes.max()) < n:
            continue
        start = sample_random_config(grid, n, rng)
        sx, sy = start.sorted_tiles[0]
        start_label = int(labels[sy, sx])
        goal = None
        for _ in range(50):
            cand = sample_random_config(grid, n, rng)
            cx, cy = cand.sorted_tiles[0]
            if int(labels[cy, cx]) == start_label:
                goal = cand
                break
        if goal is None:
            continue
        label = f"random(w={width},h={height},n={n},density={density},seed={seed})"
        return InstanceSpec(grid, start, goal, label)
    raise Infeasible(
        f"no feasible instance at density {density} within {max_retries} layouts"
    )


# ---------------------------------------------------------------------------
# stand-in benchmark maps (30x30, n = 15)
# ---------------------------------------------------------------------------

def _block(x0, y0, w, h):
    return {(x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h)}


def _standin_map1():
    # start and goal centered on the same spot, heavy overlap
    grid = GridMap(30, 30)
    start = Configuration(_block(13, 10, 3, 5))
    goal = Configuration(_block(12, 11, 5, 3))
    return InstanceSpec(grid, start, goal, "map1")


def _standin_map2():
    # adjacent shapes that enclose empty space (U facing up, U facing down)
    grid = GridMap(30, 30)
    start = (
        {(x, 16) for x in range(4, 11)}
        | {(4, y) for y in range(12, 16)}
        | {(10, y) for y in range(12, 16)}
    )
    goal = (
        {(x, 12) for x in range(12, 19)}
        | {(12, y) for y in range(13, 17)}
        | {(18, y) for y in range(13, 17)}
    )
    return InstanceSpec(grid, Configuration(start), Configuration(goal), "map2")


def _standin_map3():
    # two c-shapes whose openings face each other across empty space
    grid = GridMap(30, 30)
    start = (
        {(6, y) for y in range(10, 17)}
        | {(x, 10) for x in range(7, 11)}
        | {(x, 16) for x in range(7, 11)}
    )
    goal = (
        {(22, y) for y in range(10, 17)}
        | {(x, 10) for x in range(18, 22)}
        | {(x, 16) for x in range(18, 22)}
    )
    return InstanceSpec(grid, Configuration(start), Configuration(goal), "map3")


def _standin_map4():
    # vertical wall with a bottom slit; start and goal on opposite sides
    wall = {(15, y) for y in range(0, 25)}
    grid = GridMap(30, 30, frozenset(wall))
    start = Configuration(_block(4, 8, 3, 5))
    goal = Configuration(_block(23, 8, 3, 5))
    return InstanceSpec(grid, start, goal, "map4")


def _standin_map5():
    # two staggered walls forming an S-shaped corridor
    walls = {(x, 10) for x in range(0, 22)} | {(x, 20) for x in range(8, 30)}
    grid = GridMap(30, 30, frozenset(walls))
    start = Configuration(_block(2, 2, 5, 3))
    goal = Configuration(_block(23, 25, 5, 3))
    return InstanceSpec(grid, start, goal, "map5")


def standin_instances():
    """The five shipped benchmark maps, keyed map1..map5."""
    return {
        spec.label: spec
        for spec in (
            _standin_map1(),
            _standin_map2(),
            _standin_map3(),
            _standin_map4(),
            _standin_map5(),
        )
    }
