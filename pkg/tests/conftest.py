"""Shared test oracles: plain-Python reimplementations used to cross-check
the package's kernel-backed operations."""

from collections import deque

import numpy as np
import pytest

from polyrecon.grid import Configuration, GridMap
from polyrecon.maptext import ParsedMap


def neighbors(cell):
    x, y = cell
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def brute_connected(cells):
    cells = set(cells)
    if len(cells) <= 1:
        return True
    seed = next(iter(cells))
    seen = {seed}
    queue = deque([seed])
    while queue:
        cur = queue.popleft()
        for nb in neighbors(cur):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(cells)


def brute_bfs(allowed, sources):
    """Multi-source BFS over an explicit cell set; returns dict cell -> dist."""
    allowed = set(allowed)
    dist = {}
    queue = deque()
    for src in sources:
        if src not in dist:
            dist[src] = 0
            queue.append(src)
    while queue:
        cur = queue.popleft()
        for nb in neighbors(cur):
            if nb in allowed and nb not in dist:
                dist[nb] = dist[cur] + 1
                queue.append(nb)
    return dist


def brute_leaves(cells):
    """Leaf tiles by brute-force removal and connectivity recheck."""
    cells = set(cells)
    if len(cells) == 1:
        return set(cells)
    return {c for c in cells if brute_connected(cells - {c})}


def random_polyomino(rng, n, origin=(0, 0), bound=64):
    """Seeded connected n-tile blob, independent of the package sampler."""
    ox, oy = origin
    tiles = {(ox, oy)}
    frontier = [(ox + 1, oy), (ox - 1, oy), (ox, oy + 1), (ox, oy - 1)]
    while len(tiles) < n:
        idx = int(rng.integers(len(frontier)))
        cell = frontier.pop(idx)
        if cell in tiles or abs(cell[0] - ox) > bound or abs(cell[1] - oy) > bound:
            continue
        tiles.add(cell)
        for nb in neighbors(cell):
            if nb not in tiles:
                frontier.append(nb)
    return tiles


def shift_to_grid(tiles, margin=1):
    """Translate a tile set into nonnegative coordinates plus a margin."""
    min_x = min(c[0] for c in tiles)
    min_y = min(c[1] for c in tiles)
    return {(x - min_x + margin, y - min_y + margin) for x, y in tiles}


def parsed_from_instance(inst):
    return ParsedMap(
        inst.grid, frozenset(inst.start.tiles), frozenset(inst.goal.tiles)
    )


def enumerate_legal_dropoffs(config, grid):
    """All (source, target) pairs satisfying the dropoff invariants."""
    from polyrecon.errors import PolyreconError
    from polyrecon.planners import Dropoff, RobotState, apply_dropoff

    legal = []
    cells = {
        nb
        for tile in config.tiles
        for nb in neighbors(tile)
        if grid.is_free(nb) and nb not in config.tiles
    }
    for src in config.tiles:
        for tgt in cells:
            try:
                apply_dropoff(config, RobotState(None), Dropoff(src, tgt), grid)
            except PolyreconError:
                continue
            legal.append((src, tgt))
    return legal


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def empty_grid_30():
    return GridMap(30, 30)


@pytest.fixture
def stuck_instance():
    """The matching planner's classic dead end: a horizontal tromino whose
    middle tile must move up (the goal is 4-disconnected by design)."""
    grid = GridMap(3, 2)
    start = Configuration.of([(0, 0), (1, 0), (2, 0)])
    goal = Configuration.of([(0, 0), (1, 1), (2, 0)])
    return grid, start, goal
