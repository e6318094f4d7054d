"""Minimum-weight perfect matching between start and goal tiles.

Distances come from obstacle-aware BFS over the workspace.  The solver is
an O(n^3) Hungarian algorithm with dual potentials; among cost-optimal
matchings it returns the lexicographically smallest pair list (rows in
canonical tile order, each matched to the smallest possible column), which
keeps the output independent of incidental tie ordering.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleMatching, SizeMismatch
from .grid import bfs_free


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise geodesic distances; entries >= sentinel mean unreachable."""

    starts: tuple
    goals: tuple
    d: np.ndarray
    sentinel: int


@dataclass(frozen=True)
class Matching:
    """A bijection start tile -> goal tile with its summed distance."""

    pairs: tuple  # of (start_cell, goal_cell, distance)
    total_cost: int


def distance_matrix(grid, s, g):
    """BFS distance from every start tile to every goal tile.

    One multi-target BFS per start tile.  Unreachable pairs get a finite
    sentinel exceeding any feasible matching total, so the solver only
    touches them when no all-reachable matching exists.
    """
    starts = s.sorted_tiles
    goals = g.sorted_tiles
    n = len(starts)
    if n != len(goals):
        raise SizeMismatch(f"|S|={n} vs |G|={len(goals)}")
    sentinel = n * grid.unreachable_sentinel
    d = np.empty((n, n), np.int64)
    for i, tile in enumerate(starts):
        field = bfs_free(grid, [tile])
        for j, target in enumerate(goals):
            dist = field.dist(target)
            d[i, j] = sentinel if dist is None else dist
    return DistanceMatrix(starts=starts, goals=goals, d=d, sentinel=sentinel)


def _hungarian(cost):
    """Solve the assignment problem; returns (col_of_row, u, v).

    Classic potential-based Hungarian.  The returned duals satisfy
    ``u[i] + v[j] <= cost[i, j]`` everywhere, with equality on every edge of
    every optimal matching (complementary slackness).
    """
    n = cost.shape[0]
    big = np.iinfo(np.int64).max // 4
    u = np.zeros(n + 1, np.int64)
    v = np.zeros(n + 1, np.int64)
    p = np.zeros(n + 1, np.int64)  # p[j]: 1-based row matched to column j
    way = np.zeros(n + 1, np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, big, np.int64)
        used = np.zeros(n + 1, np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            better = ~used[1:] & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(used[1:], big, minv[1:])
            j1 = int(np.argmin(masked)) + 1
            delta = int(masked[j1 - 1])
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][~used[1:]] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = int(way[j0])
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.empty(n, np.int64)
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]


def _augment(row, adj_cols, match_col, match_row, locked_for):
    """Find an alternating path from ``row`` to a free column (Kuhn)."""
    visited = set()
    stack = [(row, 0)]
    path = []
    while stack:
        r, k = stack[-1]
        cols = adj_cols[r]
        if k >= len(cols):
            stack.pop()
            if path:
                path.pop()
            continue
        stack[-1] = (r, k + 1)
        c = int(cols[k])
        if c in visited:
            continue
        visited.add(c)
        owner = int(match_row[c])
        if owner == -1:
            path.append((r, c))
            for rr, cc in path:
                match_col[rr] = cc
                match_row[cc] = rr
            return True
        if owner < locked_for:
            continue  # locked rows cannot be displaced
        path.append((r, c))
        stack.append((owner, 0))
    return False


def _lexicographic_refine(adj_cols, col_of_row):
    """Rewrite an optimal matching into the lexicographically smallest one
    within the admissible (zero-reduced-cost) graph."""
    n = len(adj_cols)
    match_col = col_of_row.copy()
    match_row = np.full(n, -1, np.int64)
    for r in range(n):
        match_row[match_col[r]] = r
    for r in range(n):
        current = int(match_col[r])
        for c in adj_cols[r]:
            c = int(c)
            if c == current:
                break  # already the smallest achievable column
            if c > current:
                break
            owner = int(match_row[c])
            if owner < r:
                continue  # column held by a locked row
            saved_col = match_col.copy()
            saved_row = match_row.copy()
            match_col[r] = c
            match_row[c] = r
            match_row[current] = -1
            match_col[owner] = -1
            if _augment(owner, adj_cols, match_col, match_row, locked_for=r + 1):
                break
            match_col[:] = saved_col
            match_row[:] = saved_row
        # row r is now locked at match_col[r]
    return match_col


def solve_assignment(cost):
    """Minimum-cost assignment of a square int matrix.

    Returns (col_of_row, total_cost) with the lexicographically smallest
    optimal assignment.
    """
    cost = np.asarray(cost, np.int64)
    n = cost.shape[0]
    if n == 0 or cost.shape[0] != cost.shape[1]:
        raise SizeMismatch("cost matrix must be square and nonempty")
    col_of_row, u, v = _hungarian(cost)
    reduced = cost - u[:, None] - v[None, :]
    adj_cols = [np.flatnonzero(reduced[i] == 0) for i in range(n)]
    col_of_row = _lexicographic_refine(adj_cols, col_of_row)
    total = int(cost[np.arange(n), col_of_row].sum())
    return col_of_row, total


def min_weight_perfect_matching(dm):
    """Optimal matching for a DistanceMatrix; rejects unreachable pairs."""
    col_of_row, total = solve_assignment(dm.d)
    n = dm.d.shape[0]
    pairs = []
    for i in range(n):
        j = int(col_of_row[i])
        dist = int(dm.d[i, j])
        if dist >= dm.sentinel:
            raise InfeasibleMatching(
                "every perfect matching pairs at least one unreachable tile"
            )
        pairs.append((dm.starts[i], dm.goals[j], dist))
    return Matching(pairs=tuple(pairs), total_cost=total)
