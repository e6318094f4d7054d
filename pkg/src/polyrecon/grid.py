"""Workspace grid, tile configurations, and BFS distance primitives.

Coordinates are ``(x, y)`` cell tuples with x growing rightward and y
growing downward; row-major order means sorting by ``(y, x)``.  Adjacency
is 4-connectivity everywhere, and cells outside the workspace rectangle
behave like obstacles.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import SourceNotOnTiles, SourceOnObstacle

Cell = tuple[int, int]

NEIGHBOR_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def neighbors4(cell):
    x, y = cell
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def row_major_key(cell):
    return (cell[1], cell[0])


@dataclass(frozen=True)
class GridMap:
    """Rectangular workspace with a set of obstacle cells."""

    width: int
    height: int
    obstacles: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("workspace must be at least 1x1")
        object.__setattr__(self, "obstacles", frozenset(self.obstacles))
        for c in self.obstacles:
            if not self.in_bounds(c):
                raise ValueError(f"obstacle {c} out of bounds")

    def in_bounds(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell):
        return self.in_bounds(cell) and cell not in self.obstacles

    @cached_property
    def free_mask(self):
        """(height, width) bool array, True on non-obstacle cells."""
        mask = np.ones((self.height, self.width), np.bool_)
        for x, y in self.obstacles:
            mask[y, x] = False
        mask.setflags(write=False)
        return mask

    @property
    def unreachable_sentinel(self):
        """Finite stand-in distance larger than any reachable geodesic."""
        return self.width * self.height + 1

    @cached_property
    def free_components(self):
        """(labels, component sizes, free cells as an (k, 2) [y, x] array)."""
        labels, count = kernels.label_components(
            np.ascontiguousarray(self.free_mask)
        )
        sizes = (
            np.bincount(labels[labels >= 0].ravel(), minlength=count)
            if count
            else np.zeros(0, np.int64)
        )
        return labels, sizes, np.argwhere(self.free_mask)


@dataclass(frozen=True)
class Configuration:
    """A set of tile cells; planners expect it to be 4-connected."""

    tiles: frozenset

    def __post_init__(self):
        object.__setattr__(self, "tiles", frozenset(self.tiles))
        if not self.tiles:
            raise ValueError("configuration must contain at least one tile")

    @classmethod
    def of(cls, cells):
        return cls(frozenset(cells))

    def __len__(self):
        return len(self.tiles)

    def __contains__(self, cell):
        return cell in self.tiles

    @cached_property
    def sorted_tiles(self):
        """Tiles in canonical row-major order."""
        return tuple(sorted(self.tiles, key=row_major_key))

    @cached_property
    def bounding_box(self):
        """(min_x, min_y, width, height) of the tile set."""
        xs = [c[0] for c in self.tiles]
        ys = [c[1] for c in self.tiles]
        return min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1

    @cached_property
    def local_mask(self):
        """Bool mask over the bounding box; pair with bounding_box offsets."""
        ox, oy, w, h = self.bounding_box
        mask = np.zeros((h, w), np.bool_)
        for x, y in self.tiles:
            mask[y - oy, x - ox] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def leaves(self):
        """Tiles removable without disconnecting the rest (cached)."""
        ox, oy, _, _ = self.bounding_box
        art = kernels.articulation_cells(self.local_mask)
        return frozenset(
            c for c in self.tiles if not art[c[1] - oy, c[0] - ox]
        )

    @cached_property
    def center(self):
        """Arithmetic mean of tile coordinates as (x, y) floats."""
        arr = np.array(self.sorted_tiles, dtype=np.float64)
        return (float(np.mean(arr[:, 0])), float(np.mean(arr[:, 1])))

    def move(self, source, target):
        """New configuration with ``source`` replaced by ``target``."""
        return Configuration(self.tiles - {source} | {target})


@dataclass(frozen=True)
class DistanceField:
    """BFS hop counts anchored at (offset_x, offset_y); -1 is unreachable."""

    offset_x: int
    offset_y: int
    grid: np.ndarray

    def dist(self, cell):
        """Distance to ``cell``, or None when unreachable or outside."""
        x = cell[0] - self.offset_x
        y = cell[1] - self.offset_y
        if x < 0 or y < 0 or y >= self.grid.shape[0] or x >= self.grid.shape[1]:
            return None
        d = int(self.grid[y, x])
        return None if d < 0 else d

    def reachable(self, cell):
        return self.dist(cell) is not None


def _tiles_mask(cells):
    """Bounding-box mask plus offsets for an arbitrary nonempty cell set."""
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    ox, oy = min(xs), min(ys)
    mask = np.zeros((max(ys) - oy + 1, max(xs) - ox + 1), np.bool_)
    for x, y in cells:
        mask[y - oy, x - ox] = True
    return mask, ox, oy


def is_connected(tiles):
    """True iff the cell set is 4-connected (empty and singleton count)."""
    tiles = set(tiles)
    if len(tiles) <= 1:
        return True
    mask, _, _ = _tiles_mask(tiles)
    _, count = kernels.label_components(mask)
    return count <= 1


def leaf_tiles(config):
    """All tiles whose removal keeps the configuration connected."""
    return config.leaves


def bfs_free(grid, sources):
    """Multi-source BFS over the obstacle-free set of the whole workspace."""
    src = sorted(set(sources), key=row_major_key)
    if not src:
        raise SourceOnObstacle("BFS requires at least one source cell")
    for c in src:
        if not grid.is_free(c):
            raise SourceOnObstacle(f"source {c} is an obstacle or out of bounds")
    xs = np.array([c[0] for c in src], np.int64)
    ys = np.array([c[1] for c in src], np.int64)
    dist = kernels.bfs_grid(grid.free_mask, xs, ys)
    return DistanceField(0, 0, dist)


def bfs_on_tiles(tiles, source):
    """BFS restricted to the given tile set, from one tile of it."""
    tiles = set(tiles)
    if source not in tiles:
        raise SourceNotOnTiles(f"source {source} is not on the tile set")
    mask, ox, oy = _tiles_mask(tiles)
    xs = np.array([source[0] - ox], np.int64)
    ys = np.array([source[1] - oy], np.int64)
    dist = kernels.bfs_grid(mask, xs, ys)
    return DistanceField(ox, oy, dist)


def _field_on_mask(mask, ox, oy, source):
    xs = np.array([source[0] - ox], np.int64)
    ys = np.array([source[1] - oy], np.int64)
    return DistanceField(ox, oy, kernels.bfs_grid(mask, xs, ys))


def tile_field(config, source):
    """bfs_on_tiles over a Configuration, reusing its cached mask."""
    if source not in config.tiles:
        raise SourceNotOnTiles(f"source {source} is not on the tile set")
    ox, oy, _, _ = config.bounding_box
    return _field_on_mask(np.ascontiguousarray(config.local_mask), ox, oy, source)


def carry_field(config, extra, source):
    """BFS over the tiles plus one extra cell (the carry path set S + D)."""
    ox, oy, w, h = config.bounding_box
    ex, ey = extra
    nox, noy = min(ox, ex), min(oy, ey)
    nw = max(ox + w, ex + 1) - nox
    nh = max(oy + h, ey + 1) - noy
    mask = np.zeros((nh, nw), np.bool_)
    mask[oy - noy : oy - noy + h, ox - nox : ox - nox + w] = config.local_mask
    mask[ey - noy, ex - nox] = True
    if source != extra and source not in config.tiles:
        raise SourceNotOnTiles(f"source {source} is not on the tile set")
    return _field_on_mask(mask, nox, noy, source)


def overlap(a, b):
    """Number of tiles shared by two configurations."""
    return len(a.tiles & b.tiles)


def center_of_mass(config):
    return config.center


def largest_overlap_component(s, g):
    """Largest 4-connected component of the intersection of two configurations.

    Ties go to the component containing the smallest row-major cell; the
    canonical labeling order of the kernels guarantees that.
    """
    shared = s.tiles & g.tiles
    if not shared:
        return frozenset()
    mask, ox, oy = _tiles_mask(shared)
    labels, count = kernels.label_components(mask)
    if count == 1:
        return frozenset(shared)
    sizes = np.bincount(labels[labels >= 0].ravel(), minlength=count)
    best = int(np.argmax(sizes))  # first max = smallest row-major first cell
    return frozenset(
        c for c in shared if labels[c[1] - oy, c[0] - ox] == best
    )


def free_component_field(grid, anchor):
    """Distance field of the free-space component containing ``anchor``."""
    return bfs_free(grid, [anchor])


def same_free_component(grid, a, b):
    """True iff configurations a and b share a free-space component."""
    field = bfs_free(grid, [a.sorted_tiles[0]])
    return all(field.reachable(c) for c in b.sorted_tiles)


def validate_configuration(config, grid, require_connected=True):
    """Raise ValueError when the configuration violates its invariants."""
    for c in config.sorted_tiles:
        if not grid.in_bounds(c):
            raise ValueError(f"tile {c} out of bounds")
        if c in grid.obstacles:
            raise ValueError(f"tile {c} overlaps an obstacle")
    if require_connected and not is_connected(config.tiles):
        raise ValueError("configuration is not 4-connected")
