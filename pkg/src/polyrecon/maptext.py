"""Text map format: parse and serialize workspaces with start/goal tiles.

Format: first line ``width height``, then ``height`` rows of ``width``
characters.  ``.`` free, ``#`` obstacle, ``S`` start tile, ``G`` goal tile,
``B`` tile of both configurations.  Row 0 is the top line; x grows to the
right, y grows downward.  The serializer is canonical (LF line endings,
trailing newline), so parse -> format round-trips byte-identically on
files it wrote.
"""

from dataclasses import dataclass

from .errors import ParseError
from .grid import Configuration, GridMap

FREE = "."
OBSTACLE = "#"
START = "S"
GOAL = "G"
BOTH = "B"

_VALID = {FREE, OBSTACLE, START, GOAL, BOTH}


@dataclass(frozen=True)
class ParsedMap:
    grid: GridMap
    start_cells: frozenset
    goal_cells: frozenset

    def start_config(self):
        return Configuration(self.start_cells) if self.start_cells else None

    def goal_config(self):
        return Configuration(self.goal_cells) if self.goal_cells else None


def parse_map_text(text):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty map file", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError("header must be 'width height'", line=1)
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError("header must contain two integers", line=1) from None
    if width < 1 or height < 1:
        raise ParseError("width and height must be positive", line=1)
    if len(lines) - 1 != height:
        raise ParseError(
            f"expected {height} rows, found {len(lines) - 1}",
            line=min(len(lines), height + 1) + 1,
        )
    obstacles = set()
    start = set()
    goal = set()
    for y in range(height):
        row = lines[1 + y]
        if len(row) != width:
            raise ParseError(
                f"row has {len(row)} characters, expected {width}", line=2 + y
            )
        for x, ch in enumerate(row):
            if ch not in _VALID:
                raise ParseError(f"unknown cell character {ch!r}", line=2 + y, col=x + 1)
            if ch == OBSTACLE:
                obstacles.add((x, y))
            elif ch == START:
                start.add((x, y))
            elif ch == GOAL:
                goal.add((x, y))
            elif ch == BOTH:
                start.add((x, y))
                goal.add((x, y))
    return ParsedMap(
        grid=GridMap(width, height, frozenset(obstacles)),
        start_cells=frozenset(start),
        goal_cells=frozenset(goal),
    )


def format_map_text(grid, start_cells=(), goal_cells=()):
    start_cells = set(start_cells)
    goal_cells = set(goal_cells)
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            c = (x, y)
            if c in grid.obstacles:
                if c in start_cells or c in goal_cells:
                    raise ValueError(f"cell {c} is both an obstacle and a tile")
                row.append(OBSTACLE)
            elif c in start_cells and c in goal_cells:
                row.append(BOTH)
            elif c in start_cells:
                row.append(START)
            elif c in goal_cells:
                row.append(GOAL)
            else:
                row.append(FREE)
        rows.append("".join(row))
    return f"{grid.width} {grid.height}\n" + "\n".join(rows) + "\n"


def load_map(path):
    with open(path, encoding="utf-8") as fh:
        return parse_map_text(fh.read())


def save_map(path, grid, start_cells=(), goal_cells=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_map_text(grid, start_cells, goal_cells))
