"""Text frame rendering for replaying a solution move by move.

Frame i shows the configuration before dropoff i with the active pickup
and placement cells marked; the final frame shows the end configuration.
Cell legend (first match wins):

    ``#`` obstacle   ``P`` active pickup   ``D`` active placement
    ``O`` tile       ``g`` goal cell, empty   ``s`` start cell, empty
    ``.`` free
"""

LEGEND = "# obstacle | P pickup | D placement | O tile | g goal | s start | . free"


def _render(grid, tiles, start_cells, goal_cells, pickup=None, placement=None):
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            c = (x, y)
            if c in grid.obstacles:
                row.append("#")
            elif c == pickup:
                row.append("P")
            elif c == placement:
                row.append("D")
            elif c in tiles:
                row.append("O")
            elif c in goal_cells:
                row.append("g")
            elif c in start_cells:
                row.append("s")
            else:
                row.append(".")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def render_frames(grid, start_cells, goal_cells, moves):
    """One text frame per dropoff plus the final state (k+1 frames)."""
    frames = []
    tiles = set(start_cells)
    for i, move in enumerate(moves):
        src, tgt = tuple(move.source), tuple(move.target)
        header = (
            f"frame {i}: move {i + 1}/{len(moves)} pickup {src} -> place {tgt}"
            f" (d_P={move.pickup_dist}, d_D={move.dropoff_dist})\n"
        )
        frames.append(
            header
            + _render(grid, tiles, start_cells, goal_cells, pickup=src, placement=tgt)
        )
        tiles = tiles - {src} | {tgt}
    frames.append(
        f"frame {len(moves)}: final configuration\n"
        + _render(grid, tiles, start_cells, goal_cells)
    )
    return frames


def write_frames(out_dir, grid, start_cells, goal_cells, moves):
    import os

    os.makedirs(out_dir, exist_ok=True)
    frames = render_frames(grid, start_cells, goal_cells, moves)
    paths = []
    for i, frame in enumerate(frames):
        path = os.path.join(out_dir, f"frame_{i:04d}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{LEGEND}\n{frame}")
        paths.append(path)
    return paths
