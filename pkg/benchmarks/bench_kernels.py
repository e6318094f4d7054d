"""Benchmark the numba kernels against the numpy fallback.

Runs each kernel pair on representative workloads (BFS over a 30x30 and a
120x120 obstacle map, component labeling, articulation points on a large
polyomino) plus an end-to-end planner solve through the selected lane.

Usage: python benchmarks/bench_kernels.py
       POLYRECON_NO_NUMBA=1 polyrecon ... selects the fallback lane at runtime.
"""

import time

import numpy as np

from polyrecon import Configuration, GridMap, gen_random_map, glc_solve
from polyrecon import kernels


def timeit(fn, *args, repeat=5, inner=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def random_free_mask(w, h, density, seed):
    rng = np.random.default_rng(seed)
    return rng.random((h, w)) > density


def random_polyomino_mask(n, seed):
    rng = np.random.default_rng(seed)
    grid = GridMap(40, 40)
    tiles = {(20, 20)}
    frontier = [(21, 20), (19, 20), (20, 21), (20, 19)]
    while len(tiles) < n:
        cell = frontier.pop(int(rng.integers(len(frontier))))
        if cell in tiles or not grid.in_bounds(cell):
            continue
        tiles.add(cell)
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (cell[0] + dx, cell[1] + dy)
            if nb not in tiles:
                frontier.append(nb)
    mask = np.zeros((40, 40), np.bool_)
    for x, y in tiles:
        mask[y, x] = True
    return mask


def row(name, numba_s, numpy_s):
    speedup = numpy_s / numba_s if numba_s > 0 else float("inf")
    print(f"{name:<38} {numba_s * 1e6:>10.1f} {numpy_s * 1e6:>10.1f} {speedup:>8.1f}x")


def main():
    if not kernels.HAVE_NUMBA:
        print("numba lane unavailable (POLYRECON_NO_NUMBA set or import failed);")
        print("only the numpy lane can be timed in this process.")
        return

    print(f"{'kernel / workload':<38} {'numba us':>10} {'numpy us':>10} {'speedup':>9}")

    seeds = (np.array([0], np.int64), np.array([0], np.int64))
    for side in (30, 120):
        mask = random_free_mask(side, side, 0.3, seed=1)
        kernels.bfs_grid_numba(mask, *seeds)  # compile before timing
        row(
            f"bfs_grid {side}x{side} (30% obstacles)",
            timeit(kernels.bfs_grid_numba, mask, *seeds),
            timeit(kernels.bfs_grid_numpy, mask, *seeds),
        )

    mask = random_free_mask(60, 60, 0.55, seed=2)
    kernels.label_components_numba(mask)
    row(
        "label_components 60x60 (55% obst.)",
        timeit(kernels.label_components_numba, mask),
        timeit(kernels.label_components_numpy, mask),
    )

    poly = random_polyomino_mask(120, seed=3)
    kernels.articulation_numba(poly)
    row(
        "articulation_cells 120-tile polyomino",
        timeit(kernels.articulation_numba, poly),
        timeit(kernels.articulation_numpy, poly),
    )

    inst = gen_random_map(30, 30, 15, 0.3, seed=7)
    t0 = time.perf_counter()
    glc_solve(inst.start, inst.goal, inst.grid)
    t1 = time.perf_counter()
    print(
        f"\nend-to-end glc_solve on {inst.label}: "
        f"{(t1 - t0) * 1e3:.1f} ms via the {kernels.ACTIVE_IMPL} lane"
    )
    print("rerun with POLYRECON_NO_NUMBA=1 to time the whole suite on the fallback")


if __name__ == "__main__":
    main()
