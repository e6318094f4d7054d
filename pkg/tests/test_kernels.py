"""Kernel-level checks: numpy lane vs numba lane vs plain-Python oracles."""

import numpy as np
import pytest

from conftest import brute_bfs, brute_connected, brute_leaves, random_polyomino
from polyrecon import kernels

pytestmark = []

IMPLS = [("numpy", kernels.bfs_grid_numpy, kernels.label_components_numpy,
          kernels.articulation_numpy)]
if kernels.HAVE_NUMBA:
    IMPLS.append(
        ("numba", kernels.bfs_grid_numba, kernels.label_components_numba,
         kernels.articulation_numba)
    )


def random_mask(rng, h, w, p_true):
    return rng.random((h, w)) < p_true


def mask_cells(mask):
    return {(int(x), int(y)) for y, x in np.argwhere(mask)}


@pytest.mark.parametrize("name,bfs,label,art", IMPLS, ids=[i[0] for i in IMPLS])
def test_bfs_matches_brute_force(name, bfs, label, art, rng):
    for _ in range(25):
        h, w = int(rng.integers(2, 14)), int(rng.integers(2, 14))
        mask = random_mask(rng, h, w, 0.7)
        cells = mask_cells(mask)
        if not cells:
            continue
        all_cells = sorted(cells)
        k = int(rng.integers(1, min(3, len(all_cells)) + 1))
        sources = [all_cells[int(rng.integers(len(all_cells)))] for _ in range(k)]
        xs = np.array([c[0] for c in sources], np.int64)
        ys = np.array([c[1] for c in sources], np.int64)
        dist = bfs(np.ascontiguousarray(mask), xs, ys)
        oracle = brute_bfs(cells, sources)
        for y in range(h):
            for x in range(w):
                expected = oracle.get((x, y), -1)
                if not mask[y, x] and (x, y) not in oracle:
                    expected = -1
                assert dist[y, x] == expected, ((x, y), name)


@pytest.mark.parametrize("name,bfs,label,art", IMPLS, ids=[i[0] for i in IMPLS])
def test_labels_are_canonical_row_major(name, bfs, label, art, rng):
    for _ in range(25):
        h, w = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        mask = random_mask(rng, h, w, 0.5)
        labels, count = label(np.ascontiguousarray(mask))
        assert (labels >= 0).sum() == mask.sum()
        # component k's first row-major cell precedes component k+1's
        firsts = []
        seen = set()
        for y in range(h):
            for x in range(w):
                lab = int(labels[y, x])
                if lab >= 0 and lab not in seen:
                    seen.add(lab)
                    firsts.append(lab)
        assert firsts == list(range(count))
        # every label is one brute-force connected region
        for lab in range(count):
            comp = mask_cells(labels == lab)
            assert brute_connected(comp)
            # maximal: no free neighbor of the component shares its mask
            for c in comp:
                for nb in ((c[0] + 1, c[1]), (c[0] - 1, c[1]),
                           (c[0], c[1] + 1), (c[0], c[1] - 1)):
                    if 0 <= nb[0] < w and 0 <= nb[1] < h and mask[nb[1], nb[0]]:
                        assert labels[nb[1], nb[0]] == lab


@pytest.mark.parametrize("name,bfs,label,art", IMPLS, ids=[i[0] for i in IMPLS])
def test_articulation_matches_removal_oracle(name, bfs, label, art, rng):
    for _ in range(40):
        n = int(rng.integers(1, 13))
        tiles = random_polyomino(rng, n)
        min_x = min(c[0] for c in tiles)
        min_y = min(c[1] for c in tiles)
        shifted = {(x - min_x, y - min_y) for x, y in tiles}
        w = max(c[0] for c in shifted) + 1
        h = max(c[1] for c in shifted) + 1
        mask = np.zeros((h, w), np.bool_)
        for x, y in shifted:
            mask[y, x] = True
        is_art = art(mask)
        leaves_oracle = brute_leaves(shifted)
        for x, y in shifted:
            # articulation iff not a removable leaf (singleton has no APs)
            expected = (x, y) not in leaves_oracle
            assert bool(is_art[y, x]) == expected, (shifted, (x, y))


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba lane unavailable")
def test_lanes_agree_bitwise(rng):
    for _ in range(30):
        h, w = int(rng.integers(2, 20)), int(rng.integers(2, 20))
        mask = np.ascontiguousarray(random_mask(rng, h, w, 0.6))
        cells = sorted(mask_cells(mask))
        lab_np = kernels.label_components_numpy(mask)
        lab_nb = kernels.label_components_numba(mask)
        assert lab_np[1] == lab_nb[1]
        assert np.array_equal(lab_np[0], lab_nb[0])
        assert np.array_equal(
            kernels.articulation_numpy(mask), kernels.articulation_numba(mask)
        )
        if cells:
            src = cells[int(rng.integers(len(cells)))]
            xs = np.array([src[0]], np.int64)
            ys = np.array([src[1]], np.int64)
            assert np.array_equal(
                kernels.bfs_grid_numpy(mask, xs, ys),
                kernels.bfs_grid_numba(mask, xs, ys),
            )


def test_active_impl_respects_env_flag():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from polyrecon import kernels; print(kernels.ACTIVE_IMPL)"],
        env={"POLYRECON_NO_NUMBA": "1", "PATH": "/usr/bin:/bin:/usr/local/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
