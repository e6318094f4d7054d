"""Low-level grid kernels: BFS distance fields, component labeling, articulation cells.

Every kernel exists twice: a numba ``@njit`` version for speed and a plain
numpy version used as fallback and as a cross-check in tests.  The active
implementation is chosen at import time: numba is used when it imports
successfully and the environment variable ``POLYRECON_NO_NUMBA`` is unset
(or set to 0/false).  Both lanes produce bit-identical outputs.

Conventions shared by all kernels:
  * grids are 2D arrays indexed ``[y, x]`` (row-major, y grows downward),
  * distances are int32 with -1 meaning unreachable,
  * component labels are int32, assigned in row-major order of each
    component's first (smallest (y, x)) cell, with -1 for background.
"""

import os

import numpy as np

ENV_FLAG = "POLYRECON_NO_NUMBA"


def numba_disabled_by_env():
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# numpy lane
# ---------------------------------------------------------------------------

def _dilate4(frontier):
    grown = np.zeros_like(frontier)
    grown[1:, :] = frontier[:-1, :]
    grown[:-1, :] |= frontier[1:, :]
    grown[:, 1:] |= frontier[:, :-1]
    grown[:, :-1] |= frontier[:, 1:]
    return grown


def bfs_grid_numpy(traversable, seed_xs, seed_ys):
    """Multi-source 4-neighbor BFS over ``traversable`` cells.

    Seeds are planted unconditionally; expansion only enters traversable
    cells.  Returns an int32 grid of hop counts, -1 where unreachable.
    """
    h, w = traversable.shape
    dist = np.full((h, w), -1, np.int32)
    frontier = np.zeros((h, w), np.bool_)
    frontier[seed_ys, seed_xs] = True
    d = 0
    while frontier.any():
        dist[frontier] = d
        frontier = _dilate4(frontier) & traversable & (dist < 0)
        d += 1
    return dist


def label_components_numpy(mask):
    """Label 4-connected components of ``mask``.

    Returns ``(labels, count)`` where labels is int32 with -1 background and
    component k contains the k-th smallest row-major first cell.
    """
    h, w = mask.shape
    labels = np.full((h, w), -1, np.int32)
    remaining = mask.copy()
    count = 0
    while True:
        seeds = np.argwhere(remaining)
        if seeds.shape[0] == 0:
            break
        sy, sx = seeds[0]
        comp = np.zeros((h, w), np.bool_)
        comp[sy, sx] = True
        frontier = comp.copy()
        while frontier.any():
            frontier = _dilate4(frontier) & remaining & ~comp
            comp |= frontier
        labels[comp] = count
        remaining &= ~comp
        count += 1
    return labels, count


def overlap_counts_numpy(packed, query):
    """Popcount of ``packed[i] & query`` per row (uint64 bitset rows)."""
    return np.bitwise_count(packed & query).sum(axis=1, dtype=np.int64)


def articulation_numpy(mask):
    """Boolean grid marking cells whose removal disconnects their component.

    Iterative Tarjan lowlink over the 4-neighbor graph induced by ``mask``.
    Articulation points are a graph property, so this matches the numba
    lane exactly.
    """
    h, w = mask.shape
    is_art = np.zeros((h, w), np.bool_)
    cells = [(int(y), int(x)) for y, x in np.argwhere(mask)]
    if not cells:
        return is_art
    disc = {}
    low = {}
    parent = {}
    timer = 0
    for root in cells:
        if root in disc:
            continue
        root_children = 0
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, 0)]
        while stack:
            v, ni = stack[-1]
            if ni < 4:
                stack[-1] = (v, ni + 1)
                vy, vx = v
                uy, ux = ((vy, vx + 1), (vy, vx - 1), (vy + 1, vx), (vy - 1, vx))[ni]
                if ux < 0 or ux >= w or uy < 0 or uy >= h or not mask[uy, ux]:
                    continue
                u = (uy, ux)
                if u not in disc:
                    parent[u] = v
                    if v == root:
                        root_children += 1
                    disc[u] = low[u] = timer
                    timer += 1
                    stack.append((u, 0))
                elif u != parent.get(v):
                    if disc[u] < low[v]:
                        low[v] = disc[u]
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    if low[v] < low[p]:
                        low[p] = low[v]
                    if p != root and low[v] >= disc[p]:
                        is_art[p] = True
        if root_children > 1:
            is_art[root] = True
    return is_art


# ---------------------------------------------------------------------------
# numba lane
# ---------------------------------------------------------------------------

HAVE_NUMBA = False
if not numba_disabled_by_env():
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False

if HAVE_NUMBA:

    @njit(cache=True)
    def bfs_grid_numba(traversable, seed_xs, seed_ys):
        h, w = traversable.shape
        dist = np.full((h, w), -1, np.int32)
        qx = np.empty(h * w, np.int32)
        qy = np.empty(h * w, np.int32)
        tail = 0
        for i in range(seed_xs.size):
            x = seed_xs[i]
            y = seed_ys[i]
            if dist[y, x] < 0:
                dist[y, x] = 0
                qx[tail] = x
                qy[tail] = y
                tail += 1
        head = 0
        while head < tail:
            x = qx[head]
            y = qy[head]
            head += 1
            d = dist[y, x] + 1
            if x + 1 < w and traversable[y, x + 1] and dist[y, x + 1] < 0:
                dist[y, x + 1] = d
                qx[tail] = x + 1
                qy[tail] = y
                tail += 1
            if x - 1 >= 0 and traversable[y, x - 1] and dist[y, x - 1] < 0:
                dist[y, x - 1] = d
                qx[tail] = x - 1
                qy[tail] = y
                tail += 1
            if y + 1 < h and traversable[y + 1, x] and dist[y + 1, x] < 0:
                dist[y + 1, x] = d
                qx[tail] = x
                qy[tail] = y + 1
                tail += 1
            if y - 1 >= 0 and traversable[y - 1, x] and dist[y - 1, x] < 0:
                dist[y - 1, x] = d
                qx[tail] = x
                qy[tail] = y - 1
                tail += 1
        return dist

    @njit(cache=True)
    def label_components_numba(mask):
        h, w = mask.shape
        labels = np.full((h, w), -1, np.int32)
        qx = np.empty(h * w, np.int32)
        qy = np.empty(h * w, np.int32)
        count = 0
        for sy in range(h):
            for sx in range(w):
                if not mask[sy, sx] or labels[sy, sx] >= 0:
                    continue
                labels[sy, sx] = count
                qx[0] = sx
                qy[0] = sy
                head = 0
                tail = 1
                while head < tail:
                    x = qx[head]
                    y = qy[head]
                    head += 1
                    if x + 1 < w and mask[y, x + 1] and labels[y, x + 1] < 0:
                        labels[y, x + 1] = count
                        qx[tail] = x + 1
                        qy[tail] = y
                        tail += 1
                    if x - 1 >= 0 and mask[y, x - 1] and labels[y, x - 1] < 0:
                        labels[y, x - 1] = count
                        qx[tail] = x - 1
                        qy[tail] = y
                        tail += 1
                    if y + 1 < h and mask[y + 1, x] and labels[y + 1, x] < 0:
                        labels[y + 1, x] = count
                        qx[tail] = x
                        qy[tail] = y + 1
                        tail += 1
                    if y - 1 >= 0 and mask[y - 1, x] and labels[y - 1, x] < 0:
                        labels[y - 1, x] = count
                        qx[tail] = x
                        qy[tail] = y - 1
                        tail += 1
                count += 1
        return labels, count

    @njit(cache=True)
    def overlap_counts_numba(packed, query):
        n, words = packed.shape
        out = np.empty(n, np.int64)
        m1 = np.uint64(0x5555555555555555)
        m2 = np.uint64(0x3333333333333333)
        m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
        h01 = np.uint64(0x0101010101010101)
        one = np.uint64(1)
        two = np.uint64(2)
        four = np.uint64(4)
        s56 = np.uint64(56)
        for i in range(n):
            total = np.uint64(0)
            for j in range(words):
                x = packed[i, j] & query[j]
                x = x - ((x >> one) & m1)
                x = (x & m2) + ((x >> two) & m2)
                x = (x + (x >> four)) & m4
                total += (x * h01) >> s56
            out[i] = np.int64(total)
        return out

    @njit(cache=True)
    def articulation_numba(mask):
        h, w = mask.shape
        is_art = np.zeros((h, w), np.bool_)
        disc = np.full((h, w), -1, np.int32)
        low = np.zeros((h, w), np.int32)
        par_x = np.full((h, w), -1, np.int32)
        par_y = np.full((h, w), -1, np.int32)
        n = 0
        for y in range(h):
            for x in range(w):
                if mask[y, x]:
                    n += 1
        if n == 0:
            return is_art
        st_x = np.empty(n, np.int32)
        st_y = np.empty(n, np.int32)
        st_ni = np.empty(n, np.int32)
        timer = 0
        for ry in range(h):
            for rx in range(w):
                if not mask[ry, rx] or disc[ry, rx] >= 0:
                    continue
                root_children = 0
                disc[ry, rx] = timer
                low[ry, rx] = timer
                timer += 1
                sp = 0
                st_x[0] = rx
                st_y[0] = ry
                st_ni[0] = 0
                while sp >= 0:
                    x = st_x[sp]
                    y = st_y[sp]
                    ni = st_ni[sp]
                    if ni < 4:
                        st_ni[sp] = ni + 1
                        if ni == 0:
                            ux = x + 1
                            uy = y
                        elif ni == 1:
                            ux = x - 1
                            uy = y
                        elif ni == 2:
                            ux = x
                            uy = y + 1
                        else:
                            ux = x
                            uy = y - 1
                        if ux < 0 or ux >= w or uy < 0 or uy >= h or not mask[uy, ux]:
                            continue
                        if disc[uy, ux] < 0:
                            par_x[uy, ux] = x
                            par_y[uy, ux] = y
                            if x == rx and y == ry:
                                root_children += 1
                            disc[uy, ux] = timer
                            low[uy, ux] = timer
                            timer += 1
                            sp += 1
                            st_x[sp] = ux
                            st_y[sp] = uy
                            st_ni[sp] = 0
                        elif ux != par_x[y, x] or uy != par_y[y, x]:
                            if disc[uy, ux] < low[y, x]:
                                low[y, x] = disc[uy, ux]
                    else:
                        sp -= 1
                        if sp >= 0:
                            px = st_x[sp]
                            py = st_y[sp]
                            if low[y, x] < low[py, px]:
                                low[py, px] = low[y, x]
                            if (px != rx or py != ry) and low[y, x] >= disc[py, px]:
                                is_art[py, px] = True
                if root_children > 1:
                    is_art[ry, rx] = True
        return is_art


if HAVE_NUMBA:
    ACTIVE_IMPL = "numba"
    bfs_grid = bfs_grid_numba
    label_components = label_components_numba
    articulation_cells = articulation_numba
    overlap_counts = overlap_counts_numba
else:
    ACTIVE_IMPL = "numpy"
    bfs_grid = bfs_grid_numpy
    label_components = label_components_numpy
    articulation_cells = articulation_numpy
    overlap_counts = overlap_counts_numpy
