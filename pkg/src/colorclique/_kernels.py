"""Hot kernels with a portable fallback path.

The branch-and-bound clique search and the per-color scan primitives burn
almost all cycles in large runs, so they are compiled with numba by default.
Set ``COLORCLIQUE_DISABLE_NUMBA=1`` to force the fallback implementations
(python bigint bitsets / vectorized numpy); results are bit-identical on
both paths.  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("COLORCLIQUE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

if not _DISABLE:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False

if not USING_NUMBA:
    def njit(*args, **kwargs):  # noqa: D103 - passthrough decorator
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# ---------------------------------------------------------------------------
# maximum clique: Tomita-style branch and bound with greedy coloring bounds
# ---------------------------------------------------------------------------

@njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.uint64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _ctz64(x):
    # index of lowest set bit; x must be nonzero
    n = 0
    if x & np.uint64(0xFFFFFFFF) == np.uint64(0):
        n += 32
        x >>= np.uint64(32)
    if x & np.uint64(0xFFFF) == np.uint64(0):
        n += 16
        x >>= np.uint64(16)
    if x & np.uint64(0xFF) == np.uint64(0):
        n += 8
        x >>= np.uint64(8)
    if x & np.uint64(0xF) == np.uint64(0):
        n += 4
        x >>= np.uint64(4)
    if x & np.uint64(0x3) == np.uint64(0):
        n += 2
        x >>= np.uint64(2)
    if x & np.uint64(0x1) == np.uint64(0):
        n += 1
    return n


@njit(cache=True)
def _color_sort(adj, P, order, bound, depth):
    # Greedy coloring of the candidate set P[depth]; fills order/bound rows
    # with vertices in ascending color, returns the candidate count.
    W = P.shape[1]
    tmp = np.empty(W, np.uint64)
    Q = np.empty(W, np.uint64)
    for w in range(W):
        tmp[w] = P[depth, w]
    k = 0
    color = 0
    nonempty = False
    for w in range(W):
        if tmp[w] != np.uint64(0):
            nonempty = True
    while nonempty:
        color += 1
        for w in range(W):
            Q[w] = tmp[w]
        while True:
            qw = -1
            for w in range(W):
                if Q[w] != np.uint64(0):
                    qw = w
                    break
            if qw < 0:
                break
            v = (qw << 6) + _ctz64(Q[qw])
            order[depth, k] = v
            bound[depth, k] = color
            k += 1
            tmp[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
            for w in range(W):
                Q[w] &= ~adj[v, w]
            Q[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        nonempty = False
        for w in range(W):
            if tmp[w] != np.uint64(0):
                nonempty = True
    return k


@njit(cache=True)
def _mc_search(adj, n, budget, best0, wit0):
    """Iterative DFS; returns (best, witness, witness_len, nodes, completed)."""
    W = adj.shape[1]
    P = np.zeros((n + 2, W), np.uint64)
    order = np.zeros((n + 2, n), np.int32)
    bound = np.zeros((n + 2, n), np.int32)
    ptr = np.full(n + 2, -1, np.int64)
    chosen = np.zeros(n + 2, np.int32)
    best_wit = np.full(n, -1, np.int32)
    best = best0
    best_len = 0
    for i in range(len(wit0)):
        best_wit[i] = wit0[i]
        best_len = len(wit0)
    for v in range(n):
        P[0, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    ptr[0] = _color_sort(adj, P, order, bound, 0) - 1
    nodes = np.int64(0)
    depth = 0
    completed = True
    while depth >= 0:
        i = ptr[depth]
        if i < 0:
            depth -= 1
            continue
        if depth + bound[depth, i] <= best:
            ptr[depth] = -1  # colors ascend, so the rest of this level prunes
            continue
        v = order[depth, i]
        ptr[depth] = i - 1
        P[depth, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        nodes += 1
        if budget >= 0 and nodes > budget:
            completed = False
            break
        newsize = 0
        for w in range(W):
            x = P[depth, w] & adj[v, w]
            P[depth + 1, w] = x
            newsize += int(_popcount64(x))
        chosen[depth] = v
        if newsize == 0:
            if depth + 1 > best:
                best = depth + 1
                best_len = depth + 1
                for k in range(depth + 1):
                    best_wit[k] = chosen[k]
        else:
            depth += 1
            ptr[depth] = _color_sort(adj, P, order, bound, depth) - 1
    return best, best_wit, best_len, nodes, completed


def _rows_to_ints(adj_words: np.ndarray) -> list[int]:
    return [int.from_bytes(row.tobytes(), "little") for row in adj_words]


def max_clique_search_py(adj_words: np.ndarray, n: int, budget: int,
                         best0: int, wit0: np.ndarray):
    """Fallback clique search on python bigint bitsets; mirrors `_mc_search`."""
    adj = _rows_to_ints(adj_words)
    best = int(best0)
    best_wit = list(int(x) for x in wit0)
    nodes = 0
    completed = True

    def color_sort(P):
        order = []
        bound = []
        tmp = P
        color = 0
        while tmp:
            color += 1
            Q = tmp
            while Q:
                v = (Q & -Q).bit_length() - 1
                order.append(v)
                bound.append(color)
                tmp &= ~(1 << v)
                Q &= ~adj[v]
                Q &= ~(1 << v)
        return order, bound

    full = (1 << n) - 1
    stack = [[full, *color_sort(full)]]
    chosen = []
    while stack:
        frame = stack[-1]
        P, order, bound = frame
        if not order:
            stack.pop()
            if chosen:
                chosen.pop()
            continue
        depth = len(stack) - 1
        if depth + bound[-1] <= best:
            frame[1] = []
            frame[2] = []
            continue
        v = order.pop()
        bound.pop()
        frame[0] = P & ~(1 << v)
        nodes += 1
        if 0 <= budget < nodes:
            completed = False
            break
        newP = frame[0] & adj[v]
        if newP == 0:
            if depth + 1 > best:
                best = depth + 1
                best_wit = chosen + [v]
        else:
            chosen.append(v)
            stack.append([newP, *color_sort(newP)])
    return best, np.asarray(best_wit, dtype=np.int32), len(best_wit), nodes, completed


def max_clique_search(adj_words: np.ndarray, budget: int | None = None,
                      best0: int = 0, wit0=None, force_py: bool = False):
    """Dispatch to the compiled or fallback search path."""
    n = adj_words.shape[0]
    wit0 = np.asarray([] if wit0 is None else wit0, dtype=np.int32)
    b = -1 if budget is None else int(budget)
    if USING_NUMBA and not force_py:
        return _mc_search(adj_words, n, np.int64(b), int(best0), wit0)
    return max_clique_search_py(adj_words, n, b, int(best0), wit0)


# ---------------------------------------------------------------------------
# per-color scan primitives for the greedy connectivity processes
# ---------------------------------------------------------------------------

@njit(cache=True)
def _crossing_new_vertex_counts_nb(color_ptr, eu, ev, in_set, counts, stamp):
    R = len(color_ptr) - 1
    for c in range(R):
        cnt = 0
        for e in range(color_ptr[c], color_ptr[c + 1]):
            u = eu[e]
            v = ev[e]
            if in_set[u] and not in_set[v]:
                if stamp[v] != c + 1:
                    stamp[v] = c + 1
                    cnt += 1
            elif in_set[v] and not in_set[u]:
                if stamp[u] != c + 1:
                    stamp[u] = c + 1
                    cnt += 1
        counts[c] = cnt


def crossing_new_vertex_counts(color_ptr, eu, ev, in_set, force_py=False):
    """Per color: number of distinct outside vertices with an edge into the set."""
    R = len(color_ptr) - 1
    counts = np.zeros(R, dtype=np.int64)
    if USING_NUMBA and not force_py:
        stamp = np.zeros(len(in_set), dtype=np.int64)
        _crossing_new_vertex_counts_nb(color_ptr, eu, ev, in_set, counts, stamp)
        return counts
    iu, iv = in_set[eu], in_set[ev]
    cross = iu != iv
    if not cross.any():
        return counts
    outside = np.where(iu[cross], ev[cross], eu[cross])
    ecol = np.repeat(np.arange(R, dtype=np.int64), np.diff(color_ptr))[cross]
    keys = np.unique(ecol * np.int64(len(in_set)) + outside)
    np.add.at(counts, keys // len(in_set), 1)
    return counts


@njit(cache=True)
def _coalesce_gains_nb(color_ptr, eu, ev, comp, comp_good, gains, stamp):
    R = len(color_ptr) - 1
    for c in range(R):
        g = 0
        for e in range(color_ptr[c], color_ptr[c + 1]):
            a = comp[eu[e]]
            b = comp[ev[e]]
            if a != b and comp_good[a] and comp_good[b]:
                if stamp[a] != c + 1:
                    stamp[a] = c + 1
                    g += 1
                if stamp[b] != c + 1:
                    stamp[b] = c + 1
                    g += 1
        gains[c] = g


def coalesce_gains(color_ptr, eu, ev, comp, comp_good, force_py=False):
    """Per color: distinct good components with an edge to a different good component."""
    R = len(color_ptr) - 1
    gains = np.zeros(R, dtype=np.int64)
    if USING_NUMBA and not force_py:
        stamp = np.zeros(len(comp_good), dtype=np.int64)
        _coalesce_gains_nb(color_ptr, eu, ev, comp, comp_good, gains, stamp)
        return gains
    a = comp[eu]
    b = comp[ev]
    mask = (a != b) & comp_good[a] & comp_good[b]
    if not mask.any():
        return gains
    ecol = np.repeat(np.arange(R, dtype=np.int64), np.diff(color_ptr))[mask]
    M = np.int64(len(comp_good))
    keys = np.unique(np.concatenate([ecol * M + a[mask], ecol * M + b[mask]]))
    np.add.at(gains, keys // M, 1)
    return gains


def pack_rows(bool_matrix: np.ndarray) -> np.ndarray:
    """Pack a boolean adjacency matrix into uint64 words, bit v of word w = column 64w+v."""
    n = bool_matrix.shape[0]
    W = (bool_matrix.shape[1] + 63) // 64
    padded = np.zeros((n, W * 64), dtype=np.uint64)
    padded[:, : bool_matrix.shape[1]] = bool_matrix.astype(np.uint64)
    shifts = np.arange(64, dtype=np.uint64)
    return (padded.reshape(n, W, 64) << shifts).sum(axis=2, dtype=np.uint64)
