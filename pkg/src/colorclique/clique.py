"""Exact maximum clique / independence number on dense graphs.

The solver is a Tomita-style branch and bound with greedy-coloring upper
bounds over bitset rows.  Candidates are relabelled into degeneracy order at
the root, which keeps the coloring bound tight on the dense instances this
package produces.  Results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError
from .groups import GroupSpec

EXACT_SIZE_LIMIT = 700  # above this an explicit node budget is required


class DenseGraph:
    """Simple undirected graph over vertices 0..n-1 with bitset adjacency rows."""

    def __init__(self, n: int, words: np.ndarray):
        self.n = int(n)
        self.words = words  # (n, W) uint64

    @classmethod
    def from_bool_matrix(cls, m: np.ndarray) -> "DenseGraph":
        m = np.asarray(m, dtype=bool)
        if m.shape[0] != m.shape[1]:
            raise DomainError("adjacency matrix must be square")
        if not (m == m.T).all():
            raise DomainError("adjacency matrix must be symmetric")
        m = m.copy()
        np.fill_diagonal(m, False)
        return cls(m.shape[0], _kernels.pack_rows(m))

    @classmethod
    def from_edges(cls, n: int, eu: np.ndarray, ev: np.ndarray) -> "DenseGraph":
        m = np.zeros((n, n), dtype=bool)
        m[eu, ev] = True
        m[ev, eu] = True
        return cls.from_bool_matrix(m)

    @classmethod
    def from_adjacency_file(cls, path) -> "DenseGraph":
        """One line per edge: "u v"; an optional first line "n <count>"."""
        eu, ev = [], []
        n = -1
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                if parts[0] == "n":
                    n = int(parts[1])
                    continue
                u, v = int(parts[0]), int(parts[1])
                eu.append(u)
                ev.append(v)
        eu = np.asarray(eu, dtype=np.int64)
        ev = np.asarray(ev, dtype=np.int64)
        if n < 0:
            n = int(max(eu.max(initial=-1), ev.max(initial=-1)) + 1)
        return cls.from_edges(n, eu, ev)

    def to_bool_matrix(self) -> np.ndarray:
        shifts = np.arange(64, dtype=np.uint64)
        bits = (self.words[:, :, None] >> shifts) & np.uint64(1)
        return bits.reshape(self.n, -1)[:, : self.n].astype(bool)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.words[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1))

    def degrees(self) -> np.ndarray:
        return self.to_bool_matrix().sum(axis=1)

    def complement(self) -> "DenseGraph":
        m = ~self.to_bool_matrix()
        np.fill_diagonal(m, False)
        return DenseGraph.from_bool_matrix(m)

    def subgraph(self, vertices: np.ndarray) -> "DenseGraph":
        vertices = np.asarray(vertices, dtype=np.int64)
        m = self.to_bool_matrix()[np.ix_(vertices, vertices)]
        return DenseGraph.from_bool_matrix(m)


@dataclass
class CliqueCertificate:
    """A clique witness; ``exact`` means no larger clique exists."""

    vertices: np.ndarray
    size: int
    exact: bool
    nodes_explored: int = 0

    def __post_init__(self):
        self.vertices = np.sort(np.asarray(self.vertices, dtype=np.int64))


def is_clique(g: DenseGraph, vertices) -> bool:
    vs = np.asarray(vertices, dtype=np.int64)
    if len(vs) <= 1:
        return True
    m = g.to_bool_matrix()
    sub = m[np.ix_(vs, vs)]
    np.fill_diagonal(sub, True)
    return bool(sub.all())


def _degeneracy_order(g: DenseGraph) -> np.ndarray:
    """Peel minimum-degree vertices; returns vertices in reverse peel order."""
    m = g.to_bool_matrix()
    n = g.n
    deg = m.sum(axis=1).astype(np.int64)
    alive = np.ones(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    for i in range(n):
        cand = np.where(alive)[0]
        v = cand[np.argmin(deg[cand])]
        order[n - 1 - i] = v
        alive[v] = False
        deg[m[v]] -= 1
    return order


def max_clique(g: DenseGraph, budget: int | None = None,
               initial: np.ndarray | None = None,
               force_py: bool = False) -> CliqueCertificate:
    """Exact maximum clique (witness included).

    ``budget`` caps branch-and-bound node expansions; when it is hit the best
    clique found so far is returned with ``exact=False``.  Graphs with more
    than ``EXACT_SIZE_LIMIT`` vertices require an explicit budget.
    """
    n = g.n
    if n == 0:
        return CliqueCertificate(np.empty(0, dtype=np.int64), 0, True)
    if n > EXACT_SIZE_LIMIT and budget is None:
        raise DomainError(
            f"graph has {n} > {EXACT_SIZE_LIMIT} vertices; pass an explicit node budget")
    order = _degeneracy_order(g)
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    m = g.to_bool_matrix()[np.ix_(order, order)]
    words = _kernels.pack_rows(m)
    wit0 = np.asarray([], dtype=np.int32)
    best0 = 0
    if initial is not None and len(initial) > 0:
        init = np.asarray(initial, dtype=np.int64)
        if not is_clique(g, init):
            raise DomainError("initial witness is not a clique")
        wit0 = inv[init].astype(np.int32)
        best0 = len(wit0)
    best, wit, wlen, nodes, completed = _kernels.max_clique_search(
        words, budget=budget, best0=best0, wit0=wit0, force_py=force_py)
    witness = order[np.asarray(wit[:wlen], dtype=np.int64)]
    return CliqueCertificate(witness, int(best), bool(completed), int(nodes))


def independence_number(g: DenseGraph, budget: int | None = None,
                        force_py: bool = False) -> CliqueCertificate:
    """Maximum independent set = maximum clique of the complement."""
    return max_clique(g.complement(), budget=budget, force_py=force_py)


def brute_force_clique_number(g: DenseGraph) -> int:
    """Independent oracle: subset DP over all 2^n vertex subsets (n <= 24).

    A subset S is a clique iff S minus its lowest vertex is a clique and that
    vertex is adjacent to the rest.  Subsets are processed in popcount layers
    so the recurrence vectorizes.
    """
    n = g.n
    if n > 24:
        raise DomainError("brute-force oracle is limited to 24 vertices")
    if n == 0:
        return 0
    m = g.to_bool_matrix()
    adj_int = np.zeros(n, dtype=np.int32)
    for v in range(n):
        adj_int[v] = np.int32(sum(1 << u for u in np.where(m[v])[0]))
    subsets = np.arange(1, 1 << n, dtype=np.int32)
    pc = np.zeros(len(subsets), dtype=np.int8)
    for b in range(n):
        pc += ((subsets >> b) & 1).astype(np.int8)
    ok = np.zeros(1 << n, dtype=bool)
    ok[0] = True
    low = subsets & -subsets
    lowidx = np.round(np.log2(low.astype(np.float32))).astype(np.int32)
    rest = subsets ^ low
    best = 0
    for k in range(1, n + 1):
        layer = subsets[pc == k]
        if len(layer) == 0:
            break
        r = rest[layer - 1]
        li = lowidx[layer - 1]
        good = ok[r] & ((adj_int[li] & r) == r)
        ok[layer] = good
        if good.any():
            best = k
    return best


# ---------------------------------------------------------------------------
# subgroup-based clique lower bounds
# ---------------------------------------------------------------------------

def _span_extend(g: GroupSpec, span: np.ndarray, y: int) -> np.ndarray:
    """Span of span u {y} given span is a subgroup containing 0."""
    if all(f == 2 for f in g.factors):
        return np.sort(np.concatenate([span, span ^ y]))
    p = g.characteristic
    parts = [span]
    for a in range(1, p):
        ay = int(g.scalar_mul(a, y))
        parts.append(g.add(span, ay))
    return np.sort(np.concatenate(parts))


def subgroup_clique_bound(g: GroupSpec, member_mask: np.ndarray,
                          max_dim: int | None = None) -> np.ndarray:
    """Largest subgroup H found with H \\ {0} inside the generating set.

    For vector spaces, exhaustive DFS over subspaces whose nonzero elements
    all lie in the set (dimension capped by ``max_dim``).  Other groups get a
    cyclic-subgroup scan.  Returns the element flats of H (a clique witness
    in the Cayley graph, and a lower bound for its clique number).
    """
    mask = np.asarray(member_mask, dtype=bool)
    ext = np.zeros(len(mask) + 1, dtype=bool)
    ext[: len(mask)] = mask

    if not g.is_vector_space:
        best = np.array([0], dtype=np.int64)
        for x in range(1, g.order):
            if not mask[x]:
                continue
            orbit = [0]
            y = x
            while y != 0:
                if not mask[y]:
                    orbit = None
                    break
                orbit.append(y)
                y = int(g.add(y, x))
            if orbit is not None and len(orbit) > len(best):
                best = np.sort(np.asarray(orbit, dtype=np.int64))
        return best

    n_dim = len(g.factors)
    cap = n_dim if max_dim is None else min(int(max_dim), n_dim)
    members = np.where(mask)[0]
    zero_span = np.array([0], dtype=np.int64)
    best = zero_span
    visited: set[bytes] = set()
    stack = [(zero_span, 0)]
    while stack:
        span, dim = stack.pop()
        if len(span) > len(best):
            best = span
        if dim >= cap:
            continue
        in_span = np.zeros(len(mask), dtype=bool)
        in_span[span] = True
        cands = members[~in_span[members]]
        if len(cands) == 0:
            continue
        # all of a*y + span must stay inside the set, every a != 0; track the
        # smallest fresh element so each subspace is expanded exactly once,
        # from its minimal new generator
        valid = np.ones(len(cands), dtype=bool)
        fresh_min = np.full(len(cands), np.iinfo(np.int64).max)
        p = g.characteristic
        for a in range(1, p):
            ay = g.scalar_mul(a, cands)
            grid = g.add_outer(ay, span)
            valid &= mask[grid].all(axis=1)
            fresh_min = np.minimum(fresh_min, grid.min(axis=1))
        for y in cands[valid & (fresh_min == cands)]:
            new_span = _span_extend(g, span, int(y))
            key = new_span.astype(np.int64).tobytes()
            if key in visited:
                continue
            visited.add(key)
            stack.append((new_span, dim + 1))
    return best
