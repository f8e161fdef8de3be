"""Edge-colored complete and complete-bipartite host graphs.

An ``EdgeColoring`` assigns every host edge exactly one dense color id.
Vertices are 0..nv-1; for bipartite hosts the left part comes first.  The
optional ``labels`` array maps vertices to group-element flats and
``color_reps`` maps color ids back to the group value that induced them
(sign-class representative for difference colorings, sum for bipartite
product colorings).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import DomainError
from .groups import GroupSpec, sign_classes
from .rng import substream


class EdgeColoring:
    def __init__(self, kind: str, nv: int, eu, ev, ecolor, n_colors: int,
                 n_left: int | None = None, labels=None, color_reps=None,
                 group: GroupSpec | None = None, refined_from=None,
                 known_max_degree: int | None = None, validate: bool = True):
        if kind not in ("complete", "bipartite"):
            raise DomainError(f"unknown host kind {kind!r}")
        self.kind = kind
        self.nv = int(nv)
        self.n_left = int(n_left) if n_left is not None else None
        self.eu = np.asarray(eu, dtype=np.int32)
        self.ev = np.asarray(ev, dtype=np.int32)
        self.ecolor = np.asarray(ecolor, dtype=np.int32)
        self.n_colors = int(n_colors)
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        self.color_reps = None if color_reps is None else np.asarray(color_reps, dtype=np.int64)
        self.group = group
        self.refined_from = refined_from  # (parent EdgeColoring, new_to_old color map)
        self._known_max_degree = known_max_degree
        if validate:
            self._validate()

    # -- construction checks ---------------------------------------------------

    def _expected_edges(self) -> int:
        if self.kind == "complete":
            return self.nv * (self.nv - 1) // 2
        return self.n_left * (self.nv - self.n_left)

    def _validate(self):
        if len(self.eu) != self._expected_edges():
            raise DomainError("edge list does not cover the host exactly")
        if self.ecolor.min(initial=0) < 0 or (len(self.ecolor) and self.ecolor.max() >= self.n_colors):
            raise DomainError("color ids out of range")
        keys = self.eu.astype(np.int64) * self.nv + self.ev
        if len(np.unique(keys)) != len(keys):
            raise DomainError("duplicate edges")

    # -- cached indexes ----------------------------------------------------------

    @cached_property
    def color_matrix(self) -> np.ndarray:
        """(nv, nv) matrix of color ids, -1 on the diagonal / missing pairs."""
        m = np.full((self.nv, self.nv), -1, dtype=np.int32)
        m[self.eu, self.ev] = self.ecolor
        m[self.ev, self.eu] = self.ecolor
        return m

    @cached_property
    def _csr(self):
        counts = np.bincount(self.ecolor, minlength=self.n_colors)
        ptr = np.zeros(self.n_colors + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        order = np.argsort(self.ecolor, kind="stable")
        return ptr, self.eu[order].astype(np.int64), self.ev[order].astype(np.int64), order

    @property
    def color_ptr(self):
        return self._csr[0]

    def class_edges(self, c: int) -> np.ndarray:
        """Edge indices of color c, in deterministic edge order."""
        ptr, _, _, order = self._csr
        return np.sort(order[ptr[c]:ptr[c + 1]])

    @cached_property
    def max_degree(self) -> int:
        if self._known_max_degree is not None:
            return self._known_max_degree
        return self.recompute_max_degree()

    def recompute_max_degree(self) -> int:
        keys = np.concatenate([
            self.ecolor.astype(np.int64) * self.nv + self.eu,
            self.ecolor.astype(np.int64) * self.nv + self.ev,
        ])
        _, counts = np.unique(keys, return_counts=True)
        return int(counts.max(initial=0))

    @property
    def proper(self) -> bool:
        return self.max_degree <= 1

    def ratio(self) -> float:
        """Colors per vertex; the K every bound in this package refers to."""
        return self.n_colors / self.nv

    # -- operations ---------------------------------------------------------------

    def colors_within(self, vertices) -> int:
        """Number of distinct colors on edges with both ends in ``vertices``."""
        vs = np.unique(np.asarray(vertices, dtype=np.int64))
        if len(vs) <= 1:
            return 0
        if self.kind == "complete":
            sub = self.color_matrix[np.ix_(vs, vs)]
            iu = np.triu_indices(len(vs), 1)
            return len(np.unique(sub[iu]))
        left = vs[vs < self.n_left]
        right = vs[vs >= self.n_left]
        if len(left) == 0 or len(right) == 0:
            return 0
        sub = self.color_matrix[np.ix_(left, right)]
        return len(np.unique(sub))

    def restrict(self, vertices) -> "EdgeColoring":
        """Induced coloring on a vertex subset of a complete host (dense color ids)."""
        if self.kind != "complete":
            raise DomainError("restrict is defined for complete hosts")
        vs = np.unique(np.asarray(vertices, dtype=np.int64))
        k = len(vs)
        iu, iv = np.triu_indices(k, 1)
        old = self.color_matrix[np.ix_(vs, vs)][iu, iv]
        uniq, new = np.unique(old, return_inverse=True)
        return EdgeColoring(
            "complete", k, iu, iv, new, len(uniq),
            labels=None if self.labels is None else self.labels[vs],
            color_reps=None if self.color_reps is None else self.color_reps[uniq],
            group=self.group, refined_from=(self, uniq), validate=False)

    def save(self, path):
        with open(path, "w") as fh:
            if self.kind == "complete":
                fh.write(f"# host complete {self.nv}\n")
            else:
                fh.write(f"# host bipartite {self.n_left} {self.nv - self.n_left}\n")
            for u, v, c in zip(self.eu, self.ev, self.ecolor):
                fh.write(f"{u} {v} {c}\n")


def load_coloring(path) -> EdgeColoring:
    eu, ev, ec = [], [], []
    kind, nv, n_left = "complete", None, None
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                if parts[1] == "host":
                    kind = parts[2]
                    if kind == "complete":
                        nv = int(parts[3])
                    else:
                        n_left = int(parts[3])
                        nv = n_left + int(parts[4])
                continue
            eu.append(int(parts[0]))
            ev.append(int(parts[1]))
            ec.append(int(parts[2]))
    eu = np.asarray(eu)
    ev = np.asarray(ev)
    ec = np.asarray(ec)
    if nv is None:
        nv = int(max(eu.max(), ev.max()) + 1)
    return EdgeColoring(kind, nv, eu, ev, ec, int(ec.max()) + 1, n_left=n_left)


# -- constructors ---------------------------------------------------------------

def difference_coloring(g: GroupSpec, members) -> EdgeColoring:
    """Color edge {x, y} of the complete graph on A by the sign class of x - y."""
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) == 0:
        raise DomainError("vertex set must be nonempty")
    part = sign_classes(g)
    n = len(A)
    iu, iv = np.triu_indices(n, 1)
    diffs = g.pairwise_diff(A, A)[iu, iv]
    old = part.class_of[diffs]
    uniq, new = np.unique(old, return_inverse=True)
    return EdgeColoring("complete", n, iu.astype(np.int32), iv.astype(np.int32),
                        new, len(uniq), labels=A, color_reps=part.reps[uniq],
                        group=g, validate=False)


def bipartite_product_coloring(g: GroupSpec, members) -> EdgeColoring:
    """Color edge (a, b) of K_{A,A} by the flat index of a + b; classes are matchings."""
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) == 0:
        raise DomainError("vertex set must be nonempty")
    n = len(A)
    sums = g.add_outer(A, A)
    iu, iv = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    old = sums.ravel()
    uniq, new = np.unique(old, return_inverse=True)
    return EdgeColoring("bipartite", 2 * n, iu.ravel().astype(np.int32),
                        (iv.ravel() + n).astype(np.int32), new, len(uniq),
                        n_left=n, labels=np.concatenate([A, A]),
                        color_reps=uniq, group=g,
                        known_max_degree=1, validate=False)


def rainbow_coloring(n: int) -> EdgeColoring:
    """Complete host where every edge has its own color."""
    iu, iv = np.triu_indices(n, 1)
    return EdgeColoring("complete", n, iu, iv, np.arange(len(iu)), len(iu),
                        known_max_degree=1 if n > 1 else 0, validate=False)


# -- properization ----------------------------------------------------------------

def _split_paths_cycles(n, edges):
    """Slot (0/1/2) per edge of a max-degree-2 subgraph; paths/cycles alternate."""
    from collections import defaultdict

    adj = defaultdict(list)
    for i, (u, v) in enumerate(edges):
        adj[u].append((i, v))
        adj[v].append((i, u))
    slots = np.full(len(edges), -1, dtype=np.int32)

    def walk(start, first_edge):
        slot = 0
        prev = start
        i, nxt = first_edge
        while True:
            slots[i] = slot
            slot ^= 1
            step = [e for e in adj[nxt] if slots[e[0]] < 0]
            if not step:
                return nxt
            prev = nxt
            i, nxt = step[0]

    deg1 = sorted(u for u in adj if len(adj[u]) == 1)
    for u in deg1:
        pending = [e for e in adj[u] if slots[e[0]] < 0]
        if pending:
            walk(u, pending[0])
    # remaining edges form cycles
    for i0 in range(len(edges)):
        if slots[i0] >= 0:
            continue
        u = edges[i0][0]
        end = walk(u, (i0, edges[i0][1]))
        # odd cycle: the closing edge collides with the first; give it slot 2
        first_u_slots = [slots[e[0]] for e in adj[u]]
        if first_u_slots[0] == first_u_slots[1]:
            closing = [e[0] for e in adj[u] if e[0] != i0]
            slots[closing[0]] = 2
    return slots


def _misra_gries(edges) -> tuple[list[int], int]:
    """Proper edge coloring of a simple graph with at most Delta+1 colors.

    Fan rotation with cd-path inversion; returns (color per edge, palette size).
    """
    from collections import defaultdict

    adj: dict = defaultdict(dict)  # vertex -> color -> neighbor
    key = lambda a, b: (a, b) if a < b else (b, a)
    edge_color: dict = {}
    deg = defaultdict(int)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    palette = max(deg.values()) + 1

    def free(x):
        for c in range(palette):
            if c not in adj[x]:
                return c
        raise AssertionError("no free color; palette too small")

    def assign(u, v, c):
        old = edge_color.get(key(u, v))
        if old is not None:
            del adj[u][old]
            del adj[v][old]
        edge_color[key(u, v)] = c
        adj[u][c] = v
        adj[v][c] = u

    def invert_path(u, c, d):
        # maximal path from u with colors alternating d, c; swap the two colors
        path = []
        x, col = u, d
        while col in adj[x]:
            y = adj[x][col]
            path.append((x, y, col))
            x, col = y, (c if col == d else d)
        for a, b, col in path:
            del adj[a][col]
            del adj[b][col]
            del edge_color[key(a, b)]
        for a, b, col in path:
            new = c if col == d else d
            edge_color[key(a, b)] = new
            adj[a][new] = b
            adj[b][new] = a

    for u, v in edges:
        fan = [v]
        fan_set = {v}
        while True:
            d0 = free(fan[-1])
            w = adj[u].get(d0)
            if w is None or w in fan_set:
                break
            fan.append(w)
            fan_set.add(w)
        c = free(u)
        d = free(fan[-1])
        if c != d:
            invert_path(u, c, d)
        # shortest prefix that is still a fan and has d free at its end
        pick = None
        for i, x in enumerate(fan):
            if d in adj[x]:
                continue
            ok = True
            for j in range(1, i + 1):
                cc = edge_color.get(key(u, fan[j]))
                if cc is None or cc in adj[fan[j - 1]]:
                    ok = False
                    break
            if ok:
                pick = i
                break
        if pick is None:
            raise AssertionError("fan rotation failed")
        for j in range(pick):
            assign(u, fan[j], edge_color[key(u, fan[j + 1])])
        assign(u, fan[pick], d)
    return [edge_color[key(u, v)] for u, v in edges], palette


def properize(col: EdgeColoring) -> EdgeColoring:
    """Refine each color class into matchings.

    Max-degree-2 classes (the difference-coloring hot path) split into at
    most 3 matchings by alternating along their paths and cycles; higher
    degrees fall back to fan/path recoloring with a Delta+1 palette per
    class.  The old color of an edge is ``new_to_old[new color]``.
    """
    if col.proper:
        return col
    slots = np.zeros(len(col.eu), dtype=np.int32)
    for c in range(col.n_colors):
        idx = col.class_edges(c)
        if len(idx) <= 1:
            continue
        pairs = list(zip(col.eu[idx].tolist(), col.ev[idx].tolist()))
        degs = np.bincount(np.concatenate([col.eu[idx], col.ev[idx]]))
        if degs.max() <= 1:
            continue
        if degs.max() <= 2:
            slots[idx] = _split_paths_cycles(col.nv, pairs)
        else:
            cols, _ = _misra_gries(pairs)
            slots[idx] = np.asarray(cols, dtype=np.int32)
    keys = col.ecolor.astype(np.int64) * (int(slots.max()) + 1) + slots
    uniq, new = np.unique(keys, return_inverse=True)
    new_to_old = (uniq // (int(slots.max()) + 1)).astype(np.int64)
    out = EdgeColoring(col.kind, col.nv, col.eu, col.ev, new.astype(np.int32),
                       len(uniq), n_left=col.n_left, labels=col.labels,
                       color_reps=None if col.color_reps is None else col.color_reps[new_to_old],
                       group=col.group, refined_from=(col, new_to_old), validate=False)
    if out.recompute_max_degree() > 1:
        raise AssertionError("properize produced a non-proper coloring")
    out._known_max_degree = 1
    return out


def split_large_classes(col: EdgeColoring, K) -> EdgeColoring:
    """Refine so every class has at most n/K edges, using at most 2Kn colors."""
    if not col.proper:
        raise DomainError("split_large_classes requires a proper coloring")
    if col.n_colors > K * col.nv + 1e-9:
        raise DomainError(f"coloring has {col.n_colors} > K*n = {K * col.nv:.1f} colors")
    cap = int(col.nv // K)
    if cap < 1:
        raise DomainError(f"n/K = {col.nv / K:.3f} < 1; no class can satisfy the cap")
    piece = np.zeros(len(col.eu), dtype=np.int64)
    for c in range(col.n_colors):
        idx = col.class_edges(c)
        if len(idx) > cap:
            piece[idx] = np.arange(len(idx)) // cap
    n_piece = int(piece.max()) + 1
    keys = col.ecolor.astype(np.int64) * n_piece + piece
    uniq, new = np.unique(keys, return_inverse=True)
    new_to_old = (uniq // n_piece).astype(np.int64)
    out = EdgeColoring(col.kind, col.nv, col.eu, col.ev, new.astype(np.int32),
                       len(uniq), n_left=col.n_left, labels=col.labels,
                       color_reps=None if col.color_reps is None else col.color_reps[new_to_old],
                       group=col.group, refined_from=(col, new_to_old),
                       known_max_degree=1, validate=False)
    if out.n_colors > 2 * K * col.nv + 1e-9:
        raise AssertionError("split produced more than 2Kn colors")
    return out


# -- entangled graphs ----------------------------------------------------------------

@dataclass
class EntangledGraph:
    """Union of the edges whose color lies in the chosen subset."""

    coloring: EdgeColoring
    color_mask: np.ndarray

    @cached_property
    def graph(self):
        from .clique import DenseGraph

        sel = self.color_mask[self.coloring.ecolor]
        m = np.zeros((self.coloring.nv, self.coloring.nv), dtype=bool)
        m[self.coloring.eu[sel], self.coloring.ev[sel]] = True
        m |= m.T
        return DenseGraph.from_bool_matrix(m)

    @property
    def colors(self) -> np.ndarray:
        return np.where(self.color_mask)[0]


def entangle(col: EdgeColoring, colors) -> EntangledGraph:
    mask = np.zeros(col.n_colors, dtype=bool)
    mask[np.asarray(list(colors), dtype=np.int64)] = True
    return EntangledGraph(col, mask)


def sample_entangled(col: EdgeColoring, p: float, seed) -> EntangledGraph:
    """Include each color independently with probability p; deterministic per seed."""
    if not 0 <= p <= 1:
        raise DomainError(f"probability {p} outside [0, 1]")
    rng = substream(seed, "entangle")
    return EntangledGraph(col, rng.random(col.n_colors) < p)


def colors_within(col: EdgeColoring, vertices) -> int:
    return col.colors_within(vertices)
