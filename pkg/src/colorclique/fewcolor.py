"""Greedy and randomized few-color connectivity processes.

Covers greedy span sequences, the random ball-growth and K-log-K component
processes, component coalescence, few-color spanning trees, efficiently
colored trees, rich subsets and the adversarial spanning-tree instance.

All logarithmic budgets clamp ln(x) below at 1 so they stay meaningful at
desk scale.  Ratios K are always measured from the coloring at hand as
colors / vertices, never trusted from the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _scipy_cc

from ._kernels import coalesce_gains, crossing_new_vertex_counts
from .coloring import EdgeColoring, properize, split_large_classes
from .errors import DomainError, StatisticalFailure
from .groups import GroupSpec
from .rng import seeded as rng_seeded

DECAY = 1.0 - 1.0 / 512.0


def _clog(x: float) -> float:
    """ln clamped below at 1."""
    return max(math.log(x), 1.0) if x > 0 else 1.0


def components_labels(nv: int, eu, ev) -> np.ndarray:
    """Connected-component labels, canonicalized so labels order by smallest member."""
    if len(eu) == 0:
        return np.arange(nv, dtype=np.int64)
    m = coo_matrix((np.ones(len(eu), dtype=bool), (eu, ev)), shape=(nv, nv))
    _, raw = _scipy_cc(m, directed=False)
    first = np.full(raw.max() + 1, nv, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(nv))
    return np.searchsorted(np.sort(first), first[raw]).astype(np.int64)


def _forest_edges(nv: int, eu, ev) -> list[tuple[int, int]]:
    """Deterministic BFS spanning forest of the given edge set."""
    order = np.lexsort((ev, eu))
    eu2 = np.concatenate([eu[order], ev[order]])
    ev2 = np.concatenate([ev[order], eu[order]])
    srt = np.lexsort((ev2, eu2))
    eu2, ev2 = eu2[srt], ev2[srt]
    ptr = np.searchsorted(eu2, np.arange(nv + 1))
    seen = np.zeros(nv, dtype=bool)
    out = []
    for root in range(nv):
        if seen[root] or ptr[root] == ptr[root + 1]:
            continue
        seen[root] = True
        queue = [root]
        while queue:
            u = queue.pop(0)
            for k in range(ptr[u], ptr[u + 1]):
                w = int(ev2[k])
                if not seen[w]:
                    seen[w] = True
                    out.append((u, w))
                    queue.append(w)
    return out


# ---------------------------------------------------------------------------
# robust outgoing-color counts N^+(eps; C)
# ---------------------------------------------------------------------------

def robust_color_count(col: EdgeColoring, comp, eps: float) -> int:
    """min over deletions of floor(eps*n) outside vertices of |N(C; rest)|.

    Greedy removal by unique-contribution count: at each step delete the
    outside vertex that is the sole remaining carrier of the most colors.
    Properness makes per-(vertex, color) contributions disjoint.
    """
    C = np.unique(np.asarray(comp, dtype=np.int64))
    n = col.nv
    m_del = int(eps * n)
    in_c = np.zeros(n, dtype=bool)
    in_c[C] = True
    outside = np.where(~in_c)[0]
    if len(outside) == 0:
        return 0
    sub = col.color_matrix[np.ix_(C, outside)]
    pairs_c = sub.ravel().astype(np.int64)
    pairs_w = np.broadcast_to(outside, sub.shape).ravel()
    keep = pairs_c >= 0
    pairs_c, pairs_w = pairs_c[keep], pairs_w[keep]
    if len(pairs_c) == 0:
        return 0
    colors, cinv = np.unique(pairs_c, return_inverse=True)
    support = np.bincount(cinv, minlength=len(colors))
    if m_del == 0:
        return len(colors)
    if m_del >= len(outside):
        return 0
    # per-color carrier slices
    order = np.argsort(cinv, kind="stable")
    carr_w = pairs_w[order]
    cptr = np.zeros(len(colors) + 1, dtype=np.int64)
    np.cumsum(np.bincount(cinv, minlength=len(colors)), out=cptr[1:])
    # per-vertex color lists
    worder = np.argsort(pairs_w, kind="stable")
    v_colors = cinv[worder]
    v_sorted = pairs_w[worder]
    alive_v = np.ones(n, dtype=bool)
    alive_color = np.ones(len(colors), dtype=bool)
    kill = np.zeros(n, dtype=np.int64)

    def lone_carrier(ci):
        for k in range(cptr[ci], cptr[ci + 1]):
            if alive_v[carr_w[k]]:
                return int(carr_w[k])
        return -1

    for ci in range(len(colors)):
        if support[ci] == 1:
            kill[lone_carrier(ci)] += 1
    kill[~alive_v] = -1
    kill[in_c] = -1
    for _ in range(m_del):
        u = int(np.argmax(kill))
        if kill[u] < 0:
            break
        alive_v[u] = False
        kill[u] = -1
        lo = int(np.searchsorted(v_sorted, u))
        hi = int(np.searchsorted(v_sorted, u, side="right"))
        for ci in v_colors[lo:hi]:
            if not alive_color[ci]:
                continue
            support[ci] -= 1
            if support[ci] == 0:
                alive_color[ci] = False
            elif support[ci] == 1:
                kill[lone_carrier(ci)] += 1
    return int(alive_color.sum())


def nplus_at_least(col: EdgeColoring, comp, eps: float, threshold: float) -> bool:
    """Decide N^+(eps; comp) >= threshold, short-circuiting the exact greedy.

    Colors whose outside support exceeds the deletion budget survive any
    adversary, which settles most components without the full minimization.
    """
    C = np.unique(np.asarray(comp, dtype=np.int64))
    n = col.nv
    m_del = int(eps * n)
    in_c = np.zeros(n, dtype=bool)
    in_c[C] = True
    outside = np.where(~in_c)[0]
    if len(outside) == 0:
        return threshold <= 0
    sub = col.color_matrix[np.ix_(C, outside)].ravel()
    sub = sub[sub >= 0]
    colors, counts = np.unique(sub, return_counts=True)
    if len(colors) < threshold:
        return False
    if (counts > m_del).sum() >= threshold:
        return True
    return robust_color_count(col, C, eps) >= threshold


# ---------------------------------------------------------------------------
# greedy span
# ---------------------------------------------------------------------------

@dataclass
class SpanTrace:
    """Color sequence whose stepwise frontier expansion reaches V_s from v1."""

    start: int
    colors: list[int]
    added: list[np.ndarray]
    n_vertices: int

    @property
    def step_sizes(self) -> list[int]:
        return [len(a) for a in self.added]

    def vertex_sets(self) -> list[np.ndarray]:
        cur = np.array([self.start], dtype=np.int64)
        out = [cur]
        for a in self.added:
            cur = np.sort(np.concatenate([cur, a]))
            out.append(cur)
        return out


def greedy_span(col: EdgeColoring, v1: int) -> SpanTrace:
    """Grow from v1, each step taking the color matching the most new vertices.

    Ties break toward the smallest color id.  The step count satisfies
    s <= 6 K ln n with K = colors/n (asserted).
    """
    if col.kind != "complete":
        raise DomainError("greedy_span requires a complete host")
    if not col.proper:
        raise DomainError("greedy_span requires a proper coloring")
    n = col.nv
    ptr, ceu, cev, _ = col._csr
    in_set = np.zeros(n, dtype=bool)
    in_set[v1] = True
    covered = 1
    colors: list[int] = []
    added: list[np.ndarray] = []
    while covered < n:
        counts = crossing_new_vertex_counts(ptr, ceu, cev, in_set)
        c = int(np.argmax(counts))
        if counts[c] == 0:
            raise AssertionError("complete host cannot stall")
        lo, hi = ptr[c], ptr[c + 1]
        u, v = ceu[lo:hi], cev[lo:hi]
        cross = in_set[u] != in_set[v]
        new = np.where(in_set[u[cross]], v[cross], u[cross])
        new = np.unique(new)
        in_set[new] = True
        covered += len(new)
        colors.append(c)
        added.append(np.sort(new))
    K = col.ratio()
    bound = 6.0 * K * math.log(n) if n > 1 else 0.0
    if len(colors) > bound + 1e-9:
        raise AssertionError(f"greedy span used {len(colors)} > 6*K*ln(n) = {bound:.2f} colors")
    return SpanTrace(int(v1), colors, added, n)


def span_from(col: EdgeColoring, v: int, colors) -> np.ndarray:
    """Vertices reachable from v via paths whose colors are a subsequence of ``colors``."""
    in_set = np.zeros(col.nv, dtype=bool)
    in_set[v] = True
    ptr, ceu, cev, _ = col._csr
    for c in colors:
        lo, hi = ptr[int(c)], ptr[int(c) + 1]
        u, w = ceu[lo:hi], cev[lo:hi]
        cross = in_set[u] != in_set[w]
        new = np.where(in_set[u[cross]], w[cross], u[cross])
        in_set[new] = True
    return np.where(in_set)[0]


# ---------------------------------------------------------------------------
# random growth processes
# ---------------------------------------------------------------------------

@dataclass
class BallGrowthResult:
    """Per-vertex ball process records over a shared random color stream."""

    K: float = 0.0
    J: int = 1
    kappa: int = 0
    stream: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    vertices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    times: list[np.ndarray] = field(default_factory=list)       # t_2..t_J per vertex
    members: list[np.ndarray] = field(default_factory=list)     # B_J per vertex
    T: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    nplus: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    good: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))
    frac_tail_ok: float = 1.0
    warning: str | None = None
    fallback: "KlogkResult | None" = None


def ball_growth(col: EdgeColoring, seed, vertices=None) -> BallGrowthResult:
    """Simulate the staged ball process on a split proper coloring.

    Requires measured K = colors/n >= 16 (otherwise falls back to
    klogk_growth with a warning).  Records, per vertex, the times t_j, the
    grown set B_J and the verdict of the robust color check
    N^+(3/8; B_J) >= K n / 128.
    """
    n = col.nv
    if n == 1:
        return BallGrowthResult(K=0.0, J=1, vertices=np.array([0]),
                                members=[np.array([0])], T=np.zeros(1, dtype=np.int64),
                                nplus=np.zeros(1, dtype=np.int64), good=np.ones(1, dtype=bool))
    if not col.proper:
        raise DomainError("ball_growth requires a proper coloring")
    K = col.ratio()
    if K < 16:
        fb = klogk_growth(col, seed)
        return BallGrowthResult(K=K, warning=f"K = {K:.2f} < 16; fell back to klogk_growth",
                                fallback=fb)
    R = col.n_colors
    kappa = math.ceil(900 * K)
    J = 1 << int(math.floor(math.log2(K / 16))) if K >= 16 else 1
    rng = rng_seeded(*_seed_keys(seed, "ball"))
    colors_stream = rng.integers(0, R, size=2 * kappa + 64).astype(np.int64)
    max_stream = 64 * kappa

    if vertices is None:
        vertices = np.arange(n)
    vertices = np.asarray(vertices, dtype=np.int64)
    matrix = col.color_matrix.astype(np.int64)
    matrix_idx = np.where(matrix < 0, R, matrix)  # sentinel color R
    half = n / 2.0

    times_all, members_all = [], []
    T = np.zeros(len(vertices), dtype=np.int64)
    for vi, v in enumerate(vertices):
        B = [int(v)]
        ts: list[int] = []
        failed = False
        for j in range(2, J + 1):
            w = int(math.floor(math.log2(j - 1)))
            Bw = np.asarray(B[: 1 << w], dtype=np.int64)
            Barr = np.asarray(B, dtype=np.int64)
            # N(B_{j-1}): colors on edges from B to outside
            subB = matrix_idx[Barr]
            subB = subB.copy()
            subB[:, Barr] = R
            nb_mask = np.zeros(R + 1, dtype=bool)
            nb_mask[np.unique(subB)] = True
            nb_mask[R] = False
            notnb = ~nb_mask
            notnb[R] = False
            cnt = notnb[matrix_idx].sum(axis=1)
            p_mask = cnt >= half
            p_mask[Barr] = False
            # colors between B_{2^w} and P_j
            subQ = matrix_idx[Bw][:, p_mask]
            q_mask = np.zeros(R + 1, dtype=bool)
            q_mask[np.unique(subQ)] = True
            q_mask[R] = False
            used = set(ts)
            t_j = -1
            scan_from = 0
            while t_j < 0:
                hits = np.where(q_mask[colors_stream[scan_from:]])[0]
                for h in hits:
                    t_cand = scan_from + int(h) + 1
                    if t_cand not in used:
                        t_j = t_cand
                        break
                if t_j < 0:
                    if len(colors_stream) >= max_stream:
                        break
                    scan_from = len(colors_stream)
                    colors_stream = np.concatenate([
                        colors_stream,
                        rng.integers(0, R, size=len(colors_stream)).astype(np.int64)])
            if t_j < 0:
                failed = True
                break
            s_color = int(colors_stream[t_j - 1])
            cand = np.where((matrix_idx[Bw] == s_color).any(axis=0) & p_mask)[0]
            if len(cand) == 0:
                raise AssertionError("sampled color must connect to P_j")
            B.append(int(cand[0]))
            ts.append(t_j)
        times_all.append(np.asarray(ts, dtype=np.int64))
        members_all.append(np.asarray(B, dtype=np.int64))
        T[vi] = (1 << 62) if failed else (max(ts) if ts else 0)

    tail_ok = T <= kappa
    nplus = np.zeros(len(vertices), dtype=np.int64)
    good = np.zeros(len(vertices), dtype=bool)
    thr = K * n / 128.0
    for vi in range(len(vertices)):
        if tail_ok[vi]:
            nplus[vi] = robust_color_count(col, members_all[vi], 3.0 / 8.0)
            good[vi] = nplus[vi] >= thr
    return BallGrowthResult(K=K, J=J, kappa=kappa, stream=colors_stream,
                            vertices=vertices, times=times_all, members=members_all,
                            T=T, nplus=nplus, good=good,
                            frac_tail_ok=float(tail_ok.mean()))


def _seed_keys(seed, label):
    if isinstance(seed, tuple):
        return (*seed, label)
    return (int(seed), label)


@dataclass
class KlogkResult:
    """Components after exposing O(K log K) random colors."""

    K: float
    labels: np.ndarray
    exposed: np.ndarray            # distinct exposed colors
    stream: np.ndarray
    leaving: np.ndarray            # per component id: distinct colors leaving it
    comp_good: np.ndarray
    good_vertices: np.ndarray
    flag_ok: bool
    retries: int


def klogk_growth(col: EdgeColoring, seed, retry_budget: int = 20) -> KlogkResult:
    """Expose ceil(80 K ln K) random colors and grade the resulting components.

    A component is good when N^+(1/4; C) >= K n / 64.  Retries with fresh
    streams until at least 9n/10 vertices sit in good components, then
    raises StatisticalFailure carrying the last trace.
    """
    if not col.proper:
        raise DomainError("klogk_growth requires a proper coloring")
    n = col.nv
    K = col.ratio()
    if n > 1 and K < 2:
        raise DomainError(f"klogk_growth requires K >= 2, measured {K:.2f}")
    R = col.n_colors
    m = max(1, math.ceil(80 * K * _clog(K)))
    thr = K * n / 64.0
    last = None
    for attempt in range(max(1, retry_budget)):
        rng = rng_seeded(*_seed_keys(seed, "klogk"), attempt)
        s = rng.integers(0, R, size=m).astype(np.int64) if R > 0 else np.empty(0, dtype=np.int64)
        exposed = np.unique(s)
        mask = np.zeros(R, dtype=bool)
        mask[exposed] = True
        sel = mask[col.ecolor]
        labels = components_labels(n, col.eu[sel], col.ev[sel])
        ncomp = int(labels.max()) + 1
        cu = labels[col.eu].astype(np.int64)
        cv = labels[col.ev].astype(np.int64)
        crossing = cu != cv
        keys = np.unique(np.concatenate([
            cu[crossing] * R + col.ecolor[crossing],
            cv[crossing] * R + col.ecolor[crossing]]))
        leaving = np.bincount(keys // R, minlength=ncomp)
        comp_good = np.zeros(ncomp, dtype=bool)
        sizes = np.bincount(labels, minlength=ncomp)
        quarter = math.ceil(n / 4.0)
        for cid in range(ncomp):
            if sizes[cid] >= quarter:
                # already at the coalescence target; growth grading is moot
                comp_good[cid] = True
                continue
            members = np.where(labels == cid)[0]
            comp_good[cid] = nplus_at_least(col, members, 0.25, thr)
        good_vertices = comp_good[labels]
        flag_ok = bool(good_vertices.sum() >= 0.9 * n)
        last = KlogkResult(K, labels, exposed, s, leaving, comp_good,
                           good_vertices, flag_ok, attempt)
        if flag_ok:
            return last
    raise StatisticalFailure(
        f"klogk_growth: fewer than 9n/10 good vertices after {retry_budget} retries", trace=last)


# ---------------------------------------------------------------------------
# coalescence
# ---------------------------------------------------------------------------

@dataclass
class CoalesceResult:
    colors: list[int]
    merge_edges: list[tuple[int, int, int]]   # (u, v, color)
    labels: np.ndarray
    history: list[dict]
    reached_target: bool
    decay_ok: bool
    preconds_held: bool


def coalesce(col: EdgeColoring, labels, good_vertices=None,
             max_steps: int | None = None, preconds: bool | None = None) -> CoalesceResult:
    """Greedily expose colors that merge the most good components.

    Stops once a component reaches n/4 vertices or after 900 ln n steps.
    When the phase-1 preconditions hold, each step must shrink the good
    component count by the factor 1 - 1/512; violations are surfaced in
    ``decay_ok`` rather than raised.
    """
    n = col.nv
    comp = np.asarray(labels, dtype=np.int64).copy()
    if good_vertices is None:
        good_vertices = np.ones(n, dtype=bool)
    good_vertices = np.asarray(good_vertices, dtype=bool)
    ncomp0 = int(comp.max()) + 1
    bad_in_comp = np.bincount(comp[~good_vertices], minlength=ncomp0) > 0
    comp_good = ~bad_in_comp
    if preconds is None:
        preconds = bool(good_vertices.sum() >= 0.9 * n)
    target = math.ceil(n / 4.0)
    if max_steps is None:
        max_steps = math.ceil(900 * _clog(n))
    ptr, ceu, cev, _ = col._csr

    colors: list[int] = []
    merge_edges: list[tuple[int, int, int]] = []
    history: list[dict] = []
    decay_ok = True
    sizes = np.bincount(comp, minlength=ncomp0)
    while sizes.max() < target and len(colors) < max_steps:
        gains = coalesce_gains(ptr, ceu, cev, comp, comp_good)
        c = int(np.argmax(gains))
        if gains[c] == 0:
            break
        n_good_before = int(comp_good[np.unique(comp)].sum())
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            r = x
            while parent.get(r, r) != r:
                r = parent[r]
            while parent.get(x, x) != x:
                parent[x], x = r, parent[x]
            return r

        lo, hi = ptr[c], ptr[c + 1]
        for u, v in zip(ceu[lo:hi], cev[lo:hi]):
            a, b = find(int(comp[u])), find(int(comp[v]))
            if a != b:
                parent[max(a, b)] = min(a, b)
                merge_edges.append((int(u), int(v), c))
        if parent:
            remap = np.arange(ncomp0, dtype=np.int64)
            for x in parent:
                remap[x] = find(x)
            new_good = comp_good.copy()
            for x in parent:
                r = find(x)
                new_good[r] &= comp_good[x]
            comp = remap[comp]
            comp_good = new_good
        colors.append(c)
        sizes = np.bincount(comp, minlength=ncomp0)
        n_good_after = int(comp_good[np.unique(comp)].sum())
        history.append({"color": c, "gain": int(gains[c]),
                        "good_components": n_good_after,
                        "max_component": int(sizes.max())})
        if preconds and n_good_before > 1 and n_good_after > n_good_before * DECAY + 1e-9:
            decay_ok = False
    return CoalesceResult(colors, merge_edges, comp, history,
                          bool(sizes.max() >= target) or len(colors) == 0,
                          decay_ok, preconds)


# ---------------------------------------------------------------------------
# component expansion and spanning trees
# ---------------------------------------------------------------------------

def expand_component(col: EdgeColoring, start_vertices, delta: float):
    """Greedy color choices until at most delta*n vertices remain outside.

    Returns (colors, attach_edges).  The color count obeys the exact budget
    (n/|S|) K ln(1/delta) with K = colors/n.
    """
    n = col.nv
    in_set = np.zeros(n, dtype=bool)
    start = np.asarray(start_vertices, dtype=np.int64)
    if len(start) == 0:
        raise DomainError("expand_component needs a nonempty start set")
    in_set[start] = True
    s0 = int(in_set.sum())
    ptr, ceu, cev, _ = col._csr
    colors: list[int] = []
    attach: list[tuple[int, int, int]] = []
    limit = delta * n
    while n - in_set.sum() > limit:
        counts = crossing_new_vertex_counts(ptr, ceu, cev, in_set)
        c = int(np.argmax(counts))
        if counts[c] == 0:
            break
        lo, hi = ptr[c], ptr[c + 1]
        u, v = ceu[lo:hi], cev[lo:hi]
        cross = np.where(in_set[u] != in_set[v])[0]
        outs = np.where(in_set[u[cross]], v[cross], u[cross])
        ins = np.where(in_set[u[cross]], u[cross], v[cross])
        _, firsts = np.unique(outs, return_index=True)
        for k in np.sort(firsts):
            attach.append((int(ins[k]), int(outs[k]), c))
        in_set[outs] = True
        colors.append(c)
    if 0 < delta < 1:
        K = col.ratio()
        budget = math.ceil((n / s0) * K * math.log(1.0 / delta)) + 1
        if len(colors) > budget:
            raise AssertionError(
                f"expand used {len(colors)} colors > budget (n/s)K ln(1/delta) = {budget}")
    return colors, attach


@dataclass
class TreeCertificate:
    """A colored tree witness carrying the bound it must satisfy."""

    coloring: EdgeColoring
    edges: np.ndarray            # (m, 2) host vertex pairs
    edge_colors: np.ndarray      # host color ids
    vertices: np.ndarray
    phase1_colors: np.ndarray
    phase2_colors: list[int]
    extra_colors: list[int]
    declared_bound: float
    comp_history: list[int] | None = None
    flags: dict = field(default_factory=dict)

    def distinct_colors(self) -> int:
        return len(np.unique(self.edge_colors)) if len(self.edge_colors) else 0

    def verify(self, spanning: bool = False):
        m = len(self.edges)
        if m != len(self.vertices) - 1:
            raise AssertionError("edge count is not |V| - 1")
        labels = components_labels(self.coloring.nv,
                                   self.edges[:, 0], self.edges[:, 1])
        if m and len(np.unique(labels[self.vertices])) != 1:
            raise AssertionError("edges do not connect the vertex set")
        cm = self.coloring.color_matrix
        if m and not (cm[self.edges[:, 0], self.edges[:, 1]] == self.edge_colors).all():
            raise AssertionError("recorded colors disagree with the host coloring")
        if spanning and len(self.vertices) != self.coloring.nv:
            raise AssertionError("tree is not spanning")
        if self.distinct_colors() > self.declared_bound + 1e-9:
            raise AssertionError(
                f"{self.distinct_colors()} colors exceed declared bound {self.declared_bound:.2f}")

    def decay_ok(self, n: int | None = None) -> bool:
        if self.comp_history is None:
            return True
        n = self.coloring.nv if n is None else n
        return all(h <= DECAY ** i * n + 1e-9 for i, h in enumerate(self.comp_history))


def _phase1(split: EdgeColoring, seed, sample_cap: int = 512):
    """Expose phase-1 colors on the split coloring; returns (colors, labels, good, flag)."""
    n = split.nv
    rho = split.ratio()
    if rho < 2:
        # too few colors for the random processes; coalesce from singletons
        return (np.empty(0, dtype=np.int64), np.arange(n, dtype=np.int64),
                np.ones(n, dtype=bool), True, {"mode": "direct"})
    if rho >= 16:
        verts = None
        if n > sample_cap:
            rng = rng_seeded(*_seed_keys(seed, "ballsample"))
            verts = np.sort(rng.choice(n, size=sample_cap, replace=False))
        res = ball_growth(split, _seed_keys(seed, "p1"), vertices=verts)
        if res.fallback is None:
            exposed = np.unique(res.stream[: res.kappa])
            mask = np.zeros(split.n_colors, dtype=bool)
            mask[exposed] = True
            sel = mask[split.ecolor]
            labels = components_labels(n, split.eu[sel], split.ev[sel])
            good = np.zeros(n, dtype=bool)
            for vi, v in enumerate(res.vertices):
                if res.good[vi]:
                    good[labels == labels[v]] = True
            flag = bool(good.sum() >= 0.9 * n)
            return exposed, labels, good, flag, {"mode": "ball", "frac_tail_ok": res.frac_tail_ok}
        res = res.fallback
    else:
        try:
            res = klogk_growth(split, _seed_keys(seed, "p1"))
        except StatisticalFailure as exc:
            res = exc.trace
    return (res.exposed, res.labels, res.good_vertices, res.flag_ok,
            {"mode": "klogk", "retries": res.retries})


def _assemble_tree(col, pool, vertices):
    """Union-find acceptance over the candidate edge pool, in order."""
    parent = np.arange(col.nv, dtype=np.int64)

    def find(x):
        r = x
        while parent[r] != r:
            r = parent[r]
        while parent[x] != x:
            parent[x], x = r, parent[x]
        return r

    eu, ev, ec = [], [], []
    for u, v, c in pool:
        a, b = find(u), find(v)
        if a != b:
            parent[max(a, b)] = min(a, b)
            eu.append(u)
            ev.append(v)
            ec.append(c)
    edges = np.asarray(list(zip(eu, ev)), dtype=np.int64).reshape(-1, 2)
    return edges, np.asarray(ec, dtype=np.int64)


def spanning_tree(col: EdgeColoring, seed=0) -> TreeCertificate:
    """Spanning tree with at most 1000 K ln(n/K) distinct colors.

    Pipeline: split large classes, random phase-1 growth (ball process when
    the split ratio allows, otherwise the K log K process), greedy
    coalescence to an n/4 component, greedy expansion to residual K, then
    single-color attachments.
    """
    if col.kind != "complete":
        raise DomainError("spanning_tree requires a complete host")
    if not col.proper:
        raise DomainError("spanning_tree requires a proper coloring")
    n = col.nv
    if n == 1:
        return TreeCertificate(col, np.empty((0, 2), dtype=np.int64),
                               np.empty(0, dtype=np.int64), np.arange(1),
                               np.empty(0, dtype=np.int64), [], [], 0.0)
    K = col.ratio()
    bound = 1000.0 * K * _clog(n / K)
    split = split_large_classes(col, K)
    _, new_to_old = split.refined_from
    exposed, labels, good, flag, meta = _phase1(split, seed)

    mask = np.zeros(split.n_colors, dtype=bool)
    mask[exposed] = True
    sel = mask[split.ecolor]
    forest = _forest_edges(n, split.eu[sel], split.ev[sel])
    cm = col.color_matrix
    pool = [(u, v, int(cm[u, v])) for u, v in forest]
    phase1_colors = np.unique([c for _, _, c in pool]) if pool else np.empty(0, dtype=np.int64)

    co = coalesce(split, labels, good, preconds=flag)
    pool += [(u, v, int(cm[u, v])) for u, v, _ in co.merge_edges]
    phase2_colors = [int(new_to_old[c]) for c in co.colors]

    sizes = np.bincount(co.labels)
    big = np.where(co.labels == int(np.argmax(sizes)))[0]
    delta = K / n
    exp_colors, exp_attach = expand_component(col, big, delta)
    pool += [(u, v, c) for u, v, c in exp_attach]

    # single-color attachments for the residual vertices
    in_tree = np.zeros(n, dtype=bool)
    in_tree[big] = True
    for _, v, _ in exp_attach:
        in_tree[v] = True
    extra = list(exp_colors)
    for u in np.where(~in_tree)[0]:
        row = cm[u].copy()
        row[~in_tree] = np.iinfo(np.int32).max
        row[u] = np.iinfo(np.int32).max
        partner = int(np.argmin(row))
        pool.append((partner, int(u), int(cm[u, partner])))
        extra.append(int(cm[u, partner]))
        in_tree[u] = True

    edges, ecolors = _assemble_tree(col, pool, np.arange(n))
    cert = TreeCertificate(col, edges, ecolors, np.arange(n), phase1_colors,
                           phase2_colors, extra, bound,
                           flags={"phase1": meta, "coalesce_decay_ok": co.decay_ok,
                                  "reached_quarter": co.reached_target})
    cert.verify(spanning=True)
    return cert


def efficient_tree(col: EdgeColoring, members=None, seed=0,
                   retry_budget: int = 20) -> TreeCertificate:
    """Tree on a quarter-size subset whose phase-2 components decay geometrically.

    Retries phase 1 with fresh streams until the (1 - 1/512)^i decay
    invariant holds and the connected subset reaches n/4.
    """
    base = col if members is None else col.restrict(members)
    work = base if base.proper else properize(base)
    n = work.nv
    if n == 1:
        return TreeCertificate(work, np.empty((0, 2), dtype=np.int64),
                               np.empty(0, dtype=np.int64), np.arange(1),
                               np.empty(0, dtype=np.int64), [], [], 0.0)
    K = work.ratio()
    split = split_large_classes(work, K)
    rho = split.ratio()
    phase1_bound = 900 * rho if rho >= 16 else max(1.0, 80 * rho * _clog(rho))
    bound = phase1_bound + 900 * _clog(n)
    last_error = "no attempt"
    for attempt in range(max(1, retry_budget)):
        exposed, labels, good, flag, meta = _phase1(split, (int(seed) if not isinstance(seed, tuple) else 0, "eff", attempt))
        co = coalesce(split, labels, good, preconds=flag)
        sizes = np.bincount(co.labels)
        big_id = int(np.argmax(sizes))
        big = np.where(co.labels == big_id)[0]
        if len(big) < math.ceil(n / 4.0):
            last_error = f"largest component {len(big)} < n/4"
            continue
        mask = np.zeros(split.n_colors, dtype=bool)
        mask[exposed] = True
        in_big = np.zeros(n, dtype=bool)
        in_big[big] = True
        sel = mask[split.ecolor] & in_big[split.eu] & in_big[split.ev]
        forest = _forest_edges(n, split.eu[sel], split.ev[sel])
        cm = work.color_matrix
        pool = [(u, v, int(cm[u, v])) for u, v in forest]
        merge_pool = [(u, v, c) for u, v, c in co.merge_edges if in_big[u] and in_big[v]]
        steps = []
        for c in co.colors:
            steps.append([(u, v, int(cm[u, v])) for u, v, cc in merge_pool if cc == c])
        edges, ecolors = _assemble_tree(work, pool + [e for s in steps for e in s], big)
        # replay component counts of the subset under the phase-2 color order
        parent = {int(v): int(v) for v in big}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ncomp = len(big)
        for u, v in forest:
            if in_big[u] and in_big[v]:
                a, b = find(u), find(v)
                if a != b:
                    parent[a] = b
                    ncomp -= 1
        history = [ncomp]
        for s in steps:
            for u, v, _ in s:
                a, b = find(u), find(v)
                if a != b:
                    parent[a] = b
                    ncomp -= 1
            history.append(ncomp)
        cert = TreeCertificate(work, edges, ecolors, np.sort(big),
                               np.unique([c for _, _, c in pool]) if pool else np.empty(0, dtype=np.int64),
                               [int(c) for c in co.colors], [], bound,
                               comp_history=history,
                               flags={"phase1": meta, "attempt": attempt})
        if not cert.decay_ok(n):
            last_error = "component decay invariant failed"
            continue
        cert.verify(spanning=False)
        return cert
    raise StatisticalFailure(f"efficient_tree: {last_error} after {retry_budget} attempts")


# ---------------------------------------------------------------------------
# rich subsets and the hard instance
# ---------------------------------------------------------------------------

def rich_subset(col: EdgeColoring, t: int, seed, retry_budget: int = 20) -> np.ndarray:
    """A t-subset containing at least n/(20 Delta) colors, by repeated sampling."""
    n = col.nv
    delta = max(1, col.max_degree)
    if delta > n / 100.0:
        raise DomainError(f"Delta = {delta} > n/100")
    if t < math.sqrt(n / delta):
        raise DomainError(f"t = {t} < sqrt(n/Delta) = {math.sqrt(n / delta):.2f}")
    t0 = 1
    while delta * (t0 + 1) * t0 / 2.0 <= (n - 1) / 4.0:
        t0 += 1
    t0 = min(t0, t)
    target = n / (20.0 * delta)
    for attempt in range(max(1, retry_budget)):
        rng = rng_seeded(*_seed_keys(seed, "rich"), attempt)
        base = np.sort(rng.choice(n, size=t0, replace=False))
        if col.colors_within(base) >= target:
            chosen = np.zeros(n, dtype=bool)
            chosen[base] = True
            pad = np.where(~chosen)[0][: t - t0]
            return np.sort(np.concatenate([base, pad]))
    raise StatisticalFailure(f"rich_subset: no sample reached {target:.1f} colors "
                             f"in {retry_budget} attempts")


def hard_instance(n: int, K, seed) -> EdgeColoring:
    """Adversarial proper coloring of K_{n+s} with at most 5Kn colors.

    Random per-star proper colorings of the bipartite part from a Kn
    palette, fresh colors for clashing edges, round-robin coloring inside
    the large part, rainbow inside the small part.  Statistics are attached
    as ``hard_stats``.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    s = math.ceil(math.sqrt(K * n))
    if s < 1 or n < 2:
        raise DomainError("instance too small")
    palette = math.ceil(K * n)
    rng = rng_seeded(*_seed_keys(seed, "hard"))
    nv = n + s
    star = rng.permuted(np.tile(np.arange(palette, dtype=np.int64), (s, 1)), axis=1)[:, :n]
    # an edge clashes when another star uses the same color at its A_n endpoint
    col_keys = star * np.int64(n) + np.arange(n, dtype=np.int64)[None, :]
    uniq, inv, counts = np.unique(col_keys, return_inverse=True, return_counts=True)
    bad = (counts[inv] > 1).reshape(star.shape)
    n_bad = int(bad.sum())
    star_final = star.copy()
    star_final[bad] = palette + np.arange(n_bad)
    nxt = palette + n_bad

    eu_b, ev_b = np.meshgrid(np.arange(n), np.arange(s), indexing="xy")
    eu_b = eu_b.ravel()
    ev_b = (ev_b + n).ravel()
    ec_b = star_final.ravel()

    # round-robin proper coloring of the clique on A_n
    iu, iv = np.triu_indices(n, 1)
    if n % 2 == 1:
        ec_n = (iu + iv) % n
        used_n = n
    else:
        m = n - 1
        ec_n = np.where(iv == n - 1, (2 * iu) % m, (iu + iv) % m)
        used_n = m
    ec_n = ec_n + nxt
    nxt += used_n

    iu_s, iv_s = np.triu_indices(s, 1)
    ec_s = np.arange(len(iu_s)) + nxt

    eu = np.concatenate([eu_b, iu, iu_s + n])
    ev = np.concatenate([ev_b, iv, iv_s + n])
    ec = np.concatenate([ec_b, ec_n, ec_s])
    uniq_c, dense = np.unique(ec, return_inverse=True)
    out = EdgeColoring("complete", nv, eu, ev, dense, len(uniq_c), validate=False)
    # the three parts use disjoint color ranges and are proper within
    # themselves except possibly the star columns, so checking those is a
    # complete properness verification
    sorted_cols = np.sort(star_final, axis=0)
    if s > 1 and (np.diff(sorted_cols, axis=0) == 0).any():
        raise AssertionError("hard instance must be proper")
    out._known_max_degree = 1
    if out.n_colors > 5 * K * n:
        raise AssertionError(f"hard instance used {out.n_colors} > 5Kn colors")
    out.hard_stats = {"n": n, "s": s, "K": K, "palette": palette,
                      "n_bad": n_bad, "colors": out.n_colors}
    return out
