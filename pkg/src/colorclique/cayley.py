"""Cayley graphs and structured random generating-set samplers.

Generating sets are inverse-closed subsets of G \\ {0}, stored as boolean
masks over element flats.  The samplers realize the line-based, doubling-
orbit and rotational constructions; their deterministic structural
guarantees (quadruple-freeness, per-line coverage, rotation identities) are
checked exhaustively by the verify functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .clique import CliqueCertificate, DenseGraph, max_clique
from .errors import DomainError
from .groups import (GroupSpec, dilation_orbits, find_scalar_of_order,
                     lines_through_origin, sign_classes)
from .rng import seeded as rng_seeded, stream as rng_stream


@dataclass
class SymmetricSet:
    """Inverse-closed subset of G \\ {0}."""

    group: GroupSpec
    mask: np.ndarray

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if len(self.mask) != self.group.order:
            raise DomainError("mask length must equal |G|")
        if self.mask[0]:
            raise DomainError("0 cannot be a generator")
        if not (self.mask[self.group.neg_table] == self.mask).all():
            raise DomainError("set is not inverse-closed")

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def elements(self) -> np.ndarray:
        return np.where(self.mask)[0]

    def complement(self) -> "SymmetricSet":
        m = ~self.mask
        m[0] = False
        return SymmetricSet(self.group, m)

    def save(self, path, header: str = ""):
        with open(path, "w") as fh:
            fh.write(f"# group {self.group}\n")
            if header:
                fh.write(f"# {header}\n")
            for x in self.elements():
                fh.write(",".join(str(c) for c in self.group.decode(int(x))) + "\n")

    @classmethod
    def load(cls, g: GroupSpec, path) -> "SymmetricSet":
        mask = np.zeros(g.order, dtype=bool)
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                coords = [int(x) for x in line.split(",")]
                mask[int(g.encode(np.asarray(coords)))] = True
        return cls(g, mask)


def build_cayley(g: GroupSpec, gens: SymmetricSet) -> DenseGraph:
    """x ~ y iff x - y is a generator; the graph is |S|-regular."""
    diff = g.pairwise_diff(np.arange(g.order), np.arange(g.order))
    return DenseGraph.from_bool_matrix(gens.mask[diff])


def sample_uniform(g: GroupSpec, p: float, seed) -> SymmetricSet:
    """Include each sign class {s, -s} independently with probability p."""
    if not 0 <= p <= 1:
        raise DomainError(f"probability {p} outside [0, 1]")
    part = sign_classes(g)
    rng = rng_seeded(seed, "uniform")
    chosen = rng.random(part.n_classes) < p
    mask = np.zeros(g.order, dtype=bool)
    mask[1:] = chosen[part.class_of[1:]]
    return SymmetricSet(g, mask)


def sample_z5d(g: GroupSpec, seed) -> SymmetricSet:
    """Per line {x, 2x, 3x, 4x} of Z_5^d, include one of {x,4x} / {2x,3x} uniformly.

    Forces |S| = (N-1)/2 and, for every nonzero x, exactly one of x and 2x
    in S; the resulting Cayley graph is self-complementary under doubling.
    """
    if any(f != 5 for f in g.factors):
        raise DomainError("sampler requires Z_5^d")
    rng = rng_seeded(seed, "z5d")
    mask = np.zeros(g.order, dtype=bool)
    for line in lines_through_origin(g):
        x = int(line.min())
        first = np.array([x, g.scalar_mul(4, x)], dtype=np.int64)
        second = np.array([g.scalar_mul(2, x), g.scalar_mul(3, x)], dtype=np.int64)
        mask[first if rng.random() < 0.5 else second] = True
    return SymmetricSet(g, mask)


def sample_coprime6(g: GroupSpec, seed) -> SymmetricSet:
    """Doubling-orbit sampler for gcd(|G|, 6) = 1.

    Sign classes are grouped along each doubling orbit into consecutive
    pairs {x,2x},{4x,8x},... plus one possible singleton; one class per
    pair enters S uniformly, singletons enter with probability 1/2.  S and
    its complement are identically distributed and S never contains a full
    quadruple {y, 2y, 4y, 8y}.
    """
    if math.gcd(g.order, 6) != 1:
        raise DomainError(f"|G| = {g.order} is not coprime to 6")
    part = sign_classes(g)
    rng = rng_seeded(seed, "coprime6")
    mask = np.zeros(g.order, dtype=bool)
    neg = g.neg_table

    def include(cid: int):
        r = int(part.reps[cid])
        mask[r] = True
        mask[neg[r]] = True

    for orbit in dilation_orbits(g, 2, part):
        ids = orbit.class_ids
        for k in range(0, len(ids) - 1, 2):
            include(ids[k] if rng.random() < 0.5 else ids[k + 1])
        if len(ids) % 2 == 1:
            if rng.random() < 0.5:
                include(ids[-1])
    return SymmetricSet(g, mask)


_SAMPLERS = {"uniform": sample_uniform, "z5d": sample_z5d, "coprime6": sample_coprime6}


def sample(name: str, g: GroupSpec, seed, p: float = 0.5) -> SymmetricSet:
    if name not in _SAMPLERS:
        raise DomainError(f"unknown sampler {name!r}; choose from {sorted(_SAMPLERS)}")
    if name == "uniform":
        return sample_uniform(g, p, seed)
    return _SAMPLERS[name](g, seed)


@dataclass
class MonoProbabilityCheck:
    subset_size: int
    estimate: float
    bound: float
    slack: float
    trials: int

    @property
    def ok(self) -> bool:
        return self.estimate <= self.bound + self.slack


def monochromatic_subset_probability_bound(sampler: str, g: GroupSpec, subset,
                                           trials: int = 2000, seed=0) -> MonoProbabilityCheck:
    """Estimate P(X subset of S) and compare with 2^(-|X|/2) plus 5 sigma."""
    X = np.unique(np.asarray(subset, dtype=np.int64))
    if sampler not in ("z5d", "coprime6"):
        raise DomainError("bound applies to the structured samplers")
    hits = 0
    for t in range(trials):
        s = _SAMPLERS[sampler](g, rng_seeded(seed, "mono", t).integers(0, 2 ** 62))
        if s.mask[X].all():
            hits += 1
    bound = 2.0 ** (-len(X) / 2.0)
    sigma = math.sqrt(bound * (1 - bound) / trials)
    return MonoProbabilityCheck(len(X), hits / trials, bound, 5 * sigma, trials)


# ---------------------------------------------------------------------------
# Cayley r-colorings
# ---------------------------------------------------------------------------

@dataclass
class CayleyColoring:
    """Partition of G \\ {0} into r symmetric classes; each class a Cayley graph."""

    group: GroupSpec
    class_of: np.ndarray     # flat -> class id in 0..r-1, -1 at 0
    r: int
    alpha: int | None = None  # rotation witness of multiplicative order 2r

    def generating_set(self, i: int) -> SymmetricSet:
        mask = self.class_of == i
        mask[0] = False
        return SymmetricSet(self.group, mask)

    def validate(self):
        if self.class_of[0] != -1:
            raise AssertionError("0 must be uncolored")
        vals = self.class_of[1:]
        if vals.min() < 0 or vals.max() >= self.r:
            raise AssertionError("classes do not partition G \\ {0}")
        neg = self.group.neg_table
        if not (self.class_of[neg[1:]] == vals).all():
            raise AssertionError("classes are not inverse-closed")
        if self.alpha is not None and not self.rotation_ok():
            raise AssertionError("rotation identity fails")

    def rotation_ok(self) -> bool:
        """c(alpha * x) == c(x) + 1 (mod r) for every nonzero x."""
        if self.alpha is None:
            return False
        g = self.group
        xs = np.arange(1, g.order)
        ax = g.scalar_mul(self.alpha, xs)
        return bool((self.class_of[ax] == (self.class_of[xs] + 1) % self.r).all())

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"# group {self.group} r {self.r}"
                     + (f" alpha {self.alpha}" if self.alpha is not None else "") + "\n")
            for x in range(1, self.group.order):
                fh.write(f"{x} {self.class_of[x]}\n")


def _equipartition(rng, items: np.ndarray, r: int) -> list[np.ndarray]:
    """Random split into r blocks whose sizes differ by at most one."""
    perm = rng.permutation(items)
    q, rem = divmod(len(items), r)
    blocks, pos = [], 0
    for i in range(r):
        size = q + (1 if i < rem else 0)
        blocks.append(perm[pos:pos + size])
        pos += size
    return blocks


def rcoloring_smallp(g: GroupSpec, r: int, seed) -> CayleyColoring:
    """Per line, equipartition the (p-1)/2 sign-class reps into r colors.

    Valid for 2r < p <= 2^(2r); no union of r-1 classes covers a full line.
    """
    p = g.characteristic
    if p <= 2 * r:
        raise DomainError(f"requires p > 2r, got p = {p}, r = {r}")
    if p > 2 ** (2 * r):
        raise DomainError(f"small-p construction needs p <= 2^(2r); use rcoloring_largep")
    rng = rng_seeded(seed, "rcolor-small")
    neg = g.neg_table
    class_of = np.full(g.order, -1, dtype=np.int64)
    for line in lines_through_origin(g):
        reps = np.asarray(sorted({min(int(x), int(neg[x])) for x in line}), dtype=np.int64)
        for i, block in enumerate(_equipartition(rng, reps, r)):
            class_of[block] = i
            class_of[neg[block]] = i
    return CayleyColoring(g, class_of, r)


def _doubling_orbits_of_classes(g: GroupSpec, line: np.ndarray, neg) -> list[list[int]]:
    """Doubling orbits of the sign-class reps on one line, in traversal order."""
    reps = sorted({min(int(x), int(neg[x])) for x in line})
    rep_of = {}
    for x in reps:
        rep_of[x] = x
        rep_of[int(neg[x])] = x
    orbits = []
    seen: set[int] = set()
    for x in reps:
        if x in seen:
            continue
        orbit, y = [], x
        while y not in seen:
            seen.add(y)
            orbit.append(y)
            y = rep_of[int(g.scalar_mul(2, y))]
        orbits.append(orbit)
    return orbits


def rcoloring_largep(g: GroupSpec, r: int, seed) -> CayleyColoring:
    """Per line, cut each doubling orbit of sign classes into intervals of size r.

    Valid for p > 2^(2r); within every full interval each color appears
    exactly once, leftover intervals get a random injection into the colors.
    """
    p = g.characteristic
    if p <= 2 ** (2 * r):
        raise DomainError(f"large-p construction needs p > 2^(2r) = {2 ** (2 * r)}")
    rng = rng_seeded(seed, "rcolor-large")
    neg = g.neg_table
    class_of = np.full(g.order, -1, dtype=np.int64)
    for line in lines_through_origin(g):
        for orbit in _doubling_orbits_of_classes(g, line, neg):
            for k in range(0, len(orbit), r):
                chunk = orbit[k:k + r]
                colors = rng.permutation(r)[: len(chunk)]
                for x, c in zip(chunk, colors):
                    class_of[x] = c
                    class_of[neg[x]] = c
    return CayleyColoring(g, class_of, r)


def default_interval_length(g: GroupSpec, r: int) -> int:
    """Rotational interval length: slowly growing, a multiple of r, at least r."""
    n = max(g.order, 16)
    base = 2 * math.ceil(math.log2(math.log2(n)))
    return max(r, r * math.ceil(base / r))


def rotational_coloring(g: GroupSpec, r: int, seed, ell: int | None = None) -> CayleyColoring:
    """Cayley r-coloring with c(alpha x) = c(x) + 1 for a scalar alpha of order 2r.

    Small characteristic (p < 2^(2r*ell)): per line, equipartition the
    elements g0^j x for j < (p-1)/(2r) and rotate.  Large characteristic:
    per <2, alpha>-orbit, equitably color power-of-two intervals of length
    ell and rotate.
    """
    p = g.characteristic
    if p % (2 * r) != 1:
        raise DomainError(f"requires p = 1 mod 2r, got p = {p}, r = {r}")
    if ell is None:
        ell = default_interval_length(g, r)
    if ell % r != 0 or ell < r:
        raise DomainError("ell must be a positive multiple of r")
    alpha = find_scalar_of_order(p, 2 * r)
    rng = rng_seeded(seed, "rotational")
    class_of = np.full(g.order, -1, dtype=np.int64)

    if p < 2 ** (2 * r * ell):
        g0 = _primitive_root(p)
        base_count = (p - 1) // (2 * r)
        for line in lines_through_origin(g):
            x = int(line.min())
            base = np.asarray([g.scalar_mul(pow(g0, j, p), x) for j in range(base_count)],
                              dtype=np.int64)
            for i, block in enumerate(_equipartition(rng, base, r)):
                for y in block:
                    for k in range(2 * r):
                        z = int(g.scalar_mul(pow(alpha, k, p), int(y)))
                        class_of[z] = (i + k) % r
    else:
        hp = 1
        alpha_powers = {pow(alpha, k, p) for k in range(2 * r)}
        while pow(2, hp, p) not in alpha_powers:
            hp += 1
        if hp < ell:
            raise DomainError("interval length exceeds the power-of-two orbit")
        seen = np.zeros(g.order, dtype=bool)
        seen[0] = True
        for x in range(1, g.order):
            if seen[x]:
                continue
            base = np.asarray([g.scalar_mul(pow(2, a, p), x) for a in range(hp)], dtype=np.int64)
            # intervals of length ell, last one in [ell, 2*ell-1]
            cuts = []
            pos = 0
            while hp - pos >= 2 * ell:
                cuts.append((pos, pos + ell))
                pos += ell
            cuts.append((pos, hp))
            base_color = np.empty(hp, dtype=np.int64)
            for lo, hi in cuts:
                size = hi - lo
                reps = np.tile(np.arange(r), math.ceil(size / r))[:size]
                base_color[lo:hi] = rng.permutation(reps)
            for a in range(hp):
                for k in range(2 * r):
                    z = int(g.scalar_mul(pow(alpha, k, p), int(base[a])))
                    if class_of[z] >= 0:
                        raise AssertionError("orbit representation is not unique")
                    class_of[z] = (base_color[a] + k) % r
                    seen[z] = True
    out = CayleyColoring(g, class_of, r, alpha=alpha)
    out.validate()
    return out


def _mult_order(a: int, p: int) -> int:
    o, x = 1, a % p
    while x != 1:
        x = (x * a) % p
        o += 1
    return o


def _primitive_root(p: int) -> int:
    for a in range(2, p):
        if _mult_order(a, p) == p - 1:
            return a
    raise DomainError(f"no primitive root mod {p}")


# ---------------------------------------------------------------------------
# verification and exact clique on Cayley graphs
# ---------------------------------------------------------------------------

def verify_self_complementary(graph: DenseGraph, g: GroupSpec, alpha: int) -> bool:
    """True iff x -> alpha*x maps edges onto non-edges and vice versa."""
    modulus = g.characteristic if g.is_vector_space else g.order
    if math.gcd(int(alpha), modulus) != 1:
        raise DomainError(f"alpha = {alpha} is not invertible mod {modulus}")
    perm = g.scalar_mul(alpha, np.arange(g.order))
    m = graph.to_bool_matrix()
    mapped = m[np.ix_(perm, perm)]
    target = ~m
    np.fill_diagonal(target, False)
    np.fill_diagonal(mapped, False)
    return bool((mapped == target).all())


def cayley_clique(g: GroupSpec, gens: SymmetricSet, budget: int | None = None,
                  seed_witness: np.ndarray | None = None) -> CliqueCertificate:
    """Exact clique number of a Cayley graph via the translate-to-zero reduction.

    Every clique translates to one containing 0, whose other vertices lie in
    the neighborhood S, so it suffices to solve on the subgraph induced by S
    (size |S| instead of |G|).  Witness vertices are group-element flats.
    """
    members = gens.elements()
    if len(members) == 0:
        return CliqueCertificate(np.array([0]), 1, True)
    diff = g.pairwise_diff(members, members)
    sub = DenseGraph.from_bool_matrix(gens.mask[diff])
    initial = None
    if seed_witness is not None and len(seed_witness) >= 2:
        w = np.asarray(seed_witness, dtype=np.int64)
        # translate so the witness contains 0, then drop 0
        w = g.sub(w, int(w.min()))
        pos = {int(x): i for i, x in enumerate(members)}
        initial = np.asarray([pos[int(x)] for x in w if x != 0], dtype=np.int64)
    cert = max_clique(sub, budget=budget, initial=initial)
    witness = np.concatenate([[0], members[cert.vertices]])
    return CliqueCertificate(witness, cert.size + 1, cert.exact, cert.nodes_explored)


def cayley_independence(g: GroupSpec, gens: SymmetricSet,
                        budget: int | None = None) -> CliqueCertificate:
    return cayley_clique(g, gens.complement(), budget=budget)
