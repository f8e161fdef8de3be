"""Difference sets, doubling statistics, common dilates and dimension witnesses.

Counting and comparison paths use exact integer / rational arithmetic so the
acceptance thresholds never wobble with floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coloring import difference_coloring, properize
from .errors import BudgetExceeded, DomainError
from .fewcolor import greedy_span, span_from
from .groups import GroupSpec


@dataclass
class SetStats:
    """A set with its difference set A - A (0 included) and exact doubling K."""

    group: GroupSpec
    members: np.ndarray
    diff: np.ndarray

    @property
    def K(self) -> Fraction:
        return Fraction(len(self.diff), len(self.members))


def difference_set(g: GroupSpec, members) -> SetStats:
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) == 0:
        raise DomainError("A must be nonempty")
    diff = np.unique(g.pairwise_diff(A, A))
    return SetStats(g, A, diff)


def sumset(g: GroupSpec, a, b) -> np.ndarray:
    A = np.unique(np.asarray(a, dtype=np.int64))
    B = np.unique(np.asarray(b, dtype=np.int64))
    if len(A) == 0 or len(B) == 0:
        raise DomainError("sets must be nonempty")
    return np.unique(g.add_outer(A, B))


def common_dilate(g: GroupSpec, members, multipliers) -> int | None:
    """Smallest nonzero y with t*y in A - A for every multiplier t, if any.

    When no such y exists, the doubling lower bound
    |A - A| >= |A|^(1 + 1/(2^q m)) with q = |T|, m = max(T) + 1 must hold
    and is asserted exactly.
    """
    T = sorted(set(int(t) for t in multipliers))
    if not T or T[0] < 1:
        raise DomainError("multipliers must be positive integers")
    for t in T:
        if math.gcd(t, g.order) != 1:
            raise DomainError(f"multiplier {t} is not coprime to |G| = {g.order}")
    stats = difference_set(g, members)
    in_diff = np.zeros(g.order, dtype=bool)
    in_diff[stats.diff] = True
    ys = np.arange(1, g.order)
    ok = np.ones(len(ys), dtype=bool)
    for t in T:
        ok &= in_diff[g.scalar_mul(t, ys)]
    hits = ys[ok]
    if len(hits):
        return int(hits[0])
    q, m = len(T), max(T) + 1
    e = (1 << q) * m
    if len(stats.diff) ** e < len(stats.members) ** (e + 1):
        raise AssertionError("dilate-free set violates the doubling lower bound")
    return None


def count_small_doubling(g: GroupSpec, n: int, m: int,
                         histogram: bool = False,
                         enumeration_budget: int = 5_000_000):
    """Exact count of A with |A| = n and |A - A| <= m, by guarded enumeration.

    Walks size-n subsets in lexicographic flat order, maintaining difference
    multiplicities incrementally; branches whose partial difference set
    already exceeds m are pruned (unless a histogram is requested).
    """
    N = g.order
    if n < 1 or n > N:
        return ({} if histogram else 0)
    if math.comb(N, n) > enumeration_budget:
        raise BudgetExceeded(
            f"C({N},{n}) = {math.comb(N, n)} subsets exceeds the enumeration budget "
            f"of {enumeration_budget}")
    diff_table = g.pairwise_diff(np.arange(N), np.arange(N))
    counts = np.zeros(N, dtype=np.int64)
    counts[0] = 1  # 0 = a - a is always present once |A| >= 1
    hist: dict[int, int] = {}
    total = 0
    chosen: list[int] = []
    distinct = 1

    def add(x: int) -> int:
        nonlocal distinct
        gained = 0
        for a in chosen:
            for d in (diff_table[x, a], diff_table[a, x]):
                if counts[d] == 0:
                    gained += 1
                counts[d] += 1
        distinct += gained
        chosen.append(x)
        return gained

    def remove(x: int):
        nonlocal distinct
        chosen.pop()
        for a in chosen:
            for d in (diff_table[x, a], diff_table[a, x]):
                counts[d] -= 1
                if counts[d] == 0:
                    distinct -= 1

    def rec(start: int):
        nonlocal total
        if len(chosen) == n:
            if histogram:
                hist[distinct] = hist.get(distinct, 0) + 1
            if distinct <= m:
                total += 1
            return
        for x in range(start, N - (n - len(chosen)) + 1):
            add(x)
            if histogram or distinct <= m:
                rec(x + 1)
            remove(x)

    rec(0)
    return hist if histogram else total


@dataclass
class DimensionWitness:
    """A short sequence S with A inside v1 + {-1,0,1}-span(S)."""

    group: GroupSpec
    members: np.ndarray
    base: int                    # v1, smallest flat of A
    elements: np.ndarray         # one group element per chosen color
    colors: list[int]            # color ids in the properized difference coloring
    coloring: object
    K: Fraction                  # doubling ratio of the difference coloring
    bound: float                 # 18 K ln n

    def verify(self) -> bool:
        """Containment via ordered frontier expansion on the difference coloring."""
        pos = {int(x): i for i, x in enumerate(self.coloring.labels)}
        reached = span_from(self.coloring, pos[self.base], self.colors)
        return len(reached) == len(self.members)


def dimension_witness(g: GroupSpec, members) -> DimensionWitness:
    """Witness that the additive dimension of A is at most 18 K ln n.

    Builds the difference coloring on A, properizes it (at most 3x colors),
    runs the greedy span from the smallest element and reads one group
    element off each chosen color.
    """
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) < 2:
        raise DomainError("|A| must be at least 2")
    col = difference_coloring(g, A)
    K = Fraction(col.n_colors, col.nv)
    prop = properize(col)
    trace = greedy_span(prop, 0)  # vertex 0 holds the smallest element
    elements = prop.color_reps[trace.colors]
    n = len(A)
    bound = 18.0 * float(K) * math.log(n)
    if len(trace.colors) > bound + 1e-9:
        raise AssertionError(f"witness length {len(trace.colors)} exceeds 18 K ln n = {bound:.2f}")
    return DimensionWitness(g, A, int(A[0]), elements, trace.colors, prop, K, bound)


def clique_doubling_check(g: GroupSpec, members, exponent) -> bool:
    """Exact test |A - A| >= |A|^(p/q), done as |A-A|^q >= |A|^p in integers."""
    e = Fraction(exponent)
    stats = difference_set(g, members)
    d, a = len(stats.diff), len(stats.members)
    return d ** e.denominator >= a ** e.numerator
