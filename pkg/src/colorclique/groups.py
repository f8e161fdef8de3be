"""Finite abelian groups as products of cyclic factors.

Elements live in two interchangeable forms: canonical coordinate vectors
(coordinate i reduced mod ``factors[i]``) and flat integers ``0..N-1`` in
little-endian mixed-radix order (coordinate 0 is the least significant
digit).  Bulk operations work on numpy arrays of flat indices; the
``Element`` wrapper exists for ergonomic scalar work.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, StructuralError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """Z_{f1} x ... x Z_{fk} with order N = prod(factors)."""

    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors:
            raise DomainError("group needs at least one cyclic factor")
        if any(f < 2 for f in self.factors):
            raise DomainError(f"cyclic factors must be >= 2, got {self.factors}")

    @cached_property
    def order(self) -> int:
        return int(math.prod(self.factors))

    @cached_property
    def exponent(self) -> int:
        return int(math.lcm(*self.factors))

    @cached_property
    def strides(self) -> np.ndarray:
        s = np.ones(len(self.factors), dtype=np.int64)
        for i in range(1, len(self.factors)):
            s[i] = s[i - 1] * self.factors[i - 1]
        return s

    @cached_property
    def _factors_arr(self) -> np.ndarray:
        return np.asarray(self.factors, dtype=np.int64)

    # -- flat <-> coordinate conversions ------------------------------------

    def decode(self, idx) -> np.ndarray:
        """Flat index array -> coordinate array with trailing axis len(factors)."""
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self.strides) % self._factors_arr

    def encode(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % self._factors_arr
        return (coords * self.strides).sum(axis=-1)

    # -- arithmetic on flat indices ------------------------------------------

    def add(self, a, b):
        return self.encode(self.decode(a) + self.decode(b))

    def neg(self, a):
        return self.encode(-self.decode(a))

    def sub(self, a, b):
        return self.encode(self.decode(a) - self.decode(b))

    def scalar_mul(self, t: int, a):
        t = int(t) % self.exponent
        return self.encode(t * self.decode(a))

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.neg(np.arange(self.order))

    def pairwise_diff(self, a, b) -> np.ndarray:
        """Matrix of flat(a_i - b_j); fast paths for Z_N and F_2^n."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if len(self.factors) == 1:
            return (a[:, None] - b[None, :]) % self.order
        if all(f == 2 for f in self.factors):
            return a[:, None] ^ b[None, :]
        ca = self.decode(a)
        cb = self.decode(b)
        return self.encode(ca[:, None, :] - cb[None, :, :])

    def add_outer(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if len(self.factors) == 1:
            return (a[:, None] + b[None, :]) % self.order
        if all(f == 2 for f in self.factors):
            return a[:, None] ^ b[None, :]
        return self.encode(self.decode(a)[:, None, :] + self.decode(b)[None, :, :])

    # -- structure -----------------------------------------------------------

    @property
    def is_vector_space(self) -> bool:
        f0 = self.factors[0]
        return all(f == f0 for f in self.factors) and _is_prime(f0)

    @property
    def characteristic(self) -> int:
        if not self.is_vector_space:
            raise DomainError(f"{self} is not a vector space F_p^n")
        return self.factors[0]

    def element(self, coords: Sequence[int]) -> "Element":
        return Element(self, tuple(int(c) % f for c, f in zip(coords, self.factors)))

    def __str__(self) -> str:
        return format_group(self)


@dataclass(frozen=True)
class Element:
    """A group element in canonical coordinates."""

    group: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.group.factors):
            raise StructuralError("coordinate length does not match group factors")

    @property
    def flat(self) -> int:
        return int(self.group.encode(np.asarray(self.coords)))

    def _check(self, other: "Element"):
        if self.group != other.group:
            raise StructuralError(f"elements from different groups: {self.group} vs {other.group}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        g = self.group
        return Element(g, tuple(int(c) for c in g.decode(g.add(self.flat, other.flat))))

    def __neg__(self) -> "Element":
        g = self.group
        return Element(g, tuple(int(c) for c in g.decode(g.neg(self.flat))))

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __rmul__(self, t: int) -> "Element":
        g = self.group
        return Element(g, tuple(int(c) for c in g.decode(g.scalar_mul(t, self.flat))))


_PART_RE = re.compile(r"^([ZzFf])(\d+)(?:\^(\d+))?$")


def parse_group(text: str) -> GroupSpec:
    """Parse "Z5^4", "Z35", "F13^2", "Z2xZ4" into a GroupSpec."""
    factors: list[int] = []
    for part in text.strip().split("x"):
        m = _PART_RE.match(part.strip())
        if not m:
            raise DomainError(f"cannot parse group part {part!r}")
        kind, base, power = m.group(1).upper(), int(m.group(2)), int(m.group(3) or 1)
        if kind == "F" and not _is_prime(base):
            raise DomainError(f"F{base} requires a prime base")
        if base < 2 or power < 1:
            raise DomainError(f"bad group part {part!r}")
        factors.extend([base] * power)
    return GroupSpec(tuple(factors))


def format_group(g: GroupSpec) -> str:
    parts = []
    i = 0
    fs = g.factors
    while i < len(fs):
        j = i
        while j < len(fs) and fs[j] == fs[i]:
            j += 1
        parts.append(f"Z{fs[i]}" if j - i == 1 else f"Z{fs[i]}^{j - i}")
        i = j
    return "x".join(parts)


@dataclass(frozen=True)
class SignClassPartition:
    """Partition of G \\ {0} into classes {x, -x}."""

    group: GroupSpec
    class_of: np.ndarray  # flat -> class id, -1 for 0
    reps: np.ndarray      # class id -> smallest flat in the class

    @property
    def n_classes(self) -> int:
        return len(self.reps)

    def members(self, cid: int) -> np.ndarray:
        r = int(self.reps[cid])
        n = int(self.group.neg(r))
        return np.array([r], dtype=np.int64) if n == r else np.array([r, n], dtype=np.int64)

    def sizes(self) -> np.ndarray:
        negs = self.group.neg_table[self.reps]
        return np.where(negs == self.reps, 1, 2).astype(np.int64)


def sign_classes(g: GroupSpec) -> SignClassPartition:
    """Pair each nonzero x with -x; x with 2x = 0 forms a singleton."""
    N = g.order
    neg = g.neg_table
    class_of = np.full(N, -1, dtype=np.int64)
    reps = []
    for x in range(1, N):
        if class_of[x] >= 0:
            continue
        cid = len(reps)
        class_of[x] = cid
        class_of[neg[x]] = cid
        reps.append(x)
    return SignClassPartition(g, class_of, np.asarray(reps, dtype=np.int64))


@dataclass(frozen=True)
class DilationOrbit:
    """Cyclic orbit of sign classes under class -> t*class."""

    multiplier: int
    class_ids: tuple[int, ...]


def dilation_orbits(g: GroupSpec, t: int, partition: SignClassPartition | None = None) -> list[DilationOrbit]:
    """Orbits of the map x -> t*x on sign classes; t must be coprime to N."""
    if math.gcd(int(t), g.order) != 1:
        raise DomainError(f"multiplier {t} is not coprime to |G| = {g.order}")
    part = partition if partition is not None else sign_classes(g)
    mult = g.scalar_mul(t, part.reps)           # class id -> flat of t * rep
    next_class = part.class_of[mult]            # class id -> class id
    seen = np.zeros(part.n_classes, dtype=bool)
    orbits = []
    for start in range(part.n_classes):
        if seen[start]:
            continue
        cyc = []
        c = start
        while not seen[c]:
            seen[c] = True
            cyc.append(int(c))
            c = int(next_class[c])
        orbits.append(DilationOrbit(int(t), tuple(cyc)))
    return orbits


def lines_through_origin(g: GroupSpec) -> list[np.ndarray]:
    """Partition F_p^n \\ {0} into sets {a*x : a in F_p, a != 0}."""
    if not g.is_vector_space:
        raise DomainError(f"{g} is not a vector space; lines are undefined")
    p = g.characteristic
    N = g.order
    seen = np.zeros(N, dtype=bool)
    seen[0] = True
    lines = []
    for x in range(1, N):
        if seen[x]:
            continue
        pts = np.array([g.scalar_mul(a, x) for a in range(1, p)], dtype=np.int64)
        seen[pts] = True
        lines.append(np.sort(pts))
    return lines


def find_scalar_of_order(p: int, m: int) -> int:
    """Smallest alpha in F_p^x with multiplicative order exactly m."""
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    if m < 1 or (p - 1) % m != 0:
        raise DomainError(f"order {m} does not divide p-1 = {p - 1}")
    for a in range(1, p):
        if pow(a, m, p) != 1:
            continue
        if all(pow(a, d, p) != 1 for d in range(1, m) if m % d == 0):
            return a
    raise DomainError(f"no element of order {m} mod {p}")  # unreachable for valid input
