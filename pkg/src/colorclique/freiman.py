"""Lexicographic compression machinery on F_p^n.

The coordinate order puts the largest index in charge, which coincides with
the flat-integer order of this package's little-endian mixed-radix
encoding, so "lexicographically smaller" simply means "smaller flat".
All set operations work on arrays of flats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .groups import GroupSpec


def _check_space(g: GroupSpec) -> int:
    if not g.is_vector_space:
        raise DomainError(f"{g} is not a vector space F_p^n")
    return g.characteristic


def leading_index(g: GroupSpec, v: int) -> int:
    """Largest nonzero coordinate index of v."""
    coords = g.decode(int(v))
    nz = np.where(coords != 0)[0]
    if len(nz) == 0:
        raise DomainError("zero vector has no leading index")
    return int(nz[-1])


def qualifying_directions(g: GroupSpec) -> np.ndarray:
    """All nonzero v with leading coordinate exactly 1."""
    _check_space(g)
    coords = g.decode(np.arange(1, g.order))
    lead = (len(g.factors) - 1) - np.argmax((coords[:, ::-1] != 0), axis=1)
    vals = coords[np.arange(len(coords)), lead]
    return np.arange(1, g.order)[vals == 1]


def line_through(g: GroupSpec, x: int, v: int) -> np.ndarray:
    p = _check_space(g)
    pts = [int(x)]
    for _ in range(p - 1):
        pts.append(int(g.add(pts[-1], v)))
    return np.sort(np.asarray(pts, dtype=np.int64))


def initial_segment(line: np.ndarray, k: int) -> np.ndarray:
    """The k lexicographically smallest points of the line (flat order)."""
    if not 0 <= k <= len(line):
        raise DomainError(f"segment size {k} outside 0..{len(line)}")
    return np.sort(np.asarray(line, dtype=np.int64))[:k]


def compress(g: GroupSpec, members, v: int) -> np.ndarray:
    """C_v(A): per line in direction v, keep an initial segment of equal size."""
    _check_space(g)
    A = np.unique(np.asarray(members, dtype=np.int64))
    if int(v) == 0:
        raise DomainError("direction must be nonzero")
    out = []
    done: set[int] = set()
    for x in A:
        if int(x) in done:
            continue
        line = line_through(g, int(x), int(v))
        done.update(int(y) for y in line)
        cnt = int(np.isin(line, A).sum())
        out.append(line[:cnt])
    return np.sort(np.concatenate(out)) if out else A


def _difference_flats(g: GroupSpec, A: np.ndarray) -> np.ndarray:
    return np.unique(g.pairwise_diff(A, A))


def is_star_compressed(g: GroupSpec, members) -> bool:
    """Fixed under every compression along v with leading 1 and e_l(v) - v in A."""
    A = np.unique(np.asarray(members, dtype=np.int64))
    in_a = np.zeros(g.order, dtype=bool)
    in_a[A] = True
    for v in qualifying_directions(g):
        l = leading_index(g, int(v))
        e = int(g.strides[l])
        if not in_a[g.sub(e, int(v))]:
            continue
        if not np.array_equal(compress(g, A, int(v)), A):
            return False
    return True


def star_compress(g: GroupSpec, members) -> np.ndarray:
    """Apply qualifying compressions in flat order of v until a fixed point.

    Requires the standard basis inside A.  The sum of flat ranks strictly
    decreases with every effective compression, which forces termination;
    cardinality is preserved and the basis stays.
    """
    A = np.unique(np.asarray(members, dtype=np.int64))
    basis = g.strides.astype(np.int64)
    if not np.isin(basis, A).all():
        raise DomainError("star compression requires the standard basis inside A")
    dirs = qualifying_directions(g)
    leads = np.asarray([leading_index(g, int(v)) for v in dirs])
    basis_of = g.strides[leads].astype(np.int64)
    while True:
        changed = False
        in_a = np.zeros(g.order, dtype=bool)
        in_a[A] = True
        for v, e in zip(dirs, basis_of):
            if not in_a[g.sub(int(e), int(v))]:
                continue
            B = compress(g, A, int(v))
            if not np.array_equal(B, A):
                if B.sum() >= A.sum():
                    raise AssertionError("compression failed to decrease the rank sum")
                A = B
                in_a = np.zeros(g.order, dtype=bool)
                in_a[A] = True
                changed = True
        if not changed:
            break
    if not np.isin(basis, A).all():
        raise AssertionError("compression dropped a basis vector")
    return A


def compression_inequality_check(g: GroupSpec, a_members, b_members, v: int) -> bool:
    """|C_v(A) - C_v(B)| <= |C_v(A - B)|, both sides computed exactly."""
    A = np.unique(np.asarray(a_members, dtype=np.int64))
    B = np.unique(np.asarray(b_members, dtype=np.int64))
    ca = compress(g, A, v)
    cb = compress(g, B, v)
    lhs = len(np.unique(g.pairwise_diff(ca, cb)))
    amb = np.unique(g.pairwise_diff(A, B))
    rhs = len(compress(g, amb, v))
    return lhs <= rhs


def affine_span(g: GroupSpec, members) -> tuple[int, int, np.ndarray]:
    """Smallest coset of a subgroup containing A.

    Returns (size, shift, basis flats); size = p^rank of span(A - a0).
    """
    p = _check_space(g)
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) == 0:
        raise DomainError("A must be nonempty")
    a0 = int(A[0])
    vecs = g.decode(g.sub(A, a0)) % p
    basis: list[np.ndarray] = []   # reduced echelon rows, pivot value 1
    pivots: list[int] = []
    for row in vecs:
        r = row.copy()
        for b, piv in zip(basis, pivots):
            if r[piv] != 0:
                r = (r - r[piv] * b) % p
        nz = np.where(r != 0)[0]
        if len(nz) == 0:
            continue
        piv = int(nz[0])
        r = (r * pow(int(r[piv]), -1, p)) % p
        for i, b in enumerate(basis):
            if b[piv] != 0:
                basis[i] = (b - b[piv] * r) % p
        basis.append(r)
        pivots.append(piv)
    rank = len(basis)
    flats = np.asarray([g.encode(b) for b in basis], dtype=np.int64)
    return p ** rank, a0, flats


def fminus_bound_check(g: GroupSpec, members) -> bool:
    """Exact verdict on |span(A)| / |A| <= p^K / (K + 2) with K = |A-A| / |A|.

    The rational-exponent power is compared by cross multiplication in big
    integers, so a failure is genuine, never rounding.
    """
    p = _check_space(g)
    if p < 3:
        raise DomainError("bound requires p >= 3")
    A = np.unique(np.asarray(members, dtype=np.int64))
    if len(A) == 0:
        raise DomainError("A must be nonempty")
    K = Fraction(len(_difference_flats(g, A)), len(A))
    span_size, _, _ = affine_span(g, A)
    ratio = Fraction(span_size, len(A))
    lhs = ratio * (K + 2)          # must be <= p^K
    a, b = K.numerator, K.denominator
    return lhs.numerator ** b <= (p ** a) * (lhs.denominator ** b)


def fminus_sides(g: GroupSpec, members) -> tuple[Fraction, Fraction]:
    """(ratio * (K+2), K) for external high-precision cross-checks."""
    p = _check_space(g)
    A = np.unique(np.asarray(members, dtype=np.int64))
    K = Fraction(len(_difference_flats(g, A)), len(A))
    span_size, _, _ = affine_span(g, A)
    return Fraction(span_size, len(A)) * (K + 2), K
