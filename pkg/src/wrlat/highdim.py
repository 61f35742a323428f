"""Sign-vector lattices over an orthogonal basis, with exact short vectors.

Over an orthogonal basis b_1..b_d with rational squared lengths, two
constructions are provided: the span of all 2^d sign combinations
sum s_i b_i (s_i = +-1), and, for even d, the span of the sign combinations
whose coordinate sum is divisible by d.  The first always contains the
doubled basis vectors 2 b_i, which for d > 4 undercut the sign vectors and
break well-roundedness as soon as the lengths differ; the second avoids them
and stays well-rounded for near-equal lengths.

Shortest vectors are found by exhaustive enumeration inside a proven radius
(the smallest diagonal Gram entry after a greedy size-reduction pass, which
is the squared length of an actual lattice vector).  The search uses an
exact rational Cholesky decomposition; floating point only suggests integer
interval endpoints, which are then corrected by exact Fraction predicates,
so membership of every enumerated vector is decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

__all__ = [
    "OrthoSpec",
    "LatticeD",
    "sign_vectors",
    "fullsign_lattice",
    "subset_sign_lattice",
    "shortest_vectors",
    "is_well_rounded_d",
    "integer_row_basis",
]

_MAX_ENUM_DIM = 8


@dataclass(frozen=True)
class OrthoSpec:
    """Orthogonal ambient basis: squared lengths of b_1..b_d, all positive."""

    lengths_sq: tuple[Fraction, ...]

    def __init__(self, lengths_sq: Iterable):
        lengths = tuple(Fraction(v) for v in lengths_sq)
        if not 2 <= len(lengths) <= _MAX_ENUM_DIM:
            raise ValueError(f"dimension must be in 2..{_MAX_ENUM_DIM}")
        if any(v <= 0 for v in lengths):
            raise ValueError("squared lengths must be positive")
        object.__setattr__(self, "lengths_sq", lengths)

    @property
    def d(self) -> int:
        return len(self.lengths_sq)


@dataclass(frozen=True)
class LatticeD:
    """Full-rank sublattice of the orthogonal ambient lattice, basis rows in
    b-coordinates, Gram matrix of exact rationals."""

    basis: tuple[tuple[int, ...], ...]
    lengths_sq: tuple[Fraction, ...]
    gram: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.basis)

    def basis_det(self) -> int:
        return _int_det([list(r) for r in self.basis])

    def gram_det(self) -> Fraction:
        return _fraction_det([list(r) for r in self.gram])

    def contains(self, vector: Sequence[int]) -> bool:
        """Exact membership of an ambient (b-coordinate) integer vector."""
        coeffs = _solve_left(self.basis, vector)
        return all(c.denominator == 1 for c in coeffs)


def _gram_from_basis(basis, lengths) -> tuple[tuple[Fraction, ...], ...]:
    d = len(basis)
    g = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            val = sum(
                Fraction(basis[i][k] * basis[j][k]) * lengths[k]
                for k in range(len(lengths))
            )
            g[i][j] = g[j][i] = val
    return tuple(tuple(row) for row in g)


def sign_vectors(d: int, subset: bool = False) -> list[tuple[int, ...]]:
    """All 2^d sign vectors, or only those with coordinate sum = 0 mod d."""
    out = []
    for signs in product((1, -1), repeat=d):
        if subset and sum(signs) % d != 0:
            continue
        out.append(signs)
    return out


def integer_row_basis(generators: Iterable[Sequence[int]], d: int) -> list[list[int]]:
    """Triangular integer basis of the row span of the generators.

    Column-by-column gcd elimination; requires the span to have full rank d.
    """
    rows = [list(g) for g in generators if any(g)]
    basis: list[list[int]] = []
    for col in range(d):
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            pivot = nz[0]
            for r in nz[1:]:
                t = r[col] // pivot[col]
                for j in range(d):
                    r[j] -= t * pivot[j]
            rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if nz:
            pivot = nz[0]
            if pivot[col] < 0:
                pivot = [-v for v in pivot]
            basis.append(pivot)
            rows = [r for r in rows if r is not nz[0] and any(r)]
    if len(basis) != d:
        raise ValueError("generators do not span a full-rank lattice")
    return basis


def fullsign_lattice(spec: OrthoSpec) -> LatticeD:
    """Span of all 2^d sign vectors sum s_i b_i."""
    basis = integer_row_basis(sign_vectors(spec.d), spec.d)
    basis_t = tuple(tuple(r) for r in basis)
    return LatticeD(basis_t, spec.lengths_sq, _gram_from_basis(basis, spec.lengths_sq))


def subset_sign_lattice(spec: OrthoSpec) -> LatticeD:
    """Span of the sign vectors with coordinate sum = 0 mod d; d must be even."""
    if spec.d % 2:
        raise ValueError("the balanced sign construction requires even d")
    basis = integer_row_basis(sign_vectors(spec.d, subset=True), spec.d)
    basis_t = tuple(tuple(r) for r in basis)
    return LatticeD(basis_t, spec.lengths_sq, _gram_from_basis(basis, spec.lengths_sq))


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------


def _int_det(m: list[list[int]]) -> int:
    """Integer determinant by fraction-free elimination (Bareiss)."""
    n = len(m)
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _fraction_det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    m = [[Fraction(v) for v in row] for row in m]
    det = Fraction(1)
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            if m[i][k]:
                f = m[i][k] * inv
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return det


def _solve_left(basis: Sequence[Sequence[int]], vector: Sequence[int]) -> list[Fraction]:
    """Solve x * basis = vector over the rationals (basis rows, square)."""
    d = len(basis)
    if len(vector) != d:
        raise ValueError("dimension mismatch")
    # transpose to solve basis^T x^T = vector^T by Gaussian elimination
    aug = [[Fraction(basis[j][i]) for j in range(d)] + [Fraction(vector[i])]
           for i in range(d)]
    for k in range(d):
        pivot_row = next((i for i in range(k, d) if aug[i][k] != 0), None)
        if pivot_row is None:
            raise ValueError("singular basis")
        aug[k], aug[pivot_row] = aug[pivot_row], aug[k]
        inv = 1 / aug[k][k]
        aug[k] = [v * inv for v in aug[k]]
        for i in range(d):
            if i != k and aug[i][k]:
                f = aug[i][k]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[k])]
    return [aug[i][d] for i in range(d)]


def _rational_rank(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    cols = len(rows[0])
    rank = 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# shortest vectors
# ---------------------------------------------------------------------------


def _size_reduce(basis: list[list[int]], gram: list[list[Fraction]]):
    """Greedy pairwise size reduction; applies a step only when it strictly
    shortens a row, so the pass loop terminates."""
    d = len(basis)
    changed = True
    while changed:
        changed = False
        order = sorted(range(d), key=lambda i: gram[i][i])
        for i in order:
            for j in order:
                if i == j:
                    continue
                t = math.floor(gram[i][j] / gram[j][j] + Fraction(1, 2))
                if not t:
                    continue
                new_norm = gram[i][i] - 2 * t * gram[i][j] + t * t * gram[j][j]
                if new_norm >= gram[i][i]:
                    continue
                for k in range(d):
                    basis[i][k] -= t * basis[j][k]
                for k in range(d):
                    if k != i:
                        gram[i][k] -= t * gram[j][k]
                        gram[k][i] = gram[i][k]
                gram[i][i] = new_norm
                changed = True
    return basis, gram


def _rational_cholesky(gram: Sequence[Sequence[Fraction]]):
    """q with Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2, exact."""
    d = len(gram)
    q = [[Fraction(v) for v in row] for row in gram]
    for i in range(d):
        for j in range(i + 1, d):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, d):
            for l in range(k, d):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _int_interval(center: Fraction, budget: Fraction) -> range:
    """Integers x with (x + center)^2 <= budget, via float seed + exact fix."""
    if budget < 0:
        return range(0)
    mid = -float(center)
    half = math.sqrt(float(budget)) if budget > 0 else 0.0

    def inside(x: int) -> bool:
        t = x + center
        return t * t <= budget

    lo = math.floor(mid - half)
    while inside(lo - 1):
        lo -= 1
    while lo <= mid and not inside(lo):
        lo += 1
    hi = math.ceil(mid + half)
    while inside(hi + 1):
        hi += 1
    while hi >= lo and not inside(hi):
        hi -= 1
    return range(lo, hi + 1)


def _enumerate_up_to(gram, bound: Fraction):
    """All nonzero integer coefficient vectors with Q(x) <= bound."""
    d = len(gram)
    q = _rational_cholesky(gram)
    x = [0] * d
    found: list[tuple[tuple[int, ...], Fraction]] = []

    def walk(i: int, remaining: Fraction):
        if i < 0:
            if any(x):
                found.append((tuple(x), bound - remaining))
            return
        center = sum((q[i][j] * x[j] for j in range(i + 1, d)), Fraction(0))
        for xi in _int_interval(center, remaining / q[i][i]):
            x[i] = xi
            step = q[i][i] * (xi + center) ** 2
            walk(i - 1, remaining - step)
        x[i] = 0

    walk(d - 1, bound)
    return found


def shortest_vectors(lat: LatticeD) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Minimal nonzero squared length and all vectors attaining it.

    Vectors are returned in ambient b-coordinates and come in +- pairs.
    Dimension is capped at 8 to keep exhaustive enumeration immediate.
    """
    if lat.d > _MAX_ENUM_DIM:
        raise ValueError(f"dimension {lat.d} exceeds the enumeration cap")
    basis = [list(r) for r in lat.basis]
    gram = [list(r) for r in lat.gram]
    basis, gram = _size_reduce(basis, gram)
    radius = min(gram[i][i] for i in range(lat.d))
    hits = _enumerate_up_to(gram, radius)
    min_norm = min(norm for _, norm in hits)
    ambient = []
    for coeffs, norm in hits:
        if norm != min_norm:
            continue
        vec = tuple(
            sum(coeffs[i] * basis[i][k] for i in range(lat.d))
            for k in range(lat.d)
        )
        ambient.append(vec)
    ambient.sort()
    return min_norm, ambient


def is_well_rounded_d(lat: LatticeD) -> bool:
    """True iff the minimal vectors span the ambient space."""
    _, vectors = shortest_vectors(lat)
    return _rational_rank(vectors) == lat.d
