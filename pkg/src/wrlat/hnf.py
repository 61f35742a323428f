"""Brute-force sublattice enumeration via Hermite normal form.

Every index-n sublattice of a planar lattice has exactly one basis of the
form rows ``(a, b), (0, d)`` with ``a*d = n`` and ``0 <= b < d``, so the
number of index-n sublattices is sigma(n), the sum of divisors.  Walking all
triples, reducing each sublattice Gram matrix and testing a shape predicate
gives ground-truth counting sequences against which the Dirichlet-series
engine is verified.

Two execution paths produce identical numbers:

* a vectorized integer path for rational Gram matrices (scaled to integers),
  chunked to bound memory, feasible well beyond n = 10^4;
* an exact scalar path for Gram matrices over Q(sqrt(m)), operating on
  integer pairs (A, B) ~ A + B*sqrt(m), used for modest bounds and as the
  cross-check oracle for everything faster.

For the rectangular lattices diag(1, w) with irrational w (the lattices with
exactly two coincidence reflections) a separate structured counter
:func:`diag_irrational_wr_table` reaches n = 10^5 and beyond; it is not brute
force and is itself validated against :func:`count_table` on prefixes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .lattice import (
    GramMatrix2,
    IntMatrix2,
    PlanarLattice,
    ShapeClass,
    WELL_ROUNDED_SHAPES,
    classify,
)
from .quadratic import QuadValue

__all__ = [
    "SublatticeHNF",
    "CountTable",
    "SummatoryReport",
    "enumerate_hnf",
    "hnf_triples",
    "hnf_of_matrix",
    "sigma",
    "sigma_table",
    "divisors",
    "PREDICATES",
    "resolve_predicate",
    "count_by_shape",
    "count_table",
    "summatory",
    "find_sublattice_witness",
    "diag_irrational_wr_table",
]

_CHUNK_ELEMENTS = 2_000_000
_INT64_SAFE = 1 << 60


# ---------------------------------------------------------------------------
# HNF triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SublatticeHNF:
    """Canonical sublattice basis rows (a, b) and (0, d) with 0 <= b < d."""

    a: int
    b: int
    d: int

    def __post_init__(self):
        if self.a <= 0 or self.d <= 0 or not 0 <= self.b < max(self.d, 1):
            raise ValueError(f"invalid HNF triple {(self.a, self.b, self.d)}")

    @property
    def index(self) -> int:
        return self.a * self.d

    def to_matrix(self) -> IntMatrix2:
        return IntMatrix2(self.a, self.b, 0, self.d)


def divisors(n: int) -> list[int]:
    """Sorted divisors of n by trial division."""
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def sigma(n: int) -> int:
    return sum(divisors(n))


def sigma_table(nmax: int) -> np.ndarray:
    """sigma(n) for n = 0..nmax via a divisor sieve."""
    sig = np.zeros(nmax + 1, dtype=np.int64)
    for d in range(1, nmax + 1):
        sig[d::d] += d
    return sig


def enumerate_hnf(n: int) -> list[SublatticeHNF]:
    """All index-n sublattice triples, lexicographic in (a, b)."""
    if n < 1:
        raise ValueError("index must be >= 1")
    out = []
    for a in divisors(n):
        d = n // a
        for b in range(d):
            out.append(SublatticeHNF(a, b, d))
    return out


def hnf_triples(n: int) -> np.ndarray:
    """Index-n triples as an (sigma(n), 3) int64 array, same order as enumerate_hnf."""
    if n < 1:
        raise ValueError("index must be >= 1")
    blocks = []
    for a in divisors(n):
        d = n // a
        block = np.empty((d, 3), dtype=np.int64)
        block[:, 0] = a
        block[:, 1] = np.arange(d)
        block[:, 2] = d
        blocks.append(block)
    return np.concatenate(blocks)


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    """(g, u, v) with u*x + v*y = g = gcd(x, y) >= 0."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def hnf_of_matrix(h: IntMatrix2) -> SublatticeHNF:
    """Canonical HNF triple of the row span of a nonsingular integer matrix."""
    det = h.det()
    if det == 0:
        raise ValueError("singular basis matrix")
    p, q = h.e11, h.e12
    r, s = h.e21, h.e22
    g, u, v = _ext_gcd(p, r)
    b_raw = u * q + v * s
    d = abs(det) // g
    return SublatticeHNF(g, b_raw % d, d)


# ---------------------------------------------------------------------------
# shape predicates
# ---------------------------------------------------------------------------

#: Named shape predicates accepted by the counting operations and the CLI.
PREDICATES: dict[str, frozenset[ShapeClass]] = {
    "wr": WELL_ROUNDED_SHAPES,
    "square": frozenset({ShapeClass.SQUARE}),
    "hexagonal": frozenset({ShapeClass.HEXAGONAL}),
    "rhombic": frozenset({ShapeClass.RHOMBIC_WR, ShapeClass.RHOMBIC_NON_WR}),
    "rectangular": frozenset({ShapeClass.RECTANGULAR}),
    "oblique": frozenset({ShapeClass.OBLIQUE}),
    "none": frozenset(),
}


def resolve_predicate(
    spec: Union[str, Iterable[ShapeClass]], lattice: PlanarLattice | None = None
) -> tuple[str, frozenset[ShapeClass]]:
    """Resolve a predicate name or shape set to (identity string, shape set).

    ``"similar"`` resolves to the shape class of the parent lattice, which is
    what similarity means for the square and hexagonal parents used here.
    """
    if isinstance(spec, str):
        if spec == "similar":
            if lattice is None:
                raise ValueError("'similar' predicate needs the parent lattice")
            return "similar", frozenset({classify(lattice)})
        if spec not in PREDICATES:
            raise ValueError(f"unknown predicate {spec!r}")
        return spec, PREDICATES[spec]
    shapes = frozenset(spec)
    name = "+".join(sorted(s.value for s in shapes)) or "none"
    return name, shapes


# ---------------------------------------------------------------------------
# exact scalar path over integer pairs (A, B) ~ A + B*sqrt(m)
# ---------------------------------------------------------------------------


def _pair_sign(A: int, B: int, m: int) -> int:
    if B == 0:
        return (A > 0) - (A < 0)
    if A == 0:
        return 1 if B > 0 else -1
    sa = 1 if A > 0 else -1
    sb = 1 if B > 0 else -1
    if sa == sb:
        return sa
    d = A * A - m * B * B
    if d > 0:
        return sa
    return -sa  # d == 0 impossible for square-free m >= 2


def _pair_floor_ratio(U: int, V: int, W: int, m: int) -> int:
    """floor((U + V*sqrt(m)) / W) for W != 0, exactly."""
    if W < 0:
        U, V, W = -U, -V, -W
    if V == 0:
        return U // W
    if V > 0:
        K = isqrt(V * V * m)
    else:
        K = -isqrt(V * V * m) - 1
    t = (U + K) // W
    # candidate bracket {t, t+1}; accept t+1 iff value - (t+1) >= 0
    if _pair_sign(U - (t + 1) * W, V, m) >= 0:
        return t + 1
    return t


def _pair_reduce(g11, g12, g22, m):
    """Lagrange reduction of a Gram triple of integer pairs; exact."""
    a11, b11 = g11
    a12, b12 = g12
    a22, b22 = g22
    while True:
        if _pair_sign(a11 - a22, b11 - b22, m) > 0:
            a11, b11, a22, b22 = a22, b22, a11, b11
        # t = round(g12/g11): rationalize the ratio to (P + Q sqrt m)/D
        P = a12 * a11 - m * b12 * b11
        Q = b12 * a11 - a12 * b11
        D = a11 * a11 - m * b11 * b11
        t = _pair_floor_ratio(2 * P + D, 2 * Q, 2 * D, m)
        if t:
            na12 = a12 - t * a11
            nb12 = b12 - t * b11
            a22 -= t * (a12 + na12)
            b22 -= t * (b12 + nb12)
            a12, b12 = na12, nb12
        if _pair_sign(a22 - a11, b22 - b11, m) >= 0:
            break
    if _pair_sign(a12, b12, m) < 0:
        a12, b12 = -a12, -b12
    return (a11, b11), (a12, b12), (a22, b22)


def _classify_pairs(r11, r12, r22) -> ShapeClass:
    diag_equal = r11 == r22
    if r12 == (0, 0):
        return ShapeClass.SQUARE if diag_equal else ShapeClass.RECTANGULAR
    if (2 * r12[0], 2 * r12[1]) == r11:
        return ShapeClass.HEXAGONAL if diag_equal else ShapeClass.RHOMBIC_NON_WR
    return ShapeClass.RHOMBIC_WR if diag_equal else ShapeClass.OBLIQUE


def _scaled_pair_gram(gram: GramMatrix2) -> tuple[tuple, tuple, tuple, int]:
    """Scale a Gram matrix by a positive rational to integer pairs (A, B)."""
    m = gram.radicand
    entries = gram.entries()
    den = math.lcm(*(math.lcm(e.a.denominator, e.b.denominator) for e in entries))
    pairs = tuple(
        (int(e.a * den), int(e.b * den)) for e in entries
    )
    return pairs[0], pairs[1], pairs[2], m


def _sub_gram_pairs(p11, p12, p22, a, b, d):
    g11 = (
        a * a * p11[0] + 2 * a * b * p12[0] + b * b * p22[0],
        a * a * p11[1] + 2 * a * b * p12[1] + b * b * p22[1],
    )
    g12 = (d * (a * p12[0] + b * p22[0]), d * (a * p12[1] + b * p22[1]))
    g22 = (d * d * p22[0], d * d * p22[1])
    return g11, g12, g22


def _count_exact(p11, p12, p22, m, n, shapes) -> int:
    count = 0
    for a in divisors(n):
        d = n // a
        for b in range(d):
            g11, g12, g22 = _sub_gram_pairs(p11, p12, p22, a, b, d)
            r11, r12, r22 = _pair_reduce(g11, g12, g22, m)
            if _classify_pairs(r11, r12, r22) in shapes:
                count += 1
    return count


# ---------------------------------------------------------------------------
# vectorized integer path (rational Gram matrices)
# ---------------------------------------------------------------------------


def _reduce_arrays(g11: np.ndarray, g12: np.ndarray, g22: np.ndarray):
    """Vectorized Lagrange reduction of integer Gram triples, in place."""
    idx = np.arange(len(g11))
    while len(idx):
        a11 = g11[idx]
        a12 = g12[idx]
        a22 = g22[idx]
        swap = a11 > a22
        tmp = a11[swap]
        a11[swap] = a22[swap]
        a22[swap] = tmp
        t = (2 * a12 + a11) // (2 * a11)
        n12 = a12 - t * a11
        a22 = a22 - t * (a12 + n12)  # value bounded by old a22: no overflow
        g11[idx] = a11
        g12[idx] = n12
        g22[idx] = a22
        idx = idx[a22 < a11]
    np.abs(g12, out=g12)
    return g11, g12, g22


def _shape_mask(r11, r12, r22, shapes) -> np.ndarray:
    diag = r11 == r22
    zero12 = r12 == 0
    hexlike = 2 * r12 == r11
    mask = np.zeros(len(r11), dtype=bool)
    for s in shapes:
        if s is ShapeClass.SQUARE:
            mask |= diag & zero12
        elif s is ShapeClass.HEXAGONAL:
            mask |= diag & hexlike
        elif s is ShapeClass.RHOMBIC_WR:
            mask |= diag & ~zero12 & ~hexlike
        elif s is ShapeClass.RECTANGULAR:
            mask |= ~diag & zero12
        elif s is ShapeClass.RHOMBIC_NON_WR:
            mask |= ~diag & hexlike
        elif s is ShapeClass.OBLIQUE:
            mask |= ~diag & ~zero12 & ~hexlike
    return mask


def _int_triple_grams(a, b, d, p11, p12, p22):
    g11 = a * a * p11 + 2 * a * b * p12 + b * b * p22
    g12 = d * (a * p12 + b * p22)
    g22 = d * d * p22
    return g11, g12, g22


def _count_chunk_int(args) -> np.ndarray:
    p11, p12, p22, nmax, d_lo, d_hi, shape_names = args
    shapes = frozenset(ShapeClass(s) for s in shape_names)
    counts = np.zeros(nmax + 1, dtype=np.int64)
    pend_a, pend_b, pend_d = [], [], []
    size = 0

    def flush():
        nonlocal pend_a, pend_b, pend_d, size
        if not size:
            return
        a = np.concatenate(pend_a)
        b = np.concatenate(pend_b)
        d = np.concatenate(pend_d)
        pend_a, pend_b, pend_d = [], [], []
        size = 0
        g11, g12, g22 = _int_triple_grams(a, b, d, p11, p12, p22)
        r11, r12, r22 = _reduce_arrays(g11, g12, g22)
        mask = _shape_mask(r11, r12, r22, shapes)
        np.add.at(counts, (a * d)[mask], 1)

    for d in range(d_lo, d_hi + 1):
        amax = nmax // d
        if amax == 0:
            continue
        pend_a.append(np.repeat(np.arange(1, amax + 1, dtype=np.int64), d))
        pend_b.append(np.tile(np.arange(d, dtype=np.int64), amax))
        pend_d.append(np.full(amax * d, d, dtype=np.int64))
        size += amax * d
        if size >= _CHUNK_ELEMENTS:
            flush()
    flush()
    return counts


def _check_int64_budget(pmax: int, nmax: int) -> None:
    if pmax * nmax * nmax > _INT64_SAFE:
        raise OverflowError(
            f"integer path would exceed the int64 budget at N={nmax}; "
            "reduce N or rescale the Gram matrix"
        )


# ---------------------------------------------------------------------------
# public counting API
# ---------------------------------------------------------------------------


@dataclass
class CountTable:
    """Counting sequence n -> number of index-n sublattices passing a predicate."""

    counts: np.ndarray  # int64, counts[0] == 0
    predicate: str
    label: str = ""
    source: str = "brute-force"

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts[0] != 0:
            raise ValueError("counts[0] must be 0")

    @property
    def nmax(self) -> int:
        return len(self.counts) - 1

    def count(self, n: int) -> int:
        return int(self.counts[n])

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.counts)

    def summatory_at(self, x: int) -> int:
        return int(self.counts[: x + 1].sum())


@dataclass
class SummatoryReport:
    """A(x) against a model over a grid, with residual statistics."""

    x: np.ndarray
    a_values: np.ndarray
    model_values: np.ndarray
    residual: np.ndarray
    normalized: np.ndarray
    model_name: str = ""
    normalizer_name: str = ""

    def rows(self):
        for i in range(len(self.x)):
            yield (
                int(self.x[i]),
                int(self.a_values[i]),
                float(self.model_values[i]),
                float(self.residual[i]),
                float(self.normalized[i]),
            )

    def max_normalized(self) -> float:
        return float(np.max(np.abs(self.normalized)))


def count_by_shape(
    lattice: PlanarLattice,
    n: int,
    predicate: Union[str, Iterable[ShapeClass]],
) -> int:
    """Number of index-n sublattices whose reduced shape is in the predicate."""
    if n < 1:
        raise ValueError("index must be >= 1")
    _, shapes = resolve_predicate(predicate, lattice)
    if not shapes:
        return 0
    p11, p12, p22, m = _scaled_pair_gram(lattice.gram)
    if m == 0:
        _check_int64_budget(max(abs(p11[0]), abs(p12[0]), abs(p22[0])), n)
        tri = hnf_triples(n)
        a, b, d = tri[:, 0], tri[:, 1], tri[:, 2]
        g11, g12, g22 = _int_triple_grams(a, b, d, p11[0], p12[0], p22[0])
        r11, r12, r22 = _reduce_arrays(g11, g12, g22)
        return int(_shape_mask(r11, r12, r22, shapes).sum())
    return _count_exact(p11, p12, p22, m, n, shapes)


def count_table(
    lattice: PlanarLattice,
    nmax: int,
    predicate: Union[str, Iterable[ShapeClass]] = "wr",
    workers: int = 1,
) -> CountTable:
    """Brute-force counts for every index n <= nmax.

    Rational Gram matrices run on the chunked vectorized integer path and may
    be split over ``workers`` processes (the merge is an integer sum, so the
    result is identical for any worker count).  Irrational Gram matrices use
    the exact scalar path, which is practical up to nmax around 10^3.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    name, shapes = resolve_predicate(predicate, lattice)
    p11, p12, p22, m = _scaled_pair_gram(lattice.gram)
    if not shapes:
        counts = np.zeros(nmax + 1, dtype=np.int64)
        return CountTable(counts, name, lattice.label)
    if m == 0:
        _check_int64_budget(max(abs(p11[0]), abs(p12[0]), abs(p22[0])), nmax)
        shape_names = tuple(s.value for s in shapes)
        if workers <= 1:
            counts = _count_chunk_int(
                (p11[0], p12[0], p22[0], nmax, 1, nmax, shape_names)
            )
        else:
            bounds = np.linspace(1, nmax + 1, workers + 1).astype(int)
            jobs = [
                (p11[0], p12[0], p22[0], nmax, int(lo), int(hi - 1), shape_names)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            counts = np.zeros(nmax + 1, dtype=np.int64)
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_count_chunk_int, jobs):
                    counts += part
    else:
        counts = np.zeros(nmax + 1, dtype=np.int64)
        for n in range(1, nmax + 1):
            counts[n] = _count_exact(p11, p12, p22, m, n, shapes)
    return CountTable(counts, name, lattice.label)


def summatory(
    table: CountTable,
    xs: Sequence[int],
    model: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    normalizer: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    model_name: str = "",
    normalizer_name: str = "",
) -> SummatoryReport:
    """Exact A(x) on a grid, with residuals against a model function."""
    xs = np.asarray(sorted(int(x) for x in xs), dtype=np.int64)
    if len(xs) == 0 or xs[0] < 1 or xs[-1] > table.nmax:
        raise ValueError("x grid must lie within [1, nmax]")
    cum = table.cumulative()
    a_vals = cum[xs]
    xf = xs.astype(float)
    model_vals = model(xf) if model is not None else np.zeros(len(xs))
    residual = a_vals - model_vals
    norm = normalizer(xf) if normalizer is not None else np.ones(len(xs))
    return SummatoryReport(
        xs, a_vals, model_vals, residual, residual / norm,
        model_name, normalizer_name,
    )


def find_sublattice_witness(
    lattice: PlanarLattice,
    index_bound: int,
    targets: Union[str, Iterable[ShapeClass]] = "wr",
) -> Optional[tuple[int, SublatticeHNF]]:
    """Smallest-index sublattice whose shape lies in ``targets``.

    Searches index n ascending, triples in lexicographic (a, b) order, and
    returns the first hit; ``None`` means no witness up to the bound, which
    is evidence of absence, not proof.
    """
    if index_bound < 1:
        raise ValueError("index_bound must be >= 1")
    _, shapes = resolve_predicate(targets, lattice)
    if not shapes:
        return None
    p11, p12, p22, m = _scaled_pair_gram(lattice.gram)
    if m == 0:
        _check_int64_budget(
            max(abs(p11[0]), abs(p12[0]), abs(p22[0])), index_bound
        )
        for n in range(1, index_bound + 1):
            tri = hnf_triples(n)
            a, b, d = tri[:, 0].copy(), tri[:, 1].copy(), tri[:, 2].copy()
            g11, g12, g22 = _int_triple_grams(a, b, d, p11[0], p12[0], p22[0])
            r11, r12, r22 = _reduce_arrays(g11, g12, g22)
            mask = _shape_mask(r11, r12, r22, shapes)
            hits = np.nonzero(mask)[0]
            if len(hits):
                i = int(hits[0])
                return n, SublatticeHNF(int(tri[i, 0]), int(tri[i, 1]), int(tri[i, 2]))
    else:
        for n in range(1, index_bound + 1):
            for a in divisors(n):
                d = n // a
                for b in range(d):
                    g11, g12, g22 = _sub_gram_pairs(p11, p12, p22, a, b, d)
                    red = _pair_reduce(g11, g12, g22, m)
                    if _classify_pairs(*red) in shapes:
                        return n, SublatticeHNF(a, b, d)
    return None


# ---------------------------------------------------------------------------
# structured counter for diag(1, w) with irrational w
# ---------------------------------------------------------------------------


def diag_irrational_wr_table(w: QuadValue, nmax: int) -> CountTable:
    """Well-rounded sublattice counts for the lattice with Gram diag(1, w).

    For irrational w > 0 the quadratic form x^2 + w*y^2 takes each value with
    a unique split into rational and irrational parts, so a sublattice is
    well-rounded exactly when it is spanned by (x, y) and (x, -y) with
    x, y >= 1 and neither (2x, 0) nor (0, 2y) shorter, i.e.

        w*y^2 < 3*x^2   and   x^2 < 3*w*y^2     (no ties: w irrational),

    and its index is 2*x*y.  The counter walks these pairs directly; it is
    validated against the brute-force path on prefixes in the test suite.
    """
    if w.is_rational or w.sign() <= 0:
        raise ValueError("requires an irrational positive diagonal ratio")
    counts = np.zeros(nmax + 1, dtype=np.int64)
    three_w = w * 3
    inv_3w = three_w.inverse()
    inv_w_times3 = w.inverse() * 3
    x = 1
    while True:
        x2 = x * x
        # smallest y with x^2 < 3 w y^2  <=>  y^2 > x^2/(3w)
        ylo = isqrt(math.floor(inv_3w * x2)) + 1
        if 2 * x * ylo > nmax:
            break
        # largest y with w y^2 < 3 x^2  <=>  y^2 <= floor(3 x^2 / w)
        yhi = isqrt(math.floor(inv_w_times3 * x2))
        yhi = min(yhi, nmax // (2 * x))
        if yhi >= ylo:
            ys = np.arange(ylo, yhi + 1, dtype=np.int64)
            np.add.at(counts, 2 * x * ys, 1)
        x += 1
    return CountTable(counts, "wr", f"diag(1,{w})", source="pair-characterization")


def default_worker_count() -> int:
    """Worker count from the WRLAT_WORKERS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get("WRLAT_WORKERS", "1")))
    except ValueError:
        return 1
