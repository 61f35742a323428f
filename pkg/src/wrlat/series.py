"""Exact Dirichlet-series coefficient arrays and their convolution algebra.

A :class:`CoeffSeries` holds integer coefficients c(1..N) of a truncated
Dirichlet series sum c(n) n^(-s).  Multiplying two series corresponds to
Dirichlet convolution of the coefficients, which is exact for all n <= N
whenever both factors are exact to N; every constructor below documents its
coefficients in elementary terms so each one can be checked independently.

The two assembled counting series are built from

* the ideal-counting series of the Gaussian and Eisenstein integers
  (divisor sums of the quadratic characters mod 4 and mod 3),
* their primitive parts (division by zeta(2s), i.e. convolution with the
  square-supported Moebius series), and
* windowed pair-sum series counting factorizations u = p*q inside the strict
  aspect windows p < q < sqrt(3)p (resp. q < 3p) and their odd analogues,
  with all window tests done as integer square comparisons: sqrt(3) is
  irrational, so no boundary ties exist and strictness is preserved exactly.

Index sets for the window sums start at p = 1 and k = 1; the k = 0 window
contains no integers, so the convention is unobservable in the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

__all__ = [
    "CoeffSeries",
    "identity_series",
    "convolve",
    "invert_unit",
    "shift_index",
    "geometric_alternating",
    "mobius_table",
    "standard_series",
    "primitive_similar",
    "window_series",
    "wr_series_square",
    "wr_series_triangle",
    "STANDARD_KINDS",
    "WINDOW_KINDS",
]

# permissive bound on a divisor count below 1e7, used in the overflow guard
_MAX_DIVISOR_COUNT = 6720
_INT64_LIMIT = 1 << 62


@dataclass
class CoeffSeries:
    """Integer coefficients c(1..N) of a truncated Dirichlet series."""

    coeffs: np.ndarray  # int64, index 0 unused and zero
    tag: str = ""

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64)
        if self.coeffs[0] != 0:
            raise ValueError("coefficient index 0 must be zero")

    @property
    def nmax(self) -> int:
        return len(self.coeffs) - 1

    def c(self, n: int) -> int:
        if not 1 <= n <= self.nmax:
            raise IndexError(f"n={n} outside 1..{self.nmax}")
        return int(self.coeffs[n])

    def prefix(self, k: int) -> list[int]:
        return [int(v) for v in self.coeffs[1 : k + 1]]

    def scaled(self, factor: int) -> "CoeffSeries":
        return CoeffSeries(self.coeffs * int(factor), f"{factor}*({self.tag})")

    def __add__(self, other: "CoeffSeries") -> "CoeffSeries":
        self._check_same_length(other)
        return CoeffSeries(self.coeffs + other.coeffs, f"({self.tag})+({other.tag})")

    def _check_same_length(self, other: "CoeffSeries") -> None:
        if self.nmax != other.nmax:
            raise ValueError(
                f"length mismatch: {self.nmax} vs {other.nmax}"
            )


def identity_series(nmax: int, tag: str = "identity") -> CoeffSeries:
    c = np.zeros(nmax + 1, dtype=np.int64)
    c[1] = 1
    return CoeffSeries(c, tag)


def _guard_magnitudes(a: np.ndarray, b: np.ndarray) -> None:
    ma = int(np.abs(a).max(initial=0))
    mb = int(np.abs(b).max(initial=0))
    if ma and mb and ma * mb > _INT64_LIMIT // _MAX_DIVISOR_COUNT:
        raise OverflowError("convolution could overflow int64 coefficients")


def convolve(a: CoeffSeries, b: CoeffSeries) -> CoeffSeries:
    """Dirichlet product: (a*b)(n) = sum over d|n of a(d) b(n/d)."""
    a._check_same_length(b)
    n = a.nmax
    _guard_magnitudes(a.coeffs, b.coeffs)
    # iterate over the sparser factor
    ca, cb = a.coeffs, b.coeffs
    if np.count_nonzero(ca) > np.count_nonzero(cb):
        ca, cb = cb, ca
    out = np.zeros(n + 1, dtype=np.int64)
    for d in np.nonzero(ca)[0]:
        d = int(d)
        out[d::d] += ca[d] * cb[1 : n // d + 1]
    return CoeffSeries(out, f"({a.tag})*({b.tag})")


def invert_unit(a: CoeffSeries) -> CoeffSeries:
    """Dirichlet inverse of a series with leading coefficient +-1.

    Solves the triangular system (a * c)(1) = 1, (a * c)(n) = 0 by a sieve:
    once c(d) is final its contributions c(d) a(k) are pushed to every
    index d*k with k >= 2.
    """
    n = a.nmax
    lead = int(a.coeffs[1])
    if lead not in (1, -1):
        raise ValueError("leading coefficient must be +1 or -1 for inversion")
    _guard_magnitudes(a.coeffs, a.coeffs)
    ca = a.coeffs
    c = np.zeros(n + 1, dtype=np.int64)
    acc = np.zeros(n + 1, dtype=np.int64)
    c[1] = lead
    acc[2:] = lead * ca[2:]  # contributions of d = 1
    for d in range(2, n + 1):
        cd = -lead * acc[d]
        if cd:
            c[d] = cd
            k = n // d
            if k >= 2:
                acc[2 * d :: d] += cd * ca[2 : k + 1]
    return CoeffSeries(c, f"({a.tag})^-1")


def shift_index(a: CoeffSeries, factor: int) -> CoeffSeries:
    """Multiply by factor^(-s): move c(m) to index factor*m."""
    if factor < 1:
        raise ValueError("shift factor must be >= 1")
    n = a.nmax
    out = np.zeros(n + 1, dtype=np.int64)
    out[factor::factor] = a.coeffs[1 : n // factor + 1]
    return CoeffSeries(out, f"shift{factor}({a.tag})")


def geometric_alternating(base: int, nmax: int) -> CoeffSeries:
    """The series (1 + base^(-s))^(-1): c(base^j) = (-1)^j, zero elsewhere."""
    c = np.zeros(nmax + 1, dtype=np.int64)
    v, s = 1, 1
    while v <= nmax:
        c[v] = s
        v *= base
        s = -s
    return CoeffSeries(c, f"(1+{base}^-s)^-1")


def mobius_table(nmax: int) -> np.ndarray:
    """mu(n) for n = 0..nmax via a linear sieve."""
    mu = np.zeros(nmax + 1, dtype=np.int64)
    if nmax >= 1:
        mu[1] = 1
    is_comp = np.zeros(nmax + 1, dtype=bool)
    primes: list[int] = []
    for i in range(2, nmax + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > nmax:
                break
            is_comp[ip] = True
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu


STANDARD_KINDS = (
    "zeta",
    "zeta_2s",
    "L_chi_minus4",
    "L_chi_minus3",
    "dedekind_gauss",
    "dedekind_eisenstein",
)


def standard_series(kind: str, nmax: int) -> CoeffSeries:
    """Classical factor series.

    zeta: all ones.  zeta_2s: indicator of perfect squares.  L_chi_minus4 /
    L_chi_minus3: the quadratic characters mod 4 and mod 3.  dedekind_gauss /
    dedekind_eisenstein: their divisor sums, i.e. the number of ideals of
    norm n in Z[i] resp. Z[rho] and therefore the number of similar
    sublattices of index n of the square resp. hexagonal lattice.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    c = np.zeros(nmax + 1, dtype=np.int64)
    if kind == "zeta":
        c[1:] = 1
    elif kind == "zeta_2s":
        r = np.arange(1, isqrt(nmax) + 1, dtype=np.int64)
        c[r * r] = 1
    elif kind == "L_chi_minus4":
        c[1::4] = 1
        if nmax >= 3:
            c[3::4] = -1
    elif kind == "L_chi_minus3":
        c[1::3] = 1
        if nmax >= 2:
            c[2::3] = -1
    elif kind == "dedekind_gauss":
        return CoeffSeries(
            convolve(
                standard_series("L_chi_minus4", nmax), standard_series("zeta", nmax)
            ).coeffs,
            "dedekind_gauss",
        )
    elif kind == "dedekind_eisenstein":
        return CoeffSeries(
            convolve(
                standard_series("L_chi_minus3", nmax), standard_series("zeta", nmax)
            ).coeffs,
            "dedekind_eisenstein",
        )
    else:
        raise ValueError(f"unknown standard series {kind!r}")
    return CoeffSeries(c, kind)


def primitive_similar(kind: str, nmax: int) -> CoeffSeries:
    """Primitive similar-sublattice series: the Dedekind series divided by zeta(2s)."""
    if kind == "square":
        ded = standard_series("dedekind_gauss", nmax)
    elif kind == "triangle":
        ded = standard_series("dedekind_eisenstein", nmax)
    else:
        raise ValueError(f"unknown primitive kind {kind!r}")
    inv = invert_unit(standard_series("zeta_2s", nmax))
    out = convolve(ded, inv)
    out.tag = f"primitive_{kind}"
    return out


WINDOW_KINDS = ("sq_even", "sq_odd", "tri_even", "tri_odd")


def window_series(kind: str, nmax: int) -> CoeffSeries:
    """Windowed pair-sum series; all windows tested in exact integer arithmetic.

    sq_even:  c(u) = #{(p,q): pq = u, p < q, q^2 < 3 p^2}
    sq_odd:   c(u) = #{(k,l): (2k+1)(2l+1) = u, k < l, (2l+1)^2 < 3 (2k+1)^2}
    tri_even: c(u) = #{(p,q): pq = u, p < q < 3p}
    tri_odd:  c(u) = #{(k,l): (2k+1)(2l+1) = u, k < l <= 3k}
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    c = np.zeros(nmax + 1, dtype=np.int64)
    if kind == "sq_even":
        p = 1
        while p * (p + 1) <= nmax:
            qhi = min(isqrt(3 * p * p), nmax // p)  # q^2 < 3p^2: never a tie
            if qhi > p:
                q = np.arange(p + 1, qhi + 1, dtype=np.int64)
                np.add.at(c, p * q, 1)
            p += 1
    elif kind == "sq_odd":
        k = 1
        while (2 * k + 1) * (2 * k + 3) <= nmax:
            u = 2 * k + 1
            lhi = min((isqrt(3 * u * u) - 1) // 2, (nmax // u - 1) // 2)
            if lhi > k:
                odd = 2 * np.arange(k + 1, lhi + 1, dtype=np.int64) + 1
                np.add.at(c, u * odd, 1)
            k += 1
    elif kind == "tri_even":
        p = 1
        while p * (p + 1) <= nmax:
            qhi = min(3 * p - 1, nmax // p)
            if qhi > p:
                q = np.arange(p + 1, qhi + 1, dtype=np.int64)
                np.add.at(c, p * q, 1)
            p += 1
    elif kind == "tri_odd":
        k = 1
        while (2 * k + 1) * (2 * k + 3) <= nmax:
            u = 2 * k + 1
            lhi = min(3 * k, (nmax // u - 1) // 2)
            if lhi > k:
                odd = 2 * np.arange(k + 1, lhi + 1, dtype=np.int64) + 1
                np.add.at(c, u * odd, 1)
            k += 1
    else:
        raise ValueError(f"unknown window kind {kind!r}")
    return CoeffSeries(c, f"window_{kind}")


def wr_series_square(nmax: int) -> CoeffSeries:
    """Well-rounded sublattice counts of the square lattice, exact to nmax.

    Assembles the similar-sublattice series plus the rhombic contributions:
    twice the index-doubled product of the primitive series with the even
    window, and twice the product of the primitive series, the odd window
    and (1 + 2^(-s))^(-1).
    """
    ded = standard_series("dedekind_gauss", nmax)
    pr = primitive_similar("square", nmax)
    even = shift_index(convolve(pr, window_series("sq_even", nmax)), 2)
    odd = convolve(
        geometric_alternating(2, nmax),
        convolve(pr, window_series("sq_odd", nmax)),
    )
    out = ded + even.scaled(2) + odd.scaled(2)
    out.tag = "wr_square"
    return out


def wr_series_triangle(nmax: int) -> CoeffSeries:
    """Well-rounded sublattice counts of the hexagonal lattice, exact to nmax.

    Three times the index-quadrupled even-window product and three times the
    odd-window product, both carrying the (1 + 3^(-s))^(-1) factor, on top of
    the similar-sublattice series.
    """
    ded = standard_series("dedekind_eisenstein", nmax)
    pr = primitive_similar("triangle", nmax)
    inv3 = geometric_alternating(3, nmax)
    even = shift_index(
        convolve(inv3, convolve(pr, window_series("tri_even", nmax))), 4
    )
    odd = convolve(inv3, convolve(pr, window_series("tri_odd", nmax)))
    out = ded + even.scaled(3) + odd.scaled(3)
    out.tag = "wr_triangle"
    return out
