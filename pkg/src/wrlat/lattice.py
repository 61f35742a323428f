"""Planar lattices as exact 2x2 Gram matrices.

A lattice is represented up to isometry by the Gram matrix of a basis, with
entries in a fixed real quadratic field.  Gauss-Lagrange reduction brings any
positive definite Gram matrix to the canonical fundamental domain

    0 <= 2*g12 <= g11 <= g22

using exact comparisons only.  The reduced diagonal carries the squared
successive minima, which makes the well-roundedness test (equal minima) and
the shape classification purely symbolic decisions.

Row convention throughout: integer matrices act on basis rows, so a
sublattice spanned by the rows of H has Gram matrix H * G * H^T.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .quadratic import QuadValue, parse_quad

__all__ = [
    "IntMatrix2",
    "GramMatrix2",
    "PlanarLattice",
    "ShapeClass",
    "lagrange_reduce",
    "minima",
    "is_well_rounded",
    "classify",
    "sublattice_gram",
    "parse_gram",
    "square_lattice",
    "triangle_lattice",
    "WELL_ROUNDED_SHAPES",
]

Entry = Union[QuadValue, Fraction, int]


@dataclass(frozen=True)
class IntMatrix2:
    """2x2 integer matrix; rows are (sub)lattice basis vectors."""

    e11: int
    e12: int
    e21: int
    e22: int

    @staticmethod
    def identity() -> "IntMatrix2":
        return IntMatrix2(1, 0, 0, 1)

    def det(self) -> int:
        return self.e11 * self.e22 - self.e12 * self.e21

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.e11 * other.e11 + self.e12 * other.e21,
            self.e11 * other.e12 + self.e12 * other.e22,
            self.e21 * other.e11 + self.e22 * other.e21,
            self.e21 * other.e12 + self.e22 * other.e22,
        )

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.e11, self.e12), (self.e21, self.e22)


def _as_quad(x: Entry) -> QuadValue:
    return x if isinstance(x, QuadValue) else QuadValue(x)


class GramMatrix2:
    """Symmetric positive definite 2x2 Gram matrix over Q(sqrt(m))."""

    __slots__ = ("g11", "g12", "g22")

    def __init__(self, g11: Entry, g12: Entry, g22: Entry):
        g11 = _as_quad(g11)
        g12 = _as_quad(g12)
        g22 = _as_quad(g22)
        _ = g11 + g12 + g22  # raises RadicandMismatchError on mixed radicands
        if g11.sign() <= 0:
            raise ValueError(f"g11 = {g11} must be positive")
        if (g11 * g22 - g12 * g12).sign() <= 0:
            raise ValueError("Gram matrix is not positive definite")
        self.g11 = g11
        self.g12 = g12
        self.g22 = g22

    @property
    def radicand(self) -> int:
        return max(self.g11.m, self.g12.m, self.g22.m)

    def det(self) -> QuadValue:
        return self.g11 * self.g22 - self.g12 * self.g12

    def entries(self) -> tuple[QuadValue, QuadValue, QuadValue]:
        return self.g11, self.g12, self.g22

    def transformed(self, h: IntMatrix2) -> "GramMatrix2":
        """Gram matrix H*G*H^T of the row span of h."""
        if h.det() == 0:
            raise ValueError("singular transform")
        a, b, c, d = h.e11, h.e12, h.e21, h.e22
        g11, g12, g22 = self.g11, self.g12, self.g22
        return GramMatrix2(
            g11 * (a * a) + g12 * (2 * a * b) + g22 * (b * b),
            g11 * (a * c) + g12 * (a * d + b * c) + g22 * (b * d),
            g11 * (c * c) + g12 * (2 * c * d) + g22 * (d * d),
        )

    def scaled(self, r: Fraction | int) -> "GramMatrix2":
        r = Fraction(r)
        if r <= 0:
            raise ValueError("scale factor must be positive")
        return GramMatrix2(self.g11 * r, self.g12 * r, self.g22 * r)

    def __eq__(self, other):
        if not isinstance(other, GramMatrix2):
            return NotImplemented
        return (
            self.g11 == other.g11
            and self.g12 == other.g12
            and self.g22 == other.g22
        )

    def __hash__(self):
        return hash((self.g11, self.g12, self.g22))

    def __repr__(self):
        return f"GramMatrix2({self.g11}, {self.g12}, {self.g22})"


@dataclass(frozen=True)
class PlanarLattice:
    gram: GramMatrix2
    label: str = ""


class ShapeClass(enum.Enum):
    """Bravais-type shape of a planar lattice, from its reduced Gram matrix."""

    SQUARE = "square"
    HEXAGONAL = "hexagonal"
    RHOMBIC_WR = "rhombic-wr"
    RHOMBIC_NON_WR = "rhombic-non-wr"
    RECTANGULAR = "rectangular"
    OBLIQUE = "oblique"


#: Shapes whose minimal vectors span the plane.
WELL_ROUNDED_SHAPES = frozenset(
    {ShapeClass.SQUARE, ShapeClass.HEXAGONAL, ShapeClass.RHOMBIC_WR}
)


def _gram_of(lat: Union[PlanarLattice, GramMatrix2]) -> GramMatrix2:
    return lat.gram if isinstance(lat, PlanarLattice) else lat


def lagrange_reduce(gram: GramMatrix2) -> tuple[IntMatrix2, GramMatrix2]:
    """Gauss-Lagrange reduction to the canonical domain 0 <= 2 g12 <= g11 <= g22.

    Returns ``(u, reduced)`` with ``reduced == u * gram * u^T`` and
    ``det(u) = +-1``.  The reduced diagonal consists of the squared lengths of
    a shortest basis, so two exactly equal diagonal entries mean the lattice
    is well-rounded.
    """
    g11, g12, g22 = _gram_of(gram).entries()
    u = IntMatrix2.identity()
    while True:
        if (g11 - g22).sign() > 0:
            g11, g22 = g22, g11
            u = IntMatrix2(0, 1, 1, 0) @ u
        t = (g12 / g11).round_nearest()
        if t:
            # row2 <- row2 - t*row1
            g22 = g22 - (g12 + g12 - t * g11) * t
            g12 = g12 - t * g11
            u = IntMatrix2(1, 0, -t, 1) @ u
        if (g22 - g11).sign() >= 0:
            break
    if g12.sign() < 0:
        g12 = -g12
        u = IntMatrix2(1, 0, 0, -1) @ u
    return u, GramMatrix2(g11, g12, g22)


def minima(lat: Union[PlanarLattice, GramMatrix2]) -> tuple[QuadValue, QuadValue]:
    """Squared successive minima (lambda1^2, lambda2^2), exactly."""
    _, red = lagrange_reduce(_gram_of(lat))
    return red.g11, red.g22


def is_well_rounded(lat: Union[PlanarLattice, GramMatrix2]) -> bool:
    """True iff the two successive minima coincide exactly."""
    l1, l2 = minima(lat)
    return l1 == l2


def classify(lat: Union[PlanarLattice, GramMatrix2]) -> ShapeClass:
    """Shape class of the lattice, decided on the reduced Gram matrix.

    On the canonical reduced form g12 carries a non-negative sign, so the
    case split is: equal diagonal with g12 = 0 is a square, equal diagonal
    with 2 g12 = g11 is hexagonal, equal diagonal otherwise is a well-rounded
    rhombus; unequal diagonal with g12 = 0 is rectangular, with 2 g12 = g11
    rhombic but not well-rounded, and anything else is oblique.
    """
    _, red = lagrange_reduce(_gram_of(lat))
    g11, g12, g22 = red.entries()
    diag_equal = g11 == g22
    if g12.sign() == 0:
        return ShapeClass.SQUARE if diag_equal else ShapeClass.RECTANGULAR
    if g12 + g12 == g11:
        return ShapeClass.HEXAGONAL if diag_equal else ShapeClass.RHOMBIC_NON_WR
    return ShapeClass.RHOMBIC_WR if diag_equal else ShapeClass.OBLIQUE


def sublattice_gram(
    lat: Union[PlanarLattice, GramMatrix2], h: IntMatrix2
) -> GramMatrix2:
    """Gram matrix of the sublattice spanned by the rows of h."""
    return _gram_of(lat).transformed(h)


def parse_gram(text: str, radicand: int | None = None) -> GramMatrix2:
    """Parse ``g11,g12,g22`` with QuadValue syntax per entry."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 'g11,g12,g22', got {text!r}")
    g11, g12, g22 = (parse_quad(p, radicand) for p in parts)
    return GramMatrix2(g11, g12, g22)


def square_lattice() -> PlanarLattice:
    return PlanarLattice(GramMatrix2(1, 0, 1), label="square")


def triangle_lattice() -> PlanarLattice:
    """The hexagonal (triangular) lattice, scaled to the integer Gram [[2,1],[1,2]]."""
    return PlanarLattice(GramMatrix2(2, 1, 2), label="triangle")
