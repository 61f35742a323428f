"""Exact arithmetic in real quadratic fields Q(sqrt(m)).

Every geometric quantity in this package is a value ``a + b*sqrt(m)`` with
rational ``a``, ``b`` and a fixed square-free radicand ``m >= 0``.  Signs,
comparisons and integer floors of such values are decided exactly by integer
case analysis, so lattice predicates (reducedness, equal minima, strict
window inequalities against sqrt(3)) never rely on floating point.

``m = 0`` encodes a pure rational; a value is normalized to that form
whenever its irrational part vanishes or the radicand is 0 or 1.  Arithmetic
is defined between values sharing a radicand, or when one side is purely
rational; anything else raises :class:`RadicandMismatchError`.  Lifting to
biquadratic fields is intentionally unsupported: one irrationality per
lattice context is all the geometry here requires.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from math import isqrt
from typing import Union

__all__ = [
    "QuadValue",
    "RadicandMismatchError",
    "parse_quad",
    "quad_sqrt_int",
]

Rationalish = Union[int, Fraction]

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


class RadicandMismatchError(ValueError):
    """Arithmetic attempted between values over different radicands."""


def _is_square_free(m: int) -> bool:
    if m < 0:
        return False
    if m < 4:
        return True
    if m % 4 == 0:
        return False
    p = 3
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        p += 2
    return True


_checked_radicands: set[int] = {0, 2, 3, 5, 6, 7}


def _check_radicand(m: int) -> int:
    m = int(m)
    if m in _checked_radicands:
        return m
    if m == 1:
        return m
    if not _is_square_free(m):
        raise ValueError(f"radicand {m} is not a square-free non-negative integer")
    _checked_radicands.add(m)
    return m


class QuadValue:
    """An exact value a + b*sqrt(m) with rational a, b and square-free m."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a: Rationalish = 0, b: Rationalish = 0, m: int = 0):
        a = a if isinstance(a, Fraction) else Fraction(a)
        b = b if isinstance(b, Fraction) else Fraction(b)
        m = _check_radicand(m)
        if m == 1:
            a, b, m = a + b, _ZERO, 0
        elif m == 0 or b == 0:
            b, m = _ZERO, 0
        self.a = a
        self.b = b
        self.m = m

    # -- basic protocol ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.m == 0

    def __repr__(self) -> str:
        return f"QuadValue({self.a!r}, {self.b!r}, {self.m})"

    def __str__(self) -> str:
        if self.m == 0:
            return str(self.a)
        root = f"sqrt({self.m})"
        if self.b == 1:
            irr = root
        elif self.b == -1:
            irr = f"-{root}"
        else:
            irr = f"{self.b}*{root}"
        if self.a == 0:
            return irr
        sep = "+" if self.b > 0 else ""
        return f"{self.a}{sep}{irr}"

    def __hash__(self):
        if self.m == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __float__(self) -> float:
        if self.m == 0:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.m)

    # -- radicand compatibility --------------------------------------------

    def _coerce(self, other) -> "QuadValue":
        if isinstance(other, QuadValue):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadValue(other)
        return NotImplemented  # type: ignore[return-value]

    def _joint_radicand(self, other: "QuadValue") -> int:
        if self.m == 0:
            return other.m
        if other.m == 0 or other.m == self.m:
            return self.m
        raise RadicandMismatchError(
            f"cannot combine values over sqrt({self.m}) and sqrt({other.m})"
        )

    # -- field arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        m = self._joint_radicand(o)
        return QuadValue(self.a + o.a, self.b + o.b, m)

    __radd__ = __add__

    def __neg__(self):
        return QuadValue(-self.a, -self.b, self.m)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        m = self._joint_radicand(o)
        return QuadValue(self.a - o.a, self.b - o.b, m)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        m = self._joint_radicand(o)
        return QuadValue(
            self.a * o.a + m * self.b * o.b,
            self.a * o.b + self.b * o.a,
            m,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadValue":
        """Exact multiplicative inverse; raises ZeroDivisionError on 0."""
        if not self:
            raise ZeroDivisionError("inverse of zero QuadValue")
        if self.m == 0:
            return QuadValue(1 / self.a)
        # 1/(a + b sqrt m) = (a - b sqrt m) / (a^2 - m b^2); the norm is
        # nonzero because m is not a rational square.
        norm = self.a * self.a - self.m * self.b * self.b
        return QuadValue(self.a / norm, -self.b / norm, self.m)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- exact order ---------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(m), in {-1, 0, +1}."""
        sa = 1 if self.a > 0 else (-1 if self.a < 0 else 0)
        if self.m == 0:
            return sa
        sb = 1 if self.b > 0 else -1  # b != 0 when m != 0
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # opposite signs: |a| vs |b| sqrt(m) decided by squaring
        d = self.a * self.a - self.m * self.b * self.b
        if d > 0:
            return sa
        if d < 0:
            return -sa
        return 0  # unreachable for square-free m >= 2

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented  # type: ignore[return-value]
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, (QuadValue, int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact floor / rounding ----------------------------------------------

    def __floor__(self) -> int:
        """Exact integer floor, no floating point involved."""
        if self.m == 0:
            return self.a.numerator // self.a.denominator
        # write the value as (P + R sqrt(m)) / L with integers, L > 0
        L = math.lcm(self.a.denominator, self.b.denominator)
        P = self.a.numerator * (L // self.a.denominator)
        R = self.b.numerator * (L // self.b.denominator)
        if R >= 0:
            K = isqrt(R * R * self.m)  # floor(R sqrt m); strict since irrational
        else:
            K = -isqrt(R * R * self.m) - 1
        t = (P + K) // L
        # P + K <= P + R sqrt(m) < P + K + 1 brackets the floor in {t, t+1}
        if (self - (t + 1)).sign() >= 0:
            return t + 1
        return t

    def round_nearest(self) -> int:
        """Nearest integer, halves rounded up (floor(x + 1/2))."""
        return math.floor(self + _HALF)

    # -- conversions -----------------------------------------------------------

    def as_fraction(self) -> Fraction:
        if self.m != 0:
            raise ValueError(f"{self} is irrational")
        return self.a


def quad_sqrt_int(m: int) -> QuadValue:
    """The value sqrt(m) for a square-free non-negative integer m."""
    return QuadValue(0, 1, m)


_RAT = r"-?\d+(?:/\d+)?"
_TERM_RE = re.compile(
    rf"^(?:(?P<coef>{_RAT})\*)?(?:(?P<bare>{_RAT})|sqrt\((?P<rad>\d+)\))$"
)


def _parse_term(text: str) -> QuadValue:
    match = _TERM_RE.match(text)
    if not match:
        raise ValueError(f"cannot parse term {text!r}")
    coef = Fraction(match.group("coef")) if match.group("coef") else None
    if match.group("rad") is not None:
        return QuadValue(0, coef if coef is not None else 1, int(match.group("rad")))
    if coef is not None:
        raise ValueError(f"cannot parse term {text!r}: '*' without sqrt")
    return QuadValue(Fraction(match.group("bare")))


def parse_quad(text: str, radicand: int | None = None) -> QuadValue:
    """Parse ``a+b*sqrt(m)`` text with rationals written as ``p/q``.

    Accepts one or two terms, e.g. ``"3/2"``, ``"sqrt(2)"``, ``"-1/3*sqrt(5)"``,
    ``"1+1/3*sqrt(2)"``, ``"2-sqrt(3)"``.  When ``radicand`` is given, any
    irrational part must use exactly that radicand.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty QuadValue text")
    # split into signed terms at '+'/'-' not following '*', '(' or start
    pieces: list[str] = []
    start = 0
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] not in "*/(+-":
            pieces.append(s[start:i])
            start = i
    pieces.append(s[start:])
    if len(pieces) > 2:
        raise ValueError(f"too many terms in {text!r}")
    total = QuadValue(0)
    for piece in pieces:
        negate = piece.startswith("-")
        if piece and piece[0] in "+-":
            piece = piece[1:]
        term = _parse_term(piece)
        total = total + (-term if negate else term)
    if radicand is not None and total.m not in (0, radicand):
        raise ValueError(
            f"{text!r} uses radicand {total.m}, expected {radicand}"
        )
    return total
