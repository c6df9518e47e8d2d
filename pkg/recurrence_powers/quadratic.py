"""Exact arithmetic in Q(sqrt D).

An element a + b*t of Q[t]/(t^2 - D) is stored as two Fractions. For a
non-square D this is the field Q(sqrt D); for a perfect square D it is the
split algebra Q x Q, where t evaluates to +sqrt(D) in the real embedding and
-sqrt(D) in the conjugate one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .intervals import RInterval

Rational = Union[int, Fraction]


def _sgn(value: Rational) -> int:
    return (value > 0) - (value < 0)


def square_root_of(d: int):
    """Integer square root of d when d is a perfect square, else None."""
    if d < 0:
        return None
    s = math.isqrt(d)
    return s if s * s == d else None


@dataclass(frozen=True, eq=False)
class QuadElem:
    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def rational(cls, value: Rational, d: int) -> "QuadElem":
        return cls(Fraction(value), Fraction(0), d)

    @classmethod
    def sqrt_d(cls, d: int) -> "QuadElem":
        return cls(Fraction(0), Fraction(1), d)

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt {self.d}) with Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem.rational(other, self.d)
        raise TypeError(f"cannot combine QuadElem with {type(other).__name__}")

    # -- ring operations -----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        return QuadElem(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadElem(
            self.a * other.a + self.d * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError(f"{self} is not invertible in Q(sqrt {self.d})")
        c = self.conj()
        return QuadElem(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        e = abs(exponent)
        result = QuadElem.rational(1, self.d)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- field data ----------------------------------------------------
    def conj(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def as_rational(self) -> Fraction:
        """Real value when it is rational (b = 0 or D a perfect square)."""
        if self.b == 0:
            return self.a
        s = square_root_of(self.d)
        if s is None:
            raise ValueError(f"{self} is irrational")
        return self.a + self.b * s

    # -- order in the real embedding -------------------------------------
    def sign(self) -> int:
        s = square_root_of(self.d)
        if s is not None:
            return _sgn(self.a + self.b * s)
        sa, sb = _sgn(self.a), _sgn(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger square wins
        return sa * _sgn(self.a * self.a - self.d * self.b * self.b)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadElem.rational(other, self.d)
        if not isinstance(other, QuadElem):
            return NotImplemented
        return (self.a, self.b, self.d) == (other.a, other.b, other.d)

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.d))

    def _compare(self, other) -> int:
        return (self - self._coerce(other)).sign()

    def __lt__(self, other):
        return self._compare(other) < 0

    def __le__(self, other):
        return self._compare(other) <= 0

    def __gt__(self, other):
        return self._compare(other) > 0

    def __ge__(self, other):
        return self._compare(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def to_interval(self, bits: int) -> RInterval:
        if self.b == 0:
            return RInterval.of(self.a, bits)
        s = square_root_of(self.d)
        if s is not None:
            return RInterval.of(self.a + self.b * s, bits)
        root = RInterval.of(self.d, bits).sqrt()
        return RInterval.of(self.a, bits) + RInterval.of(self.b, bits) * root

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"
