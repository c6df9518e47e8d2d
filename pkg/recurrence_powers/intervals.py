"""Outward-rounded real intervals on top of ``mpmath.iv``.

``mpmath.iv`` keeps its precision in a process-global context, so every
operation here runs under a lock with the precision of the widest operand
and restores the previous setting afterwards.
"""
from __future__ import annotations

import logging
import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import iv
from mpmath.libmp import mpf_neg

logger = logging.getLogger(__name__)

_LOCK = threading.RLock()

Number = Union[int, Fraction, str]


@contextmanager
def working_precision(bits: int):
    with _LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def _raw_to_mpf(raw) -> mpmath.mpf:
    # make_mpf stores the tuple as is; mpmath.mpf(raw) would renormalize to mp.prec
    return mpmath.mp.make_mpf(raw)


def _negate(x: mpmath.mpf) -> mpmath.mpf:
    # unary minus on an mpf rounds to mp.prec, the raw negation is exact
    return _raw_to_mpf(mpf_neg(x._mpf_))


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:
            raise ValueError(f"non-finite value {x}")
        return Fraction(0)
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def _lift_number(value: Number):
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    return iv.mpf(value)


def _directed_decimal(value: Fraction, digits: int, rounding) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        return str(Decimal(int(value.numerator)) / Decimal(int(value.denominator)))


@dataclass(frozen=True)
class RInterval:
    lo: mpmath.mpf
    hi: mpmath.mpf
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- construction --------------------------------------------------
    @classmethod
    def of(cls, value: Union[Number, "RInterval"], bits: int) -> "RInterval":
        if isinstance(value, RInterval):
            return cls(value.lo, value.hi, bits)
        with working_precision(bits):
            return cls._wrap(_lift_number(value), bits)

    @classmethod
    def hull(cls, lo: Number, hi: Number, bits: int) -> "RInterval":
        with working_precision(bits):
            a = _lift_number(lo)
            b = _lift_number(hi)
            return cls(_raw_to_mpf(a._mpi_[0]), _raw_to_mpf(b._mpi_[1]), bits)

    @classmethod
    def _wrap(cls, value, bits: int) -> "RInterval":
        lo, hi = value._mpi_
        return cls(_raw_to_mpf(lo), _raw_to_mpf(hi), bits)

    def _lift(self):
        return iv.mpf([self.lo, self.hi])

    # -- arithmetic ----------------------------------------------------
    def _binary(self, other, op) -> "RInterval":
        if not isinstance(other, RInterval):
            other = RInterval.of(other, self.precision_bits)
        bits = max(self.precision_bits, other.precision_bits)
        with working_precision(bits):
            return RInterval._wrap(op(self._lift(), other._lift()), bits)

    def _unary(self, op) -> "RInterval":
        with working_precision(self.precision_bits):
            return RInterval._wrap(op(self._lift()), self.precision_bits)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RInterval) and other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return RInterval(_negate(self.hi), _negate(self.lo), self.precision_bits)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        return self._unary(lambda a: a ** exponent)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RInterval(mpmath.mpf(0), max(_negate(self.lo), self.hi), self.precision_bits)

    def log(self) -> "RInterval":
        if self.lo <= 0:
            raise ValueError("log of an interval reaching zero")
        return self._unary(iv.log)

    def sqrt(self) -> "RInterval":
        if self.lo < 0:
            raise ValueError("sqrt of an interval reaching below zero")
        return self._unary(iv.sqrt)

    def exp(self) -> "RInterval":
        return self._unary(iv.exp)

    def max(self, other) -> "RInterval":
        if not isinstance(other, RInterval):
            other = RInterval.of(other, self.precision_bits)
        bits = max(self.precision_bits, other.precision_bits)
        return RInterval(max(self.lo, other.lo), max(self.hi, other.hi), bits)

    def min(self, other) -> "RInterval":
        if not isinstance(other, RInterval):
            other = RInterval.of(other, self.precision_bits)
        bits = max(self.precision_bits, other.precision_bits)
        return RInterval(min(self.lo, other.lo), min(self.hi, other.hi), bits)

    def intersect(self, other: "RInterval") -> "RInterval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            # two sound enclosures of one real number always overlap
            raise ArithmeticError(f"disjoint enclosures {self} and {other}")
        return RInterval(lo, hi, max(self.precision_bits, other.precision_bits))

    # -- inspection ----------------------------------------------------
    @property
    def lower(self) -> Fraction:
        return mpf_to_fraction(self.lo)

    @property
    def upper(self) -> Fraction:
        return mpf_to_fraction(self.hi)

    @property
    def mid(self) -> mpmath.mpf:
        return (self.lo + self.hi) / 2

    def width(self) -> Fraction:
        return self.upper - self.lower

    def relative_width(self) -> Fraction:
        scale = max(abs(self.lower), abs(self.upper))
        if scale == 0:
            return Fraction(0)
        return self.width() / scale

    def contains(self, value: Union[int, Fraction]) -> bool:
        return self.lower <= value <= self.upper

    def ceil_upper(self) -> int:
        return math.ceil(self.upper)

    def floor_lower(self) -> int:
        return math.floor(self.lower)

    def lo_str(self, digits: int = 25) -> str:
        return _directed_decimal(self.lower, digits, ROUND_FLOOR)

    def hi_str(self, digits: int = 25) -> str:
        return _directed_decimal(self.upper, digits, ROUND_CEILING)

    def __str__(self) -> str:
        return f"[{self.lo_str(12)}, {self.hi_str(12)}]"


def ilog(value: Union[Number, RInterval], bits: int) -> RInterval:
    return RInterval.of(value, bits).log()


def isqrt_interval(value: Union[Number, RInterval], bits: int) -> RInterval:
    return RInterval.of(value, bits).sqrt()
