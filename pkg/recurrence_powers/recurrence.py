"""Binary recurrence sequences U_n = P*U_{n-1} + Q*U_{n-2}."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, InstanceOf

from .errors import DegenerateSequence, InvalidInput, SequenceParseError, ZeroProduct
from .intervals import RInterval
from .quadratic import QuadElem, square_root_of

logger = logging.getLogger(__name__)

PRESETS_FILE = Path(__file__).with_name("presets.env")

Seeds = Tuple[int, int, int, int]


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD


class ConditionStatus(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"


class RecurrenceSequence(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    P: int
    Q: int
    U0: int
    U1: int
    D: int = Field(description="Discriminant P^2 + 4Q")
    alpha: InstanceOf[QuadElem] = Field(description="Dominant root (P + sqrt D)/2")
    beta: InstanceOf[QuadElem] = Field(description="Second root (P - sqrt D)/2")
    a1: InstanceOf[QuadElem] = Field(description="U1 - U0*beta")
    a2: InstanceOf[QuadElem] = Field(description="U1 - U0*alpha")
    a1a2_int: int = Field(description="U1^2 - P*U0*U1 - Q*U0^2")
    name: Optional[str] = Field(default=None, description="Preset name, if any")

    @property
    def seeds(self) -> Seeds:
        return (self.P, self.Q, self.U0, self.U1)

    @property
    def descriptor(self) -> str:
        return ",".join(str(v) for v in self.seeds)

    @property
    def square_discriminant(self) -> bool:
        return square_root_of(self.D) is not None

    def __str__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"{label}(P={self.P}, Q={self.Q}, U0={self.U0}, U1={self.U1})"


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str


class ValidationReport(BaseModel):
    seeds: Seeds
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class ChebyshevEval(BaseModel):
    degree: int = Field(ge=0)
    argument: int
    value: int


# ---------------------------------------------------------------------------
# 2x2 integer matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Matrix2:
    r1c1: int
    r1c2: int
    r2c1: int
    r2c2: int

    @classmethod
    def companion(cls, P: int, Q: int) -> "Matrix2":
        return cls(P, Q, 1, 0)

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.r1c1 * other.r1c1 + self.r1c2 * other.r2c1,
            self.r1c1 * other.r1c2 + self.r1c2 * other.r2c2,
            self.r2c1 * other.r1c1 + self.r2c2 * other.r2c1,
            self.r2c1 * other.r1c2 + self.r2c2 * other.r2c2,
        )

    def __pow__(self, n: int) -> "Matrix2":
        result = Matrix2.identity()
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, top: int, bottom: int) -> Tuple[int, int]:
        return (self.r1c1 * top + self.r1c2 * bottom, self.r2c1 * top + self.r2c2 * bottom)


def _window(P: int, Q: int, s0: int, s1: int, n: int) -> Tuple[int, int]:
    """(S_{n+1}, S_n) for the sequence with seeds s0, s1."""
    return (Matrix2.companion(P, Q) ** n).apply(s1, s0)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _root_data(P: int, Q: int, U0: int, U1: int):
    D = P * P + 4 * Q
    half = Fraction(1, 2)
    plus = QuadElem(Fraction(P, 2), half, D)
    minus = QuadElem(Fraction(P, 2), -half, D)
    # the dominant root is the one of larger absolute value
    if P >= 0:
        alpha, beta = plus, minus
    else:
        alpha, beta = minus, plus
    a1 = U1 - U0 * beta
    a2 = U1 - U0 * alpha
    a1a2_int = U1 * U1 - P * U0 * U1 - Q * U0 * U0
    return D, alpha, beta, a1, a2, a1a2_int


def _run_checks(P: int, Q: int, U0: int, U1: int) -> List[CheckResult]:
    D = P * P + 4 * Q
    checks = [
        CheckResult(name="pq_nonzero", passed=P * Q != 0, detail=f"P*Q = {P * Q}"),
        CheckResult(name="seeds_nonzero", passed=abs(U0) + abs(U1) > 0, detail=f"|U0|+|U1| = {abs(U0) + abs(U1)}"),
        CheckResult(name="discriminant_positive", passed=D > 0, detail=f"D = P^2+4Q = {D}"),
    ]
    if D <= 0:
        return checks

    _, alpha, beta, _, _, a1a2_int = _root_data(P, Q, U0, U1)
    checks.append(CheckResult(
        name="root_ratio_not_unity",
        passed=P != 0,
        detail=(
            "alpha/beta is real, so it is a root of unity only when it equals +1 or -1; "
            "+1 needs D = 0 and -1 needs P = 0"
            + ("" if P != 0 else " (P = 0 here: |alpha| = |beta|)")
        ),
    ))
    dominant = P != 0 and (alpha - 1).sign() > 0
    checks.append(CheckResult(
        name="dominant_root",
        passed=dominant,
        detail=f"alpha = {alpha} must exceed 1 and |beta| = {abs(beta)}",
    ))
    checks.append(CheckResult(
        name="coefficients_nonzero",
        passed=a1a2_int != 0,
        detail=f"a1*a2 = {a1a2_int}",
    ))
    if square_root_of(D) is not None:
        checks.append(CheckResult(
            name="perfect_square_discriminant",
            passed=True,
            detail=f"D = {D} is a square: alpha and beta are rational and distinct",
        ))
    return checks


def check_nondegenerate(seq: Union[RecurrenceSequence, Seeds]) -> ValidationReport:
    seeds = seq.seeds if isinstance(seq, RecurrenceSequence) else tuple(seq)
    return ValidationReport(seeds=seeds, checks=_run_checks(*seeds))


def make_sequence(P: int, Q: int, U0: int, U1: int, name: Optional[str] = None) -> RecurrenceSequence:
    report = check_nondegenerate((P, Q, U0, U1))
    if not report.passed:
        failed = ", ".join(c.name for c in report.failures())
        raise DegenerateSequence(f"degenerate sequence {(P, Q, U0, U1)}: {failed}", report.failures())

    D, alpha, beta, a1, a2, a1a2_int = _root_data(P, Q, U0, U1)
    logger.debug("Built sequence %s with D=%d, a1a2=%d", (P, Q, U0, U1), D, a1a2_int)
    return RecurrenceSequence(
        P=P, Q=Q, U0=U0, U1=U1, D=D,
        alpha=alpha, beta=beta, a1=a1, a2=a2,
        a1a2_int=a1a2_int, name=name,
    )


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def _require_index(n: int):
    if n < 0:
        raise InvalidInput(f"index must be nonnegative, got {n}")


def term(seq: RecurrenceSequence, n: int) -> int:
    _require_index(n)
    return _window(seq.P, seq.Q, seq.U0, seq.U1, n)[1]


def lucas_companion(seq: RecurrenceSequence, n: int) -> int:
    _require_index(n)
    return _window(seq.P, seq.Q, 2, seq.P, n)[1]


def companion_term(seq: RecurrenceSequence, n: int) -> int:
    """W_n = a1*alpha^n + a2*beta^n."""
    _require_index(n)
    if n == 0:
        return 2 * seq.U1 - seq.P * seq.U0
    v_n, v_prev = _window(seq.P, seq.Q, 2, seq.P, n - 1)
    return seq.U1 * v_n + seq.Q * seq.U0 * v_prev


def terms(seq: RecurrenceSequence, start: int, stop: int) -> Iterator[Tuple[int, int]]:
    """Yield (n, U_n) for start <= n < stop."""
    _require_index(start)
    if stop <= start:
        return
    nxt, cur = _window(seq.P, seq.Q, seq.U0, seq.U1, start)
    for n in range(start, stop):
        yield n, cur
        cur, nxt = nxt, seq.P * nxt + seq.Q * cur


def binet_interval(seq: RecurrenceSequence, n: int, bits: int) -> RInterval:
    """(a1*alpha^n - a2*beta^n)/(alpha - beta) in interval arithmetic."""
    _require_index(n)
    alpha = seq.alpha.to_interval(bits)
    beta = seq.beta.to_interval(bits)
    numerator = seq.a1.to_interval(bits) * alpha ** n - seq.a2.to_interval(bits) * beta ** n
    return numerator / (seq.alpha - seq.beta).to_interval(bits)


def chebyshev(n: int, x: int) -> ChebyshevEval:
    _require_index(n)
    low, high = 2, x
    for bit in bin(n)[2:]:
        if bit == "1":
            low, high = low * high - x, high * high - 2
        else:
            low, high = low * low - 2, low * high - x
    return ChebyshevEval(degree=n, argument=x, value=low)


def chebyshev_eval(n: int, x: int) -> int:
    return chebyshev(n, x).value


def condition_17(seq: RecurrenceSequence, n_parity: Parity, m: int) -> ConditionStatus:
    """Exact test of sqrt((-1)^(n+1) D / (a1 a2)) * U_m != +-2."""
    if seq.a1a2_int == 0:
        raise ZeroProduct(f"a1*a2 vanishes for {seq}")
    sign = 1 if Parity(n_parity) is Parity.ODD else -1
    u_m = term(seq, m)
    if sign * seq.D * u_m * u_m == 4 * seq.a1a2_int:
        return ConditionStatus.FAILS
    return ConditionStatus.HOLDS


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def parse_seeds(text: str) -> Seeds:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise SequenceParseError(f"expected 'P,Q,U0,U1', got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as e:
        raise SequenceParseError(f"non-integer seed in {text!r}") from e


def load_presets(path: Optional[str] = None) -> dict:
    """Read name=P,Q,U0,U1 lines; RPL_PRESETS replaces the packaged file."""
    source = Path(path or os.getenv("RPL_PRESETS") or PRESETS_FILE)
    if not source.is_file():
        raise SequenceParseError(f"presets file not found: {source}")
    presets = {}
    for name, value in dotenv_values(source).items():
        if value is None:
            raise SequenceParseError(f"preset {name!r} has no value in {source}")
        presets[name.strip().lower()] = parse_seeds(value)
    return presets


def resolve_sequence(text: str, presets_path: Optional[str] = None) -> RecurrenceSequence:
    key = text.strip().lower()
    if "," not in key:
        presets = load_presets(presets_path)
        if key not in presets:
            raise SequenceParseError(f"unknown preset {text!r}; known: {', '.join(sorted(presets))}")
        return make_sequence(*presets[key], name=key)
    return make_sequence(*parse_seeds(key))
