"""Effective bounds for U_n + U_m = x^q from lower bounds for linear forms in logarithms.

Every real constant is an outward-rounded ``RInterval``; the chain is
recorded step by step so that each value can be audited against the
inequality it comes from.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import mpmath
from pydantic import BaseModel, ConfigDict, Field, InstanceOf

from .config import DEFAULT_SETTINGS, Settings
from .errors import HypothesisViolated, InvalidInput, ZeroInput
from .intervals import RInterval
from .quadratic import QuadElem, square_root_of
from .recurrence import RecurrenceSequence, Seeds, make_sequence

logger = logging.getLogger(__name__)

MATVEEV_FLOOR = Fraction(4, 25)  # 0.16
MIN_LADDER_BITS = 53

Real = Union[int, InstanceOf[Fraction], InstanceOf[RInterval]]


class TraceStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    formula: str
    interval: InstanceOf[RInterval]

    def export(self) -> dict:
        return {
            "name": self.name,
            "formula": self.formula,
            "lo": self.interval.lo_str(),
            "hi": self.interval.hi_str(),
            "precision_bits": self.interval.precision_bits,
        }


class EffectiveBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    seeds: Seeds
    precision_bits: int = Field(description="Highest rung of the precision ladder that was evaluated")
    n0: int = Field(description="max(3, least n with alpha^n > c1)")
    trace: List[TraceStep]

    def get(self, name: str) -> RInterval:
        for step in self.trace:
            if step.name == name:
                return step.interval
        raise KeyError(name)

    @property
    def c0(self) -> RInterval:
        return self.get("c0")

    @property
    def c1(self) -> RInterval:
        return self.get("c1")

    @property
    def d1(self) -> RInterval:
        return self.get("d1")

    @property
    def d2(self) -> RInterval:
        return self.get("d2")

    @property
    def c4(self) -> RInterval:
        return self.get("c4")

    @property
    def c2(self) -> RInterval:
        return self.get("c2")

    @property
    def C1(self) -> RInterval:
        return self.get("C1")

    @property
    def C2(self) -> RInterval:
        return self.get("C2")

    def upper_envelope(self, n: int) -> RInterval:
        """c1 * alpha^n; bounds |U_n + U_m| for every m <= n."""
        return self.c1 * self.get("alpha") ** n

    def _least_upper(self, build) -> int:
        # every rung gives a valid bound; the finer ladder of a higher precision can only lower the minimum
        return min(build(bits).ceil_upper() for bits in precision_ladder(self.precision_bits))

    def search_bound(self, x: int) -> int:
        if x < 2:
            raise InvalidInput(f"x must be at least 2, got {x}")
        theorem = self._least_upper(lambda bits: self.C1 * RInterval.of(x, bits).log() ** 4)
        return max(self.C2.ceil_upper(), self.n0, theorem)

    def gap_bound(self, x: int, q: int) -> int:
        if x < 2 or q < 2:
            raise InvalidInput(f"x and q must be at least 2, got x={x}, q={q}")
        return self._least_upper(
            lambda bits: self.c2 * RInterval.of(q, bits).log() * RInterval.of(x, bits).log()
        )

    def export_trace(self) -> List[dict]:
        return [step.export() for step in self.trace]


class LowerBoundConstants(BaseModel):
    """|U_n + U_m| >= d4 * alpha^n for n > d3, hence n/q <= d5 * log x."""

    model_config = ConfigDict(frozen=True)

    d3: InstanceOf[RInterval]
    d4: InstanceOf[RInterval]
    d5: InstanceOf[RInterval]


class MatveevInput(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: int = Field(description="Number of logarithms")
    dL: int = Field(description="Degree of the number field")
    B: Real = Field(description="Upper bound for the absolute values of the exponents")
    A: List[Real] = Field(description="A_j >= max(dL*h(g_j), |log g_j|, 0.16)")


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

def _as_interval(value, bits: int) -> RInterval:
    return value if isinstance(value, RInterval) else RInterval.of(value, bits)


def _certainly_below(value, threshold: Fraction) -> bool:
    if isinstance(value, RInterval):
        return value.upper < threshold
    return Fraction(value) < threshold


def height_quadratic(x: QuadElem, bits: int = DEFAULT_SETTINGS.precision_bits) -> RInterval:
    """Absolute logarithmic height of an element of Q(sqrt D)."""
    if x.is_zero():
        raise ZeroInput("the height of 0 is undefined")
    if x.is_rational() or square_root_of(x.d) is not None:
        r = x.as_rational()
        return RInterval.of(max(abs(r.numerator), r.denominator), bits).log()

    trace, norm = x.trace(), x.norm()
    leading = math.lcm(trace.denominator, norm.denominator)
    total = RInterval.of(leading, bits).log()
    for conjugate in (x, x.conj()):
        size = abs(conjugate)
        if size > 1:
            total = total + size.to_interval(bits).log()
    return total / 2


def matveev_constant(t: int, dL: int, bits: int = DEFAULT_SETTINGS.precision_bits) -> RInterval:
    """1.4 * 30^(t+3) * t^4.5 * dL^2 * (1 + log dL)."""
    tt = RInterval.of(t, bits)
    value = RInterval.of(Fraction(14, 10) * 30 ** (t + 3) * t ** 4 * dL * dL, bits) * tt.sqrt()
    return value * (1 + RInterval.of(dL, bits).log())


def matveev_bound(inp: MatveevInput, bits: int = DEFAULT_SETTINGS.precision_bits) -> RInterval:
    """Exponent E with |Lambda| > exp(-E) for a nonzero linear form."""
    if inp.t < 1:
        raise InvalidInput(f"t must be positive, got {inp.t}")
    if inp.dL < 1:
        raise InvalidInput(f"dL must be positive, got {inp.dL}")
    if len(inp.A) != inp.t:
        raise InvalidInput(f"expected {inp.t} values A_j, got {len(inp.A)}")
    for j, a in enumerate(inp.A, start=1):
        if _certainly_below(a, MATVEEV_FLOOR):
            raise InvalidInput(f"A_{j} is below 0.16")
    if _certainly_below(inp.B, Fraction(1)):
        raise InvalidInput("B must be at least 1")

    value = matveev_constant(inp.t, inp.dL, bits) * (1 + _as_interval(inp.B, bits).log())
    for a in inp.A:
        value = value * _as_interval(a, bits)
    return value


def invert_log_power(m: int, T: Union[int, Fraction, RInterval], bits: int = DEFAULT_SETTINGS.precision_bits) -> mpmath.mpf:
    """Upper bound 2^m * T * (log T)^m for x with x/(log x)^m < T."""
    if m < 1:
        raise InvalidInput(f"m must be positive, got {m}")
    threshold = (4 * m * m) ** m
    low = T.lower if isinstance(T, RInterval) else Fraction(T)
    if low <= threshold:
        raise HypothesisViolated(f"T must exceed (4m^2)^m = {threshold}")
    t = _as_interval(T, bits)
    return (2 ** m * t * t.log() ** m).hi


# ---------------------------------------------------------------------------
# The constant chain
# ---------------------------------------------------------------------------

class _Chain:
    def __init__(self, bits: int):
        self.bits = bits
        self.steps: Dict[str, Tuple[str, RInterval]] = {}

    def num(self, value) -> RInterval:
        return RInterval.of(value, self.bits)

    def exact(self, value: QuadElem) -> RInterval:
        return value.to_interval(self.bits)

    def __call__(self, name: str, formula: str, value: RInterval) -> RInterval:
        self.steps[name] = (formula, value)
        return value


def _least_exponent_above(alpha: QuadElem, bound: QuadElem) -> int:
    n, power = 0, QuadElem.rational(1, alpha.d)
    while not power > bound:
        n += 1
        power = power * alpha
    return n


def _threshold_n0(seq: RecurrenceSequence) -> int:
    c1 = 2 * (abs(seq.a1) + abs(seq.a2)) / QuadElem.sqrt_d(seq.D)
    return max(3, _least_exponent_above(seq.alpha, c1))


def _evaluate_chain(seq: RecurrenceSequence, n0: int, bits: int) -> Dict[str, Tuple[str, RInterval]]:
    s = _Chain(bits)
    a1, a2 = abs(seq.a1), abs(seq.a2)
    root_d = QuadElem.sqrt_d(seq.D)
    log2 = s.num(2).log()
    log2_sq = log2 ** 2
    zero = s.num(0)

    sqrt_d = s("sqrt_D", "sqrt(D)", s.num(seq.D).sqrt())
    alpha = s("alpha", "(P + sqrt(D))/2", s.exact(seq.alpha))
    log_alpha = s("log_alpha", "log(alpha)", alpha.log())
    log_ratio = s("log_alpha_over_beta", "log(alpha/|beta|)", s.exact(seq.alpha / abs(seq.beta)).log())

    # upper bound lemma
    c0 = s("c0", "(|a1| + |a2|)/sqrt(D)", s.exact((a1 + a2) / root_d))
    c1 = s("c1", "2*c0", 2 * c0)
    d1 = s("d1", "2*log(alpha)", 2 * log_alpha)
    d2 = s("d2", "max(0, log(c1)/log(alpha))", zero.max(c1.log() / log_alpha))
    s("n0", "max(3, least n with alpha^n > c1)", s.num(n0))
    log_spread = s.exact(2 * (a1 + a2) / a1).log()
    c4 = s("c4", "max(log(2(|a1|+|a2|)/|a1|)/log(alpha), log(2(|a1|+|a2|)/|a1|)/log(alpha/|beta|))",
           (log_spread / log_alpha).max(log_spread / log_ratio))

    # lower bound lemma
    rho = s("rho", "min(log(alpha), log(alpha/|beta|))", log_alpha.min(log_ratio))
    d3 = s("d3", "max(0, log(4|a2|/|a1|)/rho)", zero.max(s.exact(4 * a2 / a1).log() / rho))
    d4 = s("d4", "|a1|/(2*sqrt(D))", s.exact(a1 / (2 * root_d)))
    d5 = s("d5", "(1 + max(0, -log(d4))/(2*log 2))/log(alpha)",
           (1 + zero.max(-d4.log()) / (2 * log2)) / log_alpha)

    # heights entering the linear forms
    K = s("K", "1.4*30^6*3^4.5*2^2*(1 + log 2)", matveev_constant(3, 2, bits))
    h_alpha = s("h_alpha", "h(alpha)", height_quadratic(seq.alpha, bits))
    A2 = s("A2", "max(2*h(alpha), 0.16)", (2 * h_alpha).max(MATVEEV_FLOOR))
    gamma3 = root_d / a1
    h_gamma3 = s("h_gamma3", "h(sqrt(D)/|a1|)", height_quadratic(gamma3, bits))
    A3 = s("A3", "max(2*h(gamma3), |log(gamma3)|, 0.16)",
           (2 * h_gamma3).max(abs(s.exact(gamma3).log())).max(MATVEEV_FLOOR))

    # gap lemma
    k0 = s("k0", "c0*sqrt(D)/|a1| + |a2|/|a1|", s.exact(1 + 2 * a2 / a1))
    matveev_gap = K * (1 + 1 / log2) * 2 * (1 + d5 * h_alpha) * A2 * A3
    c2 = s("c2", "max(d3/(log 2)^2, (max(0, log k0)/(log 2)^2 + K(1 + 1/log 2)*2(1 + d5*h(alpha))*A2*A3)/rho)",
           (d3 / log2_sq).max((zero.max(k0.log()) / log2_sq + matveev_gap) / rho))

    # main case n > m
    beta_b = s("beta_B", "max(1, d1/log 2)", (d1 / log2).max(1))
    log_n0 = s.num(n0).log()
    exponent_factor = 1 + (1 + beta_b.log()) / log_n0
    A3_base = (2 * h_gamma3).max(abs(s.exact(gamma3).log())).max(MATVEEV_FLOOR) + 2 * log2
    c5 = s("c5", "(A3 + 2*log 2)/(log 2)^2 + 2*h(alpha)*c2", A3_base / log2_sq + 2 * h_alpha * c2)
    c6 = s("c6", "2*K*A2*c5*(1 + (1 + log beta_B)/log n0)", 2 * K * A2 * c5 * exponent_factor)
    c7 = s("c7", "max(0, log(2|a2|/|a1|))/(log 2)^2 + c2*log(alpha)",
           zero.max(s.exact(2 * a2 / a1).log()) / log2_sq + c2 * log_alpha)
    c8 = s("c8", "1 + max(0, log(d1/log 2))/log n0", 1 + zero.max((d1 / log2).log()) / log_n0)
    c9 = s("c9", "c7*c8", c7 * c8)
    c10 = s("c10", "c6*c8", c6 * c8)
    c11 = s("c11", "c9/(log 3 * log 2) + c10", c9 / (s.num(3).log() * log2) + c10)
    c12 = s("c12", "c11/log(alpha/|beta|)", c11 / log_ratio)
    floor_ii = 4 * 257 * s.num(257).log() ** 2 / log2_sq ** 2
    C1_ii = s("C1_II", "max(4*c12*(max(0, log c12)/log 2 + 2)^2, 4*257*(log 257)^2/(log 2)^4)",
              (4 * c12 * (zero.max(c12.log()) / log2 + 2) ** 2).max(floor_ii))

    # case n = m
    gamma3_i = root_d / (2 * a1)
    h_gamma3_i = s("h_gamma3_I", "h(sqrt(D)/(2|a1|))", height_quadratic(gamma3_i, bits))
    A3_i = s("A3_I", "max(2*h(gamma3_I), |log(gamma3_I)|, 0.16)",
             (2 * h_gamma3_i).max(abs(s.exact(gamma3_i).log())).max(MATVEEV_FLOOR))
    c13 = s("c13", "(max(0, log(|a2|/|a1|))/(log 3 * log 2) + 2*K*A2*A3_I*(1 + (1 + log beta_B)/log n0))/log(alpha/|beta|)",
            (zero.max(s.exact(a2 / a1).log()) / (s.num(3).log() * log2) + 2 * K * A2 * A3_i * exponent_factor) / log_ratio)
    floor_i = 2 * 5 * s.num(5).log() / log2_sq ** 2
    C1_i = s("C1_I", "max(2*c13*(max(0, log c13)/log 2 + 1)/(log 2)^2, 2*5*log 5/(log 2)^4)",
             (2 * c13 * (zero.max(c13.log()) / log2 + 1) / log2_sq).max(floor_i))

    s("C1", "max(C1_II, C1_I)", C1_ii.max(C1_i))
    s("C2", "max(d2, c4)", d2.max(c4))
    return s.steps


def precision_ladder(bits: int) -> List[int]:
    rungs = [bits]
    while rungs[-1] % 2 == 0 and rungs[-1] // 2 >= MIN_LADDER_BITS:
        rungs.append(rungs[-1] // 2)
    return rungs


def _settled(interval: RInterval, target: Fraction) -> bool:
    return interval.width() <= target or interval.relative_width() <= target


def _evaluate_ladder(seq: RecurrenceSequence, n0: int, bits: int) -> List[TraceStep]:
    merged: Dict[str, Tuple[str, RInterval]] = {}
    for rung in precision_ladder(bits):
        for name, (formula, value) in _evaluate_chain(seq, n0, rung).items():
            if name in merged:
                merged[name] = (formula, merged[name][1].intersect(value))
            else:
                merged[name] = (formula, value)
        logger.debug("Evaluated constant chain at %d bits", rung)
    return [TraceStep(name=name, formula=f, interval=v) for name, (f, v) in merged.items()]


@lru_cache(maxsize=64)
def _derive(seeds: Seeds, bits: int, target: Fraction, max_bits: int, refine: bool) -> EffectiveBounds:
    seq = make_sequence(*seeds)
    if seq.square_discriminant:
        logger.warning(
            "D = %d is a perfect square: the non-vanishing arguments for the linear forms do not apply",
            seq.D,
        )
    n0 = _threshold_n0(seq)
    trace = _evaluate_ladder(seq, n0, bits)
    while refine and bits * 2 <= max_bits and not all(_settled(step.interval, target) for step in trace):
        bits *= 2
        logger.debug("Refining constant chain to %d bits", bits)
        trace = _evaluate_ladder(seq, n0, bits)
    if refine and not all(_settled(step.interval, target) for step in trace):
        logger.warning("Constant chain still wider than %s at %d bits", float(target), bits)
    bounds = EffectiveBounds(seeds=seeds, precision_bits=bits, n0=n0, trace=trace)
    logger.info("Derived constants for %s at %d bits: C1 <= %s, C2 <= %s",
                seeds, bits, bounds.C1.hi_str(8), bounds.C2.hi_str(8))
    return bounds


def derive_constants(
    seq: RecurrenceSequence,
    precision_bits: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
    refine: bool = True,
) -> EffectiveBounds:
    bits = precision_bits or settings.precision_bits
    if bits < MIN_LADDER_BITS:
        raise InvalidInput(f"precision must be at least {MIN_LADDER_BITS} bits, got {bits}")
    target = Fraction(settings.relative_width_target)
    return _derive(seq.seeds, bits, target, max(settings.max_precision_bits, bits), refine)


def search_bound(seq: RecurrenceSequence, x: int, precision_bits: Optional[int] = None,
                 settings: Settings = DEFAULT_SETTINGS) -> int:
    return derive_constants(seq, precision_bits, settings).search_bound(x)


def gap_bound(seq: RecurrenceSequence, x: int, q: int, precision_bits: Optional[int] = None,
              settings: Settings = DEFAULT_SETTINGS) -> int:
    return derive_constants(seq, precision_bits, settings).gap_bound(x, q)


def lower_bound_constants(seq: RecurrenceSequence, precision_bits: Optional[int] = None,
                          settings: Settings = DEFAULT_SETTINGS) -> LowerBoundConstants:
    bounds = derive_constants(seq, precision_bits, settings)
    return LowerBoundConstants(d3=bounds.get("d3"), d4=bounds.get("d4"), d5=bounds.get("d5"))
