"""
The X/Y identity behind the abc argument, abc triples built from it, their
quality, and empirical estimates of the lower-bound constants.

Nothing here is a certified bound: the abc conjecture is only used as a way
to rank triples.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache, partial
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .config import DEFAULT_SETTINGS, Settings
from .errors import FactorizationTimeout, IdentityMismatch, InvalidInput, ZeroEncountered, ZeroTerm
from .factoring import Factorization, factorize
from .parallel import run_chunks
from .quadratic import QuadElem
from .recurrence import RecurrenceSequence, Seeds, companion_term, make_sequence, term, terms
from .schema import BigInt

logger = logging.getLogger(__name__)

ABC_DISCLAIMER = "abc is a conjecture: qualities are reported for exploration and no bound is asserted"


class XYRecord(BaseModel):
    seq: str
    n: int
    m: int
    X: BigInt = Field(description="W_n + W_m")
    S: BigInt = Field(description="U_n + U_m")
    Y: BigInt = Field(description="X^2 - D*S^2")
    d: BigInt = Field(description="gcd(X^2, D*S^2)")


class AbcTriple(BaseModel):
    seq: str
    n: int
    m: int
    A: BigInt
    B: BigInt
    C: BigInt
    d: BigInt
    residual_gcd: BigInt = Field(description="Common factor of A, B, C left after dividing by d")
    reduced: bool = Field(description="A, B, C pairwise coprime")
    rad: BigInt = Field(description="rad(|ABC|); an upper bound when the factorization is incomplete")
    quality: float = Field(description="log max(|A|,|B|,|C|) / log rad; a lower bound when incomplete")
    complete_factorization: bool = True


class QualityReport(BaseModel):
    seq: str
    n_max: int
    epsilon: Optional[float] = None
    note: str = ABC_DISCLAIMER
    scanned: int = 0
    zero_terms: int = 0
    incomplete: int = 0
    above_threshold: Optional[int] = Field(default=None, description="Triples with quality > 1 + epsilon")
    entries: List[AbcTriple] = Field(default_factory=list)


class EmpiricalLowerConstants(BaseModel):
    seq: str
    n_min: int
    n_max: int
    d3_emp: int
    d4_emp: float = Field(description="min |U_n + U_m| / alpha^n over the range")
    d4_witness: Tuple[int, int]
    d5_emp: Optional[float] = Field(default=None, description="None when log alpha + log d4/n_min <= 0")
    non_rigorous: bool = True


# ---------------------------------------------------------------------------
# X, Y and the closed form
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _power(base: QuadElem, k: int) -> QuadElem:
    return base ** k


def closed_form_y(seq: RecurrenceSequence, n: int, m: int) -> QuadElem:
    """4 * a1 * a2 * (-Q)^n * (1 + alpha^(m-n)) * (1 + beta^(m-n)) in Q(sqrt D)."""
    k = m - n
    return (
        4 * seq.a1 * seq.a2 * (-seq.Q) ** n
        * (1 + _power(seq.alpha, k))
        * (1 + _power(seq.beta, k))
    )


def xy_pair(seq: RecurrenceSequence, n: int, m: int) -> XYRecord:
    if not n >= m >= 0:
        raise InvalidInput(f"need n >= m >= 0, got n={n}, m={m}")
    X = companion_term(seq, n) + companion_term(seq, m)
    S = term(seq, n) + term(seq, m)
    Y = X * X - seq.D * S * S

    closed = closed_form_y(seq, n, m)
    if closed.b != 0 or closed.a != Y:
        raise IdentityMismatch(f"X^2 - D*S^2 = {Y} but the closed form gives {closed} at n={n}, m={m}")
    d = math.gcd(X * X, seq.D * S * S)
    return XYRecord(seq=seq.descriptor, n=n, m=m, X=X, S=S, Y=Y, d=d)


# ---------------------------------------------------------------------------
# Triples
# ---------------------------------------------------------------------------

def _radical_of(parts: List[Factorization]) -> Tuple[int, bool]:
    primes, cofactors = set(), set()
    for fact in parts:
        primes.update(fact.primes)
        cofactors.update(fact.cofactors)
    value = 1
    for p in primes | cofactors:
        value *= p
    return value, all(fact.complete for fact in parts)


def triple(
    seq: RecurrenceSequence,
    n: int,
    m: int,
    enforce_coprime: bool = True,
    budget_ms: int = DEFAULT_SETTINGS.factor_budget_ms,
) -> AbcTriple:
    rec = xy_pair(seq, n, m)
    if rec.Y == 0:
        raise ZeroTerm(f"Y vanishes at n={n}, m={m}")
    if rec.S == 0 or rec.X == 0:
        raise ZeroTerm(f"{'S' if rec.S == 0 else 'X'} vanishes at n={n}, m={m}; no abc triple")

    A, B, C = rec.Y // rec.d, seq.D * rec.S ** 2 // rec.d, rec.X ** 2 // rec.d
    g = math.gcd(A, B)
    if enforce_coprime and g > 1:
        A, B, C = A // g, B // g, C // g
    reduced = math.gcd(A, B) == 1

    rad, complete = _radical_of([factorize(abs(v), budget_ms) for v in (A, B, C)])
    quality = math.log(max(abs(A), abs(B), abs(C))) / math.log(rad)
    result = AbcTriple(
        seq=seq.descriptor, n=n, m=m, A=A, B=B, C=C, d=rec.d, residual_gcd=g,
        reduced=reduced, rad=rad, quality=quality, complete_factorization=complete,
    )
    if not complete:
        raise FactorizationTimeout(f"radical of the ({n}, {m}) triple is only an upper bound", partial=result)
    return result


def _scan_range(seeds: Seeds, budget_ms: int, start: int, stop: int) -> List[Tuple[str, Optional[AbcTriple]]]:
    seq = make_sequence(*seeds)
    found = []
    for n in range(start, stop):
        for m in range(n + 1):
            try:
                found.append(("ok", triple(seq, n, m, True, budget_ms)))
            except ZeroTerm:
                found.append(("zero", None))
            except FactorizationTimeout as e:
                found.append(("partial", e.partial))
    return found


def scan_quality(
    seq: RecurrenceSequence,
    n_max: int,
    epsilon: Optional[float] = None,
    top: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> QualityReport:
    if n_max < 0 or n_max > settings.n_max_hard:
        raise InvalidInput(f"n_max must lie in [0, {settings.n_max_hard}], got {n_max}")
    outcomes = run_chunks(partial(_scan_range, seq.seeds, settings.factor_budget_ms), n_max + 1, settings.workers)

    triples = [t for status, t in outcomes if t is not None]
    ranked = sorted(triples, key=lambda t: (-t.quality, t.n, t.m))
    report = QualityReport(
        seq=seq.descriptor,
        n_max=n_max,
        epsilon=epsilon,
        scanned=len(outcomes),
        zero_terms=sum(1 for status, _ in outcomes if status == "zero"),
        incomplete=sum(1 for status, _ in outcomes if status == "partial"),
        above_threshold=None if epsilon is None else sum(1 for t in triples if t.quality > 1 + epsilon),
        entries=ranked[: top or settings.scan_top],
    )
    if report.incomplete:
        logger.warning("%d triples have incomplete factorizations; their qualities are lower bounds", report.incomplete)
    logger.info("Scanned %d pairs of %s, best quality %s", report.scanned, seq,
                f"{ranked[0].quality:.6f}" if ranked else "n/a")
    return report


# ---------------------------------------------------------------------------
# Empirical lower-bound constants
# ---------------------------------------------------------------------------

def estimate_lower_constants(
    seq: RecurrenceSequence,
    n_min: int,
    n_max: int,
    settings: Settings = DEFAULT_SETTINGS,
) -> EmpiricalLowerConstants:
    """NON-RIGOROUS estimates of d3, d4, d5 from the terms with n_min <= n <= n_max."""
    if not 0 <= n_min < n_max <= settings.n_max_hard:
        raise InvalidInput(f"need 0 <= n_min < n_max <= {settings.n_max_hard}, got [{n_min}, {n_max}]")
    bits = settings.precision_bits
    alpha = seq.alpha.to_interval(bits)
    values = [u for _, u in terms(seq, 0, n_max + 1)]

    best, witness = None, None
    for n in range(n_min, n_max + 1):
        scale = alpha ** n
        for m in range(n + 1):
            s = values[n] + values[m]
            if s == 0:
                raise ZeroEncountered(f"U_{n} + U_{m} = 0", witness=(n, m))
            low = (abs(s) / scale).lower
            if best is None or low < best:
                best, witness = low, (n, m)

    log_alpha = float(alpha.log().mid)
    denominator = log_alpha + math.log(best) / max(n_min, 1)
    return EmpiricalLowerConstants(
        seq=seq.descriptor,
        n_min=n_min,
        n_max=n_max,
        d3_emp=n_min,
        d4_emp=float(best),
        d4_witness=witness,
        d5_emp=1 / denominator if denominator > 0 else None,
    )
