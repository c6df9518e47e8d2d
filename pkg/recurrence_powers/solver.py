"""Enumeration and certification of solutions of U_n + U_m = x^q."""
from __future__ import annotations

import logging
from collections import defaultdict
from functools import partial
from enum import Enum
from typing import Callable, List, Optional, Tuple

from pydantic import BaseModel, Field

from .bounds import search_bound
from .config import DEFAULT_SETTINGS, Settings
from .errors import HypothesisViolated, IdentityMismatch, InvalidInput
from .parallel import run_chunks
from .powers import perfect_power
from .recurrence import RecurrenceSequence, Seeds, make_sequence, term, terms
from .schema import BigInt

logger = logging.getLogger(__name__)

Hit = Tuple[int, int, int, int, int]  # (n, m, x, q, value)


class SearchMode(str, Enum):
    FIXED_X = "fixed-x"
    UNCONSTRAINED = "unconstrained"
    FAMILY = "family"


class Solution(BaseModel):
    n: int = Field(ge=0)
    m: int = Field(ge=0)
    x: int = Field(ge=2)
    q: int = Field(ge=2)
    value: BigInt
    certified_complete: bool = False


class SolutionSet(BaseModel):
    sequence: str = Field(description="P,Q,U0,U1")
    mode: SearchMode
    x: Optional[int] = None
    n_bound_used: int
    theorem_bound: Optional[BigInt] = None
    solutions: List[Solution] = Field(default_factory=list)

    @property
    def certified_complete(self) -> bool:
        return self.theorem_bound is not None and self.n_bound_used >= self.theorem_bound


# ---------------------------------------------------------------------------
# Workers
# ---------------------------------------------------------------------------

def _fixed_x_range(seeds: Seeds, x: int, start: int, stop: int) -> List[Hit]:
    """Hits with start <= n < stop; m runs over all of 0..n."""
    seq = make_sequence(*seeds)
    index = defaultdict(list)
    powers: List[Tuple[int, int]] = []  # (x^q, q) in increasing order
    next_q, next_power = 2, x * x
    largest = 0
    hits = []
    for n, u_n in terms(seq, 0, stop):
        index[u_n].append(n)
        largest = max(largest, abs(u_n))
        if n < start:
            continue
        limit = abs(u_n) + largest
        while next_power <= limit:
            powers.append((next_power, next_q))
            next_q += 1
            next_power *= x
        for power, q in powers:
            if power > limit:
                break
            for m in index.get(power - u_n, ()):
                hits.append((n, m, x, q, power))
    return hits


def _brute_range(seeds: Seeds, q_max: Optional[int], start: int, stop: int) -> List[Hit]:
    seq = make_sequence(*seeds)
    values = [u for _, u in terms(seq, 0, stop)]
    hits = []
    for n in range(start, stop):
        for m in range(n + 1):
            s = values[n] + values[m]
            if s < 4:
                continue
            for rep in perfect_power(s):
                if q_max is None or rep.exponent <= q_max:
                    hits.append((n, m, rep.base, rep.exponent, s))
    return hits


def _collect(job: Callable[[int, int], List[Hit]], total: int, workers: int) -> List[Hit]:
    return sorted(run_chunks(job, total, workers), key=lambda h: (h[0], h[1], h[3]))


def _as_solutions(hits: List[Hit], certified: bool) -> List[Solution]:
    return [
        Solution(n=n, m=m, x=x, q=q, value=value, certified_complete=certified)
        for n, m, x, q, value in hits
    ]


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def solve_fixed_x(
    seq: RecurrenceSequence,
    x: int,
    n_cap: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
    precision_bits: Optional[int] = None,
) -> SolutionSet:
    if x < 2:
        raise InvalidInput(f"x must be at least 2, got {x}")
    theorem_bound = search_bound(seq, x, precision_bits, settings)
    cap = settings.n_cap if n_cap is None else n_cap
    if cap < 0:
        raise InvalidInput(f"n_cap must be nonnegative, got {cap}")
    if cap > settings.n_max_hard:
        logger.warning("n_cap %d exceeds n_max_hard %d; clamping", cap, settings.n_max_hard)
        cap = settings.n_max_hard
    n_bound = min(theorem_bound, cap)
    certified = n_bound >= theorem_bound

    hits = _collect(partial(_fixed_x_range, seq.seeds, x), n_bound + 1, settings.workers)
    result = SolutionSet(
        sequence=seq.descriptor,
        mode=SearchMode.FIXED_X,
        x=x,
        n_bound_used=n_bound,
        theorem_bound=theorem_bound,
        solutions=_as_solutions(hits, certified),
    )
    for sol in result.solutions:
        if not verify_solution(seq, sol):
            raise IdentityMismatch(f"enumeration produced a false solution {sol}")
    if not certified:
        logger.warning("Enumeration for x=%d stopped at n=%d; the certified bound is %d", x, n_bound, theorem_bound)
    logger.info("Found %d solutions for x=%d on %s", len(result.solutions), x, seq)
    return result


def brute_search(
    seq: RecurrenceSequence,
    n_max: int,
    q_max: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> SolutionSet:
    if n_max < 0 or n_max > settings.n_max_hard:
        raise InvalidInput(f"n_max must lie in [0, {settings.n_max_hard}], got {n_max}")
    hits = _collect(partial(_brute_range, seq.seeds, q_max), n_max + 1, settings.workers)
    logger.info("Found %d perfect powers U_n + U_m with n <= %d on %s", len(hits), n_max, seq)
    return SolutionSet(
        sequence=seq.descriptor,
        mode=SearchMode.UNCONSTRAINED,
        n_bound_used=n_max,
        solutions=_as_solutions(hits, False),
    )


def verify_solution(seq: RecurrenceSequence, sol: Solution) -> bool:
    if not (sol.n >= sol.m >= 0 and sol.x >= 2 and sol.q >= 2):
        return False
    power = pow(sol.x, sol.q)
    return power == sol.value == term(seq, sol.n) + term(seq, sol.m)


def family_remark(P: int, Q: int, k_max: int) -> List[Solution]:
    """Solutions (4k, 0, U_2k, 2) of the sequence (P, Q, 2, P) with |Q| = 1."""
    if abs(Q) != 1:
        raise HypothesisViolated(f"the family needs |Q| = 1, got Q={Q}")
    if P * P + 4 * Q <= 0:
        raise HypothesisViolated(f"the family needs P^2 + 4Q > 0, got {P * P + 4 * Q}")
    seq = make_sequence(P, Q, 2, P)

    for n in range(2 * k_max + 1):
        if term(seq, 2 * n) != term(seq, n) ** 2 - 2 * (-Q) ** n:
            raise IdentityMismatch(f"U_2n = U_n^2 - 2(-Q)^n fails at n={n} for {seq}")

    family = []
    for k in range(1, k_max + 1):
        sol = Solution(n=4 * k, m=0, x=term(seq, 2 * k), q=2, value=term(seq, 4 * k) + seq.U0)
        if not verify_solution(seq, sol):
            raise IdentityMismatch(f"family member {sol} does not verify")
        family.append(sol)
    logger.info("Verified %d family solutions for P=%d, Q=%d", len(family), P, Q)
    return family
