"""
Integer factorization for radicals: trial division, perfect power peeling and
Pollard's rho (Brent's variant) under a wall-clock budget.
"""
import logging
import random
import time
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import gmpy2
from pydantic import BaseModel, Field
from sympy import isprime, primerange

from .config import DEFAULT_SETTINGS
from .errors import FactorizationTimeout, InvalidInput
from .powers import perfect_power
from .schema import BigInt

logger = logging.getLogger(__name__)

TRIAL_LIMIT = 10**6
BATCH = 128


class Factorization(BaseModel):
    n: BigInt
    primes: Dict[int, int] = Field(default_factory=dict, description="prime -> exponent")
    cofactors: List[BigInt] = Field(default_factory=list, description="Composite parts left unsplit")
    complete: bool = True

    @property
    def radical(self) -> int:
        """Product of the distinct primes; an upper bound when incomplete."""
        value = 1
        for p in self.primes:
            value *= p
        for c in self.cofactors:
            value *= c
        return value


@lru_cache(maxsize=1)
def small_primes() -> Tuple[int, ...]:
    return tuple(primerange(2, TRIAL_LIMIT))


def brent_rho(n: int, deadline: float, rng: random.Random) -> Optional[int]:
    """A nontrivial factor of the odd composite n, or None once the deadline passes."""
    n = gmpy2.mpz(n)
    while time.monotonic() < deadline:
        y = gmpy2.mpz(rng.randrange(1, int(n)))
        c = gmpy2.mpz(rng.randrange(1, int(n)))
        g = r = q = gmpy2.mpz(1)
        x = ys = y
        while g == 1:
            x = y
            for i in range(r):
                y = (y * y + c) % n
                if i % 4096 == 0 and time.monotonic() > deadline:
                    return None
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(BATCH, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gmpy2.gcd(q, n)
                k += BATCH
                if time.monotonic() > deadline:
                    return None
            r *= 2
        if g == n:
            # the batch overshot; step back one value at a time
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
        if g != n:
            return int(g)
    return None


def factorize(k: int, budget_ms: int = DEFAULT_SETTINGS.factor_budget_ms, seed: Optional[int] = None) -> Factorization:
    if k < 1:
        raise InvalidInput(f"factorize needs a positive integer, got {k}")
    deadline = time.monotonic() + budget_ms / 1000
    primes: Dict[int, int] = {}
    remaining = gmpy2.mpz(k)

    for p in small_primes():
        if p * p > remaining:
            break
        if remaining % p == 0:
            remaining, e = gmpy2.remove(remaining, p)
            primes[p] = primes.get(p, 0) + int(e)

    rng = random.Random(k if seed is None else seed)
    cofactors = []
    stack = [(int(remaining), 1)]
    while stack:
        value, mult = stack.pop()
        if value == 1:
            continue
        if isprime(value):
            primes[value] = primes.get(value, 0) + mult
            continue
        reps = perfect_power(value)
        if reps:
            stack.append((reps[0].base, mult * reps[0].exponent))
            continue
        factor = brent_rho(value, deadline, rng)
        if factor is None:
            logger.warning("Factorization budget of %d ms exhausted on a %d-digit cofactor", budget_ms, len(str(value)))
            cofactors.append(value)
            continue
        stack.append((factor, mult))
        stack.append((value // factor, mult))

    return Factorization(n=k, primes=dict(sorted(primes.items())), cofactors=sorted(cofactors), complete=not cofactors)


def radical(k: int, budget_ms: int = DEFAULT_SETTINGS.factor_budget_ms) -> int:
    fact = factorize(k, budget_ms)
    if not fact.complete:
        raise FactorizationTimeout(f"could not factor {k} within {budget_ms} ms", partial=fact)
    return fact.radical
