"""Perfect power detection over big integers."""
import logging
from typing import List, Optional, Tuple

import gmpy2
from pydantic import BaseModel, Field

from .errors import InvalidInput

logger = logging.getLogger(__name__)


class PowerRepr(BaseModel):
    base: int = Field(ge=2)
    exponent: int = Field(ge=2)
    canonical: bool = Field(default=False, description="Maximal exponent representation")

    @property
    def value(self) -> int:
        return self.base ** self.exponent


def int_root(s: int, q: int) -> Tuple[int, bool]:
    """floor(s^(1/q)) and whether it is exact."""
    if s < 1 or q < 2:
        raise InvalidInput(f"int_root needs s >= 1 and q >= 2, got s={s}, q={q}")
    root, exact = gmpy2.iroot(gmpy2.mpz(s), q)
    return int(root), bool(exact)


def perfect_power(s: int) -> List[PowerRepr]:
    """All s = x^q with x, q >= 2, largest exponent first."""
    if s < 4:
        raise InvalidInput(f"perfect_power needs s >= 4, got {s}")
    if not gmpy2.is_power(gmpy2.mpz(s)):
        return []
    found = []
    for q in range(s.bit_length(), 1, -1):
        root, exact = int_root(s, q)
        if exact and root >= 2:
            found.append(PowerRepr(base=root, exponent=q, canonical=not found))
    return found


def is_power_of(s: int, x: int) -> Optional[int]:
    """The q >= 2 with x^q = s, or None."""
    if x < 2:
        raise InvalidInput(f"base must be at least 2, got {x}")
    if s < x * x:
        return None
    rest, multiplicity = gmpy2.remove(gmpy2.mpz(s), x)
    if rest == 1 and multiplicity >= 2:
        return int(multiplicity)
    return None
