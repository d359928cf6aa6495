import math
from enum import Enum
from pydantic import BaseModel, model_validator
from typing import List, Tuple

class ArithFunctionId(str, Enum):
    MOBIUS = "mobius"
    MOBIUS_ALTERNATING = "mobius-alt"
    LIOUVILLE = "liouville"
    LIOUVILLE_ALTERNATING = "liouville-alt"
    VON_MANGOLDT = "vonmangoldt"
    VON_MANGOLDT_MINUS_ONE = "vonmangoldt-minus-one"
    TAU_DIVISORS = "tau"
    TWO_OMEGA = "two-omega"
    TWO_OMEGA_MINUS_TAU = "two-omega-minus-tau"
    PRIME_SEQUENCE = "primes"

    @property
    def integer_valued(self) -> bool:
        """Everything but the Lambda family has exact integer values"""
        return self not in (ArithFunctionId.VON_MANGOLDT, ArithFunctionId.VON_MANGOLDT_MINUS_ONE)

    @property
    def alternating(self) -> bool:
        return self in (ArithFunctionId.MOBIUS_ALTERNATING, ArithFunctionId.LIOUVILLE_ALTERNATING)

    @classmethod
    def parse(cls, name: str) -> "ArithFunctionId":
        """Accept the CLI spelling or the enum name (case-insensitive)"""
        key = name.strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key or member.name.lower().replace("_", "-") == key:
                return member
        raise ValueError(f"Unknown arithmetic function: {name}. Must be one of: {[m.value for m in cls]}")



def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


class FactorList(BaseModel):
    n: int
    factors: List[Tuple[int, int]]

    @model_validator(mode="after")
    def check_factorization(self):
        product = 1
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be positive")
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p
            product *= p ** e
        if product != self.n:
            raise ValueError(f"factors multiply to {product}, not {self.n}")
        return self

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)
