"""Exact coefficient domains: the integers and the integers modulo m."""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    for f in range(3, isqrt(m) + 1, 2):
        if m % f == 0:
            return False
    return True


@dataclass(frozen=True)
class CoeffDomain:
    """Either the integers (``modulus == 0``) or ``Z/mZ`` with ``m >= 2``."""

    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError(f"modulus must be 0 (integers) or >= 2, got {self.modulus}")

    @classmethod
    def integers(cls) -> "CoeffDomain":
        return cls(0)

    @classmethod
    def modular(cls, m: int) -> "CoeffDomain":
        if m < 2:
            raise ValueError(f"modulus must be >= 2, got {m}")
        return cls(m)

    @classmethod
    def parse(cls, text: str) -> "CoeffDomain":
        """Parse ``int`` or ``zmod:<m>``."""
        text = text.strip().lower()
        if text in ("int", "z", "integers"):
            return cls(0)
        if text.startswith("zmod:"):
            try:
                m = int(text[5:])
            except ValueError:
                raise ValueError(f"bad modulus in domain {text!r}") from None
            return cls.modular(m)
        raise ValueError(f"unknown domain {text!r}; expected 'int' or 'zmod:<m>'")

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    @property
    def is_field(self) -> bool:
        return self.modulus != 0 and _is_prime(self.modulus)

    def characteristic(self) -> int:
        return self.modulus

    def canon(self, c: int) -> int:
        if self.modulus:
            return c % self.modulus
        return c

    def add(self, a: int, b: int) -> int:
        return self.canon(a + b)

    def mul(self, a: int, b: int) -> int:
        return self.canon(a * b)

    def neg(self, a: int) -> int:
        return self.canon(-a)

    def inv(self, a: int) -> int:
        """Multiplicative inverse; only units have one."""
        if self.modulus == 0:
            if a in (1, -1):
                return a
            raise ZeroDivisionError(f"{a} is not a unit in Z")
        return pow(a, -1, self.modulus)

    def require_field(self) -> int:
        """Return the prime modulus, or raise for Z and composite moduli."""
        if not self.is_field:
            raise ValueError(f"operation needs a prime field, got {self}")
        return self.modulus

    def __str__(self) -> str:
        return "int" if self.modulus == 0 else f"zmod:{self.modulus}"


INTEGERS = CoeffDomain(0)


def canon(c: int, d: CoeffDomain) -> int:
    return d.canon(c)


def add(a: int, b: int, d: CoeffDomain) -> int:
    return d.add(a, b)


def mul(a: int, b: int, d: CoeffDomain) -> int:
    return d.mul(a, b)


def neg(a: int, d: CoeffDomain) -> int:
    return d.neg(a)
