"""Exact base rings: the rationals and the prime fields.

All kernel arithmetic is exact.  Scalars are `fractions.Fraction` over Q and
plain ints in ``[0, p)`` over Z/p; a `Ring` object mediates every operation,
so values from different rings can never be combined silently.
"""

from __future__ import annotations

from fractions import Fraction


class RingMismatchError(TypeError):
    """Operands live over different base rings."""


class CharacteristicError(ArithmeticError):
    """A required exact division by an integer fails in this ring."""


class Ring:
    """Common interface of the concrete rings below."""

    char: int

    def of(self, value):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def require_char_exceeds(self, m: int, what: str = "operation"):
        """Guard for divisions by integers up to m (factorials, 1/2, ...)."""
        if self.char != 0 and self.char <= m:
            raise CharacteristicError(
                f"{what} needs characteristic 0 or p > {m}, have p = {self.char}"
            )


class RationalField(Ring):
    char = 0

    def of(self, value):
        if isinstance(value, str):
            return Fraction(value)
        return Fraction(value)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def inv_int(self, m: int):
        if m == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1, m)

    def to_str(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField(Ring):
    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p

    def of(self, value):
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            num = value.numerator % self.p
            den = value.denominator % self.p
            if den == 0:
                raise CharacteristicError(f"denominator divisible by {self.p}")
            return (num * pow(den, -1, self.p)) % self.p
        return int(value) % self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def inv_int(self, m: int):
        if m % self.p == 0:
            raise CharacteristicError(f"1/{m} does not exist in F_{self.p}")
        return pow(m % self.p, -1, self.p)

    def to_str(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F{self.p}"


QQ = RationalField()


def ring_from_tag(tag: str) -> Ring:
    """Parse the wire-format ring tag: "Q" or "Fp:<p>"."""
    if tag == "Q":
        return QQ
    if tag.startswith("Fp:"):
        return PrimeField(int(tag[3:]))
    raise ValueError(f"unknown ring tag {tag!r}")


def ring_tag(ring: Ring) -> str:
    if ring.char == 0:
        return "Q"
    return f"Fp:{ring.char}"


def check_same_ring(a: Ring, b: Ring):
    if a != b:
        raise RingMismatchError(f"mixed rings {a!r} and {b!r}")
