"""
Exact coefficient rings for truncated series.
Supports the rationals, the integers, and residue rings Z/N on top of sympy's exact domains.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, ClassVar, Tuple

from sympy.polys.domains import QQ, ZZ

from string_orientation.errors import (
    MalformedInputError,
    NonUnitError,
    RingMismatchError,
)


@dataclass(frozen=True)
class CoeffRing:
    """One of Q, Z or Z/N. Elements are sympy QQ/ZZ elements; residues are kept in [0, N)."""

    kind: str
    modulus: int = 0

    KINDS: ClassVar[Tuple[str, ...]] = ("Q", "Z", "Z/N")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"Ring kind must be one of {self.KINDS}, got {self.kind!r}")
        if self.kind == "Z/N" and self.modulus < 2:
            raise ValueError(f"Residue modulus must be at least 2, got {self.modulus}")
        if self.kind != "Z/N" and self.modulus != 0:
            raise ValueError("Only residue rings carry a modulus")

    @classmethod
    def rational(cls) -> "CoeffRing":
        return cls("Q")

    @classmethod
    def integer(cls) -> "CoeffRing":
        return cls("Z")

    @classmethod
    def residue(cls, modulus: int) -> "CoeffRing":
        return cls("Z/N", int(modulus))

    @classmethod
    def parse(cls, text: str) -> "CoeffRing":
        """
        Parse a ring label.

        Args:
            text: 'Q', 'Z' or 'Z/N' with N an integer >= 2

        Returns:
            The corresponding CoeffRing
        """
        label = text.strip()
        if label == "Q":
            return cls.rational()
        if label == "Z":
            return cls.integer()
        if label.startswith("Z/"):
            try:
                return cls.residue(int(label[2:]))
            except ValueError as e:
                raise MalformedInputError(f"bad ring label {label!r}: {e}") from e
        raise MalformedInputError(f"bad ring label {label!r}")

    @property
    def label(self) -> str:
        return f"Z/{self.modulus}" if self.kind == "Z/N" else self.kind

    @property
    def is_rational(self) -> bool:
        return self.kind == "Q"

    @property
    def is_residue(self) -> bool:
        return self.kind == "Z/N"

    @property
    def zero(self) -> Any:
        return QQ.zero if self.kind == "Q" else ZZ.zero

    @property
    def one(self) -> Any:
        return QQ.one if self.kind == "Q" else ZZ.one

    def reduce(self, value: Any) -> Any:
        """Bring a raw arithmetic result back into canonical form."""
        if self.kind == "Z/N":
            return value % self.modulus
        return value

    def coerce(self, value: Any) -> Any:
        """
        Convert ints, Fractions, QQ/ZZ elements or 'a/b' strings into this ring.

        Raises:
            NonUnitError: if a denominator is not invertible in the ring
        """
        if isinstance(value, str):
            return self.parse_element(value)
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
        elif isinstance(value, int):
            num, den = value, 1
        else:
            q = QQ.convert(value)
            num, den = int(QQ.numer(q)), int(QQ.denom(q))

        if self.kind == "Q":
            return QQ(num, den)
        if self.kind == "Z":
            if den != 1:
                raise NonUnitError(f"{num}/{den} is not an integer")
            return ZZ(num)
        try:
            inv = pow(den, -1, self.modulus)
        except ValueError as e:
            raise NonUnitError(f"denominator {den} is not invertible mod {self.modulus}") from e
        return ZZ((num * inv) % self.modulus)

    def parse_element(self, text: str) -> Any:
        token = text.strip()
        try:
            if "/" in token:
                num, den = token.split("/", 1)
                return self.coerce(Fraction(int(num), int(den)))
            return self.coerce(int(token))
        except (ValueError, ZeroDivisionError) as e:
            if isinstance(e, NonUnitError):
                raise
            raise MalformedInputError(f"bad coefficient {token!r}") from e

    def format(self, value: Any) -> str:
        if self.kind == "Q":
            num, den = QQ.numer(value), QQ.denom(value)
            return str(num) if den == 1 else f"{num}/{den}"
        return str(int(value))

    def to_fraction(self, value: Any) -> Fraction:
        if self.kind == "Q":
            return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))
        return Fraction(int(value))

    def is_unit(self, value: Any) -> bool:
        if self.kind == "Q":
            return bool(value)
        if self.kind == "Z":
            return value in (1, -1)
        return gcd(int(value), self.modulus) == 1

    def inverse(self, value: Any) -> Any:
        if not self.is_unit(value):
            raise NonUnitError(f"{self.format(value)} is not a unit of {self.label}")
        if self.kind == "Q":
            return QQ.one / value
        if self.kind == "Z":
            return value
        return ZZ(pow(int(value), -1, self.modulus))

    def divide_by_int(self, value: Any, k: int) -> Any:
        """Exact division by a positive integer (used by exp, log and integration)."""
        if self.kind == "Q":
            return value * QQ(1, k)
        if self.kind == "Z":
            if value % k:
                raise NonUnitError(f"{value} is not divisible by {k} in Z")
            return value // k
        return self.reduce(value * self.inverse(ZZ(k % self.modulus)))

    def map_from(self, source: "CoeffRing", value: Any) -> Any:
        """
        Apply the canonical ring map source -> self to one element.

        Only Z -> anything, Q -> Q, Q -> Z/N (invertible denominators) and
        Z/M -> Z/N with N | M are allowed.
        """
        if source == self:
            return value
        if source.kind == "Z/N":
            if self.kind != "Z/N" or source.modulus % self.modulus:
                raise RingMismatchError(f"no ring map {source.label} -> {self.label}")
            return ZZ(int(value) % self.modulus)
        return self.coerce(value)

    def __str__(self) -> str:
        return self.label


RATIONALS = CoeffRing.rational()
INTEGERS = CoeffRing.integer()
