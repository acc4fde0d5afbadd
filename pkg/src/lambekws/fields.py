"""Exact scalar fields: prime fields F_p and the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property


class LinalgError(ValueError):
    """Base error for the exact linear-algebra engine."""


class DimensionMismatch(LinalgError):
    pass


class UnsupportedField(LinalgError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """A prime field ``F_p`` (``p`` set) or the rationals (``p is None``).

    Scalars are plain Python objects: ``int`` in ``range(p)`` for F_p and
    :class:`fractions.Fraction` for Q.
    """

    p: int | None = 2

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise LinalgError(f"field modulus must be prime, got {self.p}")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.p is not None else "Q"

    def __repr__(self):
        return f"Field({self.name})"

    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def coerce(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise LinalgError(f"{x} has no image in {self.name}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def elements(self):
        if self.p is None:
            raise UnsupportedField("cannot enumerate the rationals")
        return range(self.p)

    @cached_property
    def inverse_table(self):
        """``inv[a]`` for ``a`` in F_p (``inv[0] = 0``); used by the kernels."""
        import numpy as np

        if self.p is None:
            raise UnsupportedField("no inverse table over Q")
        t = np.zeros(self.p, dtype=np.int64)
        for a in range(1, self.p):
            t[a] = pow(a, -1, self.p)
        return t

    def parse(self, text: str):
        text = text.strip()
        if self.p is None:
            return Fraction(text)
        if "/" in text:
            return self.coerce(Fraction(text))
        return int(text) % self.p

    def format(self, a) -> str:
        return str(a)


F2 = Field(2)
Q = Field(None)


def field_from_name(name: str) -> Field:
    name = name.strip()
    if name in ("Q", "QQ", "rationals"):
        return Q
    if name.startswith("F") and name[1:].isdigit():
        return Field(int(name[1:]))
    raise LinalgError(f"unknown field {name!r}; expected F<p> or Q")
