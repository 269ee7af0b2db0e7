"""Exact complex rationals and the exact/float numeric tower.

Values flowing through the library are either exact (``QQi`` with
``Fraction`` parts, plus ``Fraction`` measures and constants) or plain
Python ``complex``/``float``.  Conversion only goes exact -> float.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import ParseError

__all__ = [
    "QQi",
    "Scalar",
    "as_exact",
    "is_exact",
    "parse_real",
    "to_complex",
    "to_float",
    "format_exact",
]


class QQi:
    """Gaussian rational ``re + i*im`` with ``Fraction`` components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "QQi":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QQi):
            return other
        if isinstance(other, (int, Fraction)):
            return QQi._make(Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return QQi._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return QQi._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return QQi._make(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QQi._make(self.re * other, self.im * other)
        if isinstance(other, QQi):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return QQi._make(a * c, Fraction(0))
            return QQi._make(a * c - b * d, a * d + b * c)
        return complex(self) * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("QQi division by zero")
        return QQi._make(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return complex(self) ** k
        result = QQi._make(Fraction(1), Fraction(0))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return QQi._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "QQi":
        return QQi._make(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def sort_key(self):
        return (self.re, self.im)

    # -- conversion ---------------------------------------------------------
    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


Scalar = Union[QQi, complex, Fraction, float, int]


def is_exact(x) -> bool:
    return isinstance(x, (QQi, Fraction, int)) and not isinstance(x, bool)


def as_exact(x) -> QQi:
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    raise TypeError(f"not an exact value: {x!r}")


def to_complex(x) -> complex:
    return complex(x)


def to_float(x) -> float:
    if isinstance(x, QQi):
        if x.im:
            raise ValueError("value has a nonzero imaginary part")
        return float(x.re)
    return float(x)


def parse_real(text) -> Union[Fraction, float]:
    """Parse ``"p/q"`` or integers exactly; decimals as floats."""
    if isinstance(text, bool):
        raise ParseError(f"boolean is not a number: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return text
    if isinstance(text, Rational):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"cannot parse number from {text!r}")
    s = text.strip()
    try:
        if "/" in s:
            p, q = s.split("/")
            return Fraction(int(p), int(q))
        try:
            return Fraction(int(s))
        except ValueError:
            return float(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse number from {text!r}") from exc


def format_exact(x) -> str:
    """String form ``"p/q"`` for an exact real."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
