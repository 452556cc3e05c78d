"""Exact rational arithmetic and univariate polynomials in the indeterminate q.

Rationals are GMP ``mpq`` values (they compare and hash equal to
:class:`fractions.Fraction`, which is accepted anywhere a rational is).
Polynomials are immutable :class:`QPoly` objects storing coefficients
constant-term first, with trailing zeros stripped so that equal polynomials
compare equal.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from typing import Iterable, Union

import gmpy2

QRational = type(gmpy2.mpq(0))
RATIONAL_TYPES = (int, Fraction, QRational, type(gmpy2.mpz(0)))
Scalar = Union[int, Fraction, QRational]


def to_rational(value) -> QRational:
    """Convert ints, Fractions and strings like ``"2/3"`` to an exact rational.

    Floats are rejected: they would silently break exactness.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, QRational):
        return value
    if isinstance(value, RATIONAL_TYPES):
        if isinstance(value, Fraction):
            return gmpy2.mpq(value.numerator, value.denominator)
        return gmpy2.mpq(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            f = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
        return gmpy2.mpq(f.numerator, f.denominator)
    raise TypeError(f"expected int, Fraction or rational string, got {type(value).__name__}")


_ZERO_Q = gmpy2.mpq(0)


def _normalize(coeffs: Iterable[Scalar]) -> tuple:
    out = [to_rational(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class QPoly:
    """Polynomial in q with exact rational coefficients."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        self.coeffs = _normalize(coeffs)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: list) -> "QPoly":
        # coeffs: list of mpq, may carry trailing zeros
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(coeffs)
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Scalar) -> "QPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, power: int, c: Scalar = 1) -> "QPoly":
        if power < 0:
            raise ValueError("negative power")
        if c == 1:
            return _q_power(power)
        return cls((0,) * power + (c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> QRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO_Q

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, RATIONAL_TYPES):
            return self.coeffs == _normalize((other,))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"QPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def __add__(self, other):
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return QPoly._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        return poly_add(self, -_coerce(other))

    def __rsub__(self, other):
        return poly_add(_coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(other)
        return poly_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Scalar) -> "QPoly":
        if c == 0:
            return ZERO
        if c == 1:
            return self
        c = to_rational(c)
        return QPoly._raw([c * a for a in self.coeffs])

    def shift(self, k: int) -> "QPoly":
        """Multiply by q**k."""
        if not self.coeffs or k == 0:
            return self
        return QPoly._raw([_ZERO_Q] * k + list(self.coeffs))

    def __call__(self, q0):
        return poly_eval(self, q0)


def _coerce(x) -> QPoly:
    if isinstance(x, QPoly):
        return x
    if isinstance(x, RATIONAL_TYPES):
        return QPoly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as QPoly")


def poly_add(a: QPoly, b: QPoly) -> QPoly:
    if len(a.coeffs) < len(b.coeffs):
        a, b = b, a
    out = list(a.coeffs)
    for i, c in enumerate(b.coeffs):
        out[i] += c
    return QPoly._raw(out)


def poly_mul(a: QPoly, b: QPoly) -> QPoly:
    if not a.coeffs or not b.coeffs:
        return ZERO
    if len(a.coeffs) == 1:
        return b.scale(a.coeffs[0])
    if len(b.coeffs) == 1:
        return a.scale(b.coeffs[0])
    out = [_ZERO_Q] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return QPoly._raw(out)


def poly_eval(p: QPoly, q0):
    """Horner evaluation.  Exact for rational ``q0``; a float ``q0`` gives a float."""
    if isinstance(q0, float):
        acc = 0.0
        for c in reversed(p.coeffs):
            acc = acc * q0 + float(c)
        return acc
    q0 = to_rational(q0)
    acc = _ZERO_Q
    for c in reversed(p.coeffs):
        acc = acc * q0 + c
    return acc


@functools.lru_cache(maxsize=None)
def _q_power(k: int) -> QPoly:
    return QPoly((0,) * k + (1,))


ZERO = QPoly()
ONE = QPoly((1,))
Q = QPoly((0, 1))


def format_rational(x) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_poly(p: QPoly) -> str:
    """Render as ``c0 + c1*q + c2*q^2``, skipping zero terms."""
    if not p.coeffs:
        return "0"
    parts: list[str] = []
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = format_rational(mag)
        else:
            qpart = "q" if k == 1 else f"q^{k}"
            body = qpart if mag == 1 else f"{format_rational(mag)}*{qpart}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:
          (?P<coef>\d+(?:/\d+)?)(?:\s*\*\s*(?P<q1>q)(?:\s*\^\s*(?P<e1>\d+))?)?
          |
          (?P<q2>q)(?:\s*\^\s*(?P<e2>\d+))?
        )\s*""",
    re.VERBOSE,
)


def parse_poly(text: str) -> QPoly:
    """Parse the grammar produced by :func:`format_poly`.

    Also accepts repeated powers, ``-q``, leading ``+`` and arbitrary spacing.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    acc: dict = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("q2") is None):
            raise ValueError(f"cannot parse polynomial {text!r} at position {pos}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator in {text!r} at position {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("coef") is not None:
            coef = Fraction(m.group("coef"))
            power = 0
            if m.group("q1"):
                power = int(m.group("e1") or 1)
        else:
            coef = Fraction(1)
            power = int(m.group("e2") or 1)
        acc[power] = acc.get(power, Fraction(0)) + sign * coef
        pos = m.end()
        first = False
    if not acc:
        return ZERO
    top = max(acc)
    return QPoly(acc.get(k, 0) for k in range(top + 1))
