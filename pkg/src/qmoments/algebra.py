"""Operator symbols, words, linear combinations of words and model data.

A word is a plain tuple of tokens read left to right as an operator product;
the empty tuple is the identity.  Tokens are :class:`OpSymbol` (annihilation,
preservation, creation or full variable at a coordinate) or, transiently,
:class:`Comm` for an unresolved q-commutator produced by the product rule.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .exactmath import ONE, Q, ZERO, QPoly, format_poly, format_rational, parse_poly, to_rational


class Kind(IntEnum):
    ANN = 0
    PRES = 1
    CRE = 2
    VAR = 3


_KIND_TEXT = {Kind.ANN: "a-", Kind.PRES: "a0", Kind.CRE: "a+", Kind.VAR: "X"}
_TEXT_KIND = {v: k for k, v in _KIND_TEXT.items()}


class OpSymbol(NamedTuple):
    kind: Kind
    index: int

    def __str__(self):
        return f"{_KIND_TEXT[self.kind]}({self.index})"

    __repr__ = __str__


def Ann(i: int) -> OpSymbol:
    return OpSymbol(Kind.ANN, i)


def Pres(i: int) -> OpSymbol:
    return OpSymbol(Kind.PRES, i)


def Cre(i: int) -> OpSymbol:
    return OpSymbol(Kind.CRE, i)


def Var(i: int) -> OpSymbol:
    return OpSymbol(Kind.VAR, i)


class Comm(NamedTuple):
    """Unresolved q-commutator ``[left; right]_q`` standing as one factor."""

    left: OpSymbol
    right: OpSymbol

    def __str__(self):
        return f"[{self.left};{self.right}]"

    __repr__ = __str__


Token = Union[OpSymbol, Comm]
OpWord = tuple


def token_key(t: Token):
    if isinstance(t, OpSymbol):
        return (int(t.kind), t.index)
    return (4, int(t.left.kind), t.left.index, int(t.right.kind), t.right.index)


def word_key(w: OpWord):
    return tuple(token_key(t) for t in w)


def format_word(w: OpWord) -> str:
    return "".join(str(t) for t in w) if w else "I"


class InvalidShapeError(ValueError):
    """A word does not have the shape an operation requires."""


class OpExpr:
    """Finite linear combination of words with QPoly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Union[Mapping, Iterable] = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            w = tuple(w)
            c = c if isinstance(c, QPoly) else QPoly.const(c)
            prev = acc.get(w)
            acc[w] = c if prev is None else prev + c
        self.terms = {w: c for w, c in acc.items() if c}

    @classmethod
    def _raw(cls, terms: dict) -> "OpExpr":
        # terms: distinct words to nonzero QPoly
        e = object.__new__(cls)
        e.terms = terms
        return e

    @classmethod
    def word(cls, w: OpWord, coeff=ONE) -> "OpExpr":
        return cls([(w, coeff)])

    @classmethod
    def identity(cls, coeff=ONE) -> "OpExpr":
        return cls([((), coeff)])

    def items(self):
        """Terms in canonical order: lexicographic on words, Ann < Pres < Cre < Var."""
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, OpExpr):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "OpExpr") -> "OpExpr":
        return OpExpr(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other: "OpExpr") -> "OpExpr":
        return self + other.scale(QPoly.const(-1))

    def __mul__(self, other: "OpExpr") -> "OpExpr":
        return expr_mul(self, other)

    def scale(self, c: QPoly) -> "OpExpr":
        return OpExpr((w, c * v) for w, v in self.terms.items())

    def __repr__(self):
        return f"OpExpr({format_expr(self)!r})"

    def __str__(self):
        return format_expr(self)


def expr_mul(a: OpExpr, b: OpExpr) -> OpExpr:
    """Bilinear extension of word concatenation."""
    return OpExpr((wa + wb, ca * cb) for wa, ca in a.terms.items() for wb, cb in b.terms.items())


def expand_variable(s: OpSymbol) -> OpExpr:
    """``X(i) -> a-(i) + a0(i) + a+(i)``; other symbols map to themselves."""
    if s.kind is Kind.VAR:
        i = s.index
        return OpExpr([((Ann(i),), ONE), ((Pres(i),), ONE), ((Cre(i),), ONE)])
    return OpExpr.word((s,))


def expand_word(w: OpWord) -> OpExpr:
    """Expand every Var of a word; 3**k words for k variables."""
    out = OpExpr.identity()
    for s in w:
        out = expr_mul(out, expand_variable(s))
    return out


def annihilator_excess_is_zero(w: OpWord) -> bool:
    """For ``a-(s1)..a-(sk) X(s_{k+1})..X(sn)``, True iff k > n // 2.

    A True answer means the word kills the vacuum: there are more
    annihilators than the variables behind them can supply creations for.
    """
    n = len(w)
    k = 0
    while k < n and isinstance(w[k], OpSymbol) and w[k].kind is Kind.ANN:
        k += 1
    for t in w[k:]:
        if not (isinstance(t, OpSymbol) and t.kind is Kind.VAR):
            raise InvalidShapeError(
                f"expected annihilators followed by variables, got {format_word(w)}"
            )
    return k > n // 2


# -- textual forms -------------------------------------------------------------

_SYMBOL = re.compile(r"\s*(a-|a0|a\+|X)\((\d+)\)\s*")


def parse_word(text: str) -> OpWord:
    s = text.strip()
    if s in ("", "I"):
        return ()
    out = []
    pos = 0
    while pos < len(s):
        m = _SYMBOL.match(s, pos)
        if not m:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        out.append(OpSymbol(_TEXT_KIND[m.group(1)], int(m.group(2))))
        pos = m.end()
    return tuple(out)


def format_expr(e: OpExpr) -> str:
    """Render as ``(coeff)*word + (coeff)*word``; ``0`` for the zero expression."""
    if not e.terms:
        return "0"
    return " + ".join(f"({format_poly(c)})*{format_word(w)}" for w, c in e.items())


def _split_top_level(s: str) -> list[str]:
    parts, depth, start = [], 0, 0
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0 and i > 0 and s[i - 1] == " ":
            parts.append(s[start:i])
            start = i + 1
        i += 1
    parts.append(s[start:])
    return [p.strip() for p in parts]


def parse_expr(text: str) -> OpExpr:
    s = text.strip()
    if s == "0":
        return OpExpr()
    terms = []
    for part in _split_top_level(s):
        if part.startswith("("):
            depth = 0
            for j, ch in enumerate(part):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    break
            coeff = parse_poly(part[1:j])
            rest = part[j + 1:].strip()
            if not rest.startswith("*"):
                raise ValueError(f"expected '*' after coefficient in {part!r}")
            word = parse_word(rest[1:])
        else:
            coeff, word = ONE, parse_word(part)
        terms.append((word, coeff))
    return OpExpr(terms)


# -- model specification -------------------------------------------------------


class ModelError(ValueError):
    """Malformed model specification."""


@dataclass(frozen=True)
class ModelSpec:
    """q-commutator data: ``[a-(i); a+(j)]_q = cov[i][j] I``, ``[a-(i); a0(j)]_q = pres_comm[i][j]``.

    Indices in words are 1-based; the matrices are stored 0-based.
    ``q`` is None for a symbolic model or a rational evaluation point.
    """

    d: int
    cov: tuple
    mean: tuple = None
    pres_comm: tuple = None
    q: Optional[Fraction] = None

    def __post_init__(self):
        d = self.d
        if not isinstance(d, int) or d < 1:
            raise ModelError(f"d must be a positive integer, got {d!r}")
        cov = tuple(tuple(to_rational(x) for x in row) for row in self.cov)
        if len(cov) != d or any(len(row) != d for row in cov):
            raise ModelError(f"cov must be {d}x{d}")
        mean = self.mean
        mean = (to_rational(0),) * d if mean is None else tuple(to_rational(x) for x in mean)
        if len(mean) != d:
            raise ModelError(f"mean must have length {d}")
        pc = self.pres_comm
        if pc is None:
            pc = tuple((OpExpr(),) * d for _ in range(d))
        else:
            pc = tuple(tuple(x if isinstance(x, OpExpr) else parse_expr(str(x)) for x in row) for row in pc)
            if len(pc) != d or any(len(row) != d for row in pc):
                raise ModelError(f"pres_comm must be {d}x{d}")
        q = None if self.q is None else to_rational(self.q)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "pres_comm", pc)
        object.__setattr__(self, "q", q)

    def c(self, i: int, j: int) -> Fraction:
        """Covariance entry with 1-based indices."""
        return self.cov[i - 1][j - 1]

    @property
    def zero_mean(self) -> bool:
        return all(m == 0 for m in self.mean)

    @property
    def zero_pres_comm(self) -> bool:
        return all(e.is_zero() for row in self.pres_comm for e in row)

    @property
    def is_scalar_gaussian(self) -> bool:
        """Zero mean and zero preservation commutators: the q-Gaussian model."""
        return self.zero_mean and self.zero_pres_comm

    def check_word(self, w: Iterable[Token]):
        for t in w:
            syms = (t.left, t.right) if isinstance(t, Comm) else (t,)
            for s in syms:
                if not 1 <= s.index <= self.d:
                    raise IndexError(f"index {s.index} out of range 1..{self.d}")

    def with_cov(self, cov) -> "ModelSpec":
        return ModelSpec(self.d, cov, self.mean, self.pres_comm, self.q)

    def relabel(self, perm: Sequence[int]) -> "ModelSpec":
        """New spec whose coordinate ``perm[i]`` plays the role of old coordinate ``i`` (1-based)."""
        d = self.d
        inv = [0] * d
        for old, new in enumerate(perm):
            inv[new - 1] = old
        cov = [[self.cov[inv[a]][inv[b]] for b in range(d)] for a in range(d)]
        mean = [self.mean[inv[a]] for a in range(d)]
        return ModelSpec(d, cov, mean, None if self.zero_pres_comm else self._relabel_pc(perm, inv), self.q)

    def _relabel_pc(self, perm, inv):
        def move(e: OpExpr) -> OpExpr:
            return OpExpr(
                (tuple(OpSymbol(s.kind, perm[s.index - 1]) for s in w), c) for w, c in e.terms.items()
            )

        d = self.d
        return [[move(self.pres_comm[inv[a]][inv[b]]) for b in range(d)] for a in range(d)]

    # JSON form

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "q": "symbolic" if self.q is None else format_rational(self.q),
            "cov": [[format_rational(x) for x in row] for row in self.cov],
            "mean": [format_rational(x) for x in self.mean],
        }
        if not self.zero_pres_comm:
            out["pres_comm"] = [[format_expr(e) for e in row] for row in self.pres_comm]
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        if not isinstance(data, dict):
            raise ModelError("model must be a JSON object")
        unknown = set(data) - {"d", "q", "cov", "mean", "pres_comm"}
        if unknown:
            raise ModelError(f"unknown model keys: {sorted(unknown)}")
        if "d" not in data or "cov" not in data:
            raise ModelError("model needs 'd' and 'cov'")
        for row in data["cov"]:
            for x in row:
                if isinstance(x, float):
                    raise ModelError("cov entries must be rational strings, not floats")
        for x in data.get("mean") or ():
            if isinstance(x, float):
                raise ModelError("mean entries must be rational strings, not floats")
        q = data.get("q", "symbolic")
        if isinstance(q, float):
            raise ModelError("q must be 'symbolic' or a rational string")
        q = None if q in (None, "symbolic") else q
        try:
            return cls(data["d"], data["cov"], data.get("mean"), data.get("pres_comm"), q)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def gaussian_spec(cov, q=None) -> ModelSpec:
    """Zero-mean spec with vanishing preservation commutators."""
    return ModelSpec(len(cov), cov, q=q)


@dataclass(frozen=True)
class MomentQuery:
    """The map sigma of a mixed moment, 1-based coordinates."""

    sigma: tuple = field(default=())

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        if not sigma:
            raise ValueError("moment query must be nonempty")
        if any(s < 1 for s in sigma):
            raise ValueError(f"indices must be >= 1, got {sigma}")
        object.__setattr__(self, "sigma", sigma)

    def __len__(self):
        return len(self.sigma)

    def check(self, spec: ModelSpec):
        bad = [s for s in self.sigma if s > spec.d]
        if bad:
            raise IndexError(f"index {bad[0]} out of range 1..{spec.d}")

    def var_word(self) -> OpWord:
        return tuple(Var(s) for s in self.sigma)

    @classmethod
    def parse(cls, text: str) -> "MomentQuery":
        return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x))


def as_query(sigma) -> MomentQuery:
    return sigma if isinstance(sigma, MomentQuery) else MomentQuery(tuple(sigma))


__all__ = [
    "Kind", "OpSymbol", "Ann", "Pres", "Cre", "Var", "Comm", "OpExpr", "ModelSpec", "MomentQuery",
    "expand_variable", "expand_word", "expr_mul", "annihilator_excess_is_zero", "InvalidShapeError",
    "ModelError", "parse_word", "format_word", "parse_expr", "format_expr", "gaussian_spec", "as_query",
    "ZERO", "ONE", "Q",
]
