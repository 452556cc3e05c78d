"""Moment evaluation by q-commutator normal ordering.

A vacuum expectation ``<w phi, phi>`` of a word is reduced to expectations of
shorter words (or words whose rightmost annihilator sits further right)
using only the model's commutator data:

* ``a-(i) phi = 0`` so a word ending in an annihilator vanishes, and
  ``a0(i) phi = m_i phi`` for a trailing preservation operator;
* by duality a leading ``a+(i)`` gives zero, a leading ``a0(i)`` gives
  ``m_i <rest>``, and a leading ``X(i)`` gives ``<a-(i) rest> + m_i <rest>``;
* otherwise the rightmost annihilator is pushed to the right end with the
  q-product rule, each commutator being resolved from the model.

Only the variable met by a commutator is expanded into its three parts; the
others stay intact until they reach the front of a word.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Optional

from .algebra import (
    Ann,
    Comm,
    Kind,
    ModelSpec,
    MomentQuery,
    OpExpr,
    OpSymbol,
    OpWord,
    annihilator_excess_is_zero,
    as_query,
    expand_variable,
    expand_word,
)
from .exactmath import ONE, Q, ZERO, QPoly


class DepthExceededError(RuntimeError):
    """Recursion went deeper than the configured guard.

    Raised when the preservation-commutator table does not lower the
    degree of the words it produces, so the reduction may never stop.
    """


@dataclass(frozen=True)
class EvalConfig:
    max_depth: Optional[int] = None  # None: 10 * word length
    prune_with_excess_rule: bool = True
    strategy: str = "first"  # "first": expand variables lazily; "full": expand all up front

    def depth_for(self, n: int) -> int:
        depth = 10 * max(n, 1) if self.max_depth is None else self.max_depth
        if depth < n:
            raise ValueError(f"max_depth {depth} is smaller than the word length {n}")
        return depth


DEFAULT_CONFIG = EvalConfig()


def q_product_rule(y, us: OpWord) -> OpExpr:
    """``[y; u1..un]_q`` as sum of ``q^i u1..ui [y; u(i+1)] ..un`` plus ``(q^n - q) u1..un y``.

    Commutators stay as unresolved :class:`Comm` tokens.
    """
    us = tuple(us)
    n = len(us)
    if n == 0:
        raise ValueError("q_product_rule needs a nonempty product")
    terms = {}
    for i in range(n):
        terms[us[:i] + (Comm(y, us[i]),) + us[i + 1:]] = QPoly.monomial(i)
    tail = QPoly.monomial(n) - Q
    if tail:
        terms[us + (y,)] = tail
    return OpExpr._raw(terms)


def resolve_commutator(spec: ModelSpec, a: OpSymbol, b: OpSymbol) -> OpExpr:
    """``[a; b]_q`` for an annihilator ``a`` in terms of the model data."""
    if a.kind is not Kind.ANN:
        raise ValueError(f"only annihilators are commuted, got {a}")
    if b.kind is Kind.CRE:
        return OpExpr.identity(QPoly.const(spec.c(a.index, b.index)))
    if b.kind is Kind.PRES:
        return spec.pres_comm[a.index - 1][b.index - 1]
    if b.kind is Kind.ANN:
        return OpExpr([((a, b), ONE), ((b, a), -Q)])
    out = OpExpr()
    for part in expand_variable(b).terms:
        out = out + resolve_commutator(spec, a, part[0])
    return out


class MomentEvaluator:
    """Moment evaluation against one model with a memo owned by this object.

    The memo maps words to their vacuum expectations and persists across
    calls, so a batch of related queries (a moment table, a sweep over all
    words) shares sub-results.  Instances are not thread-safe; use one per
    thread or process.
    """

    def __init__(self, spec: ModelSpec, cfg: EvalConfig = DEFAULT_CONFIG):
        if cfg.strategy not in ("first", "full"):
            raise ValueError(f"unknown strategy {cfg.strategy!r}")
        self.spec = spec
        self.cfg = cfg
        self.max_depth = 0
        self.memo: dict = {}
        self.commutators: dict = {}
        self.graded = spec.zero_pres_comm

    def comm(self, a: OpSymbol, b: OpSymbol) -> OpExpr:
        key = (a, b)
        r = self.commutators.get(key)
        if r is None:
            r = resolve_commutator(self.spec, a, b)
            self.commutators[key] = r
        return r

    def expectation(self, e) -> QPoly:
        """``<e phi, phi>`` for an OpExpr or a single word."""
        if not isinstance(e, OpExpr):
            e = OpExpr.word(tuple(e))
        _check_expr(self.spec, e)
        longest = max((len(w) for w in e.terms), default=0)
        if self.cfg.strategy == "full":
            e = OpExpr(
                (w2, c * c2)
                for w, c in e.terms.items()
                for w2, c2 in expand_word(w).terms.items()
            )
        self.max_depth = self.cfg.depth_for(longest)
        need = 4 * self.max_depth + 200
        if need > sys.getrecursionlimit():
            sys.setrecursionlimit(need)
        total = ZERO
        for w, c in e.terms.items():
            v = self.word(w, 0)
            if v:
                total = total + c * v
        return total

    def moment(self, query) -> QPoly:
        query = as_query(query)
        query.check(self.spec)
        return self.expectation(query.var_word())

    def word(self, w: OpWord, depth: int) -> QPoly:
        if not w:
            return ONE
        hit = self.memo.get(w)
        if hit is not None:
            return hit
        if depth > self.max_depth:
            raise DepthExceededError(
                f"reduction exceeded depth {self.max_depth}; the preservation commutators "
                "may not lower word degree"
            )
        v = self._reduce(w, depth + 1)
        self.memo[w] = v
        return v

    def _reduce(self, w: OpWord, depth: int) -> QPoly:
        spec = self.spec
        last = w[-1]
        if last.kind is Kind.ANN:
            return ZERO
        if last.kind is Kind.PRES:
            m = spec.mean[last.index - 1]
            return self.word(w[:-1], depth).scale(m) if m else ZERO
        first = w[0]
        if first.kind is Kind.CRE:
            return ZERO
        if first.kind is Kind.PRES:
            m = spec.mean[first.index - 1]
            return self.word(w[1:], depth).scale(m) if m else ZERO
        if first.kind is Kind.VAR:
            total = self.word((Ann(first.index),) + w[1:], depth)
            m = spec.mean[first.index - 1]
            if m:
                total = total + self.word(w[1:], depth).scale(m)
            return total
        # leading annihilator
        if self.cfg.prune_with_excess_rule:
            if _excess_shape(w) and annihilator_excess_is_zero(w):
                return ZERO
            if self.graded and _level_deficit(w):
                return ZERO
        p = max(k for k, t in enumerate(w) if t.kind is Kind.ANN)
        head, y, tail = w[:p], w[p], w[p + 1:]
        total = ZERO
        # the (q^n - q) term ends in y and kills the vacuum
        for term, coeff in q_product_rule(y, tail).terms.items():
            cpos = next((k for k, t in enumerate(term) if isinstance(t, Comm)), None)
            if cpos is None:
                continue
            tok = term[cpos]
            for inner, c2 in self.comm(tok.left, tok.right).terms.items():
                nw = head + term[:cpos] + inner + term[cpos + 1:]
                v = self.word(nw, depth)
                if v:
                    total = total + (coeff * c2) * v
        return total


def _excess_shape(w: OpWord) -> bool:
    k = 0
    while k < len(w) and w[k].kind is Kind.ANN:
        k += 1
    return all(t.kind is Kind.VAR for t in w[k:])


def _level_deficit(w: OpWord) -> bool:
    """True if some suffix can never return the level to the vacuum.

    With vanishing preservation commutators every rewrite step preserves
    the chaos grading (a- lowers by one, a+ raises, X does either), so a
    suffix with more annihilators than creations and variables, or a
    prefix with more creations than annihilations and variables, forces
    the expectation to zero.
    """
    up = 0
    for t in reversed(w):
        up += -1 if t.kind is Kind.ANN else 1 if t.kind is not Kind.PRES else 0
        if up < 0:
            return True
    down = 0
    for t in w:
        down += -1 if t.kind is Kind.CRE else 1 if t.kind is not Kind.PRES else 0
        if down < 0:
            return True
    return False


def _check_expr(spec: ModelSpec, e: OpExpr):
    for w in e.terms:
        for t in w:
            if isinstance(t, Comm):
                raise ValueError("resolve commutator tokens before evaluation")
        spec.check_word(w)


def vacuum_expectation(spec: ModelSpec, e, cfg: EvalConfig = DEFAULT_CONFIG) -> QPoly:
    """Exact ``<e phi, phi>`` as a polynomial in q.  ``e`` may be an OpExpr or a word."""
    return MomentEvaluator(spec, cfg).expectation(e)


def moment(spec: ModelSpec, query, cfg: EvalConfig = DEFAULT_CONFIG) -> QPoly:
    """Mixed moment ``E[X_s1 ... X_sk]``."""
    return MomentEvaluator(spec, cfg).moment(query)


def all_queries(d: int, max_order: int, min_order: int = 1):
    """Every sigma of length min_order..max_order, shorter first, lexicographic within a length."""
    for k in range(min_order, max_order + 1):
        for sigma in itertools.product(range(1, d + 1), repeat=k):
            yield MomentQuery(sigma)


def moment_equal_check(spec_a: ModelSpec, spec_b: ModelSpec, max_order: int,
                       cfg: EvalConfig = DEFAULT_CONFIG):
    """Compare all moments up to ``max_order``.

    Returns ``(True, None)`` or ``(False, sigma)`` with the first differing sigma.
    """
    if spec_a.d != spec_b.d:
        raise ValueError(f"dimension mismatch: {spec_a.d} != {spec_b.d}")
    if max_order < 1:
        raise ValueError("max_order must be positive")
    ev_a, ev_b = MomentEvaluator(spec_a, cfg), MomentEvaluator(spec_b, cfg)
    for query in all_queries(spec_a.d, max_order):
        if ev_a.moment(query) != ev_b.moment(query):
            return False, query.sigma
    return True, None


def moment_table(spec: ModelSpec, max_order: int, cfg: EvalConfig = DEFAULT_CONFIG):
    """``[(sigma, moment), ...]`` for all sigma up to ``max_order``."""
    ev = MomentEvaluator(spec, cfg)
    return [(query.sigma, ev.moment(query)) for query in all_queries(spec.d, max_order)]
