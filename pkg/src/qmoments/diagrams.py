"""Feynman diagrams (perfect matchings), crossing numbers and q-Wick sums.

Three routes to the moments of the q-Gaussian model live here, all
independent of the rewriting engine:

* :func:`q_wick_moment` sums ``q**crossings * prod(cov)`` over all pairings;
* :func:`partial_expectation` restricts that sum to pairings whose first
  ``m`` points are openers (expectations with ``m`` leading annihilators);
* :func:`scalar_recursion_moment` removes one pair at a time, weighting by
  the number of annihilators it jumps over.
"""

from __future__ import annotations

import functools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import gmpy2

from .algebra import ModelSpec, as_query
from .exactmath import ONE, ZERO, QPoly

DEFAULT_SIZE_LIMIT = 16
_TABLE_CACHE_LIMIT = 14


class SizeLimitError(ValueError):
    """Ground set larger than the configured enumeration cap."""


@dataclass(frozen=True)
class FeynmanDiagram:
    """Perfect matching of a linearly ordered ground set, as (opener, closer) pairs.

    Pairs are stored sorted by opener; labels are arbitrary distinct integers.
    """

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted((int(a), int(b)) for a, b in self.pairs))
        seen = set()
        for a, b in pairs:
            if not a < b:
                raise ValueError(f"pair ({a},{b}) must have opener < closer")
            if a in seen or b in seen:
                raise ValueError(f"label repeated in {pairs}")
            seen.update((a, b))
        object.__setattr__(self, "pairs", pairs)

    @property
    def ground(self) -> tuple:
        return tuple(sorted(x for p in self.pairs for x in p))

    def __len__(self):
        return len(self.pairs)

    def __str__(self):
        return format_diagram(self)


def format_diagram(g: FeynmanDiagram) -> str:
    return "".join(f"({a},{b})" for a, b in g.pairs)


_PAIR = re.compile(r"\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*")


def parse_diagram(text: str) -> FeynmanDiagram:
    pairs, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _PAIR.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse diagram {text!r} at position {pos}")
        pairs.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
    return FeynmanDiagram(tuple(pairs))


def _check_size(ground_size: int, limit: int):
    if ground_size <= 0 or ground_size % 2:
        raise ValueError(f"ground set size must be even and positive, got {ground_size}")
    if ground_size > limit:
        raise SizeLimitError(f"ground set size {ground_size} exceeds the limit {limit}")


def _matchings(free: list) -> Iterator[list]:
    if not free:
        yield []
        return
    a = free[0]
    for t in range(1, len(free)):
        rest = free[1:t] + free[t + 1:]
        for m in _matchings(rest):
            yield [(a, free[t])] + m


def iter_pairings(labels: Sequence[int]) -> Iterator[tuple]:
    """Raw pair tuples on the given labels, smallest free label paired first."""
    for m in _matchings(sorted(labels)):
        yield tuple(sorted(m))


def enumerate_pairings(ground_size: int, limit: int = DEFAULT_SIZE_LIMIT) -> Iterator[FeynmanDiagram]:
    """All (ground_size - 1)!! diagrams on ``1..ground_size`` in a fixed order."""
    _check_size(ground_size, limit)
    for pairs in iter_pairings(range(1, ground_size + 1)):
        yield FeynmanDiagram(pairs)


def _crossings(pairs: Sequence[tuple]) -> int:
    c = 0
    for a, b in pairs:
        for k, l in pairs:
            if k < a < l < b:
                c += 1
    return c


def left_crossings(g: FeynmanDiagram, pair: tuple) -> int:
    """Number of pairs ``(k, l)`` of ``g`` with ``k < i < l < j`` for ``pair = (i, j)``."""
    i, j = pair
    if (i, j) not in g.pairs:
        raise ValueError(f"{pair} is not a pair of {g}")
    return sum(1 for k, l in g.pairs if k < i < l < j)


def crossing_number(g: FeynmanDiagram) -> int:
    """Total left crossings, i.e. quadruples ``k < i < l < j`` with both pairs in ``g``."""
    return _crossings(g.pairs)


def sign_sequence(g: FeynmanDiagram) -> tuple:
    """-1 at openers, +1 at closers, in ground order."""
    openers = {a for a, _ in g.pairs}
    return tuple(-1 if x in openers else 1 for x in g.ground)


def is_catalan(eps: Sequence[int]) -> bool:
    """Right-to-left partial sums ``tau_k = eps_k + ... + eps_2n``.

    Catalan iff ``tau_2n > 0``, ``tau_k >= 0`` for ``2 <= k < 2n`` and ``tau_1 == 0``.
    """
    eps = tuple(eps)
    if any(e not in (-1, 1) for e in eps):
        raise ValueError(f"entries must be +1 or -1, got {eps}")
    n2 = len(eps)
    if n2 == 0 or n2 % 2:
        raise ValueError(f"sign sequence must have even positive length, got {n2}")
    tau = [0] * (n2 + 2)
    for k in range(n2, 0, -1):
        tau[k] = tau[k + 1] + eps[k - 1]
    if not tau[n2] > 0:
        return False
    if any(tau[k] < 0 for k in range(2, n2)):
        return False
    return tau[1] == 0


def compatible_diagrams(ground_size: int, m: int, limit: int = DEFAULT_SIZE_LIMIT) -> Iterator[FeynmanDiagram]:
    """Diagrams on ``1..ground_size`` whose first ``m`` points are all openers."""
    _check_size(ground_size, limit)
    if not 0 <= m <= ground_size // 2:
        raise ValueError(f"m must be in 0..{ground_size // 2}, got {m}")
    for g in enumerate_pairings(ground_size, limit):
        closers = {b for _, b in g.pairs}
        if all(x not in closers for x in range(1, m + 1)):
            yield g


@functools.lru_cache(maxsize=None)
def _pairing_table(ground_size: int) -> tuple:
    # (pairs as 0-based index pairs, crossing number) for every pairing
    return tuple(
        (tuple((a - 1, b - 1) for a, b in pairs), _crossings(pairs))
        for pairs in iter_pairings(range(1, ground_size + 1))
    )


def _pairings_with_crossings(ground_size: int):
    if ground_size <= _TABLE_CACHE_LIMIT:
        return _pairing_table(ground_size)
    return (
        (tuple((a - 1, b - 1) for a, b in pairs), _crossings(pairs))
        for pairs in iter_pairings(range(1, ground_size + 1))
    )


def _require_gaussian(spec: ModelSpec):
    if not spec.is_scalar_gaussian:
        raise ValueError(
            "the diagram formulas need zero means and zero preservation commutators"
        )


def _fold(cov, sigma, items) -> list:
    coeffs: dict = {}
    for pairs, cr in items:
        w = ONE_Q
        for a, b in pairs:
            w = w * cov[sigma[a]][sigma[b]]
            if not w:
                break
        if w:
            coeffs[cr] = coeffs.get(cr, ZERO_Q) + w
    return coeffs


ONE_Q = gmpy2.mpq(1)
ZERO_Q = gmpy2.mpq(0)


def _dict_to_poly(coeffs: dict) -> QPoly:
    if not coeffs:
        return ZERO
    top = max(coeffs)
    return QPoly(coeffs.get(k, ZERO_Q) for k in range(top + 1))


def _fold_branch(args):
    cov, sigma, first_partner = args
    n2 = len(sigma)
    rest = [x for x in range(1, n2) if x != first_partner]
    items = []
    for m in _matchings(rest):
        pairs = tuple(sorted([(0, first_partner)] + m))
        items.append((pairs, _crossings(pairs)))
    return _fold(cov, sigma, items)


def q_wick_moment(spec: ModelSpec, query, limit: int = DEFAULT_SIZE_LIMIT, workers: int = 1) -> QPoly:
    """Sum of ``q**c(gamma) * prod cov(sigma_i, sigma_j)`` over all pairings.

    Odd-length queries give zero.  ``workers > 1`` splits the sum by the
    partner of the first point and folds the branches in separate processes.
    """
    _require_gaussian(spec)
    query = as_query(query)
    query.check(spec)
    n2 = len(query)
    if n2 % 2:
        return ZERO
    _check_size(n2, limit)
    sigma = tuple(s - 1 for s in query.sigma)
    cov = spec.cov
    if workers <= 1 or n2 < 6:
        return _dict_to_poly(_fold(cov, sigma, _pairings_with_crossings(n2)))
    total: dict = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_fold_branch, [(cov, sigma, p) for p in range(1, n2)]):
            for k, v in part.items():
                total[k] = total.get(k, ZERO_Q) + v
    return _dict_to_poly(total)


def partial_expectation(spec: ModelSpec, m: int, query, limit: int = DEFAULT_SIZE_LIMIT) -> QPoly:
    """``<a-(s1)..a-(sm) X(s_{m+1})..X(s_2n) phi, phi>`` as a sum over compatible diagrams."""
    _require_gaussian(spec)
    query = as_query(query)
    query.check(spec)
    n2 = len(query)
    if n2 % 2:
        raise ValueError("partial_expectation needs an even-length query")
    if not 1 <= m <= n2 // 2:
        raise ValueError(f"m must be in 1..{n2 // 2}, got {m}")
    sigma = query.sigma
    coeffs: dict = {}
    for g in compatible_diagrams(n2, m, limit):
        w = ONE_Q
        for a, b in g.pairs:
            w = w * spec.c(sigma[a - 1], sigma[b - 1])
        if w:
            cr = crossing_number(g)
            coeffs[cr] = coeffs.get(cr, ZERO_Q) + w
    return _dict_to_poly(coeffs)


def scalar_recursion_moment(spec: ModelSpec, query, limit: int = DEFAULT_SIZE_LIMIT) -> QPoly:
    """Moment by repeated pair removal.

    ``<k1-..km-, k(m+1)..k(2n)>`` is the sum over ``m < l <= n+1`` and
    ``j < l`` of ``q**(l-1-j) c(kj, kl)`` times the same bracket with ``kj``
    and ``kl`` deleted and ``l - 2`` leading annihilators.
    """
    _require_gaussian(spec)
    query = as_query(query)
    query.check(spec)
    n2 = len(query)
    if n2 % 2:
        return ZERO
    _check_size(n2, limit)
    cov = spec.cov
    memo: dict = {}

    def bracket(vals: tuple, m: int) -> QPoly:
        if not vals:
            return ONE
        if m == 0:
            m = 1  # leading X with zero mean acts as its annihilator
        n = len(vals) // 2
        if m > n:
            return ZERO
        key = (vals, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = ZERO
        for l in range(m + 1, n + 2):
            for j in range(1, l):
                c = cov[vals[j - 1]][vals[l - 1]]
                if not c:
                    continue
                rest = vals[: j - 1] + vals[j: l - 1] + vals[l:]
                sub = bracket(rest, l - 2)
                if sub:
                    total = total + sub.shift(l - 1 - j).scale(c)
        memo[key] = total
        return total

    return bracket(tuple(s - 1 for s in query.sigma), 1)
