"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends with
one PASS/FAIL line per criterion.
"""

import itertools
import random
import time
from fractions import Fraction

from helpers import random_cov, random_psd
from oracles import catalan, crossing_weighted_fourth, double_factorial, isserlis4, single_variable_moment
from qmoments.algebra import Ann, Cre, gaussian_spec
from qmoments.diagrams import (
    FeynmanDiagram,
    crossing_number,
    is_catalan,
    left_crossings,
    q_wick_moment,
    scalar_recursion_moment,
)
from qmoments.engine import MomentEvaluator, all_queries, moment_equal_check
from qmoments.exactmath import ZERO, QPoly, poly_eval
from qmoments.fock import (
    FockModel,
    FockState,
    apply_annihilation,
    apply_creation,
    numeric_moment,
    q_inner,
)

FOCK_QS = (-0.9, -0.5, 0.0, 0.5, 0.9)


def test_criterion_01_low_order_fixtures():
    start = time.perf_counter()
    # entries B**1, B**2, B**4, B**8: every product of two entries is a distinct
    # power of B, so matching coefficients per power is a symbolic identity
    B = 1000
    cov = [[B, B ** 2], [B ** 4, B ** 8]]
    r = random.Random(1)
    covs = [cov, random_cov(r, 2), random_cov(r, 2, symmetric=True)]
    for cv in covs:
        spec = gaussian_spec(cv)
        ev = MomentEvaluator(spec)
        c = spec.c
        for s in itertools.product((1, 2), repeat=2):
            assert ev.moment(s) == QPoly.const(c(*s))
        for s in itertools.product((1, 2), repeat=3):
            assert ev.moment(s) == ZERO
        for s in itertools.product((1, 2), repeat=4):
            const, lin = crossing_weighted_fourth(c, s)
            assert ev.moment(s) == QPoly([const, lin]), s
    assert time.perf_counter() - start < 1.0


def test_criterion_02_crossing_fixture():
    g = FeynmanDiagram(((1, 3), (2, 7), (4, 8), (5, 6)))
    assert crossing_number(g) == 2
    assert left_crossings(g, (2, 7)) == 1
    assert left_crossings(g, (4, 8)) == 1
    assert left_crossings(g, (1, 3)) == 0
    assert left_crossings(g, (5, 6)) == 0


def test_criterion_03_three_routes_agree():
    start = time.perf_counter()
    r = random.Random(33)
    compared = 0
    for _ in range(5):
        spec = gaussian_spec(random_cov(r, 3))
        ev = MomentEvaluator(spec)
        for query in all_queries(3, 8):
            a = ev.moment(query)
            b = q_wick_moment(spec, query)
            c = scalar_recursion_moment(spec, query)
            assert a == b == c, query.sigma
            compared += 1
    assert compared == 5 * sum(3 ** k for k in range(1, 9))
    elapsed = time.perf_counter() - start
    print(f"three-route agreement: {compared} words in {elapsed:.1f} s")
    assert elapsed < 120


def test_criterion_04_odd_moments_vanish():
    r = random.Random(44)
    for d in (1, 2, 3):
        spec = gaussian_spec(random_cov(r, d))
        ev = MomentEvaluator(spec)
        for n in (1, 3, 5, 7, 9):
            for sigma in itertools.product(range(1, d + 1), repeat=n):
                assert ev.moment(sigma) == ZERO, sigma


def test_criterion_05_specializations():
    r = random.Random(55)
    for d in (2, 3):
        spec = gaussian_spec(random_cov(r, d))
        ev = MomentEvaluator(spec)
        for s in itertools.product(range(1, d + 1), repeat=4):
            assert poly_eval(ev.moment(s), 1) == isserlis4(spec.c, s)
    ev = MomentEvaluator(gaussian_spec([[1]]))
    for n in range(1, 8):
        m = ev.moment((1,) * (2 * n))
        assert poly_eval(m, 0) == catalan(n)
        assert poly_eval(m, 1) == double_factorial(2 * n - 1)


def test_criterion_06_touchard_riordan():
    # brute-force pairing/crossing count first, then all three routes
    assert single_variable_moment(6) == [5, 6, 3, 1]
    expected = QPoly([5, 6, 3, 1])
    spec = gaussian_spec([[1]])
    assert MomentEvaluator(spec).moment((1,) * 6) == expected
    assert q_wick_moment(spec, (1,) * 6) == expected
    assert scalar_recursion_moment(spec, (1,) * 6) == expected


def _random_state(r, d, top, truncation):
    amps = {}
    for n in range(top + 1):
        for w in itertools.product(range(1, d + 1), repeat=n):
            amps[w] = r.uniform(-1, 1)
    return FockState(amps, truncation)


def test_criterion_07_fock_oracle():
    start = time.perf_counter()
    r = random.Random(77)
    covs = [random_psd(r, 1), random_psd(r, 2), random_psd(r, 2)]
    worst = 0.0
    resid = 0.0
    for cov in covs:
        spec = gaussian_spec(cov)
        d = spec.d
        ev = MomentEvaluator(spec)
        table = [(query, ev.moment(query)) for query in all_queries(d, 6)]
        for q in FOCK_QS:
            model = FockModel.from_spec(spec, q, 6)
            for query, poly in table:
                sym = float(poly_eval(poly, Fraction(q)))
                num = numeric_moment(model, query)
                err = abs(num - sym) / max(1.0, abs(sym))
                worst = max(worst, err)
                assert err <= 1e-9, (query.sigma, q, sym, num)
            small = FockModel.from_spec(spec, q, 4)
            for _ in range(3):
                u = _random_state(r, d, 3, 4)
                v = _random_state(r, d, 3, 4)
                for i in range(1, d + 1):
                    adj = q_inner(apply_creation(small, i, u), v, small) - q_inner(u, apply_annihilation(small, i, v), small)
                    resid = max(resid, abs(adj))
                    for j in range(1, d + 1):
                        lhs = apply_annihilation(small, i, apply_creation(small, j, u))
                        lhs = lhs - apply_creation(small, j, apply_annihilation(small, i, u)).scale(q)
                        resid = max(resid, (lhs - u.scale(small.gram[i - 1, j - 1])).max_abs())
    print(f"fock oracle: worst relative error {worst:.2e}, operator residual {resid:.2e}")
    assert resid <= 1e-10
    assert time.perf_counter() - start < 60


def test_criterion_08_vanishing_criterion():
    spec = gaussian_spec([[1]])
    ev = MomentEvaluator(spec)
    checked = 0
    for n in range(1, 9):
        for eps in itertools.product((-1, 1), repeat=n):
            word = tuple(Ann(1) if e == -1 else Cre(1) for e in eps)
            value = ev.expectation(word)
            if n % 2:
                assert value == ZERO
            else:
                assert (value != ZERO) == is_catalan(eps), eps
            checked += 1
    assert checked == 2 ** 9 - 2


def test_criterion_09_moment_equality():
    r = random.Random(99)
    cov = random_cov(r, 2)
    a = gaussian_spec(cov)
    b = gaussian_spec([[Fraction(x) for x in row] for row in cov])
    assert moment_equal_check(a, b, 6) == (True, None)
    for i, j in itertools.product(range(2), repeat=2):
        bumped = [list(row) for row in cov]
        bumped[i][j] += Fraction(1, 7)
        ok, sigma = moment_equal_check(a, gaussian_spec(bumped), 6)
        assert not ok
        assert sigma == (i + 1, j + 1)


def test_criterion_10_degree_and_homogeneity():
    r = random.Random(1010)
    for _ in range(3):
        cov = random_cov(r, 2)
        t = Fraction(r.randint(-9, 9) or 1, r.randint(1, 9))
        base = MomentEvaluator(gaussian_spec(cov))
        scaled = MomentEvaluator(gaussian_spec([[t * x for x in row] for row in cov]))
        for n in range(1, 5):
            for sigma in itertools.product((1, 2), repeat=2 * n):
                m = base.moment(sigma)
                assert m.degree <= n * (n - 1) // 2
                assert scaled.moment(sigma) == m.scale(t ** n)
