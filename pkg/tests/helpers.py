"""Random inputs shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from qmoments.exactmath import QPoly

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(rationals, max_size=5).map(QPoly)


def random_cov(rng, d, symmetric=False):
    cov = [[Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(d)] for _ in range(d)]
    if symmetric:
        for i in range(d):
            for j in range(i):
                cov[i][j] = cov[j][i]
    return cov


def random_psd(rng, d):
    b = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(d)] for _ in range(d)]
    return [
        [sum(b[i][k] * b[j][k] for k in range(d)) + (Fraction(1, 4) if i == j else 0) for j in range(d)]
        for i in range(d)
    ]
