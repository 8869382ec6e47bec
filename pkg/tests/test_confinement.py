import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rwrs import confinement as cf
from rwrs.core import StepDistribution
from rwrs.inference import conditional_color_at_origin


@given(st.integers(1, 6), st.integers(1, 6))
def test_one_step(i, j):
    assert cf.confinement_probability(1, i, j) == 1


def test_examples():
    assert cf.confinement_probability(5, 1, 1) == 0
    assert cf.confinement_probability(2, 2, 1, exact=True) == Fraction(1, 2)
    assert cf.confinement_probability(10, 3, 2, exact=True) == Fraction(89, 512)
    assert cf.spitzer_asymptote(3, "even").base == pytest.approx(math.sqrt(2) / 2)


@given(st.integers(1, 40), st.integers(1, 7), st.integers(1, 7))
def test_backends_agree(n, i, j):
    exact = float(cf.confinement_probability(n, i, j, exact=True))
    assert cf.confinement_probability(n, i, j) == pytest.approx(exact, rel=1e-12, abs=1e-300)
    assert cf.spectral_confinement(n, i, j) == pytest.approx(exact, abs=1e-12)


def test_symmetry_and_table():
    t = cf.confinement_table(30, 5, 5)
    for i in range(1, 6):
        for j in range(1, 6):
            assert t[i - 1, j - 1] == pytest.approx(t[j - 1, i - 1])
            assert t[i - 1, j - 1] == pytest.approx(cf.confinement_probability(30, i, j))


def test_log_confinement_no_underflow():
    v = cf.log_confinement(20000, 3, 1)
    assert math.isfinite(v) and v < -1000


def test_spitzer():
    assert cf.spitzer_ratio(2000, 4) == pytest.approx(1, abs=1e-3)
    assert cf.spitzer_ratio(2001, 4) == pytest.approx(1, abs=1e-3)
    with pytest.raises(ValueError):
        cf.spitzer_asymptote(1, "even")


def test_black_run_small():
    assert cf.black_run_conditional(1) == pytest.approx(0.5, abs=1e-15)
    assert cf.black_run_conditional(2) == pytest.approx(0.25, abs=1e-15)


def test_black_run_matches_engine():
    d = StepDistribution(0.5, 0.0)
    for b in cf.black_run_trend(20):
        assert b.ratio == pytest.approx(float(conditional_color_at_origin("B" * b.n, d).p_white), abs=1e-12)
        assert b.dn_bound_ok


def test_black_run_truncation():
    with pytest.raises(cf.TruncationError):
        list(cf.black_run_trend(2000, i_max=10))
    assert cf.default_truncation(10_000) > cf.default_truncation(100)


def test_black_run_trend_monotone():
    vals = [b.p_black for b in cf.black_run_trend(1000, every=2) if b.n % 2 == 0]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
