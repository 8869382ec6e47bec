import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwrs import rates

ps = st.floats(0.5, 0.999)
epss = st.floats(0.0, 0.9)


def test_entropy_basics():
    assert rates.relative_entropy(0.7, 0.2, 0.7, 0.2) == 0
    assert rates.relative_entropy(0.7, 0.1, 0.7, 0.0) == math.inf


def test_entropy_nonnegative():
    rng = random.Random(0)
    for _ in range(10_000):
        q, p = rng.uniform(0, 1), rng.uniform(0.5, 1)
        d, e = rng.uniform(0, 0.99), rng.uniform(0, 0.99)
        assert rates.relative_entropy(q, d, p, e) >= -1e-15


@given(ps, epss)
def test_cost_at_zero_drift(p, eps):
    assert rates.crossover_cost(0.5, eps, p, eps) == pytest.approx(rates.relative_entropy(0.5, eps, p, eps))


@given(ps, epss)
def test_derivative_finite_difference(p, eps):
    h = 1e-5
    fd = (rates.crossover_cost(0.5 + h, eps, p, eps) - rates.crossover_cost(0.5 - h, eps, p, eps)) / (2 * h)
    assert fd == pytest.approx((1 - eps) * math.log(4 * (1 - p) / p), abs=1e-8)


def test_crossover_sign():
    assert rates.crossover_sign(Fraction(4, 5)) == 0
    assert rates.crossover_sign(Fraction(79, 100)) == 1
    assert rates.crossover_sign(Fraction(81, 100), Fraction(1, 2)) == -1


def test_mgf():
    assert rates.moment_generating(0.0, 0.7, 0.3) == pytest.approx(1.0)
    assert rates.moment_generating(0.8, 1.0, 0.0) == pytest.approx(math.exp(0.8))
    lam = np.linspace(-5, 5, 101)
    logm = np.log([rates.moment_generating(x, 0.7, 0.2) for x in lam])
    assert (np.diff(logm, 2) > 0).all()


def test_tilt_examples():
    t = rates.solve_tilt(5 / 6, 0.0)
    assert abs(t.lambda_bar) < 1e-9 and t.rate == pytest.approx(0, abs=1e-15)
    for p in (0.6, 0.75, 0.9, 0.99):
        assert rates.solve_tilt(p, 0.0).lambda_bar == pytest.approx(rates.zero_eps_tilt(p), abs=1e-12)
    assert rates.rate(0.9, 0.0) == pytest.approx(rates.zero_eps_rate(0.9), abs=1e-12)


@given(ps, st.floats(0.0, 0.3))
def test_rate_nonnegative(p, eps):
    assert rates.rate(p, eps) >= 0


def test_unattainable():
    with pytest.raises(rates.UnattainableDrift):
        rates.solve_tilt(1.0, 0.0)
    assert rates.rate(1.0, 0.0) == math.inf
    assert rates.rate(0.9, 0.5, drift=0.99) > 0


def test_goodness():
    assert rates.goodness_criterion(1.0, 0.0).holds
    assert not rates.goodness_criterion(0.7, 0.0).holds
    star = rates.p_star_zero_eps()
    assert star == Fraction(2985984, 2989109)
    assert float(star) == pytest.approx(0.9989545, abs=1e-7)
    assert rates.goodness_criterion(float(star) + 1e-9, 0).holds
    assert not rates.goodness_criterion(float(star) - 1e-9, 0).holds
    assert rates.locate_flip() == pytest.approx(float(star), abs=1e-9)


def test_point_masses():
    exact = rates.position_distribution(10, 0.7, 0.2, exact=True)
    assert sum(exact) == 1
    approx = rates.position_distribution(10, 0.7, 0.2)
    assert np.allclose([float(x) for x in exact], approx, atol=1e-15)
    assert rates.point_mass(3, 3, 0.7, 0, exact=True) == Fraction(343, 1000)
    assert rates.point_mass(3, 4, 0.7, 0) == 0


def test_cramer_prefactor():
    c = rates.cramer_finite_size(60, 0.9)
    assert c.empirical_rate > c.rate
    assert abs(c.prefactor_corrected - c.rate) < 0.01 * c.rate
