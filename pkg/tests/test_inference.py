import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rwrs import probes
from rwrs.core import Color, ColorRecord, StepDistribution, WalkPath, joint_weight_with_origin
from rwrs.events import END_DOWN, END_UP, last_turn, no_turn
from rwrs.inference import (
    EnumerationInfeasible,
    ImpossibleRecord,
    StateExplosion,
    brute_force_conditional,
    brute_force_table,
    conditional_color_at_origin,
    conditional_table,
    delta,
    enumerate_compatible,
)

HALF = StepDistribution.rational("1/2")
records = st.text(alphabet="BW", min_size=1, max_size=7)
dists = st.sampled_from(
    [StepDistribution.rational(p, e) for p in ("1/2", "7/10", "1") for e in ("0", "3/10")]
)


def naive(record, dist):
    """Independent loop over increment sequences using the core joint weight."""
    rec = ColorRecord(record)
    wb = ww = dist.zero
    for inc in itertools.product((-1, 0, 1), repeat=len(record)):
        path = WalkPath.from_increments(inc)
        wb += joint_weight_with_origin(path, rec, Color.B, dist)
        ww += joint_weight_with_origin(path, rec, Color.W, dist)
    return wb / (wb + ww)


def test_single_symbol_identity():
    for p, e in [("1/2", "0"), ("7/10", "3/10"), ("1", "1/5")]:
        d = StepDistribution.rational(p, e)
        e = Fraction(e)
        assert conditional_color_at_origin("B", d).p_black == e + (1 - e) / 2


def test_bb():
    assert conditional_color_at_origin("BB", HALF).p_black == Fraction(3, 4)


def test_bw_value_and_symmetry():
    # the exact value is 1/4: weights 1/16 (black origin) and 3/16 (white origin)
    r = conditional_color_at_origin("BW", HALF)
    assert r.p_black == Fraction(1, 4)
    assert conditional_color_at_origin("WB", HALF).p_white == r.p_black


def test_fully_biased_half():
    d = StepDistribution.rational("1")
    for rec in ["B", "WB", "BBWBWWBBBW", "W" * 25]:
        assert conditional_color_at_origin(rec, d).p_black == Fraction(1, 2)


@given(records, dists)
def test_backends_agree(record, dist):
    f = conditional_color_at_origin(record, dist)
    e = conditional_color_at_origin(record, dist, backend="enumeration")
    assert f.p_black == e.p_black == naive(record, dist)


@given(records, dists)
def test_flip_symmetry(record, dist):
    a = conditional_color_at_origin(record, dist).p_black
    b = conditional_color_at_origin(ColorRecord(record).flip(), dist).p_black
    assert a + b == 1


@pytest.mark.parametrize("p,eps", [("1/2", "0"), ("7/10", "3/10"), ("1", "0")])
def test_table_matches_oracle(p, eps):
    d = StepDistribution.rational(p, eps)
    table = conditional_table(6, d, shorter=True)
    for n in range(1, 7):
        oracle = brute_force_table(n, d)
        assert sum(b + w for b, w in oracle.values()) == 1
        for rec, (b, w) in oracle.items():
            assert table[rec].p_black == b / (b + w)


def test_float_mode_close():
    d = StepDistribution(0.7, 0.3)
    ex = StepDistribution.rational("7/10", "3/10")
    for rec in ["BWWBWBB", "WWWWWWWW", "BWBWBWBW"]:
        a = conditional_color_at_origin(rec, d).p_black
        assert a == pytest.approx(float(conditional_color_at_origin(rec, ex).p_black), abs=1e-12)
    assert brute_force_conditional("BWWB", d).p_black == pytest.approx(
        float(naive("BWWB", ex)), abs=1e-12
    )


def test_long_record_float():
    from rwrs.confinement import black_run_conditional

    r = conditional_color_at_origin("B" * 60, StepDistribution(0.5, 0))
    assert r.p_white == pytest.approx(black_run_conditional(60), abs=1e-9)
    assert math.isfinite(r.log_normalizer)


def test_impossible_record():
    # at p = 1, eps = 0 every record is possible; with only pauses B then W is not
    d = StepDistribution.rational("1/2")
    with pytest.raises(ValueError):
        conditional_color_at_origin("", d)
    res = enumerate_compatible("BW", d, origin=Color.B)
    assert res.total() > 0


def test_caps():
    with pytest.raises(EnumerationInfeasible):
        brute_force_conditional("B" * 17, HALF)
    with pytest.raises(StateExplosion):
        conditional_color_at_origin("BWBWWBBW" * 4, StepDistribution(0.7, 0.3), state_cap=50)
    approx = conditional_color_at_origin("BWBWWBBW" * 4, StepDistribution(0.7, 0.3), top_k=50)
    assert approx.approximate


def test_delta_basic():
    d = StepDistribution.rational("7/10")
    assert delta("BW", "BB", "BB", d) == 0
    assert delta("BW", "BB", "WW", d) == -delta("BW", "WW", "BB", d)
    with pytest.raises(ValueError):
        delta("B", "B", "BW", d)


def test_delta_probe_grows_toward_limit():
    d = StepDistribution.rational("7/10")
    vals = []
    for L in (1, 2, 3):
        bar, tilde, _ = probes.bad_probe_pair(1, L)
        vals.append(delta("", bar.symbols, tilde.symbols, d, equal_length=False))
    assert float(vals[2]) == pytest.approx(0.38078346471029384, abs=1e-15)
    assert abs(vals[2]) < Fraction(2, 5)


def test_event_probabilities_on_probe():
    d = StepDistribution.rational("7/10")
    bar, _, g = probes.bad_probe_pair(1, 2)
    res = enumerate_compatible(bar.symbols, d)
    piv = g.pivot_times
    parts = [res.probability(no_turn(piv) & END_UP), res.probability(no_turn(piv) & END_DOWN)]
    for l in range(3):
        parts += [res.probability(last_turn(piv, l) & e) for e in (END_UP, END_DOWN)]
    assert sum(parts) == 1


def test_reflection_at_half():
    bar, _, _ = probes.bad_probe_pair(1, 2)
    res = enumerate_compatible(bar.symbols, HALF)
    assert res.probability(END_UP) == res.probability(END_DOWN)


def test_enumeration_result_given():
    res = enumerate_compatible("BBW", StepDistribution.rational("7/10"))
    with pytest.raises(ImpossibleRecord):
        res.given(no_turn([]) & ~no_turn([]))
