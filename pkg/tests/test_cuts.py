import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rwrs.core import StepDistribution, WalkPath, all_records, joint_weight
from rwrs.cuts import (
    CUT_KINDS,
    audit_delta_chain,
    audit_easy_lemma,
    cut_avoidance,
    cut_independence_gap,
    cut_times,
    first_cut_time,
    restricted_f,
)

HALF = StepDistribution.rational("1/2")
paths = st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=10).map(WalkPath.from_increments)


def test_cut_time_examples():
    assert cut_times((0, 1, 2, 3)) == (0, 1, 2)
    assert cut_times((0, 1, 0)) == ()
    assert cut_times((0, -1, -2)) == (0,)
    assert first_cut_time((0, 1, 0)) is None
    assert first_cut_time((0, 1, 2)) == 0


@given(paths)
def test_right_cuts_are_cuts(path):
    # a right cut separates past and future supports, so it is a cut time
    assert set(cut_times(path, "right")) <= set(cut_times(path, "definition"))


@given(paths)
def test_monotone_all_cuts(path):
    up = WalkPath.from_increments([1] * path.n)
    assert cut_times(up) == tuple(range(path.n))


def test_avoidance_examples():
    d = StepDistribution.rational("1")
    for rec in ["B", "BWWB", "WWWWW"]:
        assert cut_avoidance(rec, range(len(rec)), d) == 0
    assert cut_avoidance("B", [0], HALF) == 0
    assert cut_avoidance("W", [0], HALF) == 0
    assert cut_avoidance("B", [0], StepDistribution.rational("1/2", "1/5")) == Fraction(1, 5)


def test_restricted_f_oracle():
    # independent sum over the 4 paths; |A| >= 1 inside {0, 1}, so the best single time
    best = 0
    for rec in all_records(2):
        ws = {inc: joint_weight(WalkPath.from_increments(inc), rec, HALF) for inc in itertools.product((-1, 1), repeat=2)}
        den = sum(ws.values())
        for k in (0, 1):
            num = sum(w for inc, w in ws.items() if k not in cut_times(WalkPath.from_increments(inc)))
            best = max(best, num / den)
    assert restricted_f(2, 2, "all", HALF) == best == Fraction(3, 4)


def test_restricted_f_monotone_in_records():
    recs = [r.symbols for r in all_records(4)]
    d = StepDistribution.rational("7/10")
    part = restricted_f(2, 4, recs[:5], d)
    assert part <= restricted_f(2, 4, recs, d)
    assert restricted_f(3, 5, "all", StepDistribution.rational("1")) == 0


@pytest.mark.parametrize("kind", CUT_KINDS)
@pytest.mark.parametrize("n,eps", [(8, "0"), (10, "3/10")])
def test_easy_lemma(n, eps, kind):
    rep = audit_easy_lemma(6, n, StepDistribution.rational("1/2", eps), kind)
    assert rep.passed and rep.paths_checked == (2 if eps == "0" else 3) ** n


def test_easy_lemma_argument_checks():
    with pytest.raises(ValueError):
        audit_easy_lemma(4, 8, HALF)


@given(st.lists(st.sampled_from([-1, 1]), min_size=6, max_size=10))
def test_easy_lemma_contrapositive(inc):
    s = WalkPath.from_increments(inc).positions
    if 3 * min(s[6:]) > 12:
        assert sum(1 for k in cut_times(s) if k < 6) > 3


def test_delta_chain_trivial():
    r = audit_delta_chain("BWB", "BW", "BW", StepDistribution.rational("7/10"))
    assert r.delta == 0 and r.passed
    r = audit_delta_chain("BWB", "BW", "WW", StepDistribution.rational("1"))
    assert r.f_tilde == 0 and r.delta == 0 and r.applicable and r.passed


def test_delta_chain_sample():
    d = StepDistribution.rational("9/10")
    r = audit_delta_chain("BWB", "BWWBBW", "WWBWBB", d)
    assert r.applicable and r.size_ok and r.bound_ok


@pytest.mark.parametrize("p,eps", [("1/2", "0"), ("7/10", "0"), ("7/10", "3/10")])
def test_right_cut_independence(p, eps):
    d = StepDistribution.rational(p, eps)
    for y, ybar, k in [("BWBWW", "BWBWB", 2), ("BBWBW", "BBWWW", 3), ("WBWBBW", "WBBWWB", 1)]:
        gap = cut_independence_gap(y, ybar, k, d, "right")
        assert gap and all(a == b for a, b in gap.values())


def test_literal_definition_breaks_independence():
    d = StepDistribution.rational("7/10")
    gap = cut_independence_gap("BWBWW", "BWBWB", 2, d, "definition")
    assert any(a != b for a, b in gap.values())
