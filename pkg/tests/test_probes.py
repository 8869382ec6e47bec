import pytest
from hypothesis import given, strategies as st

from rwrs import probes
from rwrs.core import Color, StepDistribution, WalkPath, compatible
from rwrs.events import isolated_whites
from rwrs.inference import enumerate_compatible


@given(st.integers(1, 8), st.integers(1, 6))
def test_geometry_closed_forms(m, L):
    g = probes.ProbeGeometry(m, L)
    bar, tilde, _ = probes.bad_probe_pair(m, L)
    assert len(bar) + m - 1 == g.n
    assert len(tilde) == len(bar) - 3
    assert g.t(1) - g.t(0) == 3 + 8 * m
    for l in range(L + 1):
        assert g.t(l) == g.t_sum_form(l)
        assert g.u(l) == g.u_sum_form(l)
    for l in range(L):
        assert g.v(l) == g.v_defining_form(l)
    # the l-th isolated W of barY sits at record index t(l) - m + 1 (1-based)
    assert [t - m + 1 for t in g.pivot_times] == [i + 1 for i in isolated_whites(bar.symbols, start=0)]


def test_geometry_example():
    bar, tilde, g = probes.bad_probe_pair(6, 1)
    assert len(bar) == 130 and g.n == 135 and bar.start == 6


def test_good_prefix():
    assert probes.good_config_prefix(1).symbols == "BBWBBWWBB"
    assert len(probes.good_config_prefix(2)) == 20
    for L in range(1, 6):
        assert len(probes.good_config_prefix(L)) == L * (2 * L + 5) + 2
        assert probes.good_pivot_times(L)[0] == 3
    assert probes.good_pivot_times(3) == (3, 10, 21)


def test_sparse():
    assert probes.sparse_probe(3, 2).symbols == "WBBWBBW"
    assert probes.sparse_probe(3, 2, Color.W).symbols == "BWWBWWB"
    for k in (2, 3, 4):
        for K in (1, 2, 3):
            assert probes.sparse_probe(k, K).flip() == probes.sparse_probe(k, K, Color.W)


def test_build_by_name():
    assert probes.build("allB", n=4).symbols == "BBBB"
    assert probes.build("barY", m=1, L=1) == probes.bad_probe_pair(1, 1)[0]
    with pytest.raises(ValueError, match="--K"):
        probes.build("sparseB", k=3)
    with pytest.raises(ValueError):
        probes.build("nope")


def test_no_turn():
    rep = probes.check_no_turn(2)
    assert rep.passed and rep.compatible == 2
    assert probes.check_no_turn(1).passed
    assert not any(probes.turn_inserted(3, t) for t in range(1, 11))


def test_unique_walk():
    assert probes.check_unique_walk(4, 6).passed
    assert not probes.check_unique_walk(4, 6, lambda x: Color.B).passed


@pytest.mark.parametrize("L", [1, 2, 3])
def test_walk_count_after_m(L):
    bar, _, g = probes.bad_probe_pair(1, L)
    res = enumerate_compatible(bar.symbols, StepDistribution.rational("7/10"))
    tails = {tuple(pos[t + 1] - pos[t] for t in range(1, len(pos) - 1)) for pos in res.paths()}
    assert len(tails) == 2 * (L + 2)


def test_visit_event():
    # S_2 = 2 is white; sites 1 and 3 are both black and seen at times 3 and 5
    s = (0, 1, 2, 1, 2, 3)
    rec = "BWBWB"
    assert compatible(WalkPath(s), probes.ColorRecord(rec)) is not None
    assert probes.visit_event(2, 3, rec)(s)
    assert not probes.visit_event(2, 2, rec)(s)
    assert not probes.visit_event(2, 3, "BWBWW")(s)
