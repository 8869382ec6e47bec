import pytest

from rwrs import experiments as ex
from rwrs.experiments import ExperimentSpec, run, write_result


def small(eid, **params):
    return run(ExperimentSpec(eid, params, seed=3))


def test_catalog_covers_all_criteria():
    crit = sorted(c for e in ex.CATALOG.values() for c in e.criteria)
    assert crit == list(range(1, 14))
    assert ex.resolve("black-run-trend").id == "E6"
    assert ex.resolve("bad-probe").id == "E5"
    with pytest.raises(KeyError):
        ex.resolve("E11")


def test_unknown_parameter():
    with pytest.raises(ValueError):
        small("E1", nonsense=1)


def test_rerun_byte_identical(tmp_path):
    params = dict(instances=6, n_max=6, easy_n=[6], easy_eps=["0"], f_sizes=[[2, 3]])
    a = write_result(small("E3", **params), tmp_path / "a")
    b = write_result(small("E3", **params), tmp_path / "b")
    assert [p.name for p in a] == [p.name for p in b]
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()


def test_parallel_matches_serial(monkeypatch):
    params = dict(trials=6, particles=1000, normalizer_records=["BB"], normalizer_seeds=3)
    monkeypatch.setenv("RWRS_THREADS", "1")
    serial = small("E10", **params)
    monkeypatch.setenv("RWRS_THREADS", "2")
    par = small("E10", **params)
    assert serial.tables[0].rows == par.tables[0].rows


def test_threads_env(monkeypatch):
    monkeypatch.setenv("RWRS_THREADS", "0")
    with pytest.raises(ValueError):
        ex.workers()


def test_phase_diagram_small():
    r = small("E1", p_points=20, eps_points=5)
    assert r.passed
    t = r.tables[0]
    assert t.columns[:6] == ("p", "eps", "criterion_holds", "margin", "drift_ok", "derivative_sign")
    assert len(t.rows) == 100


def test_bad_probe_default_prefix():
    r = small("E5", m=2, p=["7/10"], L=[1])
    row = r.tables[0].rows[0]
    assert row[2] == 2 and row[9] == 6


def test_figures(tmp_path):
    from rwrs.plotting import figures

    paths = figures(small("E5", p=["7/10"], L=[1, 2]), tmp_path)
    assert paths and all(p.stat().st_size > 0 for p in paths)
    assert figures(small("E9"), tmp_path) == []
