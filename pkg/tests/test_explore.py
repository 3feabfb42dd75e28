import pytest

from halman import UsageError
from halman.explore import WORKERS_ENV, explore, run_trial, worker_count


def test_report_shape():
    rep = explore("planar-pairwise", 15, seed=1)
    assert rep["trials"] == 15 and sum(rep["histogram"].values()) == 15
    assert rep["max_observed"] == max(int(v) for v in rep["histogram"])
    assert rep["conjectured_bound"] == 3


def test_p41_records_best_family():
    rep = explore("colorful-2n", 10, seed=0, d=2, n=2)
    assert rep["conjectured_bound"] == 4 and rep["max_observed"] <= 4


def test_zero_trials():
    rep = explore("colorful-2n", 0)
    assert rep["max_observed"] is None and rep["candidates"] == [] and rep["histogram"] == {}


def test_trials_are_deterministic():
    assert run_trial("colorful-2n", 3, 7, 2, 1) == run_trial("colorful-2n", 3, 7, 2, 1)


def test_parallel_matches_serial():
    assert explore("planar-pairwise", 12, seed=5, workers=1) == explore("planar-pairwise", 12, seed=5, workers=3)


def test_worker_env(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert worker_count() == 4
    monkeypatch.setenv(WORKERS_ENV, "x")
    with pytest.raises(UsageError):
        worker_count()


def test_bad_problem():
    with pytest.raises(UsageError):
        explore("P9", 1)


def test_short_aliases_match_names():
    assert explore("P4.2", 5, seed=2) == explore("planar-pairwise", 5, seed=2)
    assert explore("P4.1", 3, seed=2)["problem"] == "colorful-2n"
