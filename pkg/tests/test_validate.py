"""The self-validation suites on a fresh build."""

import pytest

from bohmsim.validate import SUITES, run_validation


def test_all_suites_pass_on_fresh_build():
    results = run_validation()
    for r in results:
        assert r.passed, f"{r.name}: {r.detail}"
    assert {r.name for r in results} == set(SUITES)


def test_only_filter():
    results = run_validation(only="mirror-symmetry")
    assert len(results) == 1
    assert results[0].name == "mirror-symmetry"
    with pytest.raises(ValueError):
        run_validation(only="nonexistent")


def test_crashing_suite_reports_failure(monkeypatch):
    def boom():
        raise RuntimeError("broken fixture")

    monkeypatch.setitem(SUITES, "tau-scaling", boom)
    results = run_validation(only="tau-scaling")
    assert not results[0].passed
    assert "broken fixture" in results[0].detail
