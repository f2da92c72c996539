import pytest

from pygengamma.errors import NonConvergent
from pygengamma.suite import (
    ERROR,
    FAIL,
    PASS,
    SKIPPED,
    TAGS,
    Check,
    admissible,
    build_checks,
    parameter_cells,
    run_bench,
    run_check,
    run_checks,
)


def test_admissibility_gate():
    assert admissible("1", 1.0, 1.0)
    assert admissible("u^2", 0.5, 0.5)
    assert not admissible("1/u", 0.5, 1.0)
    assert not admissible("1/(1-u)", 1.0, 1.0)


def test_parameter_cells(defaults):
    assert len(parameter_cells(defaults, "full")) == 48
    assert len(parameter_cells(defaults, "sample")) == 8


def test_catalogue(defaults, cfg):
    checks = build_checks(defaults, cfg)
    assert {c.tag for c in checks} == set(TAGS)
    assert all(c.tolerance > 0 for c in checks if c.tag != "sep")
    full = build_checks(defaults, cfg, sweep="full", only=["eq12"])
    assert len(full) == 6 + 10 * 48
    with pytest.raises(ValueError):
        build_checks(defaults, cfg, only=["eq99"])
    with pytest.raises(ValueError):
        build_checks(defaults, cfg, sweep="everything")


def test_run_check_statuses():
    assert run_check(Check("eq12", "ok", "", lambda: (0.0, True), tolerance=1e-8)).status == PASS
    assert run_check(Check("eq12", "bad", "", lambda: (1.0, False), tolerance=1e-8)).status == FAIL
    skipped = run_check(Check("lemma1", "gated", "", lambda: (0.0, True), gate=lambda: False))
    assert skipped.status == SKIPPED and skipped.passed

    def boom():
        raise NonConvergent("no luck")

    errored = run_check(Check("eq12", "boom", "", boom))
    assert errored.status == ERROR and not errored.passed
    assert "NonConvergent" in errored.detail


def test_unexpected_exception_becomes_error_row():
    def broken():
        raise KeyError("fprime")

    checks = [Check("lemma1", "broken", "", broken), Check("eq12", "ok", "", lambda: (0.0, True))]
    results = run_checks(checks)
    assert [r.status for r in results] == [ERROR, PASS]
    assert results[0].detail.startswith("KeyError")


def test_inadmissible_corpus_entry_is_skipped(defaults, cfg):
    corpus = [{"name": "pole", "f": "1/u", "g": "1", "fprime": "-1/u^2", "gprime": "0"}]
    checks = build_checks(defaults, cfg, corpus=corpus, only=["lemma1"])
    results = run_checks(checks)
    assert results and all(r.status == SKIPPED for r in results)


@pytest.mark.parametrize("tag", ["eq12", "eq10f2", "prop1", "prop3", "lemma1", "eq45", "eq251", "sep"])
def test_sample_sweep_passes(defaults, cfg, tag):
    results = run_checks(build_checks(defaults, cfg, only=[tag]), jobs=2)
    failed = [r.as_dict() for r in results if not r.passed]
    assert not failed


def test_results_keep_catalogue_order(defaults, cfg):
    checks = build_checks(defaults, cfg, only=["sep"])
    results = run_checks(checks, jobs=4)
    assert [(r.name, r.case) for r in results] == [(c.name, c.case) for c in checks]


def test_bench(defaults, cfg):
    cells = parameter_cells(defaults, "sample", count=2)
    results = run_bench("u^2", "exp(-r/2)", cells, cfg, warmup=0, repeat=1)
    assert len(results) == 2
    for cell in results:
        assert cell.direct_ms > 0 and cell.factorized_ms > 0
        assert cell.direct_value == pytest.approx(cell.factorized_value, rel=1e-8)
        assert cell.as_dict()["speedup"] == cell.speedup
        assert cell.speedup > 1


@pytest.mark.slow
def test_default_catalogue_passes(defaults, cfg):
    results = run_checks(build_checks(defaults, cfg), jobs=4)
    assert not [r.as_dict() for r in results if not r.passed]


@pytest.mark.slow
def test_full_factorization_grid_passes(defaults, cfg):
    results = run_checks(build_checks(defaults, cfg, sweep="full", only=["eq12"]), jobs=4)
    assert len(results) == 6 + 10 * 48
    assert not [r.as_dict() for r in results if not r.passed]
