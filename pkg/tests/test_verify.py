import pytest

from caylex import verify


def test_suite_names_cover_registry():
    assert set(verify.SUITE_NAMES) == set(verify._SUITES)


@pytest.mark.parametrize("name", verify.SUITE_NAMES)
def test_each_suite_passes(name):
    res = verify.run_suite(name, seed=0)
    assert res.passed, res.failures[:3]
    assert res.checked > 0


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run_suite("bogus", 0)


def test_per_suite_seeds_differ():
    seeds = {verify._suite_seed(1, n) for n in verify.SUITE_NAMES}
    assert len(seeds) == len(verify.SUITE_NAMES)


def test_results_independent_of_worker_count():
    names = ["norms", "cocycle", "lemma41"]
    serial = verify.run_suites(names, seed=1, workers=1)
    parallel = verify.run_suites(names, seed=1, workers=3)
    assert [r.line() for r in serial] == [r.line() for r in parallel]


def test_suite_reports_counterexample_on_failure():
    """A deliberately broken input must surface in the summary line."""
    res = verify.SuiteResult("demo", 10, ["witness: x=(1,0)"])
    assert not res.passed
    assert "FAIL" in res.line() and "witness" in res.line()
