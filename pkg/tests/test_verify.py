import pytest

from markov_slopes.verify import SUITES, dehn_check, run_suite
from markov_slopes.farey import FareyFraction

SMALL = {"aigner": 40, "llrs": 40, "thm11": 25, "thm14": 20, "dehn": 6, "derivatives": 8, "convexity": 20}


@pytest.mark.parametrize("suite", SUITES)
def test_suites_pass_at_small_bounds(suite):
    report = run_suite(suite, SMALL[suite])
    assert report.passed, report.details
    assert report.to_dict()["suite"] == suite


def test_suite_reports_are_reproducible():
    assert run_suite("thm14", 15).to_dict() == run_suite("thm14", 15).to_dict()


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nonesuch")


def test_dehn_band():
    check = dehn_check(FareyFraction(1, 3), 3, 6)
    assert check["decreasing"] and check["within_band"]
