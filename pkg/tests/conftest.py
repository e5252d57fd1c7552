import re
from collections import defaultdict

import pytest

from ribbonlab.catalog import standard_models

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes: dict[int, list[bool]] = defaultdict(list)

CRITERION_TITLES = {
    1: "star-triangle relation on every catalog model",
    2: "closability and the double's braid relation",
    3: "BMW and Hecke relations with spectral clusters",
    4: "Drinfeld anchor values for B2 and C2",
    5: "ribbon and modified ribbon operators",
    6: "quotient counts from det evaluation",
    7: "link invariants against the Kauffman bracket",
    8: "commutant dimensions",
}


@pytest.fixture(scope="session")
def catalog_models():
    return standard_models()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or report.outcome == "failed":
        _outcomes[int(m.group(1))].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERION_TITLES):
        results = _outcomes.get(k)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {k} ({CRITERION_TITLES[k]}): {status}")
