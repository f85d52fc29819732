import re

_CRITERIA = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if report.when == "call" or report.failed:
        prev = _CRITERIA.get(key, True)
        _CRITERIA[key] = prev and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        verdict = "PASS" if _CRITERIA[key] else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {verdict}")
