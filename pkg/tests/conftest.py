import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_results = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    measured = dict(report.user_properties).get("measured", "")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[number] = ("PASS" if report.passed else "FAIL", measured)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, measured = _results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {measured}")
