import re

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        prev = _RESULTS.get(num)
        if prev and prev[0] == "FAIL":
            return
        _RESULTS[num] = ("PASS" if report.outcome == "passed" else "FAIL", m.group(2))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        status, name = _RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d} {name}: {status}")
