import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, note=''): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args[:2]
    note = marker.kwargs.get("note", "")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else "FAIL"
        if number in _RESULTS and _RESULTS[number][0] == "FAIL":
            status = "FAIL"
        _RESULTS[number] = (status, title, note)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, note = _RESULTS[number]
        line = f"criterion {number:2d}: {status}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)
