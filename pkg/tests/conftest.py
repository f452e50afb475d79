import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    cid, title = marker.args
    if report.when == "setup" and report.passed:
        return
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if report.passed else "FAIL"
    _CRITERIA[cid] = (title, status, detail if report.passed else str(report.longrepr).splitlines()[-1][:160])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c[2:])):
        title, status, detail = _CRITERIA[cid]
        terminalreporter.write_line(f"{cid} {status}  {title}" + (f"  [{detail}]" if detail else ""))
