import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    number, title = crit
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "seen": False, "detail": ""})
    if report.when == "call" or report.failed:
        entry["seen"] = True
        entry["ok"] = entry["ok"] and report.passed
        detail = dict(report.user_properties).get("detail")
        if detail:
            entry["detail"] = "; ".join(d for d in (entry["detail"], detail) if d)


@pytest.fixture(autouse=True)
def _criterion_tag(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        record_property("criterion", tuple(marker.args))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] and e["seen"] else "FAIL"
        line = f"{status} [{number:2d}] {e['title']}"
        if e["detail"]:
            line += f" :: {e['detail']}"
        terminalreporter.write_line(line)
