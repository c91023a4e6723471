import re

import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title, group=None): acceptance criterion id and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    title = marker.kwargs.get("group", title), title
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        details = [str(v) for k, v in item.user_properties if k == "metric"]
        prev = _ACCEPTANCE.get((cid, item.name))
        if prev is None or prev[1] == "PASS":
            _ACCEPTANCE[(cid, item.name)] = (title, status, details)


def _criterion_key(cid):
    m = re.match(r"AC(\d+)", cid)
    return (int(m.group(1)) if m else 0, cid)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    groups = {}
    for (cid, name), entry in _ACCEPTANCE.items():
        groups.setdefault(cid, []).append((name, *entry))
    for cid in sorted(groups, key=_criterion_key):
        parts = groups[cid]
        statuses = {status for _, _, status, _ in parts}
        overall = "FAIL" if "FAIL" in statuses else "PASS" if "PASS" in statuses else "SKIP"
        skipped = sum(status == "SKIP" for _, _, status, _ in parts)
        note = f" ({skipped} of {len(parts)} parts skipped)" if skipped and overall != "SKIP" else ""
        terminalreporter.write_line(f"{overall:4s} {cid:5s} {parts[0][1][0]}{note}")
        for name, (_, title), status, details in parts:
            if len(parts) > 1:
                terminalreporter.write_line(f"      {status:4s} {name}: {title}")
            for d in details:
                terminalreporter.write_line(f"           {d}")


@pytest.fixture
def metric(record_property):
    """Attach a measured value to the acceptance summary line."""

    def _record(text):
        record_property("metric", text)

    return _record
