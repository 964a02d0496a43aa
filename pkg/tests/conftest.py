import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402


@pytest.fixture(scope="session")
def oracle_families():
    """Filter-oracle families for n = 1..4, as frozensets of frozensets."""
    return {n: oracles.all_families(n) for n in range(1, 5)}


# Acceptance criteria: tests carry @pytest.mark.criterion(id, title); the
# outcome of each is collected here and printed as one line per criterion.
_criteria: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, title = mark.args
    entry = _criteria.setdefault(cid, {"id": cid, "title": title, "ok": True, "why": ""})
    if rep.failed:
        entry["ok"] = False
        if call.excinfo is not None and not entry["why"]:
            entry["why"] = call.excinfo.exconly().splitlines()[0][:240]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for entry in sorted(_criteria.values(), key=lambda e: e["id"]):
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"{status}  criterion {entry['id']}: {entry['title']}"
        if entry["why"]:
            line += f"  [{entry['why']}]"
        tr.write_line(line)
