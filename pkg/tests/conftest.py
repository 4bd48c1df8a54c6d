import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or report.when != "call" and report.passed:
        return
    k = int(m.group(1))
    ok = report.passed or (report.when != "call" and not report.failed)
    _outcomes[k] = _outcomes.get(k, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        if k in _outcomes:
            status = "PASS" if _outcomes[k] else "FAIL"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {CRITERIA[k]}")
