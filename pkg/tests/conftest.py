"""Acceptance bookkeeping: tests marked ``acceptance(criterion)`` are grouped
and reported as one PASS/FAIL line per criterion after the run."""
from collections import defaultdict

import pytest

CRITERIA = {
    "1": "ex1a k=3 convergence orders and runtime",
    "2": "ex1a k=4 superconvergence orders and rate masking",
    "3": "supercloseness of u_h to u_I (k=3, k=4)",
    "4": "ex2 variable coefficients, k=3 orders",
    "5": "property suite (identities, projection, solvability, reproduction, orthogonality)",
    "6": "informational beta=0 supercloseness rates (k=4, 5)",
}


def pytest_configure(config):
    config._acceptance = defaultdict(list)
    config._acceptance_notes = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        item.config._acceptance[marker.args[0]].append((item.name, report.passed))


@pytest.fixture
def note(request):
    """Attach an informational line to the test's criterion summary."""
    marker = request.node.get_closest_marker("acceptance")
    key = marker.args[0] if marker else "-"
    return lambda text: request.config._acceptance_notes[key].append(text)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config._acceptance
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key, title in CRITERIA.items():
        checks = results.get(key, [])
        if not checks:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in checks) else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {status}  {title} ({len(checks)} checks)")
        for name, ok in checks:
            if not ok:
                terminalreporter.write_line(f"    failed: {name}")
        for text in config._acceptance_notes.get(key, []):
            terminalreporter.write_line(f"    {text}")
