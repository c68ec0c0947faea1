"""Shared pytest plumbing.

The acceptance tests double as a release gate, so their outcomes are
echoed as one line each in the terminal summary regardless of verbosity.
Hypothesis runs derandomized to keep test output stable between runs.
"""

from hypothesis import settings

settings.register_profile("stable", derandomize=True, max_examples=60)
settings.load_profile("stable")

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        if report.skipped:
            _acceptance_outcomes[name] = "SKIP"
        else:
            _acceptance_outcomes[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and not report.passed:
        _acceptance_outcomes[name] = "SKIP" if report.skipped else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_acceptance_outcomes):
        terminalreporter.write_line(f"{_acceptance_outcomes[name]:4s}  {name}")
