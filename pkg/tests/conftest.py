import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

# (criterion, passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


class _Criterion:
    def __init__(self, label: str):
        self.label = label
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)


@pytest.fixture
def criterion(request):
    """Records one acceptance line: PASS when the test body finishes, FAIL otherwise."""
    c = _Criterion(request.node.get_closest_marker("criterion").args[0])
    yield c
    rep = getattr(request.node, "rep_call", None)
    ok = bool(rep is not None and rep.passed)
    line = (c.label, ok, "; ".join(c.details))
    ACCEPTANCE.append(line)
    print(f"\n{'PASS' if ok else 'FAIL'} {c.label}: {line[2]}")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0].split()[0][1:])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  [{detail}]")
