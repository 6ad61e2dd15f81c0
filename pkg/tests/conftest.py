import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line; it is printed inline and again in the summary."""
    def record(num, ok, detail, seconds):
        line = f"CRITERION {num:>2}: {'PASS' if ok else 'FAIL'}  ({seconds:.1f}s) {detail}"
        _LINES.append((num, line))
        capman = request.config.pluginmanager.getplugin("capturemanager")
        with capman.global_and_fixture_disabled():
            print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
