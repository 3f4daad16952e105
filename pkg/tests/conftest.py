import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# acceptance criteria record their verdicts here; printed at the end of the run
CRITERIA: dict = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        CRITERIA.setdefault(number, []).append((ok, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        results = CRITERIA[number]
        ok = all(r for r, _ in results)
        fails = [line for r, line in results if not r]
        summary = f"{'PASS' if ok else 'FAIL'} criterion {number} ({len(results)} checks)"
        terminalreporter.write_line(summary)
        for line in fails:
            terminalreporter.write_line("    " + line)
