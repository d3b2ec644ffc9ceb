import pytest

from cachesim.core import CacheConfig
from cachesim.harness import POLICIES, RunConfig, simulate
from cachesim.traces import Trace

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def _warm_kernel():
    # pay numba compilation once, outside any timed section
    t = Trace.from_blocks([0, 1, 0, 2])
    for p in POLICIES:
        simulate(t, RunConfig(p, CacheConfig(1, 1), buffered=True, log_victims=True))


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
