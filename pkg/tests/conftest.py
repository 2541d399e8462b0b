import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def report(request):
    """Record one acceptance line: report(number, ok, detail, seconds)."""
    lines = request.config.stash[_ACCEPTANCE]

    def _record(number: int, ok: bool, detail: str, seconds: float):
        line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.2f} s]"
        lines.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
