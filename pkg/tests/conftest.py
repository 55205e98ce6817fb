import pytest

from hypersched import FlowSpec, Hypercycle, build_tecg
from hypersched.harness import fig1_line, fig1b_diamond, single_link


@pytest.fixture
def fig1():
    """Line s-a-d with the two flows of the motivating example (hypercycle 6)."""
    flows = [FlowSpec(1, "s", "d", 1, 2, 2), FlowSpec(2, "s", "d", 2, 3, 3)]
    return build_tecg(fig1_line(), Hypercycle(6)), flows


@pytest.fixture
def diamond():
    return build_tecg(fig1b_diamond(), Hypercycle(4))


@pytest.fixture
def link105():
    return build_tecg(single_link(), Hypercycle(105))


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion, then assert it."""
    log = request.config.stash[_ACCEPTANCE_KEY]

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        log.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
