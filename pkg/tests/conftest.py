import pytest

from continuants.constructions import SeedCache


@pytest.fixture
def memory_cache():
    return SeedCache(None)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py::test_criterion_" in rep.nodeid and rep.when == "call":
                n = int(rep.nodeid.split("test_criterion_")[1].split("_")[0])
                lines.append((n, f"criterion {n}: {'PASS' if rep.passed else 'FAIL'}  ({rep.nodeid.split('::')[1]})"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
