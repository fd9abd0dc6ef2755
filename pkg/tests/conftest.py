import pytest

from mautomata.constructions import schreier_construct
from mautomata.data import path
from mautomata.formats import load_scenario

# scenario file -> (exhaustive length bound, expected index)
SCHREIER_CASES = {"z_2z.scn": (14, 2), "dinf.scn": (10, 2), "s3.scn": (8, 6)}


@pytest.fixture(scope="session")
def scenarios():
    return {name: load_scenario(path(name)) for name in SCHREIER_CASES}


@pytest.fixture(scope="session")
def schreier_automata(scenarios):
    out = {}
    for name, s in scenarios.items():
        out[name] = schreier_construct(s.oracle, s.embedding(), s.bounds.max_cosets)
    return out


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
