import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from localsat.csp import Constraint, CspInstance  # noqa: E402


@pytest.fixture
def ex5_db():
    """Direct encoding of the three-variable {1,2} instance: u,v,w -> 1..6."""
    u1, u2, v1, v2, w1, w2 = 1, 2, 3, 4, 5, 6
    return [
        (u1, u2), (v1, v2), (w1, w2),
        (-u1, -u2), (-v1, -v2), (-w1, -w2),
        (-u1, -v1), (-u2, -w1), (-u2, -v2, -w2),
    ]


@pytest.fixture
def path3():
    """v1 < v2 < v3 over {0,1,2}."""
    lt = [(a, b) for a in range(3) for b in range(3) if a < b]
    names = ["v1", "v2", "v3"]
    return CspInstance(names, {v: (0, 1, 2) for v in names}, [Constraint(["v1", "v2"], lt), Constraint(["v2", "v3"], lt)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
