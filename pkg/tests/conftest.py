import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polychaos.compose import compose  # noqa: E402
from polychaos.modelir import example_system  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def decay_system():
    return example_system()


@pytest.fixture(scope="session")
def decay_p3(decay_system):
    return compose(decay_system, 3)


def dirac_doc():
    return {
        "states": [
            {"name": "x", "pdf": "dirac", "data": [2], "rhs": "-a*x + b*y"},
            {"name": "y", "pdf": "dirac", "data": [1], "rhs": "a*x*y - y"},
        ],
        "parameters": [
            {"name": "a", "pdf": "dirac", "data": [0.5]},
            {"name": "b", "pdf": "dirac", "data": [0.25]},
        ],
    }


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; returns the verdict."""

    def report(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE[number])
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
