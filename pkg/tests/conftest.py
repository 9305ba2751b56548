import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hillgraph import Potential, band_structure  # noqa: E402


@pytest.fixture(scope="session")
def free_bs():
    return band_structure(Potential.zero(), (-1.0, 400.0))


@pytest.fixture(scope="session")
def cos31_bs():
    return band_structure(Potential.cosine(3.0, 1), (-5.0, 400.0))


@pytest.fixture(scope="session")
def cos11_bs():
    return band_structure(Potential.cosine(1.0, 1), (-2.0, 150.0))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
