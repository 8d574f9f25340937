"""Shared fixtures: seeded generators, the acceptance line log and the calibration log."""

import json
from pathlib import Path

import numpy as np
import pytest

from nsgap.rng import cell_rng

ACCEPTANCE_LINES: list[str] = []
CALIBRATION: dict = {}


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def record_calibration(key: str, value) -> None:
    CALIBRATION[key] = value


@pytest.fixture
def rng(request) -> np.random.Generator:
    """A generator keyed by the test's node id, stable across runs and orderings."""
    digest = sum(ord(c) * (i + 1) for i, c in enumerate(request.node.nodeid)) % (2**32)
    return cell_rng(20240917, digest)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
    if CALIBRATION:
        path = Path(terminalreporter.config.rootpath) / "calibration.json"
        path.write_text(json.dumps(CALIBRATION, indent=2, sort_keys=True) + "\n")
        terminalreporter.write_line(f"calibration constants written to {path.name}")
