from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skgraph.raster import Bitmap

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def ascii_bitmap(text: str) -> Bitmap:
    """Bitmap from rows of '#' (ink) and '.' (paper)."""
    rows = [r.strip() for r in text.strip().splitlines()]
    return Bitmap(np.array([[c == "#" for c in r] for r in rows], dtype=np.uint8))


@pytest.fixture
def data_dir():
    return DATA


# (criterion, passed, detail) rows filled in by test_acceptance
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
