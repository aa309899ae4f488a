import random
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


def seeded_bytes(seed):
    """Deterministic stand-in for os.urandom."""
    return random.Random(seed).randbytes


@pytest.fixture
def rng():
    return np.random.default_rng(20171016)


@pytest.fixture
def noise_cover(rng):
    return rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)


@pytest.fixture
def rgba_cover(rng):
    img = rng.integers(0, 256, size=(40, 50, 4), dtype=np.uint8)
    img[..., 3] = rng.integers(0, 256, size=(40, 50), dtype=np.uint8)
    return img


@pytest.fixture
def records():
    return {p.name: p.read_bytes() for p in sorted((DATA / "records").iterdir())}


_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, {"title": title, "passed": True, "tests": 0})
    if report.when == "call":
        entry["tests"] += 1
    if report.failed or report.skipped:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        status = "PASS" if entry["passed"] and entry["tests"] else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {n}: {entry['title']}")
