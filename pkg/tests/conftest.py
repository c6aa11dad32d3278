import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, list[tuple[str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcomes = [o for _, o in _criteria[number]]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        names = ", ".join(name for name, _ in _criteria[number])
        terminalreporter.write_line(f"criterion {number:2d}: {status}  ({names})")


def random_dissimilarity(rng, n):
    D = rng.random((n, n))
    D = np.triu(D, 1)
    return D + D.T


def euclidean(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    diff = x[:, None, :] - x[None, :, :]
    D = np.sqrt((diff**2).sum(-1))
    D = np.triu(D, 1)
    return D + D.T


@pytest.fixture
def line_points():
    """1-D points {0, 1, 10, 11} as a distance matrix, with the two-pair labels."""
    return euclidean([0.0, 1.0, 10.0, 11.0]), np.array([1, 1, 2, 2])
