import sys

import numpy as np
import pytest

from inckpp import Dataset, build_dissimilarity


def naive_matrix(points, metric="euclidean"):
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            diff = [a - b for a, b in zip(pts[i], pts[j])]
            if metric == "euclidean":
                out[i][j] = sum(d * d for d in diff) ** 0.5
            else:
                out[i][j] = sum(abs(d) for d in diff)
    return np.array(out)


def random_instance(seed, n, p=2):
    rng = np.random.default_rng(seed)
    ds = Dataset(rng.random((n, p)))
    return ds, build_dissimilarity(ds)


@pytest.fixture
def six():
    """1-D points 0, 1, 2, 10, 11, 12."""
    ds = Dataset(np.array([0.0, 1.0, 2.0, 10.0, 11.0, 12.0]))
    return ds, build_dissimilarity(ds)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in results.items():
        tag = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{tag}] {name}: {detail}")
