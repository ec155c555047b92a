import numpy as np
import pytest

from samplecomp.core import FiniteClass, Sample


def random_class(rng, n_points, n_labels, n_hyp):
    tables = rng.integers(0, n_labels, size=(n_hyp, n_points))
    return FiniteClass(n_points, list(range(n_labels)), [tuple(t) for t in tables])


def realizable_sample(rng, H, m):
    h = H[int(rng.integers(len(H)))]
    xs = rng.integers(0, H.domain_size, size=m)
    return Sample(xs, [h(int(x)) for x in xs]), h


def random_sample(rng, H, m):
    xs = rng.integers(0, H.domain_size, size=m)
    ys = rng.integers(0, len(H.labels), size=m)
    return Sample(xs, ys)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def constant_class():
    return FiniteClass(3, ["a", "b", "c"], [(i, i, i) for i in range(3)])


@pytest.fixture
def thresholds():
    # h_t(x) = 1 iff x >= t, t = 0..5, on 5 points
    return FiniteClass(5, [0, 1], [tuple(int(x >= t) for x in range(5)) for t in range(6)])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
