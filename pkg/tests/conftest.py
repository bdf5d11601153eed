import math

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def three_blobs(seed, sep=10.0, n_each=200):
    """Unit-variance 2-d blobs on an equilateral triangle with side ``sep``."""
    rng = np.random.default_rng(seed)
    centers = sep * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    X = np.vstack([c + rng.standard_normal((n_each, 2)) for c in centers])
    y = np.repeat(np.arange(3), n_each)
    return X, y


def random_instance(rng, n_max=20, d_max=3):
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    X = rng.standard_normal((n, d))
    sigma = float(rng.uniform(0.3, 3.0))
    return X, sigma


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
