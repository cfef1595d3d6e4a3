import numpy as np
import pytest

from quatcomp.tensor import QTensor3

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def random_quat(rng, shape=()):
    return rng.normal(size=(*shape, 4))


def random_tensor(rng, dims):
    i1, i2, i3 = dims
    return QTensor3(rng.normal(size=(i3, i1, i2, 4)))


def rel(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / scale)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
