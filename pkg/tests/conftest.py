import numpy as np
import pytest

from minextrap.measures import DiscreteMeasure, FrequencySet

L1 = FrequencySet([-1, 0, 1])


@pytest.fixture
def lam():
    return L1


@pytest.fixture
def e1():
    return DiscreteMeasure([0, 0.5], [1, 1])


@pytest.fixture
def e2():
    return DiscreteMeasure([0, 0.5], [1, -1])


@pytest.fixture
def e3():
    return DiscreteMeasure([0, 0.25], [1, -1])


@pytest.fixture
def e4():
    return DiscreteMeasure([0, 1 / 3], [1, np.exp(1j * np.pi / 3)])


@pytest.fixture
def e4_phi():
    from minextrap.measures import TrigPolynomial

    s = 3 * np.sqrt(3)
    return TrigPolynomial([1, 0, -1], [2 / s * np.exp(-1j * np.pi / 6),
                                       4 / s * np.exp(1j * np.pi / 6), -1j / s])


class _Criterion:
    def __init__(self, config, number, title):
        self.config, self.number, self.title = config, number, title

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        self.config._acceptance_lines.append(f"criterion {self.number:>2}: {status}  {self.title}")
        return False


@pytest.fixture
def criterion(request):
    def make(number, title):
        return _Criterion(request.config, number, title)
    return make


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(config._acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
