import numpy as np
import pytest

from sobolev_wlab import QuadratureSpec, validate_params
from sobolev_wlab.quadrature import METHOD_TENSOR_ORACLE

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record a one-line pass/fail verdict shown in the terminal summary."""

    def _record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.line(line)


@pytest.fixture
def params1d():
    return validate_params(1, 0.3, 2.0, 0.1)


@pytest.fixture
def fast_spec():
    return QuadratureSpec(samples=32000, seed=2)


@pytest.fixture
def oracle_spec():
    return QuadratureSpec(method=METHOD_TENSOR_ORACLE, grid_points=1024)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
