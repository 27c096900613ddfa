import math

import numpy as np
import pytest

from riesz_explicit.singular_series import sieve_singular_series
from riesz_explicit.zeta_engine import default_zero_table


@pytest.fixture(scope="session")
def table_1e6():
    return sieve_singular_series(10**6)


@pytest.fixture(scope="session")
def exact_table():
    return sieve_singular_series(10**4, exact_mode=True)


@pytest.fixture(scope="session")
def zeros():
    return default_zero_table(100)


@pytest.fixture(scope="session")
def log_grid():
    xs = np.exp(np.linspace(math.log(1e3), math.log(1e6), 200))
    xs[0], xs[-1] = 1e3, 1e6
    return xs


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the terminal summary."""

    def _report(label: str, ok: bool, detail: str) -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":").split(".")[0])):
            terminalreporter.write_line(line)
