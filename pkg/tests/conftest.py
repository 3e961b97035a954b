import numpy as np
import pytest

from dip1d import kernels


def central_difference(f, arr, index, h=1e-5):
    """d f / d arr[index] by central differences; ``arr`` is perturbed in place."""
    old = arr[index]
    arr[index] = old + h
    up = f()
    arr[index] = old - h
    down = f()
    arr[index] = old
    return (up - down) / (2 * h)


def rel_err(a, b):
    # exact zeros against finite-difference rounding noise need an absolute floor
    return abs(a - b) / max(abs(a), abs(b), 1e-6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=["numpy", "numba"])
def each_backend(request):
    """Run a test once per kernel backend, restoring the active one afterwards."""
    if request.param == "numba" and not kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    before = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)


ACCEPTANCE_LINES: list = []


def record_criterion(number, title, ok, detail):
    """Log one acceptance line; printed again in the terminal summary."""
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
