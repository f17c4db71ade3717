from fractions import Fraction

import numpy as np
import pytest
import sympy

from zeroassign.numkit import Polynomial
from zeroassign.sysmodel import StateSpaceSystem

# worked example: n = 4, r = 2
A_EX = np.array([[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]], dtype=float)
B_EX = np.array([[1, 0], [0, 0], [0, 1], [0, 1]], dtype=float)
M_EX = np.array([[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]], dtype=float)
H_EX1 = np.array([[1, 0, 1, -1], [0, 5, 6, -5]], dtype=float)
H_EX2 = np.array([[0, 2, 0, 1], [0, 0, 1, -1]], dtype=float)


def exact_charpoly(a):
    """Characteristic polynomial of a float matrix in rational arithmetic.

    Large feedback gains make ``a - b f^T`` heavily cancelling, so a float
    evaluation would measure its own rounding rather than the gain.
    """
    m = a.shape[0]
    mat = sympy.Matrix(m, m, lambda i, j: sympy.Rational(Fraction(float(a[i, j]))))
    coeffs = mat.charpoly(sympy.Symbol("s")).all_coeffs()[::-1]
    return Polynomial([float(c) for c in coeffs])


_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def pair():
    return StateSpaceSystem(A_EX, B_EX)


@pytest.fixture
def ex1_system():
    return StateSpaceSystem(A_EX, B_EX, H_EX1)


@pytest.fixture
def ex2_system():
    return StateSpaceSystem(A_EX, B_EX, H_EX2)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")
    config.stash[_RESULTS] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    item.config.stash[_RESULTS].append((number, title, rep.passed))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(results):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}")
