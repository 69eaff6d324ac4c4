import numpy as np
import pytest

from cohgme.core import PureState


@pytest.fixture
def ghz3():
    v = np.zeros(8)
    v[0] = v[7] = 1 / np.sqrt(2)
    return PureState((2, 2, 2), v)


@pytest.fixture
def w3():
    v = np.zeros(8)
    v[[1, 2, 4]] = 1 / np.sqrt(3)
    return PureState((2, 2, 2), v)


def svd_schmidt(psi, gamma):
    """Independent Schmidt vector: squared singular values of the reshaped amplitudes."""
    n = psi.n_parties
    t = psi.amplitudes.reshape(psi.dims)
    t = np.transpose(t, [k - 1 for k in gamma.gamma] + [k - 1 for k in gamma.complement])
    dg = int(np.prod([psi.dims[k - 1] for k in gamma.gamma]))
    s = np.linalg.svd(t.reshape(dg, -1), compute_uv=False) ** 2
    assert n >= 2
    return np.sort(s)[::-1]


ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    """Store and print one pass/fail line for an acceptance criterion."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
