import numpy as np
import pytest

from rcdyn import prng
from rcdyn.topology import Reservoir, ReservoirParams

_ACCEPTANCE_LINES = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def stream():
    return prng.RngStream(12345)


def make_reservoir(W, b_w=None, y0=None, M=0, w=0.0, activation="tanh", s=1.0):
    W = np.asarray(W, dtype=float)
    N = W.shape[0]
    p = ReservoirParams(N=N, M=M, w=w, w_prime=0.0, activation=activation, s=s)
    I = np.zeros((N, M))
    I[np.arange(M), np.arange(M)] = w
    b_w = np.zeros(N) if b_w is None else np.asarray(b_w, dtype=float)
    y0 = np.zeros(N) if y0 is None else np.asarray(y0, dtype=float)
    return Reservoir(W, b_w, I, y0, p)
