import os
import subprocess
import sys

import numpy as np
import pytest

from rcdyn import _kernels, prng
from rcdyn.topology import Activation, ReservoirParams, sample_reservoir


@pytest.mark.parametrize("kind", list(Activation))
def test_backends_agree(kind):
    res = sample_reservoir(ReservoirParams(w=0.4, b=0.2, activation=kind, s=2.0), prng.RngStream(1))
    X = prng.uniform(prng.RngStream(2), -1, 1, (300, 2))
    a = _kernels.run_np(res.W, res.b_w, res.I, res.y0, X, kind.code, 2.0)
    rows = np.array([5, 11, 299])
    s_np = _kernels.sample_rows_np(res.W, res.b_w, res.I, res.y0, X, kind.code, 2.0, rows)
    np.testing.assert_array_equal(s_np, a[rows])
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    b = _kernels.run_nb(res.W, res.b_w, res.I, res.y0, X, kind.code, 2.0)
    # summation order differs; chaotic growth is bounded over short horizons at w=0.4
    np.testing.assert_allclose(a[:50], b[:50], atol=1e-12)
    s_nb = _kernels.sample_rows_nb(res.W, res.b_w, res.I, res.y0, X, kind.code, 2.0, rows)
    np.testing.assert_array_equal(s_nb, b[rows])


def test_env_flag_selects_numpy():
    env = dict(os.environ, RCDYN_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import rcdyn; print(rcdyn.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_end_to_end():
    code = (
        "from rcdyn import harness;"
        "cfg = harness.ExperimentConfig(experiment='accuracy-scan', task='xor', w=[0.1], b=[0.0], R=2, E_train=300, E_test=300);"
        "print(harness.accuracy_scan(cfg).rows[0]['A_mean'])"
    )
    env = dict(os.environ, RCDYN_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert 0.8 < float(out.stdout) <= 1.0


def test_backends_agree_large_network():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    res = sample_reservoir(ReservoirParams(N=64, w=0.05), prng.RngStream(3))
    X = prng.uniform(prng.RngStream(4), -1, 1, (100, 2))
    a = _kernels.run_np(res.W, res.b_w, res.I, res.y0, X, 0, 1.0)
    b = _kernels.run_nb(res.W, res.b_w, res.I, res.y0, X, 0, 1.0)
    np.testing.assert_allclose(a, b, atol=1e-12)
