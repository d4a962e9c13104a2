"""Hot loops of the reservoir recurrence.

Two interchangeable backends exist for each kernel: a numba ``@njit`` version
and a plain numpy version.  The numba path is used when numba imports and the
environment variable ``RCDYN_DISABLE_NUMBA`` is unset (or ``0``).  Both compute
the same map; they are not guaranteed to agree bit for bit, but each is
deterministic on its own.
"""

import os

import numpy as np

TANH = 0
SCALED_TANH = 1
LINEAR = 2
GAUSSIAN = 3
COSINE = 4


def _env_disabled() -> bool:
    return os.environ.get("RCDYN_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:
    if _env_disabled():
        raise ImportError("disabled by RCDYN_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def apply_activation_np(kind: int, u, s: float):
    if kind == TANH:
        return np.tanh(u)
    if kind == SCALED_TANH:
        return s * np.tanh(u / s)
    if kind == LINEAR:
        return np.array(u, dtype=float, copy=True)
    if kind == GAUSSIAN:
        return np.exp(-u * u)
    if kind == COSINE:
        return np.cos(u)
    raise ValueError(f"unknown activation code {kind}")


def run_np(W, bias, I, y0, X, kind, s):
    n_steps = X.shape[0]
    N = W.shape[0]
    out = np.empty((n_steps, N))
    y = y0.copy()
    for t in range(n_steps):
        u = bias + I @ X[t] + W @ y
        y = apply_activation_np(kind, u, s)
        out[t] = y
    return out


def sample_rows_np(W, bias, I, y0, X, kind, s, rows):
    """Like ``run`` but keeps only the requested (sorted) step rows."""
    N = W.shape[0]
    out = np.empty((rows.shape[0], N))
    y = y0.copy()
    k = 0
    last = rows[-1] if rows.shape[0] else -1
    for t in range(last + 1):
        u = bias + I @ X[t] + W @ y
        y = apply_activation_np(kind, u, s)
        while k < rows.shape[0] and rows[k] == t:
            out[k] = y
            k += 1
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _act(kind, u, s):
        if kind == TANH:
            return np.tanh(u)
        elif kind == SCALED_TANH:
            return s * np.tanh(u / s)
        elif kind == LINEAR:
            return u
        elif kind == GAUSSIAN:
            return np.exp(-u * u)
        else:
            return np.cos(u)

    # above this size a BLAS matvec beats the scalar loop
    BLAS_MIN_N = 32

    @njit(cache=True)
    def _advance(W, bias, I, X, t, y, ynew, kind, s):
        N = W.shape[0]
        M = I.shape[1]
        if N >= BLAS_MIN_N:
            Wy = np.dot(W, y)
            for n in range(N):
                u = bias[n] + Wy[n]
                for m in range(M):
                    u += I[n, m] * X[t, m]
                ynew[n] = _act(kind, u, s)
            return
        for n in range(N):
            u = bias[n]
            for m in range(M):
                u += I[n, m] * X[t, m]
            for j in range(N):
                u += W[n, j] * y[j]
            ynew[n] = _act(kind, u, s)

    @njit(cache=True)
    def run_nb(W, bias, I, y0, X, kind, s):
        n_steps = X.shape[0]
        N = W.shape[0]
        out = np.empty((n_steps, N))
        y = y0.copy()
        ynew = np.empty(N)
        for t in range(n_steps):
            _advance(W, bias, I, X, t, y, ynew, kind, s)
            for n in range(N):
                y[n] = ynew[n]
                out[t, n] = ynew[n]
        return out

    @njit(cache=True)
    def sample_rows_nb(W, bias, I, y0, X, kind, s, rows):
        N = W.shape[0]
        out = np.empty((rows.shape[0], N))
        y = y0.copy()
        ynew = np.empty(N)
        k = 0
        last = rows[rows.shape[0] - 1] if rows.shape[0] > 0 else -1
        for t in range(last + 1):
            _advance(W, bias, I, X, t, y, ynew, kind, s)
            for n in range(N):
                y[n] = ynew[n]
            while k < rows.shape[0] and rows[k] == t:
                for n in range(N):
                    out[k, n] = y[n]
                k += 1
        return out

    run_kernel = run_nb
    sample_rows_kernel = sample_rows_nb
    BACKEND = "numba"
else:
    run_kernel = run_np
    sample_rows_kernel = sample_rows_np
    BACKEND = "numpy"
