"""Synchronous update of the reservoir state and full activation traces.

Timing convention: the state after step ``t`` (``t = 1..n_steps``) is computed
from the state after step ``t-1`` and the input frame ``x[t-1]``.  A trace
holds the rows ``y(1) .. y(n_steps)``; the initial state ``y(0) = res.y0`` is
not stored, so ``trace.steps[t - 1]`` is ``y(t)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .topology import Activation, Reservoir


@dataclass(frozen=True, eq=False)
class ActivationTrace:
    steps: np.ndarray  # (n_steps, N)
    inputs_applied: bool = False

    @property
    def n_steps(self) -> int:
        return self.steps.shape[0]

    @property
    def N(self) -> int:
        return self.steps.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t"] + [f"y{n}" for n in range(self.N)])
            for t, row in enumerate(self.steps, start=1):
                wr.writerow([t] + [repr(float(v)) for v in row])


def activation(kind: Activation | str, u, s: float = 1.0):
    kind = Activation(kind)
    if kind is Activation.SCALED_TANH and not s > 0:
        raise ValueError("s must be positive")
    out = _kernels.apply_activation_np(kind.code, np.asarray(u, dtype=float), s)
    return float(out) if np.ndim(out) == 0 else out


def step(res: Reservoir, y_prev, x_prev=None) -> np.ndarray:
    y_prev = np.asarray(y_prev, dtype=float)
    if y_prev.shape != (res.N,):
        raise ValueError(f"y_prev has shape {y_prev.shape}, expected ({res.N},)")
    if x_prev is None:
        x_prev = np.zeros(res.M)
    x_prev = np.asarray(x_prev, dtype=float)
    if x_prev.shape != (res.M,):
        raise ValueError(f"x_prev has shape {x_prev.shape}, expected ({res.M},)")
    u = res.b_w + res.I @ x_prev + res.W @ y_prev
    p = res.params
    return _kernels.apply_activation_np(p.activation.code, u, p.s)


def _input_block(res: Reservoir, inputs, n_steps: int) -> np.ndarray:
    if inputs is None:
        return np.zeros((n_steps, res.M))
    X = np.asarray(inputs, dtype=float)
    if X.ndim != 2 or X.shape[1] != res.M:
        raise ValueError(f"inputs must have shape (n, {res.M}), got {X.shape}")
    if X.shape[0] < n_steps:
        raise ValueError(f"input supplies {X.shape[0]} frames, {n_steps} needed")
    return np.ascontiguousarray(X[:n_steps])


def run(res: Reservoir, inputs=None, n_steps: int | None = None) -> ActivationTrace:
    """Iterate the reservoir from ``res.y0``.

    ``inputs`` is an (n, M) array of frames or None for free running.  If
    ``n_steps`` is omitted it defaults to the number of input frames.
    """
    if n_steps is None:
        if inputs is None:
            raise ValueError("n_steps is required without inputs")
        n_steps = len(inputs)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    X = _input_block(res, inputs, n_steps)
    p = res.params
    Y = _kernels.run_kernel(res.W, res.b_w, res.I, res.y0, X, p.activation.code, float(p.s))
    return ActivationTrace(Y, inputs_applied=inputs is not None)


def sample_states(res: Reservoir, inputs, steps) -> np.ndarray:
    """States ``y(t)`` for the given 1-based steps, without storing the trace."""
    steps = np.asarray(steps, dtype=np.int64)
    if steps.size and (np.any(np.diff(steps) < 0) or steps[0] < 1):
        raise ValueError("steps must be sorted and >= 1")
    n = int(steps[-1]) if steps.size else 0
    X = _input_block(res, inputs, n)
    p = res.params
    return _kernels.sample_rows_kernel(
        res.W, res.b_w, res.I, res.y0, X, p.activation.code, float(p.s), steps - 1
    )


def diff_traces(a: ActivationTrace, b: ActivationTrace, neuron_subset=None) -> np.ndarray:
    if a.steps.shape != b.steps.shape:
        raise ValueError(f"trace shapes differ: {a.steps.shape} vs {b.steps.shape}")
    d = a.steps - b.steps
    if neuron_subset is None:
        return d
    return d[:, list(neuron_subset)]
