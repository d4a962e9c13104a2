"""Scalar diagnostics of activation traces."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .reservoir import ActivationTrace


@dataclass(frozen=True)
class DynamicsReport:
    F: float
    C: float
    alpha: float
    rms: float
    n_steps: int
    N: int

    def as_dict(self) -> dict:
        return asdict(self)


def _steps(trace) -> np.ndarray:
    Y = trace.steps if isinstance(trace, ActivationTrace) else np.asarray(trace, dtype=float)
    if Y.ndim != 2:
        raise ValueError("trace must be 2-d (steps x neurons)")
    return Y


def fluctuation(trace) -> float:
    """Mean over neurons of the temporal (population) standard deviation."""
    Y = _steps(trace)
    if Y.shape[0] < 2:
        raise ValueError("fluctuation needs at least 2 steps")
    # shifting by the first row leaves std unchanged and makes constants exact
    return float(np.mean(np.std(Y - Y[0], axis=0)))


def correlation(trace) -> float:
    """Mean over all ordered pairs (m, n) of <y_m(t) y_n(t+1)>_t.

    Raw product moments: no centering, no normalisation, self-pairs included.
    """
    Y = _steps(trace)
    if Y.shape[0] < 2:
        raise ValueError("correlation needs at least 2 steps")
    Cmn = Y[:-1].T @ Y[1:] / (Y.shape[0] - 1)
    return float(np.mean(Cmn))


def nonlinearity(trace) -> float:
    """alpha = f_A - f_B + f_C with bins [-1,-0.5), [-0.5,0.5], (0.5,1].

    Values beyond +-1 fall in the outer bins.
    """
    Y = _steps(trace)
    if Y.size == 0:
        raise ValueError("empty trace")
    y = Y.ravel()
    f_b = np.count_nonzero(np.abs(y) <= 0.5) / y.size
    return float(1.0 - 2.0 * f_b)


def rms_activation(trace) -> float:
    Y = _steps(trace)
    if Y.size == 0:
        raise ValueError("empty trace")
    return float(np.sqrt(np.mean(Y * Y)))


def report(trace) -> DynamicsReport:
    Y = _steps(trace)
    return DynamicsReport(
        F=fluctuation(Y),
        C=correlation(Y),
        alpha=nonlinearity(Y),
        rms=rms_activation(Y),
        n_steps=Y.shape[0],
        N=Y.shape[1],
    )
