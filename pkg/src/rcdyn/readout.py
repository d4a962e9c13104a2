"""Affine readout fitted in one shot with an SVD pseudoinverse, argmax decision."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .reservoir import sample_states
from .tasks import Dataset
from .topology import Reservoir

DEFAULT_RCOND = 1e-10


@dataclass(eq=False)
class StateMatrix:
    Y: np.ndarray  # (E-1, N)
    labels: np.ndarray  # (E-1,)

    def __len__(self) -> int:
        return self.Y.shape[0]


@dataclass(eq=False)
class ReadoutModel:
    O: np.ndarray  # (K, N)
    b_o: np.ndarray  # (K,)

    @property
    def K(self) -> int:
        return self.O.shape[0]

    def scores(self, Y) -> np.ndarray:
        """z = O y + b_o for each row of Y."""
        return np.atleast_2d(Y) @ self.O.T + self.b_o

    def to_json(self) -> str:
        return json.dumps({"O": self.O.tolist(), "b_o": self.b_o.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "ReadoutModel":
        d = json.loads(text)
        return cls(np.array(d["O"], dtype=float), np.array(d["b_o"], dtype=float))


def readout_steps(E: int, T: int) -> np.ndarray:
    """1-based steps at which post-episode states are read: (e+1)*T, e < E-1.

    That is the state right after the last frame of episode e was fed in.
    """
    return (np.arange(E - 1) + 1) * T


def collect_states(res: Reservoir, data: Dataset) -> StateMatrix:
    if data.E < 2:
        raise ValueError("need at least 2 episodes to read out E-1 states")
    Y = sample_states(res, data.stream(), readout_steps(data.E, data.T))
    return StateMatrix(Y, np.asarray(data.labels[:-1], dtype=np.int64))


def one_hot(labels, K: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    Z = np.zeros((labels.size, K))
    Z[np.arange(labels.size), labels] = 1.0
    return Z


def pseudoinverse(A: np.ndarray, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Moore-Penrose inverse V S^+ U^T; singular values <= rcond*s_max count as zero.

    The default cutoff sits well above float64 round-off.  Much smaller values let
    the readout exploit vanishingly small signals in saturated reservoirs.
    """
    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    if sv.size == 0:
        return np.zeros(A.shape[::-1])
    cutoff = rcond * sv[0]
    inv = np.zeros_like(sv)
    keep = sv > cutoff
    inv[keep] = 1.0 / sv[keep]
    return (Vt.T * inv) @ U.T


def fit_matrix(Y, labels, K: int, rcond: float = DEFAULT_RCOND) -> ReadoutModel:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] == 0:
        raise ValueError("need a non-empty 2-d state matrix")
    Z = one_hot(labels, K)
    Y_bias = np.hstack([Y, np.ones((Y.shape[0], 1))])
    W_bias = pseudoinverse(Y_bias, rcond) @ Z  # (N+1, K)
    if not np.all(np.isfinite(W_bias)):
        raise FloatingPointError("non-finite readout weights")
    N = Y.shape[1]
    return ReadoutModel(O=W_bias[:N].T.copy(), b_o=W_bias[N].copy())


def fit(states: StateMatrix, K: int, rcond: float = DEFAULT_RCOND) -> ReadoutModel:
    return fit_matrix(states.Y, states.labels, K, rcond)


def predict(model: ReadoutModel, y):
    """Scores and argmax label for one state vector; ties go to the lowest index."""
    z = model.O @ np.asarray(y, dtype=float) + model.b_o
    return z, int(np.argmax(z))


def predict_labels(model: ReadoutModel, Y) -> np.ndarray:
    return np.argmax(model.scores(Y), axis=1)


def evaluate(model: ReadoutModel, states: StateMatrix) -> float:
    if len(states) == 0:
        raise ValueError("no states to evaluate")
    return float(np.mean(predict_labels(model, states.Y) == states.labels))


def fit_direct(inputs, labels, K: int, rcond: float = DEFAULT_RCOND) -> ReadoutModel:
    """Readout fed with raw input vectors, one row per episode, no reservoir."""
    return fit_matrix(inputs, labels, K, rcond)
