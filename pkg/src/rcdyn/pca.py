"""PCA of reservoir state clouds and a linear-separability score for component pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import readout


@dataclass(eq=False)
class PcaModel:
    mean: np.ndarray  # (N,)
    components: np.ndarray  # (N, N), rows ordered by variance
    variances: np.ndarray  # (N,)


def fit_pca(states) -> PcaModel:
    X = np.asarray(states, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 points")
    P, N = X.shape
    mean = X.mean(axis=0)
    Xc = X - mean
    _, sv, Vt = np.linalg.svd(Xc, full_matrices=True)
    variances = np.zeros(N)
    variances[: sv.size] = sv**2 / P
    # largest-magnitude entry of each component positive
    pivot = np.argmax(np.abs(Vt), axis=1)
    signs = np.sign(Vt[np.arange(N), pivot])
    signs[signs == 0] = 1.0
    return PcaModel(mean, Vt * signs[:, None], variances)


def project(model: PcaModel, states, dims) -> np.ndarray:
    dims = list(dims)
    N = model.components.shape[0]
    for k in dims:
        if not 0 <= k < N:
            raise ValueError(f"component index {k} out of range [0, {N})")
    X = np.atleast_2d(np.asarray(states, dtype=float))
    return (X - model.mean) @ model.components[dims].T if dims else np.zeros((X.shape[0], 0))


def separability_score(projected, labels) -> float:
    """Training accuracy of an affine one-hot readout on the given points."""
    labels = np.asarray(labels, dtype=np.int64)
    classes = np.unique(labels)
    if classes.size < 2:
        raise ValueError("need at least two classes")
    # relabel to 0..K-1
    idx = np.searchsorted(classes, labels)
    P = np.asarray(projected, dtype=float)
    # scale columns to unit variance so the rcond cutoff sees comparable axes
    sd = P.std(axis=0)
    sd[sd == 0] = 1.0
    model = readout.fit_matrix(P / sd, idx, classes.size)
    return float(np.mean(readout.predict_labels(model, P / sd) == idx))
