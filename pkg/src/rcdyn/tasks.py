"""Labelled episode generators for the five classification task families.

Spatial tasks (line, circle, xor, patches) draw a point ``x`` uniformly on
``[-1, 1]^2``, label it by region and repeat it for all ``T`` frames.  The
spatio-temporal task perturbs ternary prototype patterns with clipped uniform
noise.

Patches layouts and spatio-temporal prototypes are part of the *task*, not of a
particular data set: train and test sets must share them.  They can be passed
in explicitly; otherwise they are drawn from ``stream.split("task-layout")``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import prng

CIRCLE_RADIUS = math.sqrt(2.0 / math.pi)  # pi r^2 = 2 = half of the square
SPATIAL_KINDS = ("line", "circle", "xor", "patches")
TASK_KINDS = SPATIAL_KINDS + ("spatiotemporal",)


@dataclass(frozen=True)
class Episode:
    frames: np.ndarray  # (T, M)
    label: int


@dataclass(eq=False)
class Dataset:
    X: np.ndarray  # (E, T, M)
    labels: np.ndarray  # (E,)
    K: int
    kind: str
    params: dict = field(default_factory=dict)

    @property
    def E(self) -> int:
        return self.X.shape[0]

    @property
    def T(self) -> int:
        return self.X.shape[1]

    @property
    def M(self) -> int:
        return self.X.shape[2]

    def __len__(self) -> int:
        return self.E

    def __getitem__(self, i) -> Episode:
        return Episode(self.X[i], int(self.labels[i]))

    def stream(self) -> np.ndarray:
        """All frames concatenated in time, shape (E*T, M)."""
        return self.X.reshape(self.E * self.T, self.M)

    def points(self) -> np.ndarray:
        """First frame of each episode, shape (E, M) (the point for spatial tasks)."""
        return self.X[:, 0, :]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["episode", "t"] + [f"x{m}" for m in range(self.M)] + ["label"])
            for e in range(self.E):
                for t in range(self.T):
                    wr.writerow([e, t] + [repr(float(v)) for v in self.X[e, t]] + [int(self.labels[e])])

    def manifest(self, seed: int | None = None) -> str:
        doc = {"kind": self.kind, "K": self.K, "E": self.E, "T": self.T, "M": self.M}
        doc["params"] = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        if seed is not None:
            doc["seed"] = seed
        return json.dumps(doc, sort_keys=True)


def _check_n(n_episodes: int, T: int):
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    if T < 1:
        raise ValueError("T must be >= 1")


def _constant_frames(points: np.ndarray, T: int) -> np.ndarray:
    return np.repeat(points[:, None, :], T, axis=1)


def _uniform_points(stream: prng.RngStream, n: int) -> np.ndarray:
    return prng.uniform(stream, -1.0, 1.0, (n, 2))


def label_line(x) -> np.ndarray:
    x = np.atleast_2d(x)
    return (x[:, 0] + x[:, 1] > 0).astype(np.int64)


def label_circle(x) -> np.ndarray:
    x = np.atleast_2d(x)
    return (x[:, 0] ** 2 + x[:, 1] ** 2 < CIRCLE_RADIUS**2).astype(np.int64)


def label_xor(x) -> np.ndarray:
    x = np.atleast_2d(x)
    return (x[:, 0] * x[:, 1] > 0).astype(np.int64)


def _spatial(kind, labeler, n_episodes, T, stream):
    _check_n(n_episodes, T)
    pts = _uniform_points(stream, n_episodes)
    return Dataset(_constant_frames(pts, T), labeler(pts), 2, kind, {"T": T})


def gen_line(n_episodes: int, T: int, stream: prng.RngStream) -> Dataset:
    return _spatial("line", label_line, n_episodes, T, stream)


def gen_circle(n_episodes: int, T: int, stream: prng.RngStream) -> Dataset:
    return _spatial("circle", label_circle, n_episodes, T, stream)


def gen_xor(n_episodes: int, T: int, stream: prng.RngStream) -> Dataset:
    return _spatial("xor", label_xor, n_episodes, T, stream)


# -- patches -----------------------------------------------------------------


def patch_assignment(grid: int, K: int, stream: prng.RngStream) -> np.ndarray:
    """Random grid x grid class map with cell counts per class differing by <= 1.

    ``assignment[i, j]`` is the class of the cell with x0 in column ``i`` and
    x1 in row ``j``.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if K < 2 or K > grid * grid:
        raise ValueError(f"need 2 <= K <= grid^2, got K={K}")
    base = np.arange(grid * grid) % K
    perm = np.argsort(stream.random(grid * grid), kind="stable")
    return base[perm].reshape(grid, grid)


def cell_index(v, grid: int) -> np.ndarray:
    """Cell index along one axis; points on a cell border go to the lower cell."""
    v = np.asarray(v, dtype=float)
    idx = np.ceil((v + 1.0) * grid / 2.0).astype(np.int64) - 1
    return np.clip(idx, 0, grid - 1)


def label_patches(x, assignment: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    grid = assignment.shape[0]
    return assignment[cell_index(x[:, 0], grid), cell_index(x[:, 1], grid)].astype(np.int64)


def _balanced_labels(n: int, K: int, stream: prng.RngStream) -> np.ndarray:
    labels = np.arange(n) % K
    return labels[np.argsort(stream.random(n), kind="stable")]


def gen_patches(
    n_episodes: int,
    T: int,
    stream: prng.RngStream,
    grid: int = 3,
    K: int = 3,
    assignment: np.ndarray | None = None,
) -> Dataset:
    _check_n(n_episodes, T)
    if assignment is None:
        assignment = patch_assignment(grid, K, stream.split(prng.TASK_LAYOUT))
    assignment = np.asarray(assignment, dtype=np.int64)
    grid = assignment.shape[0]
    if K > grid * grid:
        raise ValueError("K > grid^2")
    counts = np.bincount(assignment.ravel(), minlength=K)
    pts_stream = stream.split("points")
    if np.all(counts == counts[0]):
        pts = _uniform_points(pts_stream, n_episodes)
        labels = label_patches(pts, assignment)
    else:
        # unequal areas: shuffled round-robin labels, positions by rejection
        labels = _balanced_labels(n_episodes, K, stream.split("labels"))
        pts = np.empty((n_episodes, 2))
        todo = np.arange(n_episodes)
        while todo.size:
            cand = _uniform_points(pts_stream, todo.size)
            ok = label_patches(cand, assignment) == labels[todo]
            pts[todo[ok]] = cand[ok]
            todo = todo[~ok]
    params = {"T": T, "grid": grid, "assignment": assignment}
    return Dataset(_constant_frames(pts, T), labels, K, "patches", params)


# -- spatio-temporal ------------------------------------------------------------


def spatiotemporal_prototypes(
    stream: prng.RngStream, K: int = 3, M: int = 2, T: int = 6, n_zero: int = 1, max_tries: int = 1000
) -> np.ndarray:
    """K ternary (T, M) patterns, last ``n_zero`` frames zero, pairwise distinct
    in at least ceil(M*T/3) entries."""
    if not 0 <= n_zero < T:
        raise ValueError("need 0 <= n_zero < T")
    need = math.ceil(M * T / 3)
    live = T - n_zero
    for _ in range(max_tries):
        u = stream.random((K, live, M))
        protos = np.zeros((K, T, M))
        protos[:, :live, :] = np.floor(u * 3.0) - 1.0
        ok = all(
            np.count_nonzero(protos[i] != protos[j]) >= need for i in range(K) for j in range(i + 1, K)
        )
        if ok:
            return protos
    raise RuntimeError(f"no distinct prototype set found in {max_tries} tries")


def gen_spatiotemporal(
    n_episodes: int,
    stream: prng.RngStream,
    eta: float = 0.4,
    n_zero: int = 1,
    K: int = 3,
    M: int = 2,
    T: int = 6,
    prototypes: np.ndarray | None = None,
) -> Dataset:
    _check_n(n_episodes, T)
    if eta < 0:
        raise ValueError("eta must be >= 0")
    if prototypes is None:
        prototypes = spatiotemporal_prototypes(stream.split(prng.TASK_LAYOUT), K, M, T, n_zero)
    prototypes = np.asarray(prototypes, dtype=float)
    K, T, M = prototypes.shape
    labels = _balanced_labels(n_episodes, K, stream.split("labels"))
    X = prototypes[labels].copy()
    if eta > 0:
        X += prng.uniform(stream.split("noise"), -eta, eta, X.shape)
        np.clip(X, -1.0, 1.0, out=X)
    params = {"T": T, "eta": eta, "n_zero": n_zero, "prototypes": prototypes}
    return Dataset(X, labels, K, "spatiotemporal", params)


# -- task descriptors -----------------------------------------------------------


@dataclass(frozen=True)
class TaskSpec:
    """A task family plus its parameters; ``layout`` fixes patches/prototypes."""

    kind: str = "circle"
    T: int = 6
    grid: int = 3
    K: int = 3
    eta: float = 0.4
    n_zero: int = 1

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task {self.kind!r}; choose from {TASK_KINDS}")

    @property
    def n_classes(self) -> int:
        return self.K if self.kind in ("patches", "spatiotemporal") else 2

    def layout(self, stream: prng.RngStream):
        if self.kind == "patches":
            return patch_assignment(self.grid, self.K, stream)
        if self.kind == "spatiotemporal":
            return spatiotemporal_prototypes(stream, self.K, 2, self.T, self.n_zero)
        return None

    def generate(self, n_episodes: int, stream: prng.RngStream, layout=None) -> Dataset:
        if self.kind == "line":
            return gen_line(n_episodes, self.T, stream)
        if self.kind == "circle":
            return gen_circle(n_episodes, self.T, stream)
        if self.kind == "xor":
            return gen_xor(n_episodes, self.T, stream)
        if self.kind == "patches":
            return gen_patches(n_episodes, self.T, stream, self.grid, self.K, assignment=layout)
        return gen_spatiotemporal(
            n_episodes, stream, self.eta, self.n_zero, self.K, 2, self.T, prototypes=layout
        )

    def train_test(self, stream: prng.RngStream, E_train: int, E_test: int):
        layout = self.layout(stream.split(prng.TASK_LAYOUT))
        train = self.generate(E_train, stream.split(prng.TASK_TRAIN), layout)
        test = self.generate(E_test, stream.split(prng.TASK_TEST), layout)
        return train, test
