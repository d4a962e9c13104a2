"""Experiment orchestration: ensembles of seeded reservoirs over parameter grids.

Seeding scheme: ensemble member ``r`` of a run with root seed ``seed`` uses
``RngStream(seed).split("member").split(r)``, with children ``"reservoir"`` and
``"task"``.  Member streams do not depend on the grid point, so every grid
point sees the same underlying random numbers (magnitudes scale with ``w``,
signs flip monotonically with ``b``) and a single row can be recomputed in
isolation.
"""

from __future__ import annotations

import concurrent.futures as cf
import itertools
import math
import os
from dataclasses import dataclass, field, asdict, fields

import numpy as np

from . import measures, pca, prng, readout
from . import reservoir as rv
from .tasks import SPATIAL_KINDS, TaskSpec
from .topology import Activation, ReservoirParams, Reservoir, sample_reservoir

METRICS = ("F", "C", "alpha", "A", "rms")


class ScanError(RuntimeError):
    """Some grid points failed; ``partial`` holds the rows that succeeded."""

    def __init__(self, message, partial: "ScanResult", failures: list):
        super().__init__(message)
        self.partial = partial
        self.failures = failures


@dataclass
class ExperimentConfig:
    experiment: str = "dynamics-scan"
    seed: int = 0
    R: int = 100
    N: int = 10
    M: int = 2
    w: list = field(default_factory=lambda: [0.1, 0.3, 0.5])
    b: list = field(default_factory=lambda: [round(-1 + 0.1 * i, 10) for i in range(21)])
    s: list = field(default_factory=lambda: [1.0])
    w_prime: float = 0.1
    d: float = 1.0
    activation: str = "tanh"
    task: str = "circle"
    T: int = 6
    grid: int = 3
    K: int = 3
    eta: float = 0.4
    n_zero: int = 1
    E_train: int = 1000
    E_test: int = 1000
    n_steps: int = 500
    inputs: list = field(default_factory=lambda: [False])
    discard: int = 0
    rcond: float = readout.DEFAULT_RCOND
    threshold: float = 1e-3
    settle: int = 50  # leading steps left out of the free-vs-driven difference
    pairs: list = field(default_factory=lambda: [[0, 1], [1, 2], [2, 3], [3, 4]])
    dense_grid: int = 101
    jobs: int = 0
    out: str = ""

    def __post_init__(self):
        for name in ("w", "b", "s", "inputs"):
            v = getattr(self, name)
            if not isinstance(v, (list, tuple)):
                v = [v]
            if len(v) == 0:
                raise ValueError(f"grid {name!r} is empty")
            setattr(self, name, list(v))
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if self.settle < 0 or self.discard < 0:
            raise ValueError("settle and discard must be >= 0")
        self.w = [float(x) for x in self.w]
        self.b = [float(x) for x in self.b]
        self.s = [float(x) for x in self.s]
        self.inputs = [bool(x) for x in self.inputs]

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def params(self, w, b, s, **changes) -> ReservoirParams:
        p = ReservoirParams(
            N=self.N, M=self.M, w=w, w_prime=self.w_prime, d=self.d, b=b,
            activation=Activation(self.activation), s=s,
        )
        return p.replace(**changes) if changes else p

    def task_spec(self, kind: str | None = None) -> TaskSpec:
        return TaskSpec(kind=kind or self.task, T=self.T, grid=self.grid, K=self.K, eta=self.eta, n_zero=self.n_zero)

    @property
    def n_jobs(self) -> int:
        return self.jobs if self.jobs and self.jobs > 0 else (os.cpu_count() or 1)


@dataclass
class ScanResult:
    experiment: str
    columns: list
    rows: list = field(default_factory=list)


def member_stream(seed: int, r: int) -> prng.RngStream:
    return prng.RngStream(seed).split("member").split(r)


def member_reservoir(params: ReservoirParams, seed: int, r: int) -> Reservoir:
    return sample_reservoir(params, member_stream(seed, r).split("reservoir"))


def _mean_sem(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    sem = float(a.std() / math.sqrt(a.size)) if a.size > 1 else 0.0
    return float(a.mean()), sem


def _summarise(key: dict, per_member: list[dict], seed: int, R: int) -> dict:
    row = dict(key)
    for m in METRICS:
        vals = [d[m] for d in per_member if m in d]
        if vals:
            row[f"{m}_mean"], row[f"{m}_sem"] = _mean_sem(vals)
    row["seed"] = seed
    row["R"] = R
    return row


def _metric_columns(metrics) -> list:
    return [f"{m}_{x}" for m in metrics for x in ("mean", "sem")]


def _run_grid(cfg: ExperimentConfig, keys: list[dict], worker, columns: list, experiment: str) -> ScanResult:
    """Evaluate ``worker(cfg_dict, key)`` for each grid key; deterministic order."""
    result = ScanResult(experiment, columns)
    failures = []
    cfg_dict = cfg.to_dict()
    outcomes: dict[int, object] = {}
    if cfg.n_jobs > 1 and len(keys) > 1:
        with cf.ProcessPoolExecutor(max_workers=min(cfg.n_jobs, len(keys))) as ex:
            futs = {ex.submit(worker, cfg_dict, k): i for i, k in enumerate(keys)}
            for fut in cf.as_completed(futs):
                i = futs[fut]
                try:
                    outcomes[i] = fut.result()
                except Exception as exc:  # noqa: BLE001
                    outcomes[i] = exc
    else:
        for i, k in enumerate(keys):
            try:
                outcomes[i] = worker(cfg_dict, k)
            except Exception as exc:  # noqa: BLE001
                outcomes[i] = exc
    for i, k in enumerate(keys):
        out = outcomes[i]
        if isinstance(out, Exception):
            failures.append((k, out))
        else:
            result.rows.extend(out)
    if failures:
        k, exc = failures[0]
        raise ScanError(f"{len(failures)} grid point(s) failed; first at {k}: {exc!r}", result, failures)
    return result


# -- dynamics ---------------------------------------------------------------------


def drive_frames(cfg: ExperimentConfig, r: int, n_steps: int) -> np.ndarray:
    """Spatio-temporal task frames used as a driving signal, (n_steps, M)."""
    spec = cfg.task_spec("spatiotemporal")
    E = max(1, math.ceil(n_steps / spec.T))
    stream = member_stream(cfg.seed, r).split("task")
    layout = spec.layout(stream.split(prng.TASK_LAYOUT))
    data = spec.generate(E, stream.split(prng.TASK_DRIVE), layout)
    return data.stream()[:n_steps]


def _dynamics_point(cfg_dict: dict, key: dict) -> list:
    cfg = ExperimentConfig(**cfg_dict)
    per = []
    for r in range(cfg.R):
        res = member_reservoir(cfg.params(key["w"], key["b"], key["s"]), cfg.seed, r)
        X = drive_frames(cfg, r, cfg.n_steps) if key["input"] else None
        tr = rv.run(res, X, cfg.n_steps)
        Y = tr.steps[cfg.discard:]
        rep = measures.report(Y)
        per.append({"F": rep.F, "C": rep.C, "alpha": rep.alpha, "rms": rep.rms})
    return [_summarise(key, per, cfg.seed, cfg.R)]


def dynamics_scan(cfg: ExperimentConfig) -> ScanResult:
    """F, C, alpha and rms over the (w, b, s, input) grid, averaged over R reservoirs."""
    keys = [
        {"w": w, "b": b, "s": s, "input": int(x)}
        for w, b, s, x in itertools.product(cfg.w, cfg.b, cfg.s, cfg.inputs)
    ]
    cols = ["w", "b", "s", "input"] + _metric_columns(("F", "C", "alpha", "rms")) + ["seed", "R"]
    return _run_grid(cfg, keys, _dynamics_point, cols, "dynamics-scan")


# -- accuracy -----------------------------------------------------------------------


def evaluate_member(cfg: ExperimentConfig, params: ReservoirParams, r: int, with_measures: bool = True) -> dict:
    """Train and test one seeded reservoir on the configured task."""
    res = member_reservoir(params, cfg.seed, r)
    spec = cfg.task_spec()
    train, test = spec.train_test(member_stream(cfg.seed, r).split("task"), cfg.E_train, cfg.E_test)
    model = readout.fit(readout.collect_states(res, train), spec.n_classes, cfg.rcond)
    out = {}
    if with_measures:
        trace = rv.run(res, test.stream())
        rows = readout.readout_steps(test.E, test.T) - 1
        states = readout.StateMatrix(trace.steps[rows], test.labels[:-1].astype(np.int64))
        rep = measures.report(trace.steps[cfg.discard:])
        out.update(F=rep.F, C=rep.C, alpha=rep.alpha, rms=rep.rms)
    else:
        states = readout.collect_states(res, test)
    out["A"] = readout.evaluate(model, states)
    return out


def _accuracy_point(cfg_dict: dict, key: dict) -> list:
    cfg = ExperimentConfig(**cfg_dict)
    extra = {k: key[k] for k in ("activation", "w_prime") if k in key}
    params = cfg.params(key["w"], key["b"], key["s"], **extra)
    per = [evaluate_member(cfg, params, r) for r in range(cfg.R)]
    return [_summarise(key, per, cfg.seed, cfg.R)]


def accuracy_scan(cfg: ExperimentConfig) -> ScanResult:
    """Test accuracy (plus dynamics measures of the test run) over the (w, b, s) grid."""
    keys = [
        {"task": cfg.task, "activation": cfg.activation, "w": w, "b": b, "s": s}
        for w, b, s in itertools.product(cfg.w, cfg.b, cfg.s)
    ]
    cols = ["task", "activation", "w", "b", "s"] + _metric_columns(METRICS) + ["seed", "R"]
    return _run_grid(cfg, keys, _accuracy_point, cols, "accuracy-scan")


def linearity_sweep(cfg: ExperimentConfig) -> ScanResult:
    """Accuracy and measures versus the linearity parameter of s*tanh(u/s)."""
    cfg = ExperimentConfig(**{**cfg.to_dict(), "activation": Activation.SCALED_TANH.value})
    res = accuracy_scan(cfg)
    res.experiment = "linearity-sweep"
    return res


def default_s_grid(lo_exp: int = -5, hi_exp: int = 5, per_decade: int = 2) -> list:
    n = (hi_exp - lo_exp) * per_decade + 1
    return [float(10.0 ** (lo_exp + i / per_decade)) for i in range(n)]


ZERO_BIAS_VARIANTS = (
    ("tanh", 0.1),
    ("tanh", 0.0),
    ("gaussian", 0.0),
    ("cosine", 0.0),
)


def zero_bias_circle(cfg: ExperimentConfig) -> ScanResult:
    """Circle accuracy with and without reservoir biases for odd/even activations."""
    cfg = ExperimentConfig(**{**cfg.to_dict(), "task": "circle"})
    keys = [
        {"task": "circle", "activation": act, "w_prime": wp, "w": w, "b": b, "s": cfg.s[0]}
        for act, wp in ZERO_BIAS_VARIANTS
        for w in cfg.w
        for b in cfg.b
    ]
    cols = ["task", "activation", "w_prime", "w", "b", "s"] + _metric_columns(METRICS) + ["seed", "R"]
    return _run_grid(cfg, keys, _accuracy_point, cols, "zero-bias-circle")


# -- free vs driven -----------------------------------------------------------------


@dataclass
class PerturbationPair:
    b: float
    member: int
    free: rv.ActivationTrace
    driven: rv.ActivationTrace
    non_input: list
    settle: int = 0

    @property
    def diff(self) -> np.ndarray:
        """driven - free on the non-input neurons, all steps."""
        return rv.diff_traces(self.driven, self.free, self.non_input)

    @property
    def max_abs_diff(self) -> float:
        """Largest |driven - free| on non-input neurons once the start-up transient has passed."""
        d = self.diff[self.settle:]
        return float(np.max(np.abs(d))) if d.size else 0.0

    @property
    def max_abs_diff_transient(self) -> float:
        d = self.diff[: self.settle]
        return float(np.max(np.abs(d))) if d.size else 0.0


def perturbation_pair(cfg: ExperimentConfig, w: float, b: float, r: int) -> PerturbationPair:
    res = member_reservoir(cfg.params(w, b, cfg.s[0]), cfg.seed, r)
    X = drive_frames(cfg, r, cfg.n_steps)
    free = rv.run(res, None, cfg.n_steps)
    driven = rv.run(res, X, cfg.n_steps)
    return PerturbationPair(b, r, free, driven, list(range(res.M, res.N)), min(cfg.settle, cfg.n_steps - 1))


def _perturbation_point(cfg_dict: dict, key: dict) -> list:
    cfg = ExperimentConfig(**cfg_dict)
    rows = []
    for r in range(cfg.R):
        pair = perturbation_pair(cfg, key["w"], key["b"], r)
        rows.append(
            {
                **key,
                "member": r,
                "max_abs_diff_non_input": pair.max_abs_diff,
                "max_abs_diff_transient": pair.max_abs_diff_transient,
                "max_abs_diff_all": float(np.max(np.abs(rv.diff_traces(pair.driven, pair.free)))),
                "max_abs_activation": float(np.max(np.abs(pair.free.steps))),
                "seed": cfg.seed,
            }
        )
    return rows


def perturbation_compare(cfg: ExperimentConfig) -> ScanResult:
    """Per-member maximal |driven - free| on the neurons without direct input.

    Both runs start from the same y0, and the input reshapes the first few steps
    of the relaxation onto the attractor.  max_abs_diff_non_input therefore skips
    the first ``settle`` steps; the skipped window is reported separately.
    """
    keys = [{"w": w, "b": b} for w in cfg.w for b in cfg.b]
    cols = ["w", "b", "member", "max_abs_diff_non_input", "max_abs_diff_transient", "max_abs_diff_all", "max_abs_activation", "seed"]
    return _run_grid(cfg, keys, _perturbation_point, cols, "perturbation-compare")


# -- PCA ---------------------------------------------------------------------------------


def pca_member(cfg: ExperimentConfig, w: float, b: float, r: int, activation: str):
    """Post-episode states of one reservoir on circle data, their PCA and labels."""
    params = cfg.params(w, b, cfg.s[0], activation=Activation(activation))
    res = member_reservoir(params, cfg.seed, r)
    spec = cfg.task_spec("circle")
    train, _ = spec.train_test(member_stream(cfg.seed, r).split("task"), cfg.E_train, 2)
    states = readout.collect_states(res, train)
    return states, pca.fit_pca(states.Y)


def _pca_point(cfg_dict: dict, key: dict) -> list:
    cfg = ExperimentConfig(**cfg_dict)
    pairs = [tuple(p) for p in cfg.pairs]
    scores = {p: [] for p in pairs}
    top3 = []
    for r in range(cfg.R):
        states, model = pca_member(cfg, key["w"], key["b"], r, key["activation"])
        for p in pairs:
            proj = pca.project(model, states.Y, p)
            scores[p].append(pca.separability_score(proj, states.labels))
        top3.append(model.variances[:3])
    rows = []
    for p in pairs:
        mean, sem = _mean_sem(scores[p])
        rows.append(
            {
                **key,
                "pair": f"{p[0]}-{p[1]}",
                "separability_mean": mean,
                "separability_sem": sem,
                "var0": float(np.mean([v[0] for v in top3])),
                "var1": float(np.mean([v[1] for v in top3])),
                "var2": float(np.mean([v[2] for v in top3])),
                "seed": cfg.seed,
                "R": cfg.R,
            }
        )
    return rows


def pca_signature(cfg: ExperimentConfig) -> ScanResult:
    """Linear separability of circle classes in PCA component pairs, tanh vs linear."""
    keys = [
        {"activation": act, "w": w, "b": b}
        for act in ("tanh", "linear")
        for w in cfg.w
        for b in cfg.b
    ]
    cols = ["activation", "w", "b", "pair", "separability_mean", "separability_sem", "var0", "var1", "var2", "seed", "R"]
    return _run_grid(cfg, keys, _pca_point, cols, "pca-signature")


# -- readout without reservoir ---------------------------------------------------------


@dataclass
class DirectReadout:
    model: readout.ReadoutModel
    accuracy: float
    test_points: np.ndarray
    test_labels: np.ndarray
    test_scores: np.ndarray


def direct_member(cfg: ExperimentConfig, task: str, r: int) -> DirectReadout:
    spec = cfg.task_spec(task)
    if spec.kind not in SPATIAL_KINDS:
        raise ValueError("readout-only baseline needs a purely spatial task")
    train, test = spec.train_test(member_stream(cfg.seed, r).split("task"), cfg.E_train, cfg.E_test)
    model = readout.fit_direct(train.points(), train.labels, spec.n_classes, cfg.rcond)
    Xt = test.points()
    z = model.scores(Xt)
    acc = float(np.mean(np.argmax(z, axis=1) == test.labels))
    return DirectReadout(model, acc, Xt, test.labels, z)


def _direct_point(cfg_dict: dict, key: dict) -> list:
    cfg = ExperimentConfig(**cfg_dict)
    accs, zsum = [], []
    for r in range(cfg.R):
        d = direct_member(cfg, key["task"], r)
        accs.append(d.accuracy)
        zsum.append(float(np.mean(np.abs(d.test_scores.sum(axis=1) - 1.0))))
    mean, sem = _mean_sem(accs)
    return [{**key, "A_mean": mean, "A_sem": sem, "zsum_dev": float(np.mean(zsum)), "seed": cfg.seed, "R": cfg.R}]


def readout_only(cfg: ExperimentConfig) -> ScanResult:
    """Accuracy of a readout fed directly with the 2-d input points."""
    spec = cfg.task_spec()
    if spec.kind not in SPATIAL_KINDS:
        raise ValueError("readout-only baseline needs a purely spatial task")
    keys = [{"task": cfg.task, "K": spec.n_classes}]
    cols = ["task", "K", "A_mean", "A_sem", "zsum_dev", "seed", "R"]
    return _run_grid(cfg, keys, _direct_point, cols, "readout-only")


def dense_label_grid(model: readout.ReadoutModel, n: int = 101) -> np.ndarray:
    """Rows (x0, x1, label) on an n x n grid over [-1, 1]^2."""
    g = np.linspace(-1.0, 1.0, n)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    P = np.column_stack([xx.ravel(), yy.ravel()])
    return np.column_stack([P, readout.predict_labels(model, P)])


EXPERIMENTS = {
    "dynamics-scan": dynamics_scan,
    "accuracy-scan": accuracy_scan,
    "linearity-sweep": linearity_sweep,
    "zero-bias-circle": zero_bias_circle,
    "perturbation-compare": perturbation_compare,
    "pca-signature": pca_signature,
    "readout-only": readout_only,
}
