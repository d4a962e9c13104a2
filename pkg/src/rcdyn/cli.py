"""Command-line front end: one subcommand per experiment.

Every run writes ``<out>/<command>.manifest.json`` first, then
``<out>/<command>.csv`` (plus command-specific extras).  The manifest embeds the
full resolved config, so ``--config <manifest>`` replays the run.

Exit codes: 0 success, 2 usage error, 3 numeric failure (partial CSV kept).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _kernels, harness, pca, prng
from . import reservoir as rv
from .topology import Activation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
OUT_ENV = "RCDYN_OUT"
SCHEMA_VERSION = "v1"

COMMANDS = (
    "dynamics-scan",
    "accuracy-scan",
    "linearity-sweep",
    "zero-bias-circle",
    "perturbation-compare",
    "pca-signature",
    "readout-only",
    "dump-trace",
)

# per-command defaults layered on top of ExperimentConfig defaults
DEFAULTS = {
    "dynamics-scan": {},
    "accuracy-scan": {"task": "xor", "w": [0.1, 0.3, 0.5]},
    "linearity-sweep": {"task": "circle", "w": [0.1], "b": [0.0], "s": harness.default_s_grid()},
    "zero-bias-circle": {"task": "circle", "w": [0.1], "b": [0.0]},
    "perturbation-compare": {"w": [0.5], "b": [-0.9, 0.0, 0.9], "R": 20},
    "pca-signature": {"task": "circle", "w": [0.1], "b": [0.0], "R": 20},
    "readout-only": {"task": "line", "K": 2},
    "dump-trace": {"w": [0.3], "b": [0.0], "R": 1, "n_steps": 200},
}

COLUMN_HELP = {
    "dynamics-scan": "w,b,s,input,F_mean,F_sem,C_mean,C_sem,alpha_mean,alpha_sem,rms_mean,rms_sem,seed,R",
    "accuracy-scan": "task,activation,w,b,s,{F,C,alpha,A,rms}_{mean,sem},seed,R",
    "linearity-sweep": "same as accuracy-scan (activation=scaled_tanh)",
    "zero-bias-circle": "task,activation,w_prime,w,b,s,{F,C,alpha,A,rms}_{mean,sem},seed,R",
    "perturbation-compare": "w,b,member,max_abs_diff_non_input,max_abs_diff_transient,max_abs_diff_all,max_abs_activation,seed",
    "pca-signature": "activation,w,b,pair,separability_mean,separability_sem,var0,var1,var2,seed,R; extra: <cmd>.points.csv",
    "readout-only": "task,K,A_mean,A_sem,zsum_dev,seed,R; extra: <cmd>.scores.csv, <cmd>.grid.csv",
    "dump-trace": "t,y0..y{N-1}",
}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, name: str, columns: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: rcdyn/{name}/{SCHEMA_VERSION}\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for row in rows:
            wr.writerow([fmt(row.get(c, "")) for c in columns])


def write_matrix_csv(path: Path, name: str, columns: list, data) -> None:
    write_csv(path, name, columns, [dict(zip(columns, r)) for r in data])


def load_config_doc(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    # a run manifest carries its config under "config"
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    return doc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcdyn", description="Reservoir dynamics and classification experiments.")
    ap.add_argument("--version", action="version", version=f"rcdyn {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run {name}", description=f"CSV columns: {COLUMN_HELP[name]}")
        sp.add_argument("--config", help="JSON config (flat keys) or a previous run manifest")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--w", type=float, nargs="+")
        sp.add_argument("--b", type=float, nargs="+")
        sp.add_argument("--s", type=float, nargs="+")
        sp.add_argument("--task")
        sp.add_argument("--activation", choices=[a.value for a in Activation])
        sp.add_argument("--R", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--K", type=int)
        sp.add_argument("--steps", dest="n_steps", type=int)
        sp.add_argument("--E-train", dest="E_train", type=int)
        sp.add_argument("--E-test", dest="E_test", type=int)
        sp.add_argument("--with-input", dest="inputs", action="store_const", const=[False, True],
                        help="scan both free-running and input-driven reservoirs")
        sp.add_argument("--discard", type=int, help="transient steps dropped before measures (default 0)")
        sp.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./rcdyn-out)")
    return ap


OVERRIDES = ("seed", "w", "b", "s", "task", "activation", "R", "N", "K", "n_steps",
             "E_train", "E_test", "inputs", "discard", "jobs", "out")


def resolve_config(args) -> harness.ExperimentConfig:
    doc = {"experiment": args.command, **DEFAULTS[args.command]}
    if args.config:
        loaded = load_config_doc(args.config)
        if loaded.get("experiment", args.command) != args.command:
            raise UsageError(f"config is for {loaded['experiment']!r}, not {args.command!r}")
        doc.update(loaded)
    for key in OVERRIDES:
        v = getattr(args, key, None)
        if v is not None:
            doc[key] = v
    if not doc.get("out"):
        doc["out"] = os.environ.get(OUT_ENV, "rcdyn-out")
    try:
        cfg = harness.ExperimentConfig.from_dict(doc)
        cfg.task_spec()
        Activation(cfg.activation)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad config: {exc}") from exc
    if args.command == "readout-only" and cfg.task not in ("line", "circle", "xor", "patches"):
        raise UsageError("readout-only needs a purely spatial task (line, circle, xor, patches)")
    return cfg


def _manifest(cfg: harness.ExperimentConfig, status: str, outputs: list, started: float, extra=None) -> dict:
    doc = {
        "schema": f"rcdyn/manifest/{SCHEMA_VERSION}",
        "command": cfg.experiment,
        "version": __version__,
        "backend": _kernels.BACKEND,
        "root_seed": cfg.seed,
        "member_streams": f"RngStream({cfg.seed}).split('member').split(r), r=0..{cfg.R - 1}",
        "status": status,
        "wall_time_s": round(time.time() - started, 3),
        "outputs": outputs,
        "config": cfg.to_dict(),
    }
    if extra:
        doc.update(extra)
    return doc


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _extras(cfg: harness.ExperimentConfig, out: Path) -> list:
    """Command-specific side outputs for the first ensemble member."""
    name = cfg.experiment
    written = []
    if name == "readout-only":
        d = harness.direct_member(cfg, cfg.task, 0)
        K = d.test_scores.shape[1]
        cols = ["point", "x0", "x1", "label"] + [f"z{k}" for k in range(K)]
        rows = [
            [i, d.test_points[i, 0], d.test_points[i, 1], int(d.test_labels[i]), *d.test_scores[i]]
            for i in range(len(d.test_labels))
        ]
        p = out / f"{name}.scores.csv"
        write_matrix_csv(p, f"{name}.scores", cols, rows)
        written.append(p.name)
        g = harness.dense_label_grid(d.model, cfg.dense_grid)
        p = out / f"{name}.grid.csv"
        write_matrix_csv(p, f"{name}.grid", ["x0", "x1", "label"], [[a, b, int(c)] for a, b, c in g])
        written.append(p.name)
    elif name == "pca-signature":
        rows = []
        dims = sorted({k for pair in cfg.pairs for k in pair})
        for act in ("tanh", "linear"):
            states, model = harness.pca_member(cfg, cfg.w[0], cfg.b[0], 0, act)
            P = pca.project(model, states.Y, dims)
            for i in range(P.shape[0]):
                rows.append([act, i, *P[i], int(states.labels[i])])
        p = out / f"{name}.points.csv"
        write_matrix_csv(p, f"{name}.points", ["activation", "point"] + [f"pc{k}" for k in dims] + ["label"], rows)
        written.append(p.name)
    return written


def _dump_trace(cfg: harness.ExperimentConfig, out: Path) -> list:
    res = harness.member_reservoir(cfg.params(cfg.w[0], cfg.b[0], cfg.s[0]), cfg.seed, 0)
    X = harness.drive_frames(cfg, 0, cfg.n_steps) if cfg.inputs[-1] else None
    tr = rv.run(res, X, cfg.n_steps)
    rows = [[t, *tr.steps[t - 1]] for t in range(1, tr.n_steps + 1)]
    p = out / "dump-trace.csv"
    write_matrix_csv(p, "dump-trace", ["t"] + [f"y{n}" for n in range(tr.N)], rows)
    return [p.name]


def run(cfg: harness.ExperimentConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    name = cfg.experiment
    man_path = out / f"{name}.manifest.json"
    _write_json(man_path, _manifest(cfg, "running", [], started))
    outputs = []
    status, code = "ok", EXIT_OK
    try:
        if name == "dump-trace":
            outputs += _dump_trace(cfg, out)
        else:
            try:
                result = harness.EXPERIMENTS[name](cfg)
            except harness.ScanError as exc:
                result = exc.partial
                status, code = f"failed: {exc}", EXIT_NUMERIC
                print(f"rcdyn: {exc}", file=sys.stderr)
            p = out / f"{name}.csv"
            write_csv(p, name, result.columns, result.rows)
            outputs.append(p.name)
            if code == EXIT_OK:
                outputs += _extras(cfg, out)
    except (FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        status, code = f"failed: {exc!r}", EXIT_NUMERIC
        print(f"rcdyn: numeric failure: {exc!r}", file=sys.stderr)
    _write_json(man_path, _manifest(cfg, status, outputs, started))
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"rcdyn: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
