import json

import pytest

from rcdyn import cli


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema: rcdyn/")
    return lines[1].split(","), [l.split(",") for l in lines[2:]]


def test_dynamics_scan_one_row_per_b(tmp_path):
    code = cli.main(["dynamics-scan", "--w", "0.5", "--seed", "7", "--R", "5", "--out", str(tmp_path)])
    assert code == 0
    header, rows = read_csv(tmp_path / "dynamics-scan.csv")
    assert len(rows) == 21
    assert header[:4] == ["w", "b", "s", "input"]
    man = json.loads((tmp_path / "dynamics-scan.manifest.json").read_text())
    assert man["status"] == "ok" and man["root_seed"] == 7
    assert man["config"]["w"] == [0.5]


def test_missing_config(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["accuracy-scan", "--config", str(tmp_path / "nope.json"), "--out", str(out)])
    assert code == cli.EXIT_USAGE
    assert not out.exists()
    assert "not found" in capsys.readouterr().err


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"wrong_key": 1}))
    assert cli.main(["dynamics-scan", "--config", str(cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_USAGE


def test_unknown_command():
    assert cli.main(["frobnicate"]) == cli.EXIT_USAGE
    assert cli.main([]) == cli.EXIT_USAGE


def test_dump_trace_shape(tmp_path):
    assert cli.main(["dump-trace", "--w", "0.3", "--b", "0", "--steps", "200", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "dump-trace.csv")
    assert header == ["t"] + [f"y{n}" for n in range(10)]
    assert len(rows) == 200


def test_readout_only_exports(tmp_path):
    code = cli.main(["readout-only", "--task", "circle", "--R", "3", "--out", str(tmp_path)])
    assert code == 0
    _, rows = read_csv(tmp_path / "readout-only.csv")
    assert abs(float(rows[0][2]) - 0.5) < 0.05
    header, pts = read_csv(tmp_path / "readout-only.scores.csv")
    assert header == ["point", "x0", "x1", "label", "z0", "z1"] and len(pts) == 1000
    _, grid = read_csv(tmp_path / "readout-only.grid.csv")
    assert len(grid) == 101 * 101


def test_readout_only_rejects_temporal(tmp_path):
    assert cli.main(["readout-only", "--task", "spatiotemporal", "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_numeric_failure_exit(tmp_path, monkeypatch):
    from rcdyn import harness

    def fail(cfg_dict, key):
        if key["b"] > 0:
            raise FloatingPointError("diverged")
        return [{**key, "F_mean": 0.0}]

    monkeypatch.setattr(harness, "_dynamics_point", fail)
    code = cli.main(["dynamics-scan", "--w", "0.1", "--b", "-1", "1", "--R", "1", "--jobs", "1", "--out", str(tmp_path)])
    assert code == cli.EXIT_NUMERIC
    _, rows = read_csv(tmp_path / "dynamics-scan.csv")
    assert len(rows) == 1
    man = json.loads((tmp_path / "dynamics-scan.manifest.json").read_text())
    assert man["status"].startswith("failed")


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    assert cli.main(["dump-trace", "--steps", "5"]) == 0
    assert (tmp_path / "envout" / "dump-trace.csv").exists()


def test_pca_signature_points(tmp_path):
    assert cli.main(["pca-signature", "--R", "2", "--E-train", "200", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "pca-signature.points.csv")
    assert header[:2] == ["activation", "point"] and header[-1] == "label"
    assert len(rows) == 2 * 199


@pytest.mark.parametrize("cmd", ["accuracy-scan", "perturbation-compare"])
def test_manifest_replay_byte_identical(tmp_path, cmd):
    a, b = tmp_path / "a", tmp_path / "b"
    args = [cmd, "--R", "3", "--E-train", "200", "--E-test", "200", "--steps", "100", "--b", "0", "0.9"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main([cmd, "--config", str(a / f"{cmd}.manifest.json"), "--out", str(b)]) == 0
    assert (a / f"{cmd}.csv").read_bytes() == (b / f"{cmd}.csv").read_bytes()


def test_help_lists_columns(capsys):
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["dynamics-scan", "--help"])
    assert "F_mean" in capsys.readouterr().out
