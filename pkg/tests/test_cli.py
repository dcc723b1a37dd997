import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from dsmtomo.cli import build_parser, main
from dsmtomo.grids import read_grid, read_sinogram


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """phantom -> radon -> noise at 32 pixels and 45 angles."""
    d = tmp_path_factory.mktemp("cli")
    assert main(["phantom", "--name", "shapes2d", "--resolution", "32", "--out", str(d / "truth")]) == 0
    assert main(["radon", "--input", str(d / "truth"), "--n-angles", "45", "--out", str(d / "sino")]) == 0
    assert main(["noise", "--input", str(d / "sino"), "--level", "0.05", "--seed", "7", "--out", str(d / "noisy")]) == 0
    return d


def test_pipeline_files(pipeline):
    truth = read_grid(pipeline / "truth")
    sino = read_sinogram(pipeline / "noisy")
    assert truth.shape == (32, 32)
    assert sino.n_angles == 45 and sino.dt == pytest.approx(1 / 32)


@pytest.mark.parametrize("method", ["dsm", "fbp"])
def test_reconstruct_and_metrics(pipeline, method, capsys):
    out = pipeline / f"rec_{method}"
    code, _, _ = run(["reconstruct", "--method", method, "--input", str(pipeline / "noisy"),
                      "--resolution", "32", "--out", str(out), "--pgm", str(pipeline / f"{method}.pgm")], capsys)
    assert code == 0
    assert (pipeline / f"{method}.pgm").read_bytes().startswith(b"P5")
    code, text, _ = run(["metrics", "--recon", str(out), "--truth", str(pipeline / "truth")], capsys)
    assert code == 0
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["err_l2", "err_linf"]
    assert 0 < float(rows[1][0]) < 1.0


def test_metrics_of_truth_is_zero(pipeline, capsys):
    code, text, _ = run(["metrics", "--recon", str(pipeline / "truth"), "--truth", str(pipeline / "truth")], capsys)
    assert code == 0
    assert text.splitlines()[1] == "0,0"


def test_threads_do_not_change_output(pipeline, capsys):
    outs = []
    for threads in ("1", "3"):
        out = pipeline / f"det_{threads}"
        assert run(["reconstruct", "--input", str(pipeline / "noisy"), "--resolution", "32",
                    "--threads", threads, "--out", str(out)], capsys)[0] == 0
        outs.append(read_grid(out).values)
    assert np.array_equal(*outs)


def test_config_then_flag_override(pipeline, tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"noise": {"level": 0.5, "seed": 3}}))
    a, b, c = (tmp_path / n for n in ("a", "b", "c"))
    assert run(["noise", "--config", str(cfg), "--input", str(pipeline / "sino"), "--out", str(a)], capsys)[0] == 0
    assert run(["noise", "--input", str(pipeline / "sino"), "--level", "0.5", "--seed", "3", "--out", str(b)], capsys)[0] == 0
    assert run(["noise", "--config", str(cfg), "--level", "0.1", "--seed", "3",
                "--input", str(pipeline / "sino"), "--out", str(c)], capsys)[0] == 0
    va, vb, vc = (read_sinogram(p).values for p in (a, b, c))
    assert np.array_equal(va, vb)
    assert not np.array_equal(va, vc)


@pytest.mark.parametrize("payload", [{"bogus": 1}, {"noise": {"sigma": 0.1}}, {"noise": 3}, [1, 2]])
def test_config_validation(pipeline, tmp_path, payload, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(payload))
    code, _, err = run(["noise", "--config", str(cfg), "--input", str(pipeline / "sino"),
                        "--out", str(tmp_path / "x")], capsys)
    assert code == 1 and err.startswith("ERROR:validation:")


def test_config_not_json(pipeline, tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{nope")
    code, _, err = run(["noise", "--config", str(cfg), "--input", str(pipeline / "sino"),
                        "--out", str(tmp_path / "x")], capsys)
    assert code == 1 and "ERROR:validation:" in err


@pytest.mark.parametrize("argv", [
    ["reconstruct", "--input", "{d}/noisy", "--gamma", "2", "--resolution", "32", "--out", "{d}/x"],
    ["noise", "--input", "{d}/sino", "--level", "-1", "--out", "{d}/x"],
    ["noise", "--input", "{d}/sino", "--model", "poisson", "--out", "{d}/x"],
    ["phantom", "--resolution", "abc", "--out", "{d}/x"],
    ["analyze", "sweep", "--out", "{d}/x.csv"],
])
def test_validation_exit_code(pipeline, argv, capsys):
    code, _, err = run([a.format(d=pipeline) for a in argv], capsys)
    assert code == 1
    assert err.startswith("ERROR:validation:")


@pytest.mark.parametrize("argv", [
    ["radon", "--input", "{d}/missing", "--out", "{d}/x"],
    ["metrics", "--recon", "{d}/missing", "--truth", "{d}/truth"],
    ["noise", "--config", "{d}/missing.json", "--input", "{d}/sino", "--out", "{d}/x"],
])
def test_io_exit_code(pipeline, argv, capsys):
    code, _, err = run([a.format(d=pipeline) for a in argv], capsys)
    assert code == 2
    assert err.startswith("ERROR:io:")


def test_help_lists_defaults():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    text = sub["noise"].format_help() + sub["radon"].format_help() + sub["reconstruct"].format_help()
    for needle in ("default: 0.2", "default: 12345", "default: 400", "default: 0.25", "default: dsm"):
        assert needle in " ".join(text.split())


def test_analyze_freq(tmp_path, capsys):
    out = tmp_path / "freq.csv"
    assert run(["analyze", "freq", "--dim", "3", "--n-points", "11", "--out", str(out)], capsys)[0] == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["omega", "spectrum"] and len(rows) == 12


def test_analyze_sweep(pipeline, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(["analyze", "sweep", "--input", str(pipeline / "noisy"), "--truth", str(pipeline / "truth"),
                      "--gammas", "0.3,0.5", "--alphas", "3,4", "--out", str(out)], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == 5


def test_repro_example(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dsmtomo.cli", "repro", "4", "--output-dir", str(tmp_path)],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader((tmp_path / "example_4.csv").read_text().splitlines()))
    assert [r["method"] for r in rows] == ["dsm", "fbp", "dsm", "fbp"]
    assert proc.stdout.splitlines()[0].startswith("example,case,method")
