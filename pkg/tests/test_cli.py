import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qfslice import files
from qfslice.cli import parse_complex, read_config, run
from qfslice.raster import worker_count


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


def test_parse_complex():
    assert parse_complex("3,-2") == 3 - 2j
    assert parse_complex("2.5") == 2.5
    assert parse_complex("1+2i") == 1 + 2j


def test_constants(capsys):
    out = run_json(capsys, ["constants"])
    assert abs(out["c0_lower_bound"] - 0.493) < 5e-4
    assert out["scaling_constants"]["8"] == pytest.approx(4 + math.sqrt(15))
    assert out["window_ratio_gaps"]["100"] == pytest.approx(1e-4, rel=1e-3)


def test_probe_fuchsian(capsys):
    out = run_json(capsys, ["probe", "--trA", "3", "--trB", "3"])
    assert out["tag"] == "DiscreteLikely"


def test_probe_elliptic(capsys):
    out = run_json(capsys, ["probe", "--trA", "2.5", "--trB", "1"])
    assert out["tag"] == "Indiscrete" and out["witness"]["slope"] == "0/1"


def test_probe_length_flag(capsys):
    out = run_json(capsys, ["probe", "--length", str(2 * math.log(2)), "--trB", "3.5"])
    assert out["triple"]["x"] == pytest.approx(2.5)


def test_farey_word(capsys):
    assert run(["farey-word", "3/5"]) == 0
    assert capsys.readouterr().out.split("\t")[:2] == ["3/5", "AbAbbAbb"]
    out = run_json(capsys, ["farey-word", "2/1", "--d", "1", "--json"])
    assert out["word"] == "AAb" and out["trace"] == pytest.approx([15, 0])


def test_gens(capsys):
    out = run_json(capsys, ["gens", "--lambda", str(2 * math.log(2)), "--tau", "0"])
    assert out["trA"] == pytest.approx([2.5, 0])
    assert out["trB"] == pytest.approx([10 / 3, 0])
    assert out["commutator_trace"] == pytest.approx([-2, 0])


def test_earle(capsys):
    out = run_json(capsys, ["earle", "--d", "1"])
    assert out["trace_W21"] == pytest.approx([15, 0])
    flat = np.array(out["A"]).ravel()
    assert flat == pytest.approx([2, 0, 1 / 3, 0, 3, 0, 1, 0])


def test_scaling_csv(capsys):
    assert run(["scaling", "--trA", "8", "--trB", "3,2", "--n", "60"]) == 0
    cap = capsys.readouterr()
    lines = cap.out.strip().splitlines()
    assert lines[0].startswith("n,trace_re")
    assert len(lines) == 61
    assert float(lines[-1].split(",")[3]) == pytest.approx(4 + math.sqrt(15), abs=1e-6)
    assert "status=converged" in cap.err


def test_render_and_reproduce(tmp_path, capsys):
    argv = ["render", "--trA", "2.5", "--center", "2.5,0", "--width", "6", "--res", "48",
            "--out", str(tmp_path), "--name", "r", "--format", "png", "--json"]
    out = run_json(capsys, argv)
    for key in ("pgm", "png", "sidecar", "figure", "components_json", "components_csv"):
        assert (tmp_path / out["outputs"][key].split("/")[-1]).exists()
    assert out["standard_found"]
    assert run(["render", "--from-sidecar", str(tmp_path / "r.json"),
                "--out", str(tmp_path), "--name", "again", "--no-plot"]) == 0
    assert (tmp_path / "r.pgm").read_bytes() == (tmp_path / "again.pgm").read_bytes()
    _, meta = files.read_sidecar(tmp_path / "r.json")
    assert meta["spec"]["length"] == pytest.approx(2 * math.log(2))


def test_components_from_existing(tmp_path, capsys):
    run(["render", "--trA", "2.5", "--width", "6", "--center", "2.5,0", "--res", "32",
         "--out", str(tmp_path), "--name", "r", "--no-plot"])
    capsys.readouterr()
    assert run(["components", "--input", str(tmp_path / "r.pgm"), "--out", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "label,pixels,bbox,centroid_re,centroid_im,standard"
    assert lines[1].endswith("true")


def test_twist_check(capsys):
    out = run_json(capsys, ["twist-check", "--trA", "2.5", "--center", "2.5,0", "--width", "6",
                            "--res", "32", "--samples", "20", "--no-plot"])
    assert out["discrepancy_rate"] == 0


def test_figures_small(tmp_path, capsys):
    assert run(["figures", "--which", "maskit", "--res", "32", "--out", str(tmp_path)]) == 0
    gray = files.read_pgm(tmp_path / "figure_maskit_w4.pgm")
    assert gray.shape == (32, 32)
    assert set(np.unique(gray)) <= {0, 128, 200, 255}
    spec, _ = files.read_sidecar(tmp_path / "figure_maskit_w4.json")
    assert (spec.trA, spec.center, spec.width) == (2.0, 2 + 0j, 4.0)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# slice\ntrA = 3\ntrB = 3\ndepth = 20\n")
    assert read_config(cfg) == ["--trA", "3", "--trB", "3", "--depth", "20"]
    out = run_json(capsys, ["--config", str(cfg), "probe"])
    assert out["budget"]["max_depth"] == 20 and out["tag"] == "DiscreteLikely"
    # explicit flags win over the file
    out = run_json(capsys, ["--config", str(cfg), "probe", "--trB", "1"])
    assert out["tag"] == "Indiscrete"


def test_usage_errors_exit_1(capsys, tmp_path):
    assert run(["render", "--bogus"]) == 1
    assert run(["probe", "--trB", "3"]) == 1  # no trA
    assert run(["render", "--trA", "3", "--res", "32"]) == 1  # no width
    assert run(["probe", "--trA", "3", "--length", "1", "--trB", "3"]) == 1
    assert run([]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    assert run(["--config", str(bad), "probe"]) == 1


def test_domain_errors_exit_2(tmp_path, capsys):
    assert run(["render", "--trA", "1.5", "--width", "4", "--out", str(tmp_path)]) == 2
    assert run(["gens", "--lambda", "0"]) == 2
    assert run(["scaling", "--trA", "2", "--trB", "3"]) == 2
    assert run(["farey-word", "2/4"]) == 2
    assert run(["probe", "--trA", "3", "--trB", "3", "--depth", "0"]) == 2
    assert "numeric domain error" in capsys.readouterr().err


def test_thread_env(monkeypatch):
    monkeypatch.setenv("QFSLICE_THREADS", "3")
    assert worker_count() == 3


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qfslice", "constants"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    assert json.loads(res.stdout)["c0_lower_bound"] == pytest.approx(0.49279, abs=1e-5)
