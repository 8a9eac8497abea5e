import json
import subprocess
import sys

import pytest

from nlft_lab.cli import main
from nlft_lab.serialize import read_csv


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def summary(tmp_path, command):
    return json.loads((tmp_path / command / "summary.json").read_text())


def test_verify_free(tmp_path):
    assert run(tmp_path, "verify", "--preset", "free", "--t", "5") == 0
    checks = summary(tmp_path, "verify")["checks"]
    assert max(c["value"] for c in checks if c["relation"] == "<=") < 1e-12
    header, rows = read_csv(tmp_path / "verify" / "verify.csv")
    assert header[:3] == ["k", "re_z", "im_z"] and len(rows) == 200 + 55


def test_parseval_printed_form_reports_failure(tmp_path):
    # the integral of log|a| is (pi/2) ||f||^2, so the bare form fails
    assert run(tmp_path, "parseval", "--potential", "constant:q=1,T=1") == 1
    s = summary(tmp_path, "parseval")
    printed = next(c for c in s["checks"] if c["name"].endswith("printed_residual"))
    assert printed["value"] == pytest.approx(0.5707963, abs=1e-6)


def test_parseval_plancherel_form_passes(tmp_path):
    assert run(tmp_path, "parseval", "--potential", "constant:q=1,T=1",
               "--normalization", "plancherel") == 0
    header, rows = read_csv(tmp_path / "parseval" / "parseval.csv")
    assert header == ["s", "log_abs_a"] and len(rows) > 100


def test_zeros_command(tmp_path):
    assert run(tmp_path, "zeros", "--potential", "constant:q=1", "--t", "1",
               "--rect", "-4,4,-3,-0.01") == 0
    s = summary(tmp_path, "zeros")
    assert s["pass"]
    _, rows = read_csv(tmp_path / "zeros" / "zeros.csv")
    assert len(rows) == 2


@pytest.mark.parametrize("command, extra", [
    ("nlft", ["--potential", "constant:q=1,T=1", "--grid", "-2:2:5"]),
    ("kernels", ["--potential", "constant:q=1,T=1", "--s", "0.7", "--grid", "20:40:2"]),
    ("converge", ["--potential", "constant:q=1,T=1", "--grid", "1:4:4"]),
    ("freecase", []),
])
def test_commands_pass(tmp_path, command, extra):
    assert run(tmp_path, command, *extra) == 0
    assert summary(tmp_path, command)["command"] == command


def test_nlft_grid_override(tmp_path):
    run(tmp_path, "nlft", "--potential", "constant:q=1,T=1", "--grid", "0:0:1")
    _, rows = read_csv(tmp_path / "nlft" / "nlft.csv")
    assert len(rows) == 1 and float(rows[0][5]) == pytest.approx(0.7615941559557649, abs=1e-15)


@pytest.mark.parametrize("args", [
    ["verify", "--grid", "1:2"],
    ["parseval", "--grid", "0:1:3"],
    ["verify", "--potential", "nope"],
    ["verify", "--rect", "1,0,0,1"],
    ["verify", "--potential", "free", "--preset", "free"],
])
def test_config_errors_exit_2(tmp_path, args, capsys):
    assert run(tmp_path, *args) == 2
    assert "config error" in capsys.readouterr().err


def test_config_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("potential: piecewise:breaks=0;0.5;1,values=1;-1\nsamples: 20\nseed: 7\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert summary(tmp_path / "o", "verify")["config"]["seed"] == 7


def test_deterministic_outputs(tmp_path):
    args = ["verify", "--potential", "piecewise:breaks=0;0.5;1.5,values=1;-0.5", "--seed", "3"]
    blobs = []
    for k, threads in enumerate(("1", "4")):
        out = tmp_path / str(k)
        assert main([*args, "--threads", threads, "--out", str(out)]) == 0
        blobs.append({p.name: p.read_bytes() for p in (out / "verify").iterdir()})
    assert blobs[0].keys() == blobs[1].keys()
    for name in blobs[0]:
        if name != "summary.json":
            assert blobs[0][name] == blobs[1][name]


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "nlft_lab.cli", "freecase", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "freecase" in res.stdout
