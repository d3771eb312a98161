import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import assert_valid
from swapchain.cli import main
from swapchain.graph import read_edge_list
from swapchain.realization import write_degrees


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_triangle(tmp_path, capsys):
    d = tmp_path / "d.txt"
    write_degrees([2, 2, 2], d)
    code, out, err = run(capsys, "generate", "--degrees", str(d))
    assert code == 0
    assert out == "3 3\n0 1\n0 2\n1 2\n"
    for key in ("valid_swaps=", "realized_theta=", "wall_time="):
        assert key in err


def test_generate_round_trip(tmp_path, capsys):
    d = tmp_path / "d.txt"
    degrees = [4, 3, 3, 2, 2, 2, 1, 1, 1, 1]
    write_degrees(degrees, d)
    out = tmp_path / "g.txt"
    for h in ("naive", "gkantsidis", "geometric", "final"):
        code, _, _ = run(capsys, "generate", "--degrees", str(d), "--heuristic", h,
                         "--seed", "5", "--out", str(out))
        assert code == 0
        assert_valid(read_edge_list(out), degrees)


def test_generate_power_law(tmp_path, capsys):
    out = tmp_path / "g.txt"
    code, _, err = run(capsys, "generate", "--alpha", "2.5", "--z", "6.7", "--n", "1e4",
                       "--seed", "1", "--out", str(out))
    assert code == 0
    g = read_edge_list(out)
    assert g.n == 10**4
    assert_valid(g)


def test_generate_json(tmp_path, capsys):
    d = tmp_path / "d.txt"
    write_degrees([2, 2, 1, 1], d)
    code, out, _ = run(capsys, "generate", "--degrees", str(d), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 4 and len(doc["edges"]) == 3


@pytest.mark.parametrize("text, code", [
    ("1\n1\n1\n", 2),        # odd sum
    ("3\n3\n1\n1\n", 2),     # even but not graphical
    ("1\n1\n1\n1\n", 3),     # two edges cannot join four vertices
    ("2\nx\n", 4),
])
def test_generate_exit_codes(tmp_path, capsys, text, code):
    d = tmp_path / "d.txt"
    d.write_text(text)
    got, out, err = run(capsys, "generate", "--degrees", str(d))
    assert got == code and out == ""
    if code == 2:
        assert "unrealizable degree sequence" in err
    if text == "2\nx\n":
        assert "line 2" in err


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "generate")[0] == 4
    assert run(capsys, "generate", "--alpha", "2.5")[0] == 4
    assert run(capsys, "generate", "--degrees", str(tmp_path / "missing.txt"))[0] == 4
    assert run(capsys, "frobnicate")[0] == 4
    assert run(capsys, "generate", "--alpha", "2.5", "--z", "0.5", "--n", "100")[0] == 4
    assert run(capsys, "--help")[0] == 0


SMALL = {
    "generate": ["--alpha", "2.5", "--z", "3", "--n", "300"],
    "bench-heuristics": ["--n", "300", "--z-list", "3", "--sequences", "2"],
    "bench-pk": ["--n", "1000", "--widths", "1", "2", "4", "--samples", "2000"],
    "bench-timing": ["--m-list", "200", "400", "--variants", "geometric", "final"],
    "bench-uniformity": ["--sequence", "2", "2", "1", "1", "--runs", "200"],
    "bias-study": ["--n", "1000", "--z-list", "2", "3", "--trials", "2"],
}


@pytest.mark.parametrize("cmd", list(SMALL))
def test_deterministic(tmp_path, capsys, cmd):
    outs = []
    for k in range(2):
        path = tmp_path / f"{k}.txt"
        code, _, _ = run(capsys, cmd, *SMALL[cmd], "--seed", "17", "--out", str(path), "--quiet")
        assert code == 0
        text = path.read_text()
        if cmd == "bench-timing":
            text = mask_column(text, "wall_time")
        outs.append(text)
    assert outs[0] == outs[1]
    assert outs[0].endswith("\n")


def mask_column(csv_text, name):
    lines = csv_text.splitlines()
    head = 1 if lines[0].startswith("#") else 0
    idx = lines[head].split(",").index(name)
    out = lines[:head + 1]
    for ln in lines[head + 1:]:
        cells = ln.split(",")
        cells[idx] = "*"
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def test_bench_csv_headers(capsys):
    code, out, _ = run(capsys, "bias-study", "--n", "500", "--z-list", "2", "--trials", "1", "--quiet")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# seed=0 ")
    assert lines[1].startswith("alpha,n,z_target,trials,N,M,Z,")
    code, out, _ = run(capsys, "bench-pk", "--n", "500", "--widths", "1", "2", "--samples", "500",
                       "--format", "json", "--quiet")
    doc = json.loads(out)
    assert code == 0 and [r["K"] for r in doc["rows"]] == [1, 2]


def test_uniformity_cli(capsys):
    code, out, _ = run(capsys, "bench-uniformity", "--sequence", "2", "2", "2", "--runs", "20",
                       "--heuristics", "final", "naive", "--quiet")
    rows = out.splitlines()[2:]
    assert code == 0 and len(rows) == 2
    assert rows[0].startswith("2 2 2,final,20,")


def test_console_script(tmp_path):
    d = tmp_path / "d.txt"
    write_degrees([2, 2, 2], d)
    res = subprocess.run([sys.executable, "-m", "swapchain.cli", "generate", "--degrees", str(d)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("3 3\n")
    d.write_text("1\n1\n1\n")
    res = subprocess.run([sys.executable, "-m", "swapchain.cli", "generate", "--degrees", str(d)],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "unrealizable degree sequence" in res.stderr
