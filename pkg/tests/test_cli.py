import csv
import json
import os
import subprocess
import sys

import pytest

from nullwidth.cli import main
from nullwidth.complexes import Cochain, cycle_graph


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def c4_files(tmp_path):
    C = cycle_graph(4)
    good = Cochain(C, 1, {0: 1, 1: -1})
    bad = Cochain(C, 1, {0: 1})
    return (_write(tmp_path / "c4.json", C.to_json()), _write(tmp_path / "w.json", good.to_json()),
            _write(tmp_path / "bad.json", bad.to_json()))


def test_subdivide(tmp_path):
    out = tmp_path / "s.json"
    assert main(["subdivide", "--sphere-dim", "3", "--L", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["format_version"] == 1
    assert data["run_config"]["subcommand"] == "subdivide"


def test_fill_with_oracle(tmp_path, c4_files):
    cx, w, _ = c4_files
    out = tmp_path / "f.json"
    assert main(["fill", "--complex", cx, "--cochain", w, "--ring", "Q", "--oracle", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["norm"] == "1/2"


def test_fill_infeasible_exit_code(tmp_path, c4_files):
    cx, _, bad = c4_files
    assert main(["fill", "--complex", cx, "--cochain", bad, "--out", str(tmp_path / "x.json")]) == 3


@pytest.mark.parametrize("argv", [[], ["fill"], ["certify", "--L", "1"], ["nope"], ["certify", "--L", "x", "--seed", "0"]])
def test_usage_errors(argv):
    assert main(argv) == 4


def test_missing_input_file_is_usage_error(tmp_path):
    assert main(["verify", str(tmp_path / "missing.json")]) == 4


def test_certify_and_verify(tmp_path):
    cert = tmp_path / "cert.json"
    rep = tmp_path / "rep.json"
    assert main(["certify", "--L", "1", "--seed", "0", "--out", str(cert)]) == 0
    assert main(["verify", str(cert), "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["report"]["passed"]


def test_verify_detects_corruption(tmp_path):
    cert = tmp_path / "cert.json"
    assert main(["certify", "--L", "2", "--seed", "1", "--out", str(cert)]) == 0
    data = json.loads(cert.read_text())
    data["b"]["values"][0][1] = str(int(data["b"]["values"][0][1].split("/")[0]) + 1)
    cert.write_text(json.dumps(data))
    assert main(["verify", str(cert), "--out", str(tmp_path / "r.json")]) == 2


def test_hopf_map_with_oracle(tmp_path):
    out = tmp_path / "h.json"
    assert main(["hopf", "--make-map", "1", "--oracle", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["hopf_cup"] == data["linking_oracle"] == "1/1"
    assert data["agrees"]


def test_scale_study_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scale-study", "--L", "1,2", "--seeds", "2", "--no-runtime", "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][:3] == ["L", "T", "w_norm"]
    assert rows[0][-3:] == ["runtime_s", "seed", "error"]
    assert len(rows) == 5


def test_dga_check(tmp_path):
    model = {"name": "S2", "generators": [{"name": "x", "degree": 2}, {"name": "y", "degree": 3, "d": "x^2"}]}
    m = _write(tmp_path / "m.json", model)
    assert main(["dga-check", "--model", m, "--out", str(tmp_path / "d.json")]) == 0
    bad = {"generators": [{"name": "x", "degree": 2}, {"name": "y", "degree": 3, "d": "x^2"},
                          {"name": "z", "degree": 4, "d": "x*y"}]}
    assert main(["dga-check", "--model", _write(tmp_path / "b.json", bad)]) == 3


def test_output_is_byte_identical_across_hash_seeds(tmp_path):
    out = tmp_path / "cert.json"
    blobs = []
    for hs in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hs)
        subprocess.run([sys.executable, "-m", "nullwidth", "certify", "--L", "2", "--seed", "3", "--out", str(out)],
                       check=True, env=env)
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
