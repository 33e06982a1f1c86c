import csv
import json
import xml.etree.ElementTree as ET

import jsonschema
import pytest

from monodromy_lab import catalog
from monodromy_lab.cli import main
from monodromy_lab.report import load_schema

SCHEMA = load_schema()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    data = json.loads(out) if code == 0 else None
    if data is not None:
        jsonschema.validate(data, SCHEMA)
    return code, data, err


def test_classify_focus(capsys):
    code, data, _ = run(capsys, "classify", "--system", "champagne", "--point", "0,0,0,0")
    assert code == 0
    assert data["outputs"]["reports"][0]["type"] == "FocusFocus"
    assert data["schema"] == "monodromy-lab/run-report/1"


def test_classify_elliptic(capsys):
    code, data, _ = run(capsys, "classify", "--system", "oscillators", "--point", "0,0,0,0")
    assert data["outputs"]["reports"][0]["type"] == "EllipticElliptic"


def test_classify_not_equilibrium(capsys):
    code, _, err = run(capsys, "classify", "--system", "champagne", "--point", "1,1,1,1")
    assert code == 3 and "not an equilibrium" in err


def test_classify_all_seeds(capsys):
    code, data, _ = run(capsys, "classify", "--system", "champagne", "--all-seeds", "--grid", "3")
    assert code == 0
    assert [r["type"] for r in data["outputs"]["reports"]] == ["FocusFocus"]


@pytest.mark.parametrize("n", [1, 4])
def test_model(capsys, n):
    code, data, _ = run(capsys, "model", "--pinch-points", str(n))
    assert code == 0 and data["outputs"]["matrix"] == [[1, n], [0, 1]]
    assert data["outputs"]["affine_holonomy"] == [[1, n], [0, 1]]


def test_model_domain(capsys):
    code, _, err = run(capsys, "model", "--pinch-points", "0")
    assert code == 2 and err


def test_scan_csv_and_svg(capsys, tmp_path):
    c, s = tmp_path / "out.csv", tmp_path / "out.svg"
    code, data, _ = run(capsys, "scan", "--system", "oscillators", "--box", "-1:1", "--grid", "3",
                        "--csv", str(c), "--svg", str(s))
    assert code == 0
    rows = list(csv.reader(c.open()))
    assert rows[0] == ["c1", "c2", "type"]
    assert any(float(r[0]) == 0 and float(r[1]) == 0 and r[2] == "EllipticElliptic" for r in rows[1:])
    root = ET.parse(s).getroot()
    assert root.tag.endswith("svg")


def test_scan_hyperbolic(capsys):
    code, data, _ = run(capsys, "scan", "--system", "linear-hyperbolic", "--box", "-1:1", "--grid", "3")
    assert any(cv["type"] == "HyperbolicHyperbolic" for cv in data["outputs"]["critical_values"])


@pytest.mark.parametrize("box", ["1:-1", "a:b", "0:1:2", "0:1,0:1"])
def test_scan_bad_box(capsys, box):
    code, _, err = run(capsys, "scan", "--system", "champagne", "--box", box)
    assert code == 2 and "--box" in err


def test_lattice(capsys):
    code, data, _ = run(capsys, "lattice", "--system", "oscillators", "--value", "0.5,0.5")
    assert code == 0
    B = data["outputs"]["lattice"]["basis"]
    assert B[0][0] == pytest.approx(6.283185307179586, abs=1e-8)
    assert B[1][1] == pytest.approx(6.283185307179586, abs=1e-8)


def test_lattice_champagne_circle_row(capsys):
    code, data, _ = run(capsys, "lattice", "--system", "champagne", "--value", "0.1,0.02")
    assert data["outputs"]["lattice"]["basis"][1] == [0.0, 6.283185307179586]


def test_lattice_critical(capsys):
    code, _, err = run(capsys, "lattice", "--system", "champagne", "--value", "0,0")
    assert code == 3 and "critical value" in err


def test_monodromy_identity_and_svg(capsys, tmp_path):
    s = tmp_path / "loop.svg"
    code, data, _ = run(capsys, "monodromy", "--system", "oscillators", "--center", "0.5,0.5",
                        "--radius", "0.1", "--samples", "24", "--svg", str(s), "--grid", "3")
    assert code == 0 and data["outputs"]["matrix"] == [[1, 0], [0, 1]]
    assert data["outputs"]["vanishing_cycle"] is None
    ET.parse(s)


def test_monodromy_champagne(capsys, tmp_path):
    j = tmp_path / "r.json"
    code, data, _ = run(capsys, "monodromy", "--system", "champagne", "--center", "0,0", "--radius", "0.05",
                        "--json", str(j))
    assert code == 0
    out = data["outputs"]
    assert out["trace"] == 2 and out["twist"] == 1 and out["unipotent"]
    assert json.loads(j.read_text()) == data


def test_monodromy_radius_guard(capsys):
    code, _, err = run(capsys, "monodromy", "--system", "champagne", "--center", "0,0", "--radius", "0.0005")
    assert code == 2


def test_deterministic(capsys):
    argv = ("lattice", "--system", "champagne", "--value", "0.1,0.02", "--seed-rng", "3")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a["outputs"] == b["outputs"]


def test_file_system(capsys, tmp_path):
    p = tmp_path / "c.txt"
    p.write_text(catalog.builtin_config("champagne"))
    code, data, _ = run(capsys, "classify", "--file", str(p), "--point", "0,0,0,0")
    assert code == 0 and data["outputs"]["reports"][0]["type"] == "FocusFocus"


def test_file_parse_error(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("[system]\nname = b\nF1 = x1 +\nF2 = y1\n")
    code, _, err = run(capsys, "classify", "--file", str(p), "--point", "0,0,0,0")
    assert code == 2 and "line 3, column 10" in err


@pytest.mark.parametrize("argv", [
    (),
    ("bogus",),
    ("classify", "--point", "0,0,0,0"),
    ("classify", "--system", "nope", "--point", "0,0,0,0"),
    ("classify", "--system", "champagne", "--point", "0,0"),
    ("classify", "--system", "champagne", "--point", "a,b,c,d"),
    ("lattice", "--system", "champagne"),
    ("classify", "--file", "/nonexistent/x", "--point", "0,0,0,0"),
])
def test_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_list_systems(capsys):
    code, data, _ = run(capsys, "list-systems")
    names = [s["name"] for s in data["outputs"]["systems"]]
    assert "champagne" in names and "spherical-pendulum" in names


def test_log_env(capsys, monkeypatch):
    monkeypatch.setenv("MONODROMY_LAB_LOG", "debug")
    code, _, _ = run(capsys, "model", "--pinch-points", "1")
    assert code == 0
