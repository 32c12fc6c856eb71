import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from lutzforms.cli import CONSTRUCTIONS, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(set(CONSTRUCTIONS) - {"full-twist", "round-handle"}))
def test_verify_passes(name, capsys):
    code, out, _ = run(["verify", name, "--dim", "2", "--grid", "9"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "lutzforms.report" and doc["schema_version"] == 1
    assert doc["construction"] == name and all(c["status"] != "fail" for c in doc["checks"])


def test_round_handle(capsys):
    code, out, _ = run(["verify", "round-handle", "--half-dim", "2", "--index", "1"], capsys)
    assert code == 0 and json.loads(out)["parameters"]["m"] == 2


def test_full_twist_exit_codes(capsys):
    assert run(["verify", "full-twist", "--dim", "1"], capsys)[0] == 0
    code, _, err = run(["verify", "full-twist", "--dim", "2", "--grid", "11"], capsys)
    assert code == 1 and "FAIL grid positivity on the t-grid" in err


def test_blob_at_dimension_three_passes(capsys):
    assert run(["verify", "blob", "--dim", "3", "--grid", "9"], capsys)[0] == 0


def test_report_file_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["verify", "lutz-confoliation", "--dim", "2", "--seed", "7", "--out", str(p)],
                   capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 7


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("LUTZFORMS_SEED", "11")
    _, out, _ = run(["verify", "standard-tube", "--dim", "1"], capsys)
    assert json.loads(out)["seed"] == 11
    _, out, _ = run(["verify", "standard-tube", "--dim", "1", "--seed", "3"], capsys)
    assert json.loads(out)["seed"] == 3


def test_default_seed(monkeypatch, capsys):
    monkeypatch.delenv("LUTZFORMS_SEED", raising=False)
    _, out, _ = run(["verify", "standard-tube", "--dim", "1"], capsys)
    assert json.loads(out)["seed"] == 42


@pytest.mark.parametrize("argv", [
    [],
    ["verify", "standard-tube", "--dim", "0"],
    ["verify", "no-such-thing", "--dim", "2"],
    ["verify", "round-handle", "--half-dim", "2", "--index", "3"],
    ["verify", "double", "--dim", "2", "--fold", "0"],
    ["verify", "standard-tube", "--dim", "two"],
    ["plot", "lutz-confoliation", "--dim", "2", "--axes", "r1,r1", "--out", "x.svg"],
    ["trace", "--recipe", "nope", "--dim", "2"],
])
def test_usage_errors(argv, capsys, tmp_path, monkeypatch):
    # argparse failures exit directly, validation failures return the code
    monkeypatch.chdir(tmp_path)
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_bad_seed_environment(monkeypatch, capsys):
    monkeypatch.setenv("LUTZFORMS_SEED", "abc")
    assert run(["verify", "standard-tube", "--dim", "1"], capsys)[0] == 2


def test_plot_writes_svg_and_csv(tmp_path, capsys):
    out = tmp_path / "slice.svg"
    code, _, err = run(["plot", "lutz-confoliation", "--dim", "2", "--axes", "r1,r2",
                        "--out", str(out), "--grid", "31"], capsys)
    assert code == 0 and "1 locus point" in err
    assert ET.parse(out).getroot().tag.endswith("svg")
    assert out.with_suffix(".csv").read_text().startswith("x,y,value\n")


@pytest.mark.parametrize("recipe,tag", [("twist-along-circle", "model π-Lutz tube inserted"),
                                        ("twist-along-hypersurface", "wide Giroux domain")])
def test_trace(recipe, tag, capsys):
    code, out, _ = run(["trace", "--recipe", recipe, "--dim", "2"], capsys)
    assert code == 0
    body = json.loads(out)
    assert {c["name"] for c in body["checks"]} == {"every step legal", "single final piece",
                                                  f"final tag {tag!r}"}
    assert tag in body["trace"]["final"][0]["tags"]


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lutzforms.cli", "verify", "prelag-blowup",
                           "--dim", "1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["construction"] == "prelag-blowup"
