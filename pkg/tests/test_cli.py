import json

import pytest

from setcons.cli import main

from test_dsl import CYCLIC3_TEXT, PINNED6_TEXT

LINEAR2_TEXT = """\
universe [0,10]
const a11 = [0,5]
const a12 = [3,8]
const a21 = [6,9]
const a22 = [2,4]
state X1 = [0,2]
state X2 = [5,7]
rule X1 = (a11 & X1) | (a12 & X2)
rule X2 = (a21 & X1) | (a22 & X2)
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (
        ("cyclic3", CYCLIC3_TEXT),
        ("pinned6", PINNED6_TEXT),
        ("linear2", LINEAR2_TEXT),
    ):
        p = tmp_path / f"{name}.sbm"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_pinned6(files, capsys):
    code, out, err = run(capsys, "analyze", files["pinned6"])
    assert code == 0
    report = json.loads(out)
    assert report["contractive"] is True
    assert report["q"] == 7
    assert report["cycle"] is None
    assert report["equilibria_summary"]["total"] == 1
    assert report["local"]["equilibrium"] == ["[40,60] | [100,120]"] * 6
    assert set(report["witness_order"]) == {"X1", "X2", "X3", "X4", "X5", "X6", "C"}


def test_analyze_cyclic3(files, capsys):
    code, out, err = run(capsys, "analyze", files["cyclic3"])
    assert code == 0
    report = json.loads(out)
    assert report["contractive"] is False
    assert report["cycle"] == ["X1"]
    assert report["witness_order"] is None
    assert report["local"] is None


def test_simulate_json_round1(files, capsys):
    code, out, err = run(capsys, "simulate", files["cyclic3"], "--rounds", "10")
    assert code == 0
    report = json.loads(out)
    assert report["rounds"][1] == [
        "[2,5]",
        "[0,5] | (7,inf)",
        "[0,2) | (7,8) | (11,inf)",
    ]


def test_simulate_seeded_runs_identical(files, capsys):
    args = ("simulate", files["pinned6"], "--rounds", "30", "--seed", "11", "--random-init")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_simulate_text_format(files, capsys):
    code, out, _ = run(capsys, "simulate", files["pinned6"], "--format", "text")
    assert code == 0
    assert "round 0:" in out
    assert "consensus:" in out


def test_encode_output(files, capsys):
    code, out, _ = run(capsys, "encode", files["cyclic3"])
    assert code == 0
    report = json.loads(out)
    assert report["vars"] == {"X1": "11000", "X2": "10100", "X3": "00010"}
    assert report["cells"][0] == {"signature": "110", "region": "[4,5]"}


def test_consensus_linear(files, capsys):
    code, out, _ = run(capsys, "consensus", files["linear2"])
    assert code == 0
    report = json.loads(out)
    assert report == {"exists": True, "region": "[2,4] | [6,8]"}


def test_consensus_rejects_nonlinear(files, capsys):
    code, out, err = run(capsys, "consensus", files["cyclic3"])
    assert code == 1
    assert "not linear" in err


def test_equilibria_output(files, capsys):
    code, out, _ = run(capsys, "equilibria", files["pinned6"])
    assert code == 0
    report = json.loads(out)
    assert report["total"] == 1
    assert all(c == 1 for c in report["per_cell_counts"])


def test_missing_file_is_diagnostic(files, capsys):
    code, out, err = run(capsys, "analyze", files["pinned6"] + ".nope")
    assert code == 1
    assert "cannot read" in err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.sbm"
    bad.write_text("universe [0,1]\nrule X1 = X9\n")
    code, out, err = run(capsys, "analyze", str(bad))
    assert code == 1
    assert "error" in err


def test_cap_exceeded_exit_code(tmp_path, capsys, monkeypatch):
    lines = ["universe [0,100]"]
    for i in range(6):
        lines.append(f"state V{i} = [{i * 10},{i * 10 + 5}]")
    for i in range(6):
        lines.append(f"rule V{i} = V{i} \\ V{(i + 1) % 6}")
    path = tmp_path / "wide.sbm"
    path.write_text("\n".join(lines) + "\n")
    monkeypatch.setenv("SETCONS_CAPS", "generators=3")
    code, out, err = run(capsys, "analyze", str(path))
    assert code == 2
    assert "cap exceeded" in err
