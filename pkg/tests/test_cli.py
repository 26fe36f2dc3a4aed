import json

import pytest

from closurebisim.cli import run
from closurebisim.io import fixture_path, load_model


def fx(name):
    return fixture_path(name)


def test_compare_fig6(capsys):
    assert run(["compare", "--model", fx("fig6.json"), "--p1", "x11", "--p2", "x21"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert (report["path"], report["copa"], report["cmc"], report["trace"]) == (True, True, False, False)
    assert report["trace_witness"]["word"] == [["r"], ["b"]]


def test_compare_all_true(capsys):
    assert run(["compare", "--model", fx("fig2.json"), "--p1", "x11", "--p2", "x21",
                "--kinds", "ap,cm"]) == 0
    assert json.loads(capsys.readouterr().out)["cm"] is True


def test_check(capsys):
    assert run(["check", "--model", fx("fig4.json"), "--formula", "sigma+(b)", "--point", "y24"]) == 1
    assert capsys.readouterr().out.strip() == "false"
    assert run(["check", "--model", fx("fig4.json"), "--formula", "b"]) == 0
    assert json.loads(capsys.readouterr().out) == ["y13", "y23"]


@pytest.mark.parametrize("argv", [
    ["check", "--model", fx("fig4.json"), "--formula", "b &"],
    ["check", "--model", fx("fig4.json"), "--formula", "b", "--point", "nope"],
    ["check", "--model", fx("fig4.json"), "--formula", "zz", "--strict"],
    ["check", "--model", "/nonexistent.json", "--formula", "b"],
    ["compare", "--model", fx("fig6.json"), "--p1", "x11", "--p2", "x21", "--kinds", "bogus"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        run(["minimize", "--model", fx("fig6.json"), "--kind", "nope"])
    assert exc.value.code == 2


def test_minimize_writes_quotient_and_projection(tmp_path, capsys):
    out = tmp_path / "q.json"
    assert run(["minimize", "--model", fx("fig6.json"), "--kind", "copa", "--out", str(out),
                "--verify"]) == 0
    q = load_model(out.read_text())
    assert q.n == 2
    proj = json.loads((tmp_path / "q.projection.json").read_text())
    assert proj["map"]["x11"] == proj["map"]["x22"] != proj["map"]["x23"]
    assert "verify: ok" in capsys.readouterr().err


def test_minimize_maze_verify(capsys):
    assert run(["minimize", "--model", fx("maze.json"), "--kind", "copa", "--verify"]) == 0


def test_ingest_and_render(tmp_path):
    model = tmp_path / "m.json"
    assert run(["ingest", "--image", fx("maze32.ppm"), "--palette", fx("maze_palette.json"),
                "--out", str(model)]) == 0
    assert load_model(model.read_text()).n == 1024
    img = tmp_path / "out.ppm"
    assert run(["render", "--image", fx("maze32.ppm"), "--palette", fx("maze_palette.json"),
                "--kind", "path", "--out", str(img)]) == 0
    assert img.read_bytes()[:2] == b"P6"


def test_distinguish(tmp_path, capsys):
    assert run(["distinguish", "--model", fx("fig10.json"), "--p1", "v12", "--p2", "v22"]) == 0
    w = json.loads(capsys.readouterr().out)
    assert run(["check", "--model", fx("fig10.json"), "--formula", w["formula"], "--point", "v12"]) == 0
    assert run(["check", "--model", fx("fig10.json"), "--formula", w["formula"], "--point", "v22"]) == 1
    assert run(["distinguish", "--model", fx("fig2.json"), "--p1", "x11", "--p2", "x21"]) == 1


def test_dot_validate_random(tmp_path, capsys):
    assert run(["dot", "--model", fx("fig10.json"), "--kind", "cmc"]) == 0
    assert capsys.readouterr().out.startswith("digraph")
    assert run(["validate", "--model", fx("chain3.json"), "--axioms"]) == 0
    assert "idempotent" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text('{"points": [{"id": "a"}], "edges": [["a", "b"]]}')
    assert run(["validate", "--model", str(bad)]) == 1
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["random", "--seed", "7", "--out", str(a)])
    run(["random", "--seed", "7", "--out", str(b)])
    assert a.read_text() == b.read_text()


def test_outputs_deterministic(capsys):
    argv = ["compare", "--model", fx("fig4.json"), "--p1", "y11", "--p2", "y21"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first
