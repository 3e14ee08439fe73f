import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

from novicat import fixtures as fx
from novicat.cli import EXIT_INPUT, EXIT_OK, EXIT_VERIFY, main
from novicat.report import dumps, without_timing

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = {
    "movable-bs12-plus": ["movable", "--input", "bs12.pres", "--xi", "1"],
    "movable-bs12-minus": ["movable", "--input", "bs12.pres", "--xi", "-1"],
    "field-bs12": ["field-movable", "--input", "bs12.pres"],
    "pairing-genus2": ["pairing", "--fixture", "genus2"],
    "diag-bs12": ["novikov-diag", "--input", "bs12.pres", "--cutoff", "8"],
    "chain-circle": ["chain", "--input", "circle.pres", "--cutoff", "10"],
    "catbound-surface": ["catbound", "--input", "surface.facts"],
    "surfaces-k3": ["surfaces", "--pattern", "2:nz,3:z,2:nz"],
}


@pytest.fixture
def corpus_dir(tmp_path, monkeypatch):
    for name, text in fx.emitted_files().items():
        (tmp_path / name).write_text(text)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_movable_plus(corpus_dir, capsys):
    code, rep = run_json(capsys, ["movable", "--input", "bs12.pres", "--xi", "1", "--verify"])
    assert code == EXIT_OK
    res = rep["results"][0]
    assert (res["outcome"], res["d"]) == ("NotMovable", 2)
    assert rep["verification"]["failures"] == []


def test_movable_minus(corpus_dir, capsys):
    code, rep = run_json(capsys, ["movable", "--input", "bs12.pres", "--xi", "-1", "--verify"])
    assert code == EXIT_OK
    assert rep["results"][0]["outcome"] == "Movable"
    assert rep["results"][0]["delta_text"] == "-2 + t"


def test_movable_text(corpus_dir, capsys):
    assert main(["movable", "--input", "bs12.pres", "--xi", "1"]) == EXIT_OK
    assert "NotMovable{d=2}" in capsys.readouterr().out


def test_surfaces_example(capsys):
    code, rep = run_json(capsys, ["surfaces", "--pattern", "2:nz,3:z,2:nz", "--verify"])
    assert code == EXIT_OK
    res = rep["results"][0]
    assert (res["cat1"], res["cat"], res["difference"]) == (5, 3, 2)
    assert rep["verification"]["failures"] == []


def test_chain_circle(corpus_dir, capsys):
    code, rep = run_json(capsys, ["chain", "--input", "circle.pres", "--cutoff", "10", "--verify"])
    assert code == EXIT_OK
    res = [r for r in rep["results"] if r["kind"] == "chain"][0]
    assert res["terms"] == 10
    assert res["chain_text"] == ["-1 - t - t^2 - t^3 - t^4 - t^5 - t^6 - t^7 - t^8 - t^9"]
    assert rep["verification"]["failures"] == []


def test_catbound_with_declared_facts(tmp_path, capsys):
    text = fx.SURFACE_FACTS.replace("query z\n", "query z\nfact cwgt-lower z 1\n")
    path = tmp_path / "declared.facts"
    path.write_text(text)
    code, rep = run_json(capsys, ["catbound", "--input", str(path), "--verify"])
    assert code == EXIT_OK
    assert rep["verification"]["failures"] == []


def test_field_and_pairing(capsys):
    code, rep = run_json(capsys, ["field-movable", "--fixture", "bs12", "--xi", "1", "--verify"])
    assert code == EXIT_OK and rep["results"][0]["movable"] is True
    code, rep = run_json(capsys, ["pairing", "--fixture", "bs12", "--xi", "-1", "--monodromy", "2",
                                  "--monodromy", "1/2", "--verify"])
    assert code == EXIT_OK
    assert [r["image_nonzero"] for r in rep["results"]] == [False, True]


@pytest.mark.parametrize("argv", [
    ["movable", "--input", "missing.pres"],
    ["movable", "--fixture", "bs12", "--xi", "1 1"],
    ["surfaces", "--pattern", "1:nz"],
    ["surfaces"],
    ["pairing", "--fixture", "bs12", "--monodromy", "zero"],
    ["fixtures", "--name", "nothing"],
])
def test_input_errors(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_INPUT
    assert "input error" in capsys.readouterr().err


def test_malformed_presentation(tmp_path, capsys):
    p = tmp_path / "bad.pres"
    p.write_text("[generators]\na\n[xi]\n1\n[project]\na: x\n")
    assert main(["movable", "--input", str(p)]) == EXIT_INPUT
    assert "line 6" in capsys.readouterr().err


def test_tampered_report_fails_verification(corpus_dir, capsys):
    code, rep = run_json(capsys, ["movable", "--input", "bs12.pres", "--xi", "-1"])
    rep["results"][0]["chain"][0] = [[[0], "3"]]
    path = corpus_dir / "bad.json"
    path.write_text(json.dumps(rep))
    assert main(["verify", str(path), "--input", "bs12.pres"]) == EXIT_VERIFY


def test_tampered_surface_report(capsys, tmp_path):
    code, rep = run_json(capsys, ["surfaces", "--pattern", "2:nz"])
    rep["results"][0]["cat1"] = 3
    path = tmp_path / "s.json"
    path.write_text(json.dumps(rep))
    assert main(["verify", str(path)]) == EXIT_VERIFY


def test_fixture_roundtrip(tmp_path, capsys):
    code, rep = run_json(capsys, ["fixtures", "--dir", str(tmp_path), "--verify"])
    assert code == EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(fx.emitted_files())
    for p in tmp_path.iterdir():
        assert p.read_text() == fx.emitted_files()[p.name]


def test_workers_deterministic(capsys, monkeypatch):
    argv = ["surfaces", "--pattern", "2:nz,3:z", "--pattern", "3:z,2:nz", "--pattern", "2:z"]
    monkeypatch.setenv("NOVICAT_WORKERS", "1")
    _, one = run_json(capsys, argv)
    monkeypatch.setenv("NOVICAT_WORKERS", "3")
    _, many = run_json(capsys, argv)
    assert dumps(without_timing(one)) == dumps(without_timing(many))


def test_output_file(corpus_dir, capsys):
    assert main(["movable", "--input", "torus.pres", "--format", "json", "-o", "out.json"]) == EXIT_OK
    saved = json.loads((corpus_dir / "out.json").read_text())
    assert main(["verify", "out.json", "--input", "torus.pres"]) == EXIT_OK


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_reports(name, corpus_dir, capsys):
    code, rep = run_json(capsys, GOLDEN_RUNS[name])
    assert code == EXIT_OK
    path = GOLDEN / f"{name}.json"
    if os.environ.get("NOVICAT_REGEN_GOLDEN"):
        path.write_text(dumps(without_timing(rep)))
    assert dumps(without_timing(rep)) == path.read_text()
    assert main(["verify", str(path), "--input", GOLDEN_RUNS[name][2]] if "--input" in GOLDEN_RUNS[name]
                else ["verify", str(path)]) == EXIT_OK


@pytest.mark.skipif(shutil.which("novicat") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["novicat", "movable", "--fixture", "bs12", "--xi", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and "NotMovable" in out.stdout
