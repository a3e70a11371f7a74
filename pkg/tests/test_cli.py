"""Unittests for dialectica.cli."""

import hashlib
import io
import json

import pandas as pd
import pytest

from dialectica import __version__
from dialectica.cli import EXIT_CAP, EXIT_IO, EXIT_USAGE, main
from dialectica.extensions import Semantics
from dialectica.prioritizer import (
    histogram,
    histogram_hash,
    load_corpus,
    prioritise,
    run_dialogues,
)


def _lines(capsys):
    return capsys.readouterr().out.splitlines()


def _planted(fixtures_dir):
    return [str(fixtures_dir / "planted_nodes.csv"), str(fixtures_dir / "planted_edges.csv")]


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


# formula


def test_formula_summary(capsys):
    assert main(["formula", "a & ~a"]) == 0
    assert _lines(capsys) == [
        "formula: a & ~a",
        "atoms: a",
        "tautology: false",
        "satisfiable: false",
        "models: 0/2",
    ]


def test_formula_model(capsys, fixtures_dir):
    """It should print the four-valued value of the formula at every world."""
    model = str(fixtures_dir / "glut_model.json")
    assert main(["--trace", "formula", "a & ~a", "--model", model]) == 0
    captured = capsys.readouterr()
    assert "w0: i" in captured.out.splitlines()
    assert "w1: n" in captured.out.splitlines()
    events = [json.loads(line) for line in captured.err.splitlines() if line.startswith("{")]
    assert {"event": "eval4", "value": "i", "world": "w0"} in events


def test_formula_syntax_error(capsys):
    assert main(["formula", "a &"]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


# af


def test_af_audience(capsys, fixtures_dir):
    assert main(["af", str(fixtures_dir / "example_kb0.kb"), "--audience", "y > w"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["reports"] == [
        {"semantics": "preferred", "audience": ["y", "w"], "extensions": [["A1", "A3", "A4"]]}
    ]
    assert [a["id"] for a in doc["framework"]["arguments"]] == ["A1", "A2", "A3", "A4"]


def test_af_tree_all_audiences(capsys, fixtures_dir):
    args = ["af", str(fixtures_dir / "example_kb0.kb"), "--semantics", "grounded", "--tree", "A1"]
    assert main(args) == 0
    reports = json.loads(capsys.readouterr().out)["reports"]
    assert [r["audience"] for r in reports] == [["y", "w"], ["w", "y"]]
    assert reports[1]["extensions"] == [["A2", "A3", "A4"]]
    assert [d["id"] for d in reports[1]["tree"]["defeaters"]] == ["A2", "A4"]


def test_af_concede_filter(capsys, fixtures_dir):
    """It should keep every attack of a corpus with consistent supports."""
    args = ["af", str(fixtures_dir / "example_kb0.kb"), "--audience", "y > w"]
    assert main(args) == 0
    plain = json.loads(capsys.readouterr().out)
    assert main([*args, "--concede-filter"]) == 0
    assert json.loads(capsys.readouterr().out) == plain


def test_af_missing_corpus(tmp_path):
    assert main(["af", str(tmp_path / "missing.kb")]) == EXIT_IO


def test_af_out(capsys, fixtures_dir, tmp_path):
    """It should refuse to overwrite a result without --force."""
    args = ["af", str(fixtures_dir / "example_kb0.kb"), "--out", str(tmp_path)]
    assert main(args) == 0
    assert (tmp_path / "extensions_preferred.json").is_file()
    assert "wrote" in capsys.readouterr().out
    assert main(args) == EXIT_IO
    assert main([*args, "--force"]) == 0


# ddg


def test_ddg_solve(capsys):
    assert main(["ddg", "a & ~a", "--ruleset", "dialetheic", "--verify"]) == 0
    lines = _lines(capsys)
    assert lines[0] == "winner: P"
    assert lines[1].startswith("explored: ")
    assert lines[-1] == "verified: true"


def test_ddg_solve_with_model(capsys, fixtures_dir):
    model = str(fixtures_dir / "glut_model.json")
    assert main(["ddg", "a & ~a", "--ranks", "1,2", "--model", model]) == 0
    lines = _lines(capsys)
    assert lines[0] == "winner: O"
    assert "model value: i" in lines


def test_ddg_strategy_out(capsys, tmp_path):
    assert main(["ddg", "a | ~a", "--strategy", "--out", str(tmp_path)]) == 0
    assert "winner: P" in _lines(capsys)
    entries = json.loads((tmp_path / "strategy.json").read_text(encoding="utf8"))
    assert entries
    assert all(e["force"] in ("A", "D") for e in entries)


def test_ddg_replay(capsys, fixtures_dir):
    transcript = str(fixtures_dir / "example3_transcript.json")
    assert main(["ddg", "--mode", "replay", "--transcript", transcript]) == 0
    lines = _lines(capsys)
    assert lines[0] == "(0) P !a & ~a -> ~a"
    assert lines[-2:] == ["valid: true", "winner: P"]


def test_ddg_step(capsys, monkeypatch):
    """It should report illegal moves and carry on until the dialogue ends."""
    monkeypatch.setattr("sys.stdin", io.StringIO("O ?or@0\nO ?andR@0\nP !~a@3\n"))
    assert main(["ddg", "a & ~a", "--ruleset", "dialetheic", "--mode", "step"]) == 0
    lines = _lines(capsys)
    assert any(line.startswith("illegal: [L]") for line in lines)
    assert "(3) O A:?andR@0" in lines
    assert "(4) P D:!~a@3" in lines
    assert lines[-1] == "winner: P"


def test_ddg_errors(capsys):
    assert main(["ddg", "a & b & c & d & e & f & g"]) == EXIT_CAP
    assert "cap exceeded" in capsys.readouterr().err
    assert main(["ddg", "--mode", "replay"]) == EXIT_USAGE
    assert main(["ddg"]) == EXIT_USAGE
    assert main(["ddg", "a", "--ranks", "x"]) == EXIT_USAGE


# prioritize


def test_prioritize_stdout(capsys, fixtures_dir):
    corpus = str(fixtures_dir / "example_restoration.kb")
    assert main(["prioritize", corpus, "--seed", "1", "-n", "3"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "tag,pos1,pos2\nagriculture,0,3\nrestoration,3,0\n"
    assert '"order": [\n    "restoration",\n    "agriculture"\n  ]' in captured.err


def test_prioritize_glr(capsys, fixtures_dir):
    """It should print the same histogram as the library for the paramo corpus."""
    path = fixtures_dir / "glr_premises.kb"
    args = ["prioritize", str(path), "--seed", "7", "-n", "100", "--semantics", "grounded"]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == out

    counts = pd.read_csv(io.StringIO(out), index_col="tag")
    assert (counts.sum(axis=1) == 100).all()
    assert (counts.sum(axis=0) == 100).all()

    hist = histogram(run_dialogues(load_corpus(path), Semantics.GROUNDED, 100, seed=7))
    assert hashlib.sha256(out.encode("utf8")).hexdigest() == histogram_hash(hist)
    order = prioritise(hist).tags
    assert order.index("convites") < order.index("revert to burning")
    assert order.index("oak coffee") < order.index("revert to burning")


def test_prioritize_out(capsys, fixtures_dir, tmp_path):
    corpus = str(fixtures_dir / "example_restoration.kb")
    args = ["prioritize", corpus, "--seed", "1", "-n", "2", "--out", str(tmp_path)]
    assert main(args) == 0
    lines = _lines(capsys)
    assert "1. restoration" in lines
    assert "2. agriculture" in lines
    assert (tmp_path / "histogram_grounded.csv").is_file()
    order = json.loads((tmp_path / "order_grounded.json").read_text(encoding="utf8"))
    assert order["order"] == ["restoration", "agriculture"]


def test_prioritize_requires_seed(capsys, fixtures_dir):
    with pytest.raises(SystemExit) as excinfo:
        main(["prioritize", str(fixtures_dir / "example_restoration.kb")])
    assert excinfo.value.code == EXIT_USAGE
    assert "--seed" in capsys.readouterr().err


# net


def test_net_betweenness(capsys, fixtures_dir):
    args = ["net", str(fixtures_dir / "path_nodes.csv"), str(fixtures_dir / "path_edges.csv")]
    assert main([*args, "--action", "betweenness"]) == 0
    assert capsys.readouterr().out == "id,betweenness\na,0.0\nb,1.0\nc,0.0\n"


def test_net_blocks(capsys, fixtures_dir):
    args = ["net", *_planted(fixtures_dir)]
    assert main([*args, "--action", "blocks", "--seed", "7", "--bmin", "2", "--bmax", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["B"] == 2
    assert len(doc["blocks"]) == 30
    dot = [*args, "--action", "blocks", "--seed", "7", "--bmin", "2", "--format", "dot"]
    assert main(dot) == 0
    assert capsys.readouterr().out.startswith("graph actors {")


def test_net_correlate(capsys, fixtures_dir):
    args = ["net", *_planted(fixtures_dir)]
    assert main([*args, "--action", "correlate", "--seed", "3", "--bmin", "2", "--bmax", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "block,0,1"


def test_net_requires_seed(capsys, fixtures_dir):
    args = ["net", str(fixtures_dir / "path_nodes.csv"), str(fixtures_dir / "path_edges.csv")]
    assert main([*args, "--action", "blocks"]) == EXIT_USAGE
    assert "--seed" in capsys.readouterr().err


def test_net_reweighted(capsys, fixtures_dir):
    args = [
        "net",
        str(fixtures_dir / "glr_actors.csv"),
        str(fixtures_dir / "glr_links.csv"),
        "--action",
        "betweenness",
        "--weighted",
        "--actor-tags",
        str(fixtures_dir / "glr_actor_premises.csv"),
        "--accepted",
        "convites",
    ]
    assert main(args) == 0
    assert len(capsys.readouterr().out.splitlines()) == 25
