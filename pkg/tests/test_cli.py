from __future__ import annotations

import io
import json
import os

import pytest

from nilkeller import fileio
from nilkeller.cli import EXIT, main
from nilkeller.families import DEFAULT_SEED, gen_essen_chain
from nilkeller.nilcheck import PolyMap
from nilkeller.polycore import parse_poly

RUNNING_TEXT = "n=3\n-2*x2*(x1+x2^2)+x3\nx1+x2^2\n(x1+x2^2)^2\n"


def run(*argv):
    out = io.StringIO()
    code = main(["--json", *argv], out=out)
    text = out.getvalue()
    reps = [json.loads(chunk) for chunk in _split_json(text)]
    return code, reps


def _split_json(text):
    dec = json.JSONDecoder()
    i = 0
    while i < len(text):
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            break
        obj, j = dec.raw_decode(text, i)
        yield json.dumps(obj)
        i = j


@pytest.fixture
def running(tmp_path):
    p = tmp_path / "running.map"
    p.write_text(RUNNING_TEXT)
    return str(p)


def write_map(tmp_path, name, F):
    p = tmp_path / name
    fileio.write_map_file(p, F)
    return str(p)


def test_check_essen_chain(tmp_path):
    code, [rep] = run("check", write_map(tmp_path, "e.map", gen_essen_chain(5, 2)))
    assert code == 0 and rep["status"] == "ok"
    p = rep["payload"]
    assert p["nilpotent"] is True and p["independent"] is True
    assert set(p["residuals"]) == {"0"}


def test_check_running_and_identity(tmp_path, running):
    code, [rep] = run("check", running)
    assert code == 0
    assert rep["payload"]["residuals"] == ["0", "0", "0"]
    assert rep["payload"]["divisibility"] is True
    ident = write_map(tmp_path, "id.map", PolyMap.identity(3))
    code, [rep] = run("check", ident)
    assert code == EXIT["fail"] and rep["payload"]["nilpotent"] is False


def test_parse_error_reports_position(tmp_path):
    p = tmp_path / "bad.map"
    p.write_text("n=2\nx1 +* x2\nx2\n")
    code, [rep] = run("check", str(p))
    assert code == 4 and rep["status"] == "parse-error"
    assert rep["payload"]["line"] == 2 and rep["payload"]["column"] >= 1


def test_classify_and_verify(tmp_path, running):
    out = str(tmp_path / "w.json")
    code, [rep] = run("classify", running, "--out", out)
    assert code == 0
    assert rep["payload"]["witness"]["case"] == "iii"
    assert "theorem23" in rep["payload"]
    code, [rep] = run("verify", running, out)
    assert code == 0 and rep["payload"]["failures"] == []
    # a tampered witness fails verification
    w = json.loads(open(out).read())
    w["k"] = 1
    (tmp_path / "bad.json").write_text(json.dumps(w))
    code, [rep] = run("verify", running, str(tmp_path / "bad.json"))
    assert code == EXIT["fail"]


def test_classify_case_ii(tmp_path):
    F = PolyMap(tuple(parse_poly(s, 4) for s in ("x4^2", "x1^2", "x1+x2", "0")))
    code, [rep] = run("classify", write_map(tmp_path, "ii.map", F))
    assert code == 0
    assert (rep["payload"]["witness"]["case"], rep["payload"]["witness"]["k"]) == ("ii", 3)


def test_unsupported_shape_is_precondition_error(tmp_path):
    code, [rep] = run("classify", write_map(tmp_path, "e.map", gen_essen_chain(5, 2)))
    assert code == 2 and rep["status"] == "precondition-error"


@pytest.mark.parametrize("shortcut", [True, False])
def test_decompose_and_verify_word(tmp_path, running, shortcut):
    out = str(tmp_path / "word.json")
    args = ["decompose", running, "--out", out] + ([] if shortcut else ["--no-shortcut"])
    code, [rep] = run(*args)
    assert code == 0 and rep["payload"]["composition"] == "exact"
    code, [rep] = run("verify-word", running, out)
    assert code == 0 and rep["payload"]["inverse"] is True


def test_verify_word_detects_wrong_word(tmp_path, running):
    other = write_map(tmp_path, "o.map", PolyMap(tuple(parse_poly(s, 3) for s in ("0", "x1^2", "0"))))
    out = str(tmp_path / "word.json")
    run("decompose", other, "--out", out)
    code, [rep] = run("verify-word", running, out)
    assert code == EXIT["fail"]


@pytest.mark.parametrize("family,extra", [
    ("essen_chain", ["--n", "6", "--d", "3"]),
    ("quartic_n4", ["--d", "4"]),
    ("thm23", []),
    ("thm24_case", ["--case", "i", "--n", "5", "--k", "4"]),
    ("generalized", ["--n", "4"]),
])
def test_gen_round_trips(tmp_path, family, extra):
    code, [rep] = run("gen", family, "--out", str(tmp_path), "--seed", "7", *extra)
    assert code == 0
    prov = json.loads(open(rep["payload"]["provenance"]).read())
    assert prov["family"] == family and prov["seed"] == 7
    F = fileio.read_map_file(rep["payload"]["map"])
    assert fileio.dump_map(F) == open(rep["payload"]["map"]).read()
    code, [rep] = run("check", rep["payload"]["map"])
    assert rep["payload"]["nilpotent"] is True


def test_gen_is_seeded(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("gen", "thm23", "--out", str(a))
    run("gen", "thm23", "--out", str(b))
    name = f"thm23_{DEFAULT_SEED}.map"
    assert (a / name).read_text() == (b / name).read_text()


def test_flags_after_subcommand_and_jobs(tmp_path, running):
    other = write_map(tmp_path, "e.map", gen_essen_chain(5, 3))
    out = io.StringIO()
    code = main(["check", running, other, "--jobs", "2", "--json"], out=out)
    assert code == 0
    assert len(list(_split_json(out.getvalue()))) == 2


def test_human_output(running):
    out = io.StringIO()
    assert main(["check", running], out=out) == 0
    assert out.getvalue().startswith("check: ok")


def test_corpus_small(tmp_path):
    code, [rep] = run("corpus", "--small", "--out", str(tmp_path / "c"))
    assert code == 0
    assert rep["payload"]["failing_checks"] == []
    assert rep["payload"]["files"] == len(os.listdir(tmp_path / "c"))
