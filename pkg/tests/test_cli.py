import json
import subprocess
import sys

import pytest

from lambekws.cli import EXIT_ERROR, EXIT_LIMIT, EXIT_NO, EXIT_OK, CliError, Config, main
from lambekws.syntax import parse_algebra, print_algebra
from lambekws.kalgebra import random_algebra
from lambekws.fields import F2

SENTENCE = ["--sentence", "key that Alice found", "--goal", "n"]


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def test_prove_identity(capsys):
    code, out, _ = run(capsys, "prove", "p => p")
    assert code == EXIT_OK and out.startswith("proved")


def test_prove_unprovable_with_hint(capsys):
    code, out, _ = run(capsys, "prove", "p => q")
    assert code == EXIT_NO and "hint: refuted in a 2-element" in out


def test_prove_budget(capsys):
    code, out, _ = run(capsys, "prove", "--adia", "--diac", "--budget", "3", *SENTENCE[:1], "key that Alice found there", "--goal", "n")
    assert code == EXIT_LIMIT and "inconclusive" in out


def test_prove_sentence(capsys):
    assert run(capsys, "prove", "--adia", *SENTENCE)[0] == EXIT_OK
    assert run(capsys, "prove", *SENTENCE)[0] == EXIT_NO
    code, out, _ = run(capsys, "prove", "--adia", "--diac", "--format", "json-lines", "--sentence", "key that Alice found there", "--goal", "n")
    assert code == EXIT_OK
    recs = records(out)
    assert recs and recs[-1]["status"] == "proved" and recs[-1]["command"] == "prove"


def test_prove_json_schema(capsys):
    code, out, _ = run(capsys, "prove", "--format", "json-lines", "p => q")
    (rec,) = records(out)
    assert rec["status"] == "exhausted" and rec["countermodel"]["size"] == 2
    code, out, _ = run(capsys, "prove", "--format", "json-lines", "p*q => p*q")
    (rec,) = records(out)
    assert rec["proof"]["rule"] == "tensorL"


def test_lexfile_and_file(capsys, tmp_path):
    lex = tmp_path / "lex.txt"
    lex.write_text("a : np\nb : np\\s\n")
    assert run(capsys, "prove", "--lexfile", str(lex), "--sentence", "a b", "--goal", "s")[0] == EXIT_OK
    f = tmp_path / "seq.txt"
    f.write_text("p => p\n")
    assert run(capsys, "prove", "--file", str(f))[0] == EXIT_OK


def test_errors(capsys):
    code, _, err = run(capsys, "prove", "p * => q")
    assert code == EXIT_ERROR and "parse error" in err
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == EXIT_ERROR
    assert run(capsys, "prove", "--depth", "0", "p => p")[0] == EXIT_ERROR
    assert run(capsys, "eval", "missing.alg", "missing.val", "p => p")[0] == EXIT_ERROR


def test_config_validation():
    with pytest.raises(CliError):
        Config(depth=0)
    c = Config()
    assert (c.depth, c.budget, c.dim_bound, c.poset_bound) == (40, 200_000, 16, 3)


def test_export_latex(capsys):
    code, out, _ = run(capsys, "export-latex", "--adia", *SENTENCE)
    assert code == EXIT_OK and out.startswith(r"\begin{prooftree}") and r"A\Diamond" in out


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "--kind", "formula", "(n\\n)/(s/◇■np)")
    assert code == EXIT_OK and "(n\\n)/(s/dia box np)" in out
    assert run(capsys, "parse", "(p , q => r")[0] == EXIT_ERROR


def test_check_algebra_quaternions(capsys):
    code, out, _ = run(capsys, "check-algebra", "quaternions", "--property", "commutative", "--format", "json-lines")
    (rec,) = records(out)
    assert rec["status"] == "fails" and rec["witness"] == ["(2,3,4,2)", "(3,8,1,4)"]
    code, out, _ = run(capsys, "check-algebra", "octonions", "--property", "associative")
    assert "fails" in out


def test_check_algebra_sweep(capsys):
    code, out, _ = run(capsys, "check-algebra", "random:F2:2", "--seed", "3")
    assert code == EXIT_OK
    for prop in ("commutative", "associative", "unital", "contractive", "expansive", "monoidal"):
        assert prop in out


def test_check_pseudo_and_vplus(capsys, tmp_path):
    assert run(capsys, "check-pseudo", "quaternions", "unital", "--candidate", "1,0,0,0")[0] == EXIT_OK
    assert run(capsys, "check-pseudo", "quaternions", "pseudo_commutative")[0] == EXIT_NO
    alg = tmp_path / "a.alg"
    alg.write_text(print_algebra(random_algebra(F2, 2, 0)))
    assert run(capsys, "check-vplus", str(alg), "commutative")[0] == EXIT_NO
    rel = tmp_path / "id.rel"
    rel.write_text("relation functional\n1 0\n0 1\n")
    assert run(capsys, "check-vplus", str(alg), "right_associative", "--relation", str(rel))[0] in (EXIT_OK, EXIT_NO)
    assert run(capsys, "check-vplus", str(alg), "right_associative")[0] == EXIT_ERROR


def test_validate_relation(capsys, tmp_path):
    rel = tmp_path / "bad.rel"
    rel.write_text("relation extensional\nfield F2\ndim 2\n1 0 -> 0 0\n")
    code, out, _ = run(capsys, "validate-relation", str(rel), "--format", "json-lines")
    assert code == EXIT_NO
    l3 = [r for r in records(out) if r["clause"] == "L3R"][0]
    assert not l3["ok"] and l3["witness"] == ["(1,0)"]


def test_embed_and_verify(capsys, tmp_path):
    out_alg = tmp_path / "e.alg"
    code, out, _ = run(capsys, "embed", "builtin:lukasiewicz3", "--out", str(out_alg))
    assert code == EXIT_OK and "F2^9" in out
    assert parse_algebra(out_alg.read_text()).dim == 9
    code, out, _ = run(capsys, "verify-embedding", "builtin:lukasiewicz3", "--format", "json-lines")
    recs = records(out)
    assert code == EXIT_OK and [r["clause"] for r in recs] == ["order", "tensor", "lres", "rres", "dia", "box"]


def test_countermodel(capsys):
    code, out, _ = run(capsys, "countermodel", "--embed", "--format", "json-lines", "p*q => q*p")
    (rec,) = records(out)
    assert code == EXIT_OK and rec["status"] == "found" and rec["embedded_holds"] is False
    assert run(capsys, "countermodel", "--max-size", "2", "p => p")[0] == EXIT_NO
    assert run(capsys, "countermodel", "--max-size", "4", "p => q")[0] == EXIT_ERROR


def test_eval(capsys, tmp_path):
    alg = tmp_path / "a.alg"
    alg.write_text(print_algebra(random_algebra(F2, 2, 0)))
    val = tmp_path / "v.val"
    val.write_text("p : 1,0\nq : 0,1\n")
    assert run(capsys, "eval", str(alg), str(val), "p => p")[0] == EXIT_OK
    code, out, _ = run(capsys, "eval", "--show", str(alg), str(val), "p * q => q * p")
    assert code in (EXIT_OK, EXIT_NO) and "lhs =" in out
    assert run(capsys, "eval", str(alg), str(val), "dia p => p")[0] == EXIT_ERROR  # no relation


def test_color_env(capsys, monkeypatch):
    monkeypatch.setenv("LAMBEKWS_COLOR", "always")
    _, out, _ = run(capsys, "prove", "p => p")
    assert "\033[32mproved" in out
    monkeypatch.setenv("LAMBEKWS_COLOR", "always")
    _, out, _ = run(capsys, "prove", "--format", "json-lines", "p => p")
    assert "\033" not in out


def test_entry_point_deterministic():
    cmd = [sys.executable, "-m", "lambekws.cli", "check-algebra", "random:F2:3", "--seed", "5", "--format", "json-lines"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
