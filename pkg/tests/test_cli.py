import io
import json

import pytest

from mvlaws.cli import ExperimentConfig, build_parser, main, run


def call(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def test_asymptotic_prints_value():
    code, out = call("asymptotic", "--algebra", "L4", "--sentence", "forall x. oplus(pow(P(x),3), not P(x))")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("1/3")


def test_translate_three_lines():
    code, out = call("translate", "--algebra", "L3", "--sentence", "not P(x)")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[1] == "1/2: P^1/2(x)"


def test_montecarlo_csv():
    code, out = call("montecarlo", "--algebra", "B2", "--sentence", "exists x. P(x)", "--n", "20",
                     "--samples", "2000")
    assert code == 0
    rows = [l.split(",") for l in out.strip().splitlines()]
    assert rows[0] == ["n", "value_label", "frequency", "ci_low", "ci_high"]
    one = next(r for r in rows[1:] if r[1] == "1")
    assert float(one[2]) > 0.99


def test_byte_reproducible():
    args = ("montecarlo", "--algebra", "L3", "--sentence", "forall x. exists y. R(x,y)", "--n", "4", "8",
            "--samples", "300", "--seed", "5")
    assert call(*args) == call(*args)


def test_exit_codes(capsys):
    assert call("asymptotic", "--algebra", "L3", "--bogus")[0] == 1
    assert call("asymptotic", "--algebra", "Q9", "--sentence", "exists x. P(x)")[0] == 1
    assert call("asymptotic", "--algebra", "L3", "--sentence", "exists x. P(y)")[0] == 1
    deep = "forall a. forall b. forall c. forall d. forall e. P(a)"
    assert call("asymptotic", "--algebra", "B2", "--sentence", deep)[0] == 2
    assert call("continuum", "extremum")[0] == 1


def test_every_subcommand_has_help(capsys):
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name in sub.choices:
        assert call(name, "--help")[0] == 0
        assert "usage" in capsys.readouterr().out


@pytest.mark.parametrize("argv,needle", [
    (("algebra", "list"), "prod(G3,L4)\t12 elements"),
    (("algebra", "check", "prod(G3,L4)"), "ok"),
    (("parse", "--sentence", "forall x. (P(x) | not P(x))"), "forall x. (P(x) | not P(x))"),
    (("qe", "--algebra", "G3[and,or,not]", "--sentence", "forall x. (P(x) | not P(x))"), "g1"),
    (("asymset", "--algebra", "L4[and,or,not]"), "2/3"),
    (("s5", "--sentence", "box (p | not p)"), "forall w. (P(w) | not P(w))"),
    (("continuum", "extremum", "--term", "not v | prod(v, v)"), "0.381966"),
])
def test_subcommands(argv, needle):
    code, out = call(*argv)
    assert code == 0, out
    assert needle in out


def test_explain_and_json():
    code, out = call("asymptotic", "--algebra", "B2", "--sentence", "forall x. exists y. R(x,y)", "--json")
    assert code == 0
    data = json.loads(out)
    assert "1" in json.dumps(data)
    code, out = call("asymptotic", "--algebra", "B2", "--sentence", "forall x. exists y. R(x,y)", "--explain")
    assert code == 0 and len(out.splitlines()) > 1


def test_eval_structure_file(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "algebra": "L3", "relations": {"P": {"(1)": "1/2", "(2)": "1"}}}))
    code, out = call("eval", "--structure", str(f), "--sentence", "forall x. (P(x) | not P(x))")
    assert code == 0 and "1/2" in out
    code, out = call("eval", "--structure", str(f), "--sentence", "P(x)", "--assign", "x=2")
    assert code == 0 and out.strip().endswith("1")


def test_run_config(tmp_path):
    cfg = ExperimentConfig(algebra="L3", sentences=["forall x. (P(x) | not P(x))"])
    buf = io.StringIO()
    assert run("asymptotic", cfg, buf) == 0
    assert "1/2" in buf.getvalue()
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"command": "asymptotic", "algebra": "G3", "sentences": "forall x. (P(x) | not P(x))"}))
    code, out = call("run", str(path))
    assert code == 0 and "g1" in out
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"samples": 0})


def test_budget_overrides_from_environment():
    from mvlaws.config import Budgets
    b = Budgets.from_env({"MVLAWS_MAX_QUANTIFIER_DEPTH": "6", "OTHER": "1"})
    assert b.max_quantifier_depth == 6
    assert b.max_algebra_size == Budgets().max_algebra_size
