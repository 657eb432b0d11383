import io
import json

import pytest

from gradinv import __version__
from gradinv.cli import main
from gradinv.io import dumps_framework, dumps_ranking, load_framework, load_ranking
from gradinv.core import AttackGraph, Ranking
from gradinv.graphgen import GraphSpec, generate, random_ranking

from conftest import EXAMPLE_ARGS, EXAMPLE_RESULTS


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


def put(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.fixture
def chain(tmp_path):
    g = AttackGraph(("a", "b"), (("a", "b"),))
    return put(tmp_path, "chain.json", dumps_framework(g))


def test_eval_example_hc(tmp_path, example):
    code, out, _ = run("eval", "--graph", put(tmp_path, "f.json", dumps_framework(example)), "--semantics", "hc")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines() if not line.startswith("#")]
    assert [r[0] for r in rows] == list(EXAMPLE_ARGS)
    assert [float(r[1]) for r in rows] == pytest.approx(EXAMPLE_RESULTS["HC"][0], abs=5e-3)
    assert "converged=true" in out.splitlines()[-1]


def test_eval_nonconvergence_exit(tmp_path, example):
    code, out, err = run("eval", "--graph", put(tmp_path, "f.json", dumps_framework(example)), "--semantics", "hc",
                         "--eps", "1e-15", "--max-iter", "2")
    assert code == 3
    assert "converged=false" in out


def test_invert_writes_framework(tmp_path, chain):
    r = put(tmp_path, "r.json", dumps_ranking(Ranking((("b",), ("a",)))))
    dest = tmp_path / "solved.json"
    code, out, _ = run("invert", "--graph", chain, "--ranking", r, "--semantics", "mb", "-o", dest)
    assert code == 0
    assert "# termination=" in out
    solved = load_framework(dest)
    assert solved.weights["a"] == pytest.approx(1 / 7)


def test_invert_stdout(tmp_path, chain):
    r = put(tmp_path, "r.json", dumps_ranking(Ranking((("a",), ("b",)))))
    code, out, _ = run("invert", "--graph", chain, "--ranking", r, "--semantics", "hc")
    assert code == 0
    body = out[: out.index("# termination")]
    assert set(json.loads(body)["weights"]) == {"a", "b"}


def test_invert_is_infeasible(tmp_path, chain):
    r = put(tmp_path, "r.json", dumps_ranking(Ranking((("b",), ("a",)))))
    dest = tmp_path / "never.json"
    code, out, err = run("invert", "--graph", chain, "--ranking", r, "--semantics", "is", "-o", dest)
    assert code == 1
    assert "termination=Infeasible" in out
    assert err.strip()
    assert not dest.exists()


def test_invert_budget_exit(tmp_path):
    g = generate(GraphSpec("er", 30, 0.3, seed=2))
    r = random_ranking(g.arguments, 5, seed=2)
    code, out, _ = run("invert", "--graph", put(tmp_path, "g.json", dumps_framework(g)),
                       "--ranking", put(tmp_path, "r.json", dumps_ranking(r)), "--semantics", "hc", "--max-calls", 3)
    assert code == 1
    assert "termination=BudgetExceeded bisect_calls=3" in out


def test_missing_file_exit(tmp_path):
    code, _, err = run("eval", "--graph", tmp_path / "absent.json", "--semantics", "mb")
    assert code == 2
    assert "absent.json" in err


def test_bad_weight_exit(tmp_path):
    p = put(tmp_path, "bad.json", '{"arguments": ["a"], "attacks": [], "weights": {"a": 2}}')
    code, _, err = run("eval", "--graph", p, "--semantics", "mb")
    assert code == 2 and "outside [0, 1]" in err


def test_ranking_mismatch_exit(tmp_path, chain):
    r = put(tmp_path, "r.json", '{"levels": [["a"]]}')
    assert run("invert", "--graph", chain, "--ranking", r, "--semantics", "mb")[0] == 2


def test_usage_errors():
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2
    assert run("eval", "--semantics", "xx", "--graph", "g.json")[0] == 2


def test_version(capsys):
    assert run("--version")[0] == 0
    assert __version__ in capsys.readouterr().out


def test_gen_and_gen_ranking(tmp_path):
    g = tmp_path / "g.json"
    assert run("gen", "--family", "er", "--n", 12, "--p", 0.3, "--seed", 4, "-o", g)[0] == 0
    fw = load_framework(g)
    assert len(fw.arguments) == 12
    r = tmp_path / "r.json"
    assert run("gen-ranking", "--graph", g, "--levels", 3, "--seed", 1, "-o", r)[0] == 0
    assert len(load_ranking(r, fw.arguments).levels) <= 3
    code, out, _ = run("gen", "--family", "complete", "--n", 3, "--seed", 0, "-o", "-")
    assert code == 0 and len(json.loads(out)["attacks"]) == 9


def test_gen_p_rules():
    assert run("gen", "--family", "er", "--n", 5, "--seed", 0, "-o", "-")[0] == 2
    assert run("gen", "--family", "sf", "--n", 5, "--p", 0.1, "--seed", 0, "-o", "-")[0] == 2


def test_bench_writes_csv(tmp_path):
    plan = put(tmp_path, "plan.json", json.dumps({"families": ["sf"], "sizes": [5, 6], "seeds": [0], "semantics": ["mb"]}))
    dest = tmp_path / "out.csv"
    code, _, _ = run("bench", "--plan", plan, "-o", dest)
    assert code == 0
    lines = dest.read_text().splitlines()
    assert lines[0].startswith("family,n,p,seed")
    assert len(lines) == 3


def test_bench_bad_plan(tmp_path):
    assert run("bench", "--plan", put(tmp_path, "p.json", "{nope"))[0] == 2
