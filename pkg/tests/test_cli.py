import io
import json
import subprocess
import sys

import pytest

from lawvere.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(["--json", *argv], buf)
    return code, json.loads(buf.getvalue())["result"]


def test_theory_and_normalize():
    code, res = call("theory", "Boole")
    assert code == 0
    code, res = call("normalize", "Cantor:2", "nu1(mu(x1,x2))", "--context", "2")
    assert code == 0 and res["normal_form"] == "x1"


def test_hom_and_compose():
    code, res = call("hom", "E", "3", "4", "--count-only")
    assert code == 0 and res["count"] == 64
    code, res = call("compose", "E", "2: x2", "1: x1; x1")
    assert code == 0
    assert res["g_after_f"]["components"] == ["x1"]


def test_models():
    code, res = call("models", "Boole", "--size", "4", "--count-only")
    assert res["count"] == 12
    code, res = call("abelian-objects", "Boole", "--size", "2")
    assert code == 0 and res["count"] == 0


def test_k0_and_assembly():
    code, res = call("k0", "Cantor:3")
    assert code == 0 and res["group"] == "Z/2"
    code, res = call("assembly", "Boole")
    assert code == 0 and res["map"]["kind"] == "zero"


def test_trivial_ring_exit_codes():
    assert call("trivial-ring", "Boole")[0] == 0
    assert call("trivial-ring", "E")[0] == 2


def test_leavitt():
    code, res = call("leavitt", "3", "--verify-rank-iso")
    assert code == 0 and res["rank_iso"]["verified"]
    code, res = call("leavitt", "2", "--normalize", "R2*C2")
    assert res["normal_form"] == "1 - R1.C1"


def test_inconclusive_user_theory(tmp_path):
    thy = tmp_path / "three.thy"
    thy.write_text("theory Three; op m/3; op p1/1; op p2/1; op p3/1;\n"
                   "eq 3: p1(m(x1,x2,x3)) = x1;\neq 3: p2(m(x1,x2,x3)) = x2;\n"
                   "eq 3: p3(m(x1,x2,x3)) = x3;\neq 1: m(p1(x1),p2(x1),p3(x1)) = x1;\nend\n")
    assert call("k0", str(thy), "--arity-bound", "2")[0] == 2


def test_pushforward(tmp_path):
    spec = tmp_path / "L.json"
    spec.write_text(json.dumps({"source": "Groups", "target": "Ab",
                                "assignment": {"mul": "add(x1,x2)", "inv": "neg(x1)",
                                               "e": "zero"}}))
    code, res = call("pushforward", str(spec))
    assert code == 0 and res["surjective"]
    spec.write_text(json.dumps({"source": "Ab", "target": "Boole",
                                "assignment": {"add": "and(x1,x2)", "neg": "x1",
                                               "zero": "1"}}))
    assert call("pushforward", str(spec))[0] == 1


def test_usage_errors():
    assert run(["bogus"], io.StringIO()) == 3
    assert run(["theory", "Nope"], io.StringIO()) == 3
    assert run(["normalize", "Boole", "and(x1"], io.StringIO()) == 3


def test_reports_are_deterministic():
    a, b = io.StringIO(), io.StringIO()
    run(["--json", "aut", "E", "3"], a)
    run(["--json", "aut", "E", "3"], b)
    assert a.getvalue() == b.getvalue()
    assert "seconds" not in json.loads(a.getvalue())


def test_plain_summary():
    buf = io.StringIO()
    assert run(["k0", "Cantor:2"], buf) == 0
    assert buf.getvalue().startswith("k0: ok")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lawvere", "--json", "hom", "E", "2", "2",
                           "--count-only"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["count"] == 4
