import io
import json
import subprocess
import sys

import pytest

from conftest import PKG_DATA
from kger.cli import run
from kger.core import build_schema
from kger.emitters import parse_verbalization
from kger.textformat import parse_schema
from kger.validator import ValidationReport

RUNNING = str(PKG_DATA / "running_example.kger")
G0 = str(PKG_DATA / "g0.json")
EMPLOYEE = str(PKG_DATA / "employee.kger")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_clean_schema():
    assert call("check", RUNNING) == (0, "", "")


def test_check_reports_violations():
    code, out, err = call("check", EMPLOYEE)
    assert code == 1 and out == ""
    assert "WF4" in err and "WF6" in err


def test_check_syntax_error(tmp_path):
    bad = tmp_path / "bad.kger"
    bad.write_text("Entity(A)\nEntity(B\n")
    code, _, err = call("check", str(bad))
    assert code == 2
    assert f"{bad}:2:9: expected ')'" in err


def test_missing_file():
    code, _, err = call("check", "/nonexistent/schema.kger")
    assert code == 2 and "cannot read" in err


def test_usage_error():
    assert call("frobnicate")[0] == 2
    assert call()[0] == 2


def test_validate_conforming():
    code, out, _ = call("validate", "--schema", RUNNING, "--graph", G0)
    assert code == 0
    assert out.startswith("conforms (core semantics)")


def test_validate_violation_with_explain(tmp_path):
    doc = json.loads(open(G0).read())
    doc["attributes"] = [a for a in doc["attributes"] if a["name"] != "date"]
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps(doc))
    code, out, _ = call("validate", "--schema", RUNNING, "--graph", str(graph), "--explain")
    assert code == 1
    assert "VIOL-MANDATORY-ATTR Mandatory(Message, date)" in out
    assert "    clause: ∀x. Message(x) ⇒ (∃y. date(x, y))" in out


def test_validate_structured_output():
    code, out, _ = call("validate", "--schema", RUNNING, "--graph", G0, "--format", "structured",
                        "--semantics", "implicit")
    assert code == 0
    report = ValidationReport.from_json(out)
    assert report.conforms and report.semantics == "implicit"


def test_validate_close_isa(tmp_path):
    schema = tmp_path / "s.kger"
    schema.write_text("Entity(A)\nEntity(B)\nIsa(B, A)\nAttribute(A, x)\nIdentity(A, [x])\n")
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"entities": [{"id": "b", "types": ["B"]}],
                                 "attributes": [{"owner": "b", "name": "x", "value": 1}]}))
    assert call("validate", "--schema", str(schema), "--graph", str(graph))[0] == 1
    assert call("validate", "--schema", str(schema), "--graph", str(graph), "--close-isa")[0] == 0


def test_validate_implicit_explain(tmp_path):
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"entities": [{"id": "x", "types": ["Person", "University"]}],
                                 "attributes": [{"owner": "x", "name": n, "value": "v"}
                                                for n in ("fname", "lname", "name")]}))
    code, out, _ = call("validate", "--schema", RUNNING, "--graph", str(graph),
                        "--semantics", "implicit", "--explain")
    assert code == 1
    assert "VIOL-IMPLICIT-DISJOINT" in out
    assert "    clause: ∀x. (Person(x) ∧ University(x)) ⇒ false" in out


def test_validate_bad_graph(tmp_path):
    graph = tmp_path / "g.json"
    graph.write_text('{"entities": [{"id": "x", "types": ["Ghost"]}]}')
    code, _, err = call("validate", "--schema", RUNNING, "--graph", str(graph))
    assert code == 2 and "GRAPH-UNKNOWN-NAME" in err


@pytest.mark.parametrize("target, marker", [
    ("sql", "CREATE TABLE Person("),
    ("shacl", "ex:PersonShape"),
    ("shex", "ex:PersonShape {"),
    ("pgschema", "CREATE GRAPH TYPE"),
    ("dot", "digraph schema {"),
])
def test_compile_targets(target, marker):
    code, out, err = call("compile", "--schema", RUNNING, "--target", target)
    assert code == 0 and marker in out
    if target == "shex":
        assert "UNEXPRESSED" in err


def test_compile_to_file(tmp_path):
    dest = tmp_path / "out.sql"
    code, out, _ = call("compile", "--schema", RUNNING, "--target", "sql", "--out", str(dest))
    assert code == 0 and out == ""
    assert "CREATE TABLE" in dest.read_text()


def test_compile_refuses_ill_formed_schema():
    code, out, err = call("compile", "--schema", EMPLOYEE, "--target", "sql")
    assert code == 1 and out == "" and "WF4" in err


def test_verbalize():
    code, out, _ = call("verbalize", EMPLOYEE)
    assert code == 0
    assert "'Employment' is an relationship." in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kger", "check", RUNNING], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "" and proc.stderr == ""


def test_verbalize_output_parses_back():
    _, out, _ = call("verbalize", RUNNING)
    assert build_schema(parse_verbalization(out)) == parse_schema(open(RUNNING).read())
