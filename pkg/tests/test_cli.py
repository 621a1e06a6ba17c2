import io
import json
from pathlib import Path

import pytest

from hilbchow.cli import run_cli
from hilbchow.oracles import builtin
from hilbchow.hilb import nested_model
from hilbchow.ringfile import parse_element

RINGS = Path(__file__).resolve().parent.parent / "rings"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_ranks_from_ring_files():
    assert run("ranks", str(RINGS / "P1.ring"), "--stage", "hilb3") == (0, "1,1,1,1\n", "")
    assert run("ranks", str(RINGS / "P2.ring"), "--stage", "hilb2")[1] == "1,2,3,2,1\n"
    assert run("ranks", "builtin:P2", "--stage", "nested")[1] == "1,4,9,11,9,4,1\n"


def test_apply():
    code, out, _ = run("apply", str(RINGS / "P2.ring"), "--element", "e*f")
    assert (code, out) == (0, "3*e*f\n")
    assert run("apply", "builtin:P1", "--element", "1")[1] == "3\n"


def test_apply_rejects_non_members_and_garbage():
    code, _, err = run("apply", "builtin:P2", "--element", "h1")
    assert code == 2 and "not a nested-Hilbert class" in err
    code, _, err = run("apply", "builtin:P2", "--element", "e**")
    assert code == 2 and "input error" in err


def test_verify_passes_for_builtins():
    for name in ("P1", "P2"):
        code, out, _ = run("verify", f"builtin:{name}", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["checks"] and all(c["pass"] for c in doc["checks"])


def test_consistency_failure_exit_code():
    code, _, err = run("ranks", "builtin:P2", "--stage", "hilb3", "--rel3-half")
    assert code == 1 and "degree 2" in err
    code, _, _ = run("verify", "builtin:P2", "--eqcz-e-sign", "+")
    assert code == 1


def test_input_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.ring"
    bad.write_text("variety Q dim 1\ngenerators: h:1\nrelations: h^2 + h\nchern_tangent: 1\ndiagonal: h (x) 1\npoint: h\n")
    code, _, err = run("ranks", str(bad), "--stage", "hilb2")
    assert code == 2 and "line 3" in err
    assert run("ranks", str(tmp_path / "missing.ring"), "--stage", "hilb2")[0] == 2
    assert run("ranks", "builtin:P9", "--stage", "hilb2")[0] == 2
    assert run("oracle", "goettsche", "--betti", "1,x", "-n", "2")[0] == 2


def test_corrupted_diagonal_is_an_input_error(tmp_path):
    text = (RINGS / "P2.ring").read_text().replace("+ h (x) h +", "+ 2*h (x) h +")
    path = tmp_path / "P2bad.ring"
    path.write_text(text)
    code, _, err = run("build", str(path), "--stage", "hilb2")
    assert code == 2 and "diagonal" in err


def test_json_schema():
    code, out, _ = run("build", "builtin:P2", "--stage", "hilb3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert list(doc) == ["stage", "input_name", "dimension", "ranks", "generators", "relations", "config", "checks"]
    assert doc["stage"] == "hilb3" and doc["input_name"] == "P2" and doc["dimension"] == 2
    assert len(doc["ranks"]) == 3 * 2 + 1
    assert doc["config"] == {"rel3_constant": "1", "eqcz_sign": "-"}
    for g in doc["generators"]:
        assert set(g) == {"name", "degree", "expr"}
    assert doc["relations"]


def test_text_output_expressions_parse_back():
    code, out, _ = run("build", "builtin:P2", "--stage", "hilb3")
    assert code == 0
    M = nested_model(builtin("P2"))
    section = out.split("generators\n")[1].split("relations")[0]
    exprs = [line.split(None, 3)[3] for line in section.strip().splitlines()]
    assert exprs
    for e in exprs:
        assert M.W.contains(M.normal_form(parse_element(e, M.gens)))


@pytest.mark.parametrize("argv", [
    ("build", "builtin:P2", "--stage", "hilb3", "--format", "json"),
    ("verify", "builtin:P1"),
    ("presentation", "builtin:P2"),
])
def test_output_is_deterministic(argv):
    assert run(*argv) == run(*argv)


def test_oracle_commands():
    assert run("oracle", "goettsche", "--betti", "1,0,1,0,1", "-n", "3")[1] == "1,2,5,6,5,2,1\n"
    assert run("oracle", "sym", "builtin:P1", "-n", "3")[1] == "1,1,1,1\n"
    doc = json.loads(run("oracle", "goettsche", "--betti", "1,0,2,0,1", "-n", "2", "--format", "json")[1])
    assert doc["ranks"] == [1, 3, 6, 3, 1]
