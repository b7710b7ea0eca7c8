import io
import json
import subprocess
import sys

import pytest

from hsalg import cli
from hsalg.cdga import model_to_json
from hsalg.models import REGISTRY, load_builtin


def call(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.startswith("{") else text)


def test_universal_u4_cohomology():
    code, body = call("cohomology", "--model", "universal-U4")
    assert code == 0 and body["dims"] == [1, 4, 7, 6, 2]


def test_heisenberg_ext_class():
    code, body = call("ext-class", "--model", "heisenberg", "--k", "5")
    assert code == 0
    assert body["form"] == "-2*a^c" and body["nonzero"] is True


def test_order_mismatch_is_usage_error():
    code, body = call("ext-class", "--model", "heisenberg", "--k", "4")
    assert code == 2 and "order 5" in body["message"]


def test_jet_compose():
    code, body = call("jet", "compose", "--k", "3", "z+z^2", "z+z^2")
    assert code == 0 and body["result"] == "z+2z^2+2z^3"
    code, body = call("jet", "--k", "2", "invert", "z+3z^2")
    assert body["result"] == "z-3z^2"


def test_export_import_round_trip(tmp_path):
    code, doc = call("export", "heisenberg")
    assert code == 0
    doc.pop("status")
    assert len(doc["basis"]) == 8
    assert doc == model_to_json(load_builtin("heisenberg").model)
    path = tmp_path / "h.json"
    path.write_text(json.dumps(doc))
    code, body = call("import", str(path))
    assert code == 0 and body["cohomology_dims"] == [1, 2, 2, 1]


def test_import_rejects_bad_differential(tmp_path):
    doc = model_to_json(load_builtin("heisenberg").model)
    doc["differential"].append(["a^b", "a^b^c", "1"])
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, body = call("import", str(path))
    assert code == 2 and body["error"] == "SchemaError"
    assert "d^2" in body["message"] and "'c'" in body["message"]


def test_import_reports_json_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "basis": [\n  oops\n]}')
    code, body = call("import", str(path))
    assert code == 2 and "line 3" in body["message"]


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_builtins_pass_natural_checks(name):
    assert call("mc-check", "--model", name)[0] == 0
    if load_builtin(name).symplectic is not None:
        assert call("symplectic-check", "--model", name)[0] == 0


def test_check_failure_exit_one(tmp_path):
    data = tmp_path / "d.json"
    data.write_text(json.dumps({"order": 3, "etas": ["c"]}))
    code, body = call("mc-check", "--model", "heisenberg", "--data", str(data))
    assert code == 1 and body["status"] == "fail"
    assert body["residuals"]["1"] == "a^b"


def test_data_file_forms(tmp_path):
    # the cat-torus data written out three ways: expressions, maps and dense vectors
    m = load_builtin("cat-torus").model
    names = [b.name for b in m.basis]
    dense_a = ["1" if n == "alpha" else "0" for n in names]
    doc = {"order": 4, "a": dense_a, "etas": ["a1", {"a2": "1"}],
           "beta": "a1^b1 + a2^b2", "alphas": ["0", "a2", "2*a1", "3*alpha"]}
    data = tmp_path / "cat.json"
    data.write_text(json.dumps(doc))
    code, body = call("symplectic-check", "--model", "cat-torus", "--data", str(data))
    assert code == 0 and body["nondegenerate"] is True
    code, body = call("variation", "--model", "cat-torus", "--data", str(data))
    assert body["variation"] == "-a1^a2" and body["variation_nonzero"]


def test_genus_params():
    code, body = call("ext-class", "--model", "genus-g", "--g", "2", "--params", "[[1,2,3,4],[1/2,0,1,1]]")
    assert code == 0 and body["form"] == "-3/2*omega"


def test_builders_and_class():
    code, body = call("ce", "--k", "4", "--variant", "k")
    assert body["cohomology_dims"] == [1, 2, 2, 1]
    code, body = call("sk-build", "--k", "4", "--variant", "k")
    assert body["base_size"] == 8
    code, body = call("class", "--model", "ce-k", "--k", "4", "--element", "x1^x2")
    assert code == 0 and body["exact"] and body["primitive"] == "-x3"
    code, body = call("class", "--model", "ce-k", "--k", "4", "--element", "x1^x3", "--other", "x2^x3")
    assert code == 1 and body["same_class_as_other"] is False
    code, body = call("symplectic-check", "--model", "universal-symplectic", "--n", "2")
    assert code == 0 and body["status"] == "pass"


def test_poisson_commands():
    code, body = call("jacobi-check", "--builtin", "intro", "--invariant", "x", "y")
    assert code == 0 and body["residual_zero"] and body["translation_invariant"]
    code, body = call("rank-order", "--builtin", "intro", "--var", "t")
    assert body["order"] == 4
    code, body = call("invert-form", "--frame", "universal-E3", "--var", "t")
    assert code == 0 and body["rank_drop"]["order"] == 4


def test_bivector_file(tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"vars": ["x1", "x2", "x3"],
                                "entries": [["x1", "x2", "x1"], ["x1", "x3", "x2"]]}))
    code, body = call("jacobi-check", "--bivector", str(path))
    assert code == 1 and not body["residual_zero"]


def test_mapping_torus_command():
    code, body = call("mapping-torus", "--matrix", "[[2,1],[1,1]]", "--mu", "(3+sqrt5)/2", "--degree", "1")
    assert code == 0 and body["dims"][0]["dim"] == 1
    code, body = call("mapping-torus", "--cat-report")
    assert code == 0 and body["dims"] == {"H1(L^-1)": 1, "H1(L^-2)": 1, "H2(L^-3)": 1}


def test_sk_cohomology_e1():
    code, body = call("sk-cohomology", "--model", "heisenberg")
    assert code == 0 and body["E1"]["matches_twisted_cohomology"]


def test_deform_and_gysin():
    code, body = call("deform", "--model", "heisenberg", "--scale", "2")
    assert code == 0 and body["extension_form"] == "-32*a^c"
    assert call("gysin-check", "--model", "heisenberg")[0] == 0


def test_usage_errors():
    assert call("no-such-command")[0] == 2
    assert call("cohomology")[0] == 2
    assert call("mc-check", "--model", "nope")[0] == 2
    assert call("jet", "compose", "--k", "3", "z")[0] == 2
    assert call("symplectic-check", "--model", "heisenberg")[0] == 2


def test_max_dim_cap(monkeypatch):
    monkeypatch.setenv("HSALG_MAX_DIM", "10")
    code, body = call("cohomology", "--model", "universal-U4")
    assert code == 2 and "HSALG_MAX_DIM" in body["message"]


def test_internal_error_exit_three(monkeypatch):
    def boom(args):
        raise RuntimeError("unexpected")
    monkeypatch.setattr(cli, "cmd_models", boom)
    code, body = call("models")
    assert code == 3 and body["error"] == "internal"


def test_human_output():
    code, text = call("--human", "cohomology", "--model", "universal-U4")
    assert code == 0 and "dims: 1  4  7  6  2" in text
    code2, text2 = call("cohomology", "--model", "universal-U4", "--human")
    assert text2 == text


def test_outputs_are_deterministic():
    argv = [sys.executable, "-m", "hsalg", "sk-cohomology", "--model", "heisenberg"]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1]
    for args in (["models"], ["symplectic-check", "--model", "cat-torus"], ["invert-form", "--frame", "universal-E5"]):
        assert call(*args) == call(*args)
