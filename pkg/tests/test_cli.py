import json

import numpy as np
import pytest

from qmsdual import cli, qubit as qb
from qmsdual.pipeline import instance_to_dict
from qmsdual.serialize import dumps, validate
from qmsdual.stationary import DensityState
from qmsdual.gksl import GkslRep


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def shift_instance(n=3):
    return instance_to_dict(qb.shift_example(n).rep, f"shift-{n}")


def test_analyze_shift(tmp_path, capsys):
    path = write(tmp_path, "shift.json", shift_instance(3))
    code, out, _ = run(["analyze", path], capsys)
    assert code == 0
    rep = validate(json.loads(out), "report")
    assert rep["dim"] == 3
    # circulant states commute with the shift
    assert rep["stationary"]["count"] == 3
    assert rep["stationary"]["faithful"]
    assert rep["modular"]["commutes"]
    assert [b["holds"] for b in rep["balance"]] == [False, False]
    assert all(d["is_qms"] for d in rep["duals"])


def test_analyze_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, "shift.json", shift_instance(4))
    outs = [run(["analyze", path, "--s", "0", "--s", "0.3"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert [d["s"] for d in json.loads(outs[0])["duals"]] == [0.0, 0.3]


def test_qubit_build_then_analyze(tmp_path, capsys):
    out_path = str(tmp_path / "q.json")
    code, _, _ = run(["--output", out_path, "qubit-build", "--nu", "0.3", "--v3", "0.5",
                      "--lam", f"{np.sqrt(0.3 / 0.7):.17g}", "--mu", "1", "--eta", "0.4+0.2i"], capsys)
    assert code == 0
    code, out, _ = run(["analyze", out_path], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["privileged"]["available"]
    assert rep["balance"][0]["holds"]
    assert sorted(rep["privileged"]["lambdas"]) == pytest.approx(sorted([1.0, 0.3 / 0.7, 0.7 / 0.3]))


def test_qubit_build_inconsistent(capsys):
    code, _, err = run(["qubit-build", "--nu", "0.3", "--lam", "1", "--mu", "1"], capsys)
    assert code == 2 and "precondition" in err


def test_zero_generator(tmp_path, capsys):
    path = write(tmp_path, "z.json", {"id": "zero", "dim": 2, "L": []})
    code, out, _ = run(["analyze", path], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["stationary"]["count"] == 4
    assert all(b["holds"] for b in rep["balance"])


def test_tolerance_override(tmp_path, capsys):
    path = write(tmp_path, "shift.json", shift_instance(3))
    code, out, _ = run(["--tol", "db_tol=1e-6", "analyze", path], capsys)
    assert code == 0 and json.loads(out)["tolerances"]["db_tol"] == 1e-6
    code, _, err = run(["analyze", path, "--tol", "nonsense=1"], capsys)
    assert code == 1


@pytest.mark.parametrize("payload", [
    "{not json",
    {"id": "x", "dim": 2, "L": [], "extra": 1},
    {"id": "x", "dim": 2, "H": [[[1, 0], [0, 1]], [[0, 0], [1, 0]]]},
    {"id": "x", "dim": 2, "L": [], "s": [1.5]},
])
def test_input_errors(tmp_path, capsys, payload):
    path = write(tmp_path, "bad.json", payload)
    code, _, err = run(["analyze", path], capsys)
    assert code == 1 and "input error" in err


def test_missing_file(capsys):
    assert run(["analyze", "/nonexistent/file.json"], capsys)[0] == 1


def test_not_a_generator(tmp_path, capsys):
    mat = np.eye(4)
    data = {"id": "x", "dim": 2, "superoperator": [[[float(v), 0.0] for v in row] for row in mat]}
    code, _, err = run(["analyze", write(tmp_path, "x.json", data)], capsys)
    assert code == 1


def test_non_faithful_state(tmp_path, capsys):
    rep = GkslRep(np.zeros((2, 2)), (np.array([[0, 1], [0, 0]], dtype=complex),))
    rho = DensityState(np.diag([1.0, 0.0]).astype(complex))
    path = write(tmp_path, "d.json", instance_to_dict(rep, "decay", rho=rho))
    code, _, err = run(["analyze", path], capsys)
    assert code == 2 and "precondition" in err


def test_examples_text_and_json(capsys):
    code, out, _ = run(["examples", "--name", "shift"], capsys)
    assert code == 0 and "0 failures" in out
    code, out, _ = run(["examples", "--json", "--allow-known"], capsys)
    assert code == 0
    payload = validate(json.loads(out), "examples")
    known = [c for c in payload["checks"] if c["known_discrepancy"]]
    assert known and not any(c["passed"] for c in known)


def test_examples_strict_and_unknown(capsys):
    assert run(["examples", "--name", "averaged"], capsys)[0] == 3
    assert run(["examples", "--name", "averaged", "--allow-known"], capsys)[0] == 0
    assert run(["examples", "--name", "bogus"], capsys)[0] == 1


def test_classical(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"Q": [[-1.0, 1, 0], [0, -1, 1], [1, 0, -1]]})
    code, out, _ = run(["classical", path], capsys)
    res = json.loads(out)
    assert code == 0 and not res["reversible"]
    assert res["relative_violation"] == pytest.approx(1 / 3)
    path = write(tmp_path, "c2.json", {"Q": [[-2.0, 2], [1, -1]]})
    res = json.loads(run(["classical", path], capsys)[1])
    assert res["reversible"] and res["pi"] == pytest.approx([1 / 3, 2 / 3])
    path = write(tmp_path, "c3.json", {"Q": [[1.0, -1], [1, -1]]})
    assert run(["classical", path], capsys)[0] == 1
