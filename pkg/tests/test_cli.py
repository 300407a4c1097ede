import csv
import io
import json
import math

import pytest

from ncgdist.algebra import Algebra, State, state_to_json
from ncgdist.cli import main
from ncgdist.triple import triple_to_json, two_point_triple


@pytest.fixture
def files(tmp_path):
    alg = Algebra((1, 1))
    paths = {}
    for name, obj in {"t2": triple_to_json(two_point_triple(2.0)),
                      "t0": triple_to_json(two_point_triple(0.0)),
                      "a": state_to_json(State.pure(alg, 0, [1])),
                      "b": state_to_json(State.pure(alg, 1, [1])),
                      "bad": {"algebra": {"blocks": [1, 1]}, "representation": {}},
                      "p3": {"D12": 1, "D13": 1, "D23": 1}}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
    (tmp_path / "garbage.json").write_text("{not json")
    paths["garbage"] = str(tmp_path / "garbage.json")
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_finite(files, capsys):
    code, out, _ = run(capsys, "compute", "--triple", files["t2"], "--state-a", files["a"],
                       "--state-b", files["b"])
    assert code == 0
    res = json.loads(out)
    assert res["outcome"] == "finite" and res["value"] == pytest.approx(0.5)


def test_compute_infinite(files, capsys):
    code, out, _ = run(capsys, "compute", "--triple", files["t0"], "--state-a", files["a"],
                       "--state-b", files["b"])
    assert code == 0 and json.loads(out)["outcome"] == "infinite"


@pytest.mark.parametrize("triple, needle", [("missing", "cannot read"), ("bad", "representation.kind"),
                                            ("garbage", "not valid JSON")])
def test_compute_input_errors(files, capsys, triple, needle):
    path = files.get(triple, "/nonexistent/triple.json")
    code, _, err = run(capsys, "compute", "--triple", path, "--state-a", files["a"],
                       "--state-b", files["b"])
    assert code == 2 and needle in err


def test_compute_non_convergence(files, capsys, monkeypatch):
    from ncgdist import cli
    from ncgdist.solver import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("stalled", 0.1, 0.2, 5)
    monkeypatch.setattr(cli, "spectral_distance", boom)
    code, _, err = run(capsys, "compute", "--triple", files["t2"], "--state-a", files["a"],
                       "--state-b", files["b"])
    assert code == 3 and "stalled" in err


def test_catalog(files, capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and len(json.loads(out)) >= 15
    code, out, _ = run(capsys, "catalog", "eval", "three_point", "--params", files["p3"])
    assert code == 0 and json.loads(out)["value"][0] == pytest.approx(math.sqrt(2 / 3))
    code, _, _ = run(capsys, "catalog", "eval", "nope", files["p3"])
    assert code == 2


def test_bundle_and_moyal_csv(tmp_path, capsys):
    p = tmp_path / "q.json"
    p.write_text(json.dumps([{"lambda_p": 1, "m": 0, "n": 3}, {"lambda_p": 1, "m": 0, "n": 0,
                                                               "kappa": [0, 0], "kappa_t": [3, 4]}]))
    code, out, _ = run(capsys, "moyal", "qlength", "--params", str(p))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2
    assert float(rows[0]["value"]) == pytest.approx(math.sqrt(7) - 1)
    assert float(rows[1]["value"]) == pytest.approx(5.0)
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"R": [1, 1], "omega": [0, 0.5], "phi": [0, 0], "k": 1}))
    code, out, _ = run(capsys, "bundle", "fiber", "--params", str(f))
    assert code == 0 and out.splitlines()[0] == "id,R,omega,phi,k,value,formula_ref"


def test_wd(files, capsys):
    code, out, _ = run(capsys, "wd", "--triple", files["t2"], "--state-a", files["a"],
                       "--state-b", files["b"], "--pairs", "3")
    res = json.loads(out)
    assert code == 0 and res["W_upper"] == pytest.approx(res["d_D"]) == pytest.approx(0.5)


def test_verify_bundle(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, err = run(capsys, "verify", "bundle", "--seed", "3", "--out", str(out))
    assert code == 0 and "passed" in err
    rows = list(csv.reader(out.open(encoding="utf-8")))
    assert rows[0] == ["case_id", "formula_ref", "expected", "computed", "abs_err", "rel_err",
                       "status", "runtime_ms"]
    assert all(r[6] == "pass" and r[7] == "" for r in rows[1:])


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2
