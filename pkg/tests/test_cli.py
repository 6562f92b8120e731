import json

import pytest

from vallab.cli import main
from vallab.geometry import box, dumps_polytope, polytope_to_dict, unit_cube
from vallab.harmonics import HarmonicExpansion
from vallab.spherical import dumps_valuation, make_valuation


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps([polytope_to_dict(unit_cube(2)), polytope_to_dict(box([2, 3]))]))
    triple = tmp_path / "triple.json"
    triple.write_text(json.dumps({"bodies": [polytope_to_dict(box(e)) for e in
                                             ([1, 1, 1], [2, 1, 1], [1, 1, 2])]}))
    square = tmp_path / "square.json"
    square.write_text(dumps_polytope(unit_cube(2)))
    cube = tmp_path / "cube.json"
    cube.write_text(dumps_polytope(unit_cube(3)))
    val = tmp_path / "val.json"
    val.write_text(dumps_valuation(make_valuation(3, 1, HarmonicExpansion.unit(3, 2, 0))))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    return {p.stem: str(p) for p in (pair, triple, square, cube, val, bad)}


def test_mixedvol(capsys, files):
    code, d = run_json(capsys, "mixedvol", files["pair"])
    assert code == 0 and d["mixed_volume"] == pytest.approx(2.5)
    assert d["command"] == "mixedvol" and d["config"]["seed"] == 42


def test_intrinsic(capsys, files):
    code, d = run_json(capsys, "intrinsic", files["square"])
    assert code == 0 and d["mu"] == pytest.approx([1, 2, 1], rel=1e-4)


def test_af_file(capsys, files):
    code, d = run_json(capsys, "af", files["triple"])
    assert code == 0 and d["reports"][0]["slack"] == pytest.approx(0.25, abs=1e-8)


def test_af_random(capsys):
    code, d = run_json(capsys, "af", "--random", "3", "20", "--seed", "7")
    assert code == 0 and d["summary"] == {"count": 20, "failed": 0}


def test_af_csv(capsys):
    code, out, _ = run(capsys, "af", "--random", "2", "3", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "name,lhs,rhs,slack,pass,seed" and len(lines) == 4


def test_af_forced_failure_exits_one(capsys, files):
    # a negative tolerance turns the equality case into a reported failure
    code, d = run_json(capsys, "af", files["triple"], "--tol", "-1")
    assert code == 1 and d["summary"]["failed"] == 1


def test_iso(capsys, files):
    code, d = run_json(capsys, "iso", files["square"])
    assert code == 0 and d["pass"] and d["ratios"][0] == pytest.approx(0.63662, abs=1e-3)


def test_hr_sign(capsys, files):
    code, d = run_json(capsys, "hr-sign", files["val"])
    assert code == 0 and d["certificates"][0]["total_sign"] == -1
    code, d = run_json(capsys, "hr-sign", "--random-harmonic", "5", "3")
    assert code == 0 and d["certificates"][0]["total_sign"] == 1


def test_hr_sign_rejects_non_primitive(capsys, tmp_path):
    p = tmp_path / "v.json"
    p.write_text(dumps_valuation(make_valuation(3, 1, HarmonicExpansion.unit(3, 0, 0))))
    assert run(capsys, "hr-sign", str(p))[0] == 2
    assert run(capsys, "hr-sign", "--random-harmonic", "3", "1")[0] == 2


def test_cosine_eig(capsys):
    code, d = run_json(capsys, "cosine-eig", "--n", "4", "--k", "2", "--weight", "2,2")
    assert code == 0 and d["eigenvalue_exact"] == "1/10" and d["sign"] == 1
    assert d["expected_sign"] == 1
    code, d = run_json(capsys, "cosine-eig", "--n", "5", "--k", "1", "--weight", "4")
    assert d["sign"] == -1


def test_cosine_eig_bad_weight(capsys):
    assert run(capsys, "cosine-eig", "--n", "4", "--k", "2", "--weight", "3,2")[0] == 2
    assert run(capsys, "cosine-eig", "--n", "4", "--k", "2", "--weight", "a")[0] == 2


def test_grassmann_verify(capsys):
    code, d = run_json(capsys, "grassmann-verify", "--lemma", "signR", "--n", "4", "--k", "2",
                       "--m", "1", "--samples", "30000")
    assert code == 0 and d["sign"] == 1 and d["pass"]
    code, d = run_json(capsys, "grassmann-verify", "--lemma", "signTR", "--n", "4", "--k", "2",
                       "--m", "1", "--samples", "30000", "--negative")
    assert code == 0 and d["weight"] == [2, -2]


def test_grassmann_verify_noisy_exits_three(capsys):
    code, d = run_json(capsys, "grassmann-verify", "--lemma", "signT", "--n", "6", "--k", "3",
                       "--m", "3", "--samples", "10", "--test-points", "3")
    assert code in (1, 3) and not d["pass"]
    if d["sign"] == d["expected_sign"]:
        assert code == 3


def test_crofton(capsys, files):
    code, d = run_json(capsys, "crofton", "1", files["cube"], "--k", "1", "--samples", "50000")
    assert code == 0 and d["value"] == pytest.approx(1.5, rel=0.01)
    code, d = run_json(capsys, "crofton", "hw:2", files["cube"], "--k", "1", "--samples", "5000")
    assert code == 0 and len(d["value"]) == 2
    assert run(capsys, "crofton", "x", files["cube"], "--k", "1")[0] == 2


def test_input_errors(capsys, files):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "mixedvol", files["bad"])[0] == 2
    assert run(capsys, "mixedvol", "/nonexistent/x.json")[0] == 2
    assert run(capsys, "intrinsic", files["pair"])[0] == 2
    assert run(capsys, "af")[0] == 2
    assert run(capsys, "af", "--random", "3", "2", "--samples", "0")[0] == 2
    assert run(capsys, "af", "--random", "3", "2", "--seed", "-1")[0] == 2
    _, _, err = run(capsys, "af", "--bogus")
    assert "usage" in err


def test_output_file(capsys, files, tmp_path):
    out = tmp_path / "o.json"
    code, stdout, _ = run(capsys, "mixedvol", files["pair"], "-o", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["mixed_volume"] == pytest.approx(2.5)


def test_text_format(capsys, files):
    code, out, _ = run(capsys, "mixedvol", files["pair"], "--format", "text")
    assert code == 0 and out.startswith("command: ")


@pytest.mark.parametrize("argv", [
    ("af", "--random", "2", "5", "--seed", "11"),
    ("grassmann-verify", "--lemma", "signT", "--n", "3", "--k", "1", "--m", "2", "--samples", "20000"),
    ("hr-sign", "--random-harmonic", "4", "4", "--seed", "3"),
])
def test_byte_identical_reruns(capsys, argv):
    a, b = run(capsys, *argv)[1], run(capsys, *argv)[1]
    assert a == b and a
