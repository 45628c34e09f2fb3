import json
from fractions import Fraction
from pathlib import Path

import pytest

from qhresidue.cli.main import run
from qhresidue.cli.manifest import (ManifestError, load_manifest, manifest_from_json, manifest_to_json,
                                    problem_from_json, problem_to_json)
from qhresidue.cli.report import dumps

MANIFESTS = Path(__file__).resolve().parent.parent / "manifests"


def report(tmp_path, argv, name="r.json"):
    path = tmp_path / name
    code = run(argv + ["--report", str(path)])
    return code, (json.loads(path.read_text()) if path.exists() else None), path


def test_rootsys_dims(capsys):
    assert run(["rootsys", "dims", "--group", "su3", "--lambda", "1,1"]) == 0
    assert capsys.readouterr().out.strip() == "8"


def test_arr_diagonal_su3(tmp_path, capsys):
    code, rep, _ = report(tmp_path, ["arr", "diagonal", "--group", "su3"])
    assert code == 0
    assert "members: (1,2),(1,3)" in capsys.readouterr().out
    assert rep["members"] == [[1, 2], [1, 3]]
    assert rep["identity"] is True
    assert rep["certificate"] == [["1", "0"], ["0", "1"]]


def test_arr_order_flag(tmp_path):
    code, rep, _ = report(tmp_path, ["arr", "diagonal", "--group", "su3", "--order", "3,2,1"])
    assert code == 0
    assert rep["order"] == [3, 2, 1]
    assert rep["members"] == [[3, 2], [3, 1]]


def test_arr_bases_and_circuits_from_manifest(tmp_path):
    m = str(MANIFESTS / "generic_rank2.json")
    code, rep, _ = report(tmp_path, ["arr", "bases", "--manifest", m])
    assert code == 0 and len(rep["bases"]) == 6
    code, rep, _ = report(tmp_path, ["arr", "circuits", "--manifest", m])
    assert code == 0 and len(rep["circuits"]) == 4


def test_arr_spanning_is_seeded(tmp_path):
    a = report(tmp_path, ["arr", "spanning", "--group", "su4", "--seed", "5"], "a.json")
    b = report(tmp_path, ["arr", "spanning", "--group", "su4", "--seed", "5"], "b.json")
    assert a[0] == b[0] == 0
    assert a[2].read_bytes() == b[2].read_bytes()


def test_res_with_numeric_check(tmp_path):
    code, rep, _ = report(tmp_path, ["res", "--group", "su3", "--basis", "1,3", "--expr", "1/(Y2*(Y1 + Y2))",
                                     "--numeric-check"])
    assert code == 0
    assert rep["value"] == "-1" and rep["passed"] is True


def test_res_values_reparse_exactly(tmp_path):
    code, rep, _ = report(tmp_path, ["res", "--group", "su2", "--basis", "1",
                                     "--expr", "exp(-1/2*Y1)/(Y1^2*(1 - exp(-Y1)))"])
    assert code == 0
    assert Fraction(rep["value"]) == Fraction(-1, 24)


def test_szenes_fourth_power_passes(tmp_path):
    code, rep, _ = report(tmp_path, ["szenes", "verify", "--group", "su2", "--expr", "1/(Y1^4)", "--t", "0",
                                     "--lattice", "weight", "--box", "10000"])
    assert code == 0
    assert rep["rhs_exact"] == "1/720" and rep["rhs_sun_form"] == "1/720"


def test_szenes_inverse_square_reports_truncation(tmp_path):
    # the raw box sum at B = 10^4 misses about 5.07e-6 of the series
    code, rep, _ = report(tmp_path, ["szenes", "verify", "--group", "su2", "--expr", "1/(Y1^2)", "--t", "0",
                                     "--lattice", "weight", "--box", "10000"])
    assert rep["rhs_exact"] == "-1/12"
    assert rep["rhs_sun_form"] == "-1/12"
    assert rep["abs_difference"] == pytest.approx(5.066e-6, rel=1e-3)
    assert code == 5 and rep["passed"] is False


def test_szenes_manifest_defaults(tmp_path):
    code, rep, _ = report(tmp_path, ["szenes", "verify", "--manifest", str(MANIFESTS / "su3.json"),
                                     "--expr", "1/(Y1^2*Y2^2*(Y1 + Y2)^2)"])
    assert code == 0
    assert rep["box"] == 300 and rep["rhs_exact"] == "-1/30240"


@pytest.mark.parametrize("action", ["rho", "roots", "volratio"])
def test_rootsys_actions(action, tmp_path):
    code, rep, _ = report(tmp_path, ["rootsys", action, "--group", "su4"])
    assert code == 0
    assert rep["group"] == "su4"


def test_pairing_builtin_compare(tmp_path):
    code, rep, _ = report(tmp_path, ["pairing", "compare", "--builtin", "su2", "--numeric-check"])
    assert code == 0
    assert rep["residue_pairing"] == "-1/96"
    assert rep["transform_consistency"][0]["exact"] == "-1/48"


def test_pairing_problem_file(tmp_path):
    code, rep, _ = report(tmp_path, ["pairing", "residue", "--problem",
                                     str(MANIFESTS / "woodward_su3.problem.json"), "--numeric-check"])
    assert code == 0
    assert rep["residue_pairing"] == "-1/108"


def test_pairing_amw_residue(tmp_path):
    code, rep, _ = report(tmp_path, ["pairing", "amw-residue", "--problem",
                                     str(MANIFESTS / "free_torus.problem.json")])
    assert code == 0 and rep["amw_residue_form"] == "1"


def test_reports_are_byte_identical(tmp_path):
    argv = ["pairing", "compare", "--problem", str(MANIFESTS / "su2_single_block.problem.json")]
    a = report(tmp_path, argv, "a.json")[2]
    b = report(tmp_path, argv, "b.json")[2]
    assert a.read_bytes() == b.read_bytes()


# exit codes --------------------------------------------------------------------------

def test_parse_error_exit_code(capsys):
    assert run(["res", "--group", "su3", "--basis", "1,2", "--expr", "1/(Y1"]) == 2
    assert "position 5" in capsys.readouterr().err


def test_unknown_flag_is_a_parse_error():
    assert run(["rootsys", "dims", "--bogus"]) == 2


def test_schema_violation_is_a_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "group": "su3", "extra": True}))
    assert run(["arr", "bases", "--manifest", str(bad)]) == 2


def test_precondition_exit_code():
    assert run(["rootsys", "dims", "--group", "su3", "--lambda=-1,0"]) == 3
    assert run(["res", "--group", "su3", "--basis", "1,1", "--expr", "1/Y1"]) == 3


def test_computation_exit_code():
    # the numeric oracle cannot converge with these radii: the residue engine reports it
    assert run(["res", "--group", "su4", "--basis", "1,2,3",
                "--expr", "1/(Y1^2*Y2^2*Y3^2*(Y1 + Y2)*(Y2 + Y3)*(Y1 + Y2 + Y3))", "--numeric-check"]) == 4


# manifests --------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["su3.json", "generic_rank2.json"])
def test_manifest_round_trip(name):
    data = json.loads((MANIFESTS / name).read_text())
    m = manifest_from_json(data)
    out = manifest_to_json(m)
    again = manifest_from_json(out)
    assert manifest_to_json(again) == out
    assert again.arrangement == m.arrangement
    assert again.lattice == m.lattice
    assert again.functions == m.functions


@pytest.mark.parametrize("name", ["su2_single_block", "woodward_su3", "free_torus"])
def test_problem_round_trip(name):
    data = json.loads((MANIFESTS / f"{name}.problem.json").read_text())
    p = problem_from_json(data)
    assert problem_to_json(p) == data
    assert problem_to_json(problem_from_json(problem_to_json(p))) == data


def test_unknown_keys_are_rejected():
    with pytest.raises(ManifestError):
        manifest_from_json({"version": 1, "group": "su3", "colour": "red"})
    with pytest.raises(ManifestError):
        manifest_from_json({"version": 2, "group": "su3"})


def test_missing_file():
    with pytest.raises(ManifestError):
        load_manifest("/nonexistent/manifest.json")


def test_report_encoding():
    text = dumps({"b": Fraction(1, 3), "a": 0.1, "c": [1, Fraction(2)], "d": complex(1, -2)})
    assert text.index('"a"') < text.index('"b"')
    assert '"1/3"' in text and "0.10000000000000001" in text
    assert json.loads(text)["d"] == {"re": 1.0, "im": -2.0}
