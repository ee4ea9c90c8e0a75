import json

import pytest

from dualfan.cli import main
from dualfan.fixtures import FAN_FIXTURES, load_json
from dualfan.serialize import dumps


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    doc = json.loads(captured.out) if captured.out else None
    return code, doc, captured.err


def test_validate_fixture(capsys):
    code, doc, _ = run(capsys, "validate", "--fan", "split-quadrant.json")
    assert code == 0
    assert doc == {"status": "ok", "result": {"valid": True, "repairable": False, "violations": []}}


def test_validate_reports_violations(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "rays": [[1, 0], [0, 1], [1, 1]], "cones": [[0, 1], [1, 2]]}))
    code, doc, _ = run(capsys, "validate", "--fan", str(bad))
    assert code == 1 and doc["status"] == "violation"
    assert doc["result"]["violations"][0]["kind"] == "A2"


def test_parse_error_reports_line_and_column(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"dim": 2,\n  "rays": [[1, 0],,]}')
    code, doc, err = run(capsys, "validate", "--fan", str(bad))
    assert code == 2 and doc["status"] == "malformed"
    assert doc["result"]["witness"] == {"line": 2, "column": 19}
    assert "broken.json:2:19" in err


@pytest.mark.parametrize("argv", [
    ["validate", "--fan", "no-such-file.json"],
    ["validate"],
    ["lcm", "--fan", "split-quadrant.json", "--variant", "half"],
    ["b-of", "--fan", "split-quadrant.json", "--simplex", "0,2"],
    ["limits", "--fan", "split-quadrant.json", "--curve", '{"chart": [0, 2], "q0": {"0": 1, "2": 1}}'],
    ["sample-verify", "--fan", "split-quadrant.json", "--tol", "-1"],
    ["verify", "--criteria", "12"],
    ["verify", "--jobs", "0"],
    ["homology", "--fan", "split-quadrant.json", "--b-of", "1", "--dual-of", "1"],
])
def test_malformed_input_exits_2(capsys, argv):
    code, doc, err = run(capsys, *argv)
    assert code == 2
    assert doc["status"] == "malformed" and err.startswith("dualfan: ")


def test_argparse_errors_exit_2(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["diag", "--mode", "sideways"]) == 2
    capsys.readouterr()


def test_lcm_counts(capsys):
    assert run(capsys, "lcm", "--fan", "split-quadrant.json")[1]["result"]["count"] == 13
    assert run(capsys, "lcm-exc", "--fan", "split-quadrant.json")[1]["result"]["count"] == 9
    assert run(capsys, "lcm", "--fan", "split-quadrant.json", "--variant", "exc")[1]["result"]["variant"] == "exc"


def test_dual_and_b_of(capsys):
    _, doc, _ = run(capsys, "dual", "--fan", "split-quadrant.json")
    assert len(doc["result"]["cells"]) == 9
    _, doc, _ = run(capsys, "dual", "--fan", "split-quadrant.json", "--simplex", "r0")
    assert doc["result"]["cells"] == [{"z": [0], "f": []}, {"z": [0, 1], "f": []}, {"z": [0], "f": [1]}]
    _, doc, _ = run(capsys, "b-of", "--fan", "split-quadrant.json", "--simplex", "0")
    assert doc["result"] == {"cells": [{"z": [0, 1], "f": []}]}


def test_star_subsets_and_poset(capsys):
    _, doc, _ = run(capsys, "star", "--fan", "split-quadrant.json", "--simplices", "1")
    assert doc["result"]["star"] == [[0, 1], [1], [1, 2]]
    _, doc, _ = run(capsys, "subsets", "--fan", "split-quadrant.json")
    assert doc["result"] == {"all_interior": [[1]], "meets_interior": [[0, 1], [1], [1, 2]]}
    _, doc, _ = run(capsys, "poset", "--fan", "split-quadrant.json")
    assert len(doc["result"]["elements"]) == 5 and len(doc["result"]["covers"]) == 4
    _, doc, _ = run(capsys, "orbits", "--fan", "split-quadrant.json")
    assert len(doc["result"]["orbits"]) == 6


def test_subdivide_and_cubes(capsys):
    _, doc, _ = run(capsys, "subdivide", "--fan", "split-quadrant.json")
    assert len(doc["result"]["rays"]) == 5
    _, doc, _ = run(capsys, "cubes", "--simplex", "0,1,2")
    assert len(doc["result"]["cells"]) == 19 and doc["result"]["cube_faces"] == 19


def test_fibers(capsys):
    _, doc, _ = run(capsys, "fibers", "--fan", "split-quadrant.json", "--variant", "exc")
    assert {"a": [0], "fiber": [{"z": [0, 1], "f": []}]} in doc["result"]["over_simplex"]


def test_limits_inline_and_from_file(capsys, tmp_path):
    curve = {"chart": [0, 1], "J": [1], "q0": {"0": 3, "1": 2}}
    code, doc, _ = run(capsys, "limits", "--fan", "split-quadrant.json", "--curve", json.dumps(curve))
    assert code == 0
    result = doc["result"]
    assert result["closed_form"]["linear"]["stratum"] == [0]
    assert result["closed_form"]["toroidal"]["cell"] == {"z": [0], "f": [1]}
    assert result["sampled"]["kind"] == "boundary"
    assert result["core"]["kind"] == "interior"
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(curve))
    assert run(capsys, "limits", "--fan", "split-quadrant.json", "--curve", str(path))[1] == doc


def test_sample_verify(capsys):
    code, doc, _ = run(capsys, "sample-verify", "--fan", "split-quadrant.json", "--variant", "exc", "--trials", "30")
    assert code == 0
    assert doc["result"]["cells_expected"] == doc["result"]["cells_realized"] == 9


def test_group_and_diagonality(capsys):
    _, doc, _ = run(capsys, "group", "--fan", "split-quadrant.json", "--group", "swap.json")
    result = doc["result"]
    assert [g["perm"] for g in result["elements"]] == [[0, 1, 2], [2, 1, 0]]
    assert result["complete"] and result["free_on_interior"] and result["neat"]
    code, doc, _ = run(capsys, "diag", "--fan", "split-quadrant.json", "--group", "swap.json", "--variant", "exc")
    assert code == 0 and doc["result"]["verdict"] == "holds"
    code, doc, _ = run(capsys, "diag", "--model", "line-window.json", "--group", "shift1.json")
    assert code == 1 and doc["status"] == "violation"
    assert {"pair": [[0], ["1/2"]], "element": "shift+1"} in doc["result"]["witnesses"]
    assert doc["result"]["complete"] is False


def test_group_for_an_explicit_model(capsys):
    _, doc, _ = run(capsys, "group", "--model", "line-window.json", "--group", "shift2.json")
    assert doc["result"]["elements"][:3] == ["identity", "shift-2", "shift+2"]


def test_non_automorphism_is_a_violation(capsys, tmp_path):
    path = tmp_path / "shear.json"
    path.write_text(json.dumps({"generators": [[[1, 1], [0, 1]]], "bound": 1}))
    code, doc, _ = run(capsys, "group", "--fan", "split-quadrant.json", "--group", str(path))
    assert code == 1 and doc["status"] == "violation"


def test_quotients(capsys):
    _, doc, _ = run(capsys, "quotient", "--fan", "split-quadrant.json", "--group", "swap.json")
    assert doc["result"]["counts"] == {"cells": 9, "orbits": 5}
    _, doc, _ = run(capsys, "quotient", "--model", "line-window.json", "--group", "shift2.json")
    assert doc["result"]["a"]["counts"] == {"cells": 13, "orbits": 4}
    code, doc, _ = run(capsys, "quotient-lcm", "--fan", "split-quadrant.json", "--group", "swap.json", "--variant", "exc")
    assert code == 0 and doc["result"]["lcm_orbits"] == 5 and doc["result"]["verified"]
    code, doc, _ = run(capsys, "quotient-lcm", "--model", "line-window.json", "--group", "shift2.json")
    assert code == 0 and doc["result"]["lcm_orbits"] == 6
    # the shift group is infinite, so the verdict only covers the enumerated window
    assert doc["result"]["complete"] is False


def test_quotient_lcm_refusal(capsys):
    code, doc, _ = run(capsys, "quotient-lcm", "--model", "line-window.json", "--group", "shift1.json")
    assert code == 1 and doc["status"] == "refused"
    assert doc["result"]["witness"]["verdict"] == "fails"
    assert doc["result"]["witness"]["complete"] is False


def test_homology(capsys):
    _, doc, _ = run(capsys, "homology", "--fan", "conecircle.json", "--b-of", "apex")
    assert doc["result"] == {"complex": "b_of", "cells": 12, "betti": [1, 1], "torsion": [[], []], "reduced": False}
    for extra in (["--dual-of", "1"], ["--complex", "real-cube"], ["--complex", "lcm"], ["--complex", "lcm-exc"]):
        _, doc, _ = run(capsys, "homology", "--fan", "split-quadrant.json", "--reduced", *extra)
        assert not any(doc["result"]["betti"]), extra


def test_out_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, doc, _ = run(capsys, "lcm", "--fan", "split-quadrant.json", "--out", str(target))
    assert code == 0 and doc is None
    assert json.loads(target.read_text())["result"]["count"] == 13


def test_output_is_canonical_and_deterministic(capsys):
    main(["sample-verify", "--fan", "split-quadrant.json", "--trials", "20", "--seed", "5"])
    first = capsys.readouterr().out
    main(["sample-verify", "--fan", "split-quadrant.json", "--trials", "20", "--seed", "5"])
    assert capsys.readouterr().out == first
    assert first == dumps(json.loads(first))


def test_verify_subset_is_independent_of_jobs(capsys):
    code, one, err = run(capsys, "verify", "--criteria", "3,4,7")
    assert code == 0 and one["result"]["passed"]
    assert err.splitlines() == ["criterion 3 (join and dual identity): PASS",
                                "criterion 4 (fiber formulas): PASS",
                                "criterion 7 (basechange patterns): PASS"]
    _, two, _ = run(capsys, "verify", "--criteria", "3,4,7", "--jobs", "2")
    assert one == two
    assert all("runtime_ms" not in c for c in one["result"]["criteria"])
    _, timed, _ = run(capsys, "verify", "--criteria", "3", "--timings")
    assert "runtime_ms" in timed["result"]["criteria"][0]


@pytest.mark.parametrize("name", FAN_FIXTURES)
def test_packaged_fan_fixtures_validate(capsys, name):
    code, doc, _ = run(capsys, "validate", "--fan", name)
    assert code == 0, doc
    assert load_json(name)["dim"] >= 1
