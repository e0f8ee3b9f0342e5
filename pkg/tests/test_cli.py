"""Command-line interface: goldens, determinism, provenance, exit codes."""

import json
from fractions import Fraction as F

import pytest

from voablocks.cli import main, run_report
from voablocks.jsonio import dumps


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestCharacter:
    def test_heisenberg_json(self, capsys):
        code, out = run(capsys, "character", "--model", "heisenberg",
                        "--cap", "6")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"] == "voa-blocks/1"
        coeffs = [int(c["num"]) for c in doc["character"]["coeffs"]]
        assert coeffs == [1, 1, 2, 3, 5, 7, 11]
        assert all(c["provenance"] == "exact"
                   for c in doc["character"]["coeffs"])

    def test_normalized_offset(self, capsys):
        code, out = run(capsys, "character", "--model", "virasoro",
                        "--cap", "4", "--normalize")
        doc = json.loads(out)
        off = doc["character"]["offset"]
        assert (int(off["num"]), int(off["den"])) == (-1, 48)

    def test_csv(self, capsys):
        code, out = run(capsys, "character", "--model", "heisenberg",
                        "--cap", "3", "--format", "csv")
        assert code == 0
        assert out.splitlines() == ["n,coeff", "0,1", "1,1", "2,2", "3,3"]

    def test_bad_cap_is_config_error(self, capsys):
        code, _ = run(capsys, "character", "--model", "heisenberg",
                      "--cap", "0")
        assert code == 2


class TestCoord:
    def test_extract_golden(self, capsys):
        code, out = run(capsys, "coord", "extract",
                        "--series", "z + z^2 + z^3", "--count", "2")
        assert code == 0
        doc = json.loads(out)
        got = [F(int(c["num"]), int(c["den"])) for c in doc["coeffs"]]
        assert got == [F(1), F(1), F(0)]

    def test_huang_passes(self, capsys):
        code, out = run(capsys, "coord", "huang",
                        "--alpha", "z + 1/2*z^2", "--cap", "2")
        assert code == 0
        assert json.loads(out)["passed"] is True


def test_schwarzian_golden(capsys):
    code, out = run(capsys, "schwarzian", "--series", "z + z^3")
    assert code == 0
    s = json.loads(out)["series"]
    assert int(s["coeffs"][0]["num"]) == 6
    assert int(s["coeffs"][2]["num"]) == -72


def test_uniformize_roundtrip(capsys):
    code, out = run(capsys, "uniformize", "--series", "6*z")
    assert code == 0
    assert json.loads(out)["series"]["var"] == "z"


class TestBlocks:
    def test_three_point_fixture(self, capsys, tmp_path):
        fx = tmp_path / "tp.json"
        fx.write_text(json.dumps({
            "model": "heisenberg",
            "v": {"1": {"num": "1", "den": "1"}},
            "z0": {"num": "2", "den": "1"},
            "w": {"1": {"num": "1", "den": "1"}},
            "wp": {"": {"num": "1", "den": "1"}}}))
        code, out = run(capsys, "blocks", "three-point", "--fixture", str(fx))
        assert code == 0
        v = json.loads(out)["value"]
        assert (int(v["num"]), int(v["den"])) == (1, 4)

    def test_residue_check_failure_exit(self, capsys, tmp_path):
        fx = tmp_path / "rc.json"
        fx.write_text(json.dumps({"tails": {
            "0": {"var": "t", "floor": -1, "order": 2,
                  "coeffs": [{"num": "1", "den": "1"},
                             {"num": "0", "den": "1"},
                             {"num": "0", "den": "1"}]},
            "inf": {"var": "w", "floor": 0, "order": 3,
                    "coeffs": [{"num": "0", "den": "1"},
                               {"num": "0", "den": "1"},
                               {"num": "0", "den": "1"}]}}}))
        code, out = run(capsys, "blocks", "residue-check", "--fixture", str(fx))
        assert code == 1
        doc = json.loads(out)
        assert doc["passed"] is False and "witness" in doc


class TestOde:
    @pytest.fixture
    def matrix_fixture(self, tmp_path):
        order = 12
        coeffs = [{"num": "0", "den": "1"}] + \
                 [{"num": "1", "den": "1"}] * (order - 1)
        fx = tmp_path / "mat.json"
        fx.write_text(json.dumps({"entries": [[
            {"var": "q", "floor": 0, "order": order, "coeffs": coeffs}]],
            "seeds": {"0": [{"num": "1", "den": "1"}]}}))
        return fx

    def test_solve_golden(self, capsys, matrix_fixture):
        code, out = run(capsys, "ode", "solve",
                        "--matrix", str(matrix_fixture), "--order", "8")
        assert code == 0
        modes = json.loads(out)["modes"]
        assert all(int(v[0]["num"]) == 1 for v in modes)

    def test_continue_provenance(self, capsys, matrix_fixture, tmp_path):
        path = tmp_path / "path.json"
        path.write_text(json.dumps({"waypoints": [[0.05, 0.0], [0.1, 0.0]],
                                    "start": [[1.0, 0.0]]}))
        code, out = run(capsys, "ode", "continue",
                        "--matrix", str(matrix_fixture),
                        "--path", str(path), "--steps", "50")
        assert code == 0
        doc = json.loads(out)
        assert doc["value"][0]["re"]["provenance"] == "float"
        assert doc["error_estimate"]["provenance"] == "float"


class TestReport:
    def test_all_checks_pass(self):
        rep = run_report(7)
        assert rep["passed"] is True
        assert {c["name"] for c in rep["checks"]} == {
            "virasoro-bracket", "schwarzian-cocycle", "glue-roundtrip",
            "character-partitions", "ode-recursion"}

    def test_byte_identical_across_runs(self, capsys):
        _, out1 = run(capsys, "report", "--seed", "7")
        _, out2 = run(capsys, "report", "--seed", "7")
        assert out1 == out2
        assert dumps(run_report(7)) == dumps(run_report(7))

    def test_seed_recorded(self, capsys):
        code, out = run(capsys, "report", "--seed", "11")
        assert code == 0
        assert json.loads(out)["seed"] == 11


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "ch.json"
    code = main(["character", "--model", "heisenberg", "--cap", "3",
                 "--out", str(dest)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(dest.read_text())["cap"] == 3
