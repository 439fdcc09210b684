import io
import json

import pytest

from heckewind import cli
from heckewind.analytic.special import NumericalError
from heckewind.experiments import parse_symbol_expression
from heckewind.manin import build_space


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_space_json():
    code, out, _ = call("space", "--level", "11", "--weight", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["dim_cuspidal"] == 2 and data["dim_forms"] == 1


def test_winding_magma_lines_parse_back():
    code, out, _ = call("winding", "--level", "23", "--weight", "2", "--hecke-upto", "5", "--format", "magma")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 5 and lines[0] == "-1*{oo, 0}"
    s = build_space(23, 1)
    assert all(len(parse_symbol_expression(s, line)) == s.dim_full for line in lines)


def test_winding_json_has_certificate():
    code, out, _ = call("winding", "--level", "23", "--weight", "2", "--d", "4", "--format", "json")
    cert = json.loads(out)["certificate"]
    assert code == 0 and cert["verdict"] == "dependent" and cert["witness"]["vector"] == [1, 0, -1, 2]


def test_scan_csv_and_json():
    code, out, _ = call("scan", "--weight", "2", "--d", "2", "--primes", "11..23")
    assert code == 0
    assert out.splitlines() == ["p,rank,verdict", "11,1,dependent", "13,0,dependent", "17,1,dependent",
                                "19,1,dependent", "23,2,independent"]
    code, out, _ = call("scan", "--weight", "2", "--d", "2", "--primes", "11..13", "--format", "json")
    assert [r["p"] for r in json.loads(out)["rows"]] == [11, 13]


@pytest.mark.parametrize(
    "argv",
    [
        ["lvalues", "--level", "11", "--weight", "2"],
        ["petersson", "--level", "11", "--weight", "4"],
        ["smain-soff", "--level", "11", "--weight", "2", "--d", "2"],
        ["equiv", "--level", "23", "--weight", "2", "--l", "3,5", "--d", "2"],
    ],
)
def test_json_everywhere_and_deterministic(argv):
    a = call(*argv, "--format", "json")
    b = call(*argv, "--format", "json")
    assert a[0] == 0 and a[1] == b[1]
    json.loads(a[1])


def test_smain_soff_alpha_and_warnings():
    code, out, err = call("smain-soff", "--level", "11", "--weight", "2", "--d", "2", "--alpha", "1,2", "--format", "csv")
    assert code == 0 and out.startswith("alpha,s_main")
    assert "warning" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["space", "--level", "12", "--weight", "2"],
        ["space", "--level", "11", "--weight", "3"],
        ["space", "--level", "11", "--weight", "2", "--format", "magma"],
        ["scan", "--weight", "2", "--d", "4", "--primes", "9..3"],
        ["winding", "--level", "11", "--weight", "2", "--modulus", "4"],
        ["equiv", "--level", "11", "--weight", "2", "--l", "11", "--d", "2"],
        ["smain-soff", "--level", "11", "--weight", "2", "--d", "2", "--alpha", "1,2,3"],
    ],
)
def test_invalid_input_exit_code(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and err


def test_resource_exit_code():
    code, out, err = call("space", "--level", "101", "--weight", "6", "--max-generators", "50")
    assert code == 4 and "resource" in err


def test_numeric_exit_code(monkeypatch):
    def boom(args, fmt):
        raise NumericalError("no convergence")

    monkeypatch.setitem(cli._COMMANDS, "lvalues", boom)
    code, _, err = call("lvalues", "--level", "11", "--weight", "2")
    assert code == 3 and "numerical" in err


def test_output_file(tmp_path):
    path = tmp_path / "space.json"
    code, out, _ = call("space", "--level", "23", "--weight", "4", "--output", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["dim_cuspidal"] == 10
