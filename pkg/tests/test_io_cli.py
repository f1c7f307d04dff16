import json
from fractions import Fraction

import pytest

from hermdeg.cli import main
from hermdeg.errors import SchemaError, SymmetryError
from hermdeg.io import dumps, format_rational, parse_hermitian, parse_lattice, parse_rational
from hermdeg.lattice import standard_lattice


def test_rationals():
    assert format_rational(Fraction(3)) == "3/1"
    assert parse_rational("-7/21") == Fraction(-1, 3)
    assert parse_rational(5) == 5
    for bad in (0.5, True, "x", None):
        with pytest.raises(SchemaError):
            parse_rational(bad)


def test_parse_hermitian(gauss):
    m = parse_hermitian("[[[1,0],[2,1]],[[-2,-1],[3,0]]]", gauss)
    assert m.n == 2 and m.det() == 2
    with pytest.raises(SymmetryError):
        parse_hermitian("[[[1,0],[0,-1]],[[0,1],[3,0]]]", gauss)
    with pytest.raises(SchemaError):
        parse_hermitian("[[[1,0]],[[1,0]]]", gauss)
    with pytest.raises(SchemaError):
        parse_hermitian("not json", gauss)


def test_lattice_round_trip(gauss, diag):
    lat = standard_lattice(gauss, diag(1, 3))
    again = parse_lattice(dumps(lat), gauss)
    assert again == lat


def test_no_floats_in_output(gauss, diag):
    with pytest.raises(TypeError):
        dumps({"x": 0.5})
    assert dumps({"b": Fraction(1, 2), "a": 1}) == '{"a": 1, "b": "1/2"}'


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_field_info(capsys):
    code, out, _ = _run(capsys, "field", "info", "--delta", "-15", "--n", "2")
    doc = json.loads(out)
    assert code == 0
    assert (doc["h"], doc["num_ramified"], doc["w"], doc["relevant_spaces"]["count"]) == (2, 2, 2, 2)


def test_cli_exit_codes(capsys):
    assert _run(capsys, "field", "info", "--delta", "-12")[0] == 2
    code, _, err = _run(capsys, "density", "alpha", "--delta", "-4", "--p", "5", "--S", "[[[1,0]]]", "--T", "[[[1,0]]]")
    assert code == 3 and "NotInert" in err
    with pytest.raises(SystemExit) as exc:
        main(["density", "mu"])
    assert exc.value.code == 2
    assert _run(capsys, "verify", "nonsense")[0] == 2


def test_cli_deterministic(capsys):
    argv = ("density", "alpha", "--delta", "-4", "--p", "3", "--S", "[[[1,0]]]", "--T", "[[[1,0]]]")
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first == second
    assert json.loads(first[1])["alpha"] == "4/3"


def test_cli_mu_and_lattice(capsys):
    code, out, _ = _run(capsys, "density", "mu", "--a", "1", "--b", "2", "--p", "3")
    assert code == 0 and json.loads(out) == {"mu": "5/1"}
    code, out, _ = _run(capsys, "lattice", "genus", "--delta", "-4", "--T", "[[[1,0],[0,0]],[[0,0],[3,0]]]")
    doc = json.loads(out)
    assert code == 0 and doc["mass"] == "1/16" and doc["aut_orders"] == [16]


def test_cli_report(capsys):
    code, out, _ = _run(capsys, "coeff", "report", "--delta", "-4", "--T", "[[[3,0],[0,0]],[[0,0],[9,0]]]")
    doc = json.loads(out)
    assert code == 0
    assert doc["status"] == "inert_case"
    assert doc["arithmetic_degree"] == "5/4"
    assert doc["times"] == ["log_p", "q^T", "C"]


def test_cli_verify_field(capsys):
    code, out, _ = _run(capsys, "verify", "field")
    assert code == 0
    assert json.loads(out)["all_pass"] is True
