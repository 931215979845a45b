#!/usr/bin/env python3
"""
Tests for the command-line interface, its configuration and exit codes.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from pydantic import ValidationError

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import main as cli
from arith import GrammarError, parse_scalar
from config import RunConfig, load_defaults
from qeuler import parse_character, parse_degrees, parse_integrand, parse_q
from qeuler.checks import CheckCase, CheckReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_euler_rational_rows(capsys):
    code, out, _ = run(capsys, "euler", "--p", "3", "--q", "4", "--m", "0..2",
                       "--backend", "rational", "--prec", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == 3
    assert doc["q"] == "4"
    assert doc["backend"] == "rational"
    assert [r["closed"] for r in doc["results"]] == ["1", "-4/17", "12/221"]
    assert all(r["agree_valuation"] >= 4 for r in doc["results"])


def test_euler_values_reparse(capsys):
    code, out, _ = run(capsys, "euler", "--p", "5", "--q", "6", "--m", "0..1", "--prec", "4")
    assert code == 0
    for row in json.loads(out)["results"]:
        closed = parse_scalar(row["closed"], 5)
        integral = parse_scalar(row["integral"], 5)
        assert closed.agrees(integral, 4)


def test_euler_degree_zero(capsys):
    code, out, _ = run(capsys, "euler", "--p", "5", "--q", "6", "--m", "0")
    assert code == 0
    assert json.loads(out)["results"][0]["m"] == 0


def test_euler_q_one_suggests_classical(capsys):
    code, _, err = run(capsys, "euler", "--p", "3", "--q", "1", "--m", "1")
    assert code == 2
    assert "classical" in err


def test_classical_csv(capsys):
    code, out, _ = run(capsys, "classical", "--m", "0..3", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["m,value", "0,1", "1,-1/2", "2,0", "3,1/4"]


def test_classical_text(capsys):
    code, out, _ = run(capsys, "classical", "--m", "7", "--format", "text")
    assert code == 0
    assert "17/8" in out


def test_euler_poly(capsys):
    code, out, _ = run(capsys, "euler-poly", "--p", "3", "--q", "4", "--m", "1", "--x", "1",
                       "--backend", "rational", "--prec", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["x"] == 1
    assert doc["results"][0]["closed"] == "1/17"


def test_euler_chi(capsys):
    code, out, _ = run(capsys, "euler-chi", "--p", "5", "--q", "6", "--m", "0..1",
                       "--chi", "3:0,1,-1", "--backend", "rational", "--prec", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["chi"] == "3:0,1,-1"
    assert doc["primitive"] is True
    assert doc["results"][0]["closed"] == "-42/31"
    assert all(r["agree_valuation"] >= 4 for r in doc["results"])


def test_euler_chi_unrealizable(capsys):
    code, _, err = run(capsys, "euler-chi", "--p", "7", "--q", "8", "--m", "0",
                       "--chi", "5:0,1,zeta(4,1),zeta(4,3),-1")
    assert code == 2
    assert "order 4" in err


def test_measure(capsys):
    code, out, _ = run(capsys, "measure", "--p", "3", "--q", "4", "--a", "2", "--N", "1",
                       "--backend", "rational")
    assert code == 0
    doc = json.loads(out)
    assert doc["mu"] == "16/13"
    assert doc["mu_product_form"] == "16/13"
    assert doc["additivity_residual"] == "0"
    assert doc["total_mass"] == "1"
    assert len(doc["children"]) == 3


def test_measure_outside_strict_regime(capsys):
    code, _, _ = run(capsys, "measure", "--p", "3", "--q", "2")
    assert code == 2


def test_integrate_constant(capsys):
    code, out, _ = run(capsys, "integrate", "--p", "3", "--q", "4", "--f", "bracket^0")
    assert code == 0
    doc = json.loads(out)
    assert doc["levels"] == 1
    assert doc["converged"] is True
    assert doc["value"] == "1 + O(3^6)"


def test_integrate_first_moment(capsys):
    code, out, _ = run(capsys, "integrate", "--p", "3", "--q", "4", "--f", "bracket^1",
                       "--prec", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["levels"] <= 7
    assert parse_scalar(doc["value"], 3).agrees(Fraction(-4, 17), 6)


def test_integrate_parse_error(capsys):
    code, _, err = run(capsys, "integrate", "--f", "brackt^1")
    assert code == 2
    assert "position 0" in err


def test_integrate_not_converged(capsys):
    code, out, err = run(capsys, "integrate", "--p", "3", "--q", "4", "--f", "bracket^2",
                         "--N-max", "1")
    assert code == 3
    assert json.loads(out)["converged"] is False
    assert "NOT-CONVERGED" in err


def test_check_distribution(capsys):
    code, out, _ = run(capsys, "check", "distribution", "--p", "3", "--d", "5", "--N", "2",
                       "--q", "4", "--backend", "rational")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert all(c["residual"] == "0" for c in doc["cases"])


def test_check_distribution_modulus_sharing_p(capsys):
    code, _, err = run(capsys, "check", "distribution", "--p", "3", "--d", "3", "--N", "2",
                       "--q", "4")
    assert code == 2
    assert "must be prime to p = 3" in err


def test_check_distribution_padic_default(capsys):
    code, out, _ = run(capsys, "check", "distribution", "--p", "3", "--d", "5", "--N", "1",
                       "--q", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["backend"] == "padic"
    assert all(c["target"] == 6 for c in doc["cases"])


def test_check_mass(capsys):
    code, out, _ = run(capsys, "check", "mass", "--p", "5", "--d", "3", "--N", "2", "--q", "6")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_feq(capsys):
    code, out, _ = run(capsys, "check", "feq", "--p", "3", "--q", "4", "--m", "0..6",
                       "--backend", "rational")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_feq_padic(capsys):
    code, out, _ = run(capsys, "check", "feq", "--p", "3", "--q", "4", "--m", "0..1",
                       "--prec", "4")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_qdiff_prints_erratum(capsys):
    code, out, err = run(capsys, "check", "qdiff", "--p", "3", "--q", "4", "--K", "12",
                         "--backend", "rational")
    assert code == 0
    assert "note" in json.loads(out)
    assert "1 + q" in err


def test_check_limit(capsys):
    code, out, _ = run(capsys, "check", "limit", "--p", "3", "--q", "4")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_failure_exit_code(capsys, monkeypatch):
    failing = CheckReport("mass", [CheckCase("d=1 N=0", "1", 0, 6)])
    monkeypatch.setattr(cli, "check_mass", lambda ctx, d, N: failing)
    code, out, err = run(capsys, "check", "mass", "--q", "4")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "d=1 N=0" in err


def test_invalid_prime(capsys):
    code, _, err = run(capsys, "euler", "--p", "4")
    assert code == 2
    assert "エラー" in err


def test_output_is_deterministic(capsys):
    argv = ("euler", "--p", "3", "--q", "4", "--m", "0..1", "--prec", "4")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_config_file(capsys, tmp_path):
    path = tmp_path / "qeuler.env"
    path.write_text("QEULER_PRIME=5\nQEULER_BACKEND=rational\nUNRELATED=1\n")
    code, out, _ = run(capsys, "euler", "--q", "6", "--m", "1", "--prec", "3",
                       "--config", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == 5
    assert doc["backend"] == "rational"


def test_missing_config_file(capsys, tmp_path):
    code, _, _ = run(capsys, "classical", "--config", str(tmp_path / "missing.env"))
    assert code == 2


def test_load_defaults_without_file():
    defaults = load_defaults()
    assert defaults["prime"] == 3
    assert defaults["precision"] == 6


def test_run_config_validation():
    config = RunConfig(prime=5, degrees="1..3")
    assert config.q_text == "6"
    assert config.degree_list == [1, 2, 3]
    with pytest.raises(ValidationError):
        RunConfig(prime=9)
    with pytest.raises(ValidationError):
        RunConfig(precision=0)
    with pytest.raises(ValidationError):
        RunConfig(q="4/0")
    with pytest.raises(ValidationError):
        RunConfig(output_format="xml")


def test_grammar():
    assert parse_q("9/5") == Fraction(9, 5)
    assert parse_q("4") == 4
    assert parse_degrees("0..6") == list(range(7))
    f = parse_integrand("bracket_shift(2)^3")
    assert (f.m, f.shift) == (3, 2)
    g = parse_integrand("chi(3:0,1,-1)*bracket^1")
    assert g.chi.modulus == 3 and g.m == 1
    assert parse_character("5:0,1,zeta(4,1),zeta(4,3),-1").order == 4


@pytest.mark.parametrize("text,position", [
    ("bracket^", 0),
    ("chi(3:0,1,-1)bracket^1", 12),
    ("chi(3:0,1,x)*bracket^1", 10),
])
def test_grammar_positions(text, position):
    with pytest.raises(GrammarError) as info:
        parse_integrand(text)
    assert info.value.position == position


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
