#!/usr/bin/env python3
"""
Tests for the truncated generating function F_q(t) and its q-difference equation.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from arith import Backend, DomainError, QBracketContext, QParam
from qeuler import (
    BracketPower,
    build_egf,
    check_q_difference,
    classical_egf,
    classical_euler,
    egf_integral_agreement,
    level_egf,
    riemann_sum,
)


def make_ctx(num, den=1, p=3, backend=Backend.RATIONAL, precision=None):
    return QBracketContext(QParam.from_rational(num, den, p, backend, precision))


def test_order_zero():
    assert build_egf(make_ctx(4), 0).coefficients == (1,)


def test_coefficients_are_q_euler_numbers():
    egf = build_egf(make_ctx(4), 2)
    assert list(egf.coefficients) == [1, Fraction(-4, 17), Fraction(12, 221)]
    assert egf.K == 2


def test_q_one_is_classical():
    egf = build_egf(make_ctx(1), 3)
    assert list(egf.coefficients) == [1, Fraction(-1, 2), 0, Fraction(1, 4)]


def test_classical_egf_matches_recurrence():
    assert classical_egf(10) == [classical_euler(k) for k in range(11)]


def test_q_difference_rational():
    report = check_q_difference(build_egf(make_ctx(4), 12))
    assert report.holds
    assert all(r == 0 for r in report.residuals)
    assert "1 + q" in report.note


def test_q_difference_at_q_one():
    report = check_q_difference(build_egf(make_ctx(1), 10))
    assert report.holds


def test_q_difference_padic():
    report = check_q_difference(build_egf(make_ctx(4, backend=Backend.PADIC, precision=6), 6))
    assert report.precision == 6
    assert report.holds


def test_q_difference_needs_two_terms():
    with pytest.raises(DomainError):
        check_q_difference(build_egf(make_ctx(4), 0))


def test_report_dictionary():
    out = check_q_difference(build_egf(make_ctx(4), 2)).to_dict()
    assert out["residuals"] == ["0", "0", "0"]
    assert out["valuations"] == [None, None, None]
    assert out["holds"] is True


def test_level_egf_coefficients_are_riemann_sums():
    ctx = make_ctx(4)
    egf = level_egf(ctx, 3, 2)
    for k in range(4):
        assert egf[k] == riemann_sum(BracketPower(k), ctx, 2)


def test_integral_agreement():
    ctx = make_ctx(4, backend=Backend.PADIC, precision=4)
    rows = egf_integral_agreement(build_egf(ctx, 2), ctx)
    assert [r["k"] for r in rows] == [0, 1, 2]
    assert all(r["converged"] for r in rows)
    assert all(r["agree_valuation"] is None or r["agree_valuation"] >= 4 for r in rows)


@given(num=st.integers(min_value=-30, max_value=30), den=st.integers(min_value=1, max_value=30))
@settings(max_examples=10, deadline=None)
def test_q_difference_random_q(num, den):
    q = Fraction(num, den)
    assume(q not in (0, 1, -1))
    report = check_q_difference(build_egf(make_ctx(num, den), 12))
    assert all(r == 0 for r in report.residuals)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
