#!/usr/bin/env python3
"""
Tests for q-Riemann sums, the stabilization loop and the functional equation.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from arith import (
    Backend,
    ConvergenceDomainError,
    DomainError,
    NotConvergedError,
    QBracketContext,
    QParam,
    to_padic,
    valuation,
)
from qeuler import (
    BracketPower,
    FunctionIntegrand,
    LinearCombination,
    build_character,
    check_functional_equation,
    integrate,
    q1_limit_integral,
    riemann_sum,
    riemann_sum_by_balls,
)
from qeuler.integral import default_level_cap, require_converged


def make_ctx(num, den=1, p=3, backend=Backend.RATIONAL, precision=None):
    return QBracketContext(QParam.from_rational(num, den, p, backend, precision))


def test_constant_function_sums_to_one():
    ctx = make_ctx(4)
    for N in range(4):
        assert riemann_sum(BracketPower(0), ctx, N) == 1


def test_three_term_sum():
    assert riemann_sum(BracketPower(1), make_ctx(4), 1) == Fraction(76, 13)


def test_alternating_sum_at_q_one():
    assert riemann_sum(BracketPower(1), make_ctx(1), 2) == 4


def test_level_zero_is_value_at_zero():
    assert riemann_sum(BracketPower(2, shift=1), make_ctx(4), 0) == 1


def test_padic_sum_matches_rational():
    rational = riemann_sum(BracketPower(2), make_ctx(4), 2)
    padic = riemann_sum(BracketPower(2), make_ctx(4, backend=Backend.PADIC, precision=6), 2)
    assert padic.agrees(rational, 6)


def test_fast_path_matches_pointwise_sum():
    ctx = make_ctx(4)
    f = BracketPower(3, shift=2)
    pointwise = FunctionIntegrand(lambda x, c: f(x, c), "pointwise", 1, 3)
    assert riemann_sum(f, ctx, 2) == riemann_sum(pointwise, ctx, 2)


def test_sum_by_balls_matches():
    ctx = make_ctx(7)
    for m in range(4):
        assert riemann_sum_by_balls(BracketPower(m), ctx, 2) == riemann_sum(BracketPower(m), ctx, 2)


def test_chunked_sums_are_identical():
    ctx = make_ctx(4)
    f = BracketPower(2)
    assert riemann_sum(f, ctx, 3, chunks=5) == riemann_sum(f, ctx, 3)
    padic = make_ctx(4, backend=Backend.PADIC, precision=6)
    assert riemann_sum(f, padic, 3, chunks=4) == riemann_sum(f, padic, 3)


def test_linearity():
    ctx = make_ctx(4)
    f, g = BracketPower(1), BracketPower(2)
    combo = LinearCombination(((2, f), (Fraction(-1, 3), g)))
    expected = 2 * riemann_sum(f, ctx, 2) - Fraction(1, 3) * riemann_sum(g, ctx, 2)
    assert riemann_sum(combo, ctx, 2) == expected


def test_riemann_sum_domain():
    with pytest.raises(ConvergenceDomainError):
        riemann_sum(BracketPower(1), make_ctx(2), 1)
    with pytest.raises(DomainError):
        riemann_sum(BracketPower(1), make_ctx(4), -1)
    chi = build_character(3, [0, 1, -1])
    with pytest.raises(DomainError):
        riemann_sum(BracketPower(1, chi=chi), make_ctx(4), 1)


def test_integrate_constant_converges_at_once():
    result = integrate(BracketPower(0), make_ctx(4, backend=Backend.PADIC, precision=6))
    assert result.converged
    assert result.levels_used == 1
    assert result.value.agrees(1, 6)


@pytest.mark.parametrize("m,expected", [(1, Fraction(-4, 17)), (2, Fraction(12, 221))])
def test_integrate_matches_closed_form(m, expected):
    result = integrate(BracketPower(m), make_ctx(4, backend=Backend.PADIC, precision=6))
    assert result.converged
    assert result.achieved_precision == 6
    assert result.levels_used <= default_level_cap(6, m)
    assert result.value.agrees(expected, 6)


def test_integrate_rational_backend():
    result = integrate(BracketPower(1), make_ctx(4), precision=3)
    assert result.converged
    assert isinstance(result.value, Fraction)
    assert valuation(result.value - Fraction(-4, 17), 3) >= 3


def test_level_values_are_cauchy():
    result = integrate(BracketPower(1), make_ctx(4, backend=Backend.PADIC, precision=5))
    values = result.level_values
    for N in range(1, len(values)):
        assert valuation(values[N] - values[N - 1]) >= N - 1


def test_not_converged_is_flagged():
    result = integrate(BracketPower(2), make_ctx(4, backend=Backend.PADIC, precision=6), n_max=1)
    assert not result.converged
    assert result.achieved_precision < 6
    with pytest.raises(NotConvergedError) as info:
        check_functional_equation(BracketPower(2), make_ctx(4, backend=Backend.PADIC, precision=6),
                                  n_max=1)
    assert info.value.partial is not None


def test_require_converged():
    ctx = make_ctx(4, backend=Backend.PADIC, precision=6)
    good = integrate(BracketPower(0), ctx)
    assert require_converged(good) is good
    bad = integrate(BracketPower(2), ctx, n_max=1)
    with pytest.raises(NotConvergedError) as info:
        require_converged(bad)
    assert info.value.partial is bad


def test_result_dictionary():
    result = integrate(BracketPower(1), make_ctx(4, backend=Backend.PADIC, precision=6))
    out = result.to_dict()
    assert out["integrand"] == "bracket^1"
    assert out["precision"] == 6
    assert out["converged"] is True
    assert out["valuation"] == 0
    assert out["value"].endswith("O(3^6)")


@pytest.mark.parametrize("m", range(9))
def test_functional_equation_padic(m):
    report = check_functional_equation(BracketPower(m),
                                       make_ctx(4, backend=Backend.PADIC, precision=6))
    assert report.holds


def test_functional_equation_twisted():
    chi = build_character(3, [0, 1, -1])
    report = check_functional_equation(BracketPower(1, chi=chi),
                                       make_ctx(6, p=5, backend=Backend.PADIC, precision=4))
    assert report.holds


def test_functional_equation_constant_is_exact():
    report = check_functional_equation(BracketPower(0), make_ctx(4), precision=3)
    assert report.residual == 0


def test_q_one_limits_are_classical():
    assert q1_limit_integral(BracketPower(0), 3, 4).agrees(1, 4)
    assert q1_limit_integral(BracketPower(1), 3, 4).agrees(Fraction(-1, 2), 4)
    assert q1_limit_integral(BracketPower(2), 3, 4).agrees(0, 4)


@given(N=st.integers(min_value=0, max_value=4), m=st.integers(min_value=0, max_value=3))
@settings(max_examples=20, deadline=None)
def test_level_gain(N, m):
    p = 3
    padic = make_ctx(1 + p, p=p, backend=Backend.PADIC, precision=10)
    closed = {0: Fraction(1), 1: Fraction(-4, 17), 2: Fraction(12, 221)}
    s = riemann_sum(BracketPower(m), padic, N)
    if m in closed:
        assert valuation(s - to_padic(closed[m], p, 10)) >= N + 1 - m
    nxt = riemann_sum(BracketPower(m), padic, N + 1)
    assert valuation(nxt - s) >= N + 1 - m


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
