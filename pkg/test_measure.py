#!/usr/bin/env python3
"""
Tests for the fermionic q-measure on residue discs.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from arith import Backend, ConvergenceDomainError, DomainError, QParam, valuation
from qeuler import Ball, MeasureContext, balls, check_additivity, mu, mu_product_form, total_mass


def make_ctx(num, p=3, backend=Backend.RATIONAL, precision=None):
    return MeasureContext(QParam.from_rational(num, 1, p, backend, precision))


def test_level_one_measures():
    ctx = make_ctx(4)
    assert mu(Ball(0, 1, 1, 3), ctx) == Fraction(1, 13)
    assert mu(Ball(1, 1, 1, 3), ctx) == Fraction(-4, 13)
    assert mu(Ball(2, 1, 1, 3), ctx) == Fraction(16, 13)


def test_whole_space_has_measure_one():
    assert mu(Ball(0, 1, 0, 5), make_ctx(6, p=5)) == 1


def test_padic_measure_matches_rational():
    padic = make_ctx(4, backend=Backend.PADIC, precision=6)
    assert mu(Ball(2, 1, 1, 3), padic).agrees(Fraction(16, 13), 6)


def test_ball_validation():
    with pytest.raises(DomainError):
        Ball(0, 2, 1, 3)
    with pytest.raises(DomainError):
        Ball(0, 3, 1, 3)
    with pytest.raises(DomainError):
        Ball(9, 1, 2, 3)
    with pytest.raises(DomainError):
        Ball(0, 1, -1, 3)


def test_children_partition_the_ball():
    ball = Ball(4, 5, 1, 3)
    children = ball.children()
    assert [c.a for c in children] == [4, 19, 34]
    assert all(c.modulus == 45 for c in children)
    assert all(ball.contains(c.a) for c in children)
    assert not ball.contains(5)


def test_measure_requires_strict_regime():
    with pytest.raises(ConvergenceDomainError):
        make_ctx(2)


def test_mismatched_prime():
    with pytest.raises(DomainError):
        mu(Ball(0, 1, 1, 5), make_ctx(4))


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("d", [1, 3, 5])
def test_distribution_property_is_exact(p, d):
    if d % p == 0:
        pytest.skip("d must be prime to p")
    for q in (1 + p, 1 + 2 * p):
        ctx = make_ctx(q, p=p)
        for N in range(4):
            for ball in balls(d, N, p):
                assert check_additivity(ball, ctx).holds
            assert total_mass(d, N, ctx) == 1


@pytest.mark.parametrize("p", [3, 5])
def test_product_form_agrees(p):
    ctx = make_ctx(1 + p, p=p)
    for ball in balls(3, 1, p):
        assert mu_product_form(ball, ctx) == mu(ball, ctx)


def test_padic_additivity_and_mass():
    ctx = make_ctx(4, backend=Backend.PADIC, precision=6)
    for ball in balls(1, 2, 3):
        assert check_additivity(ball, ctx).holds
    assert total_mass(1, 2, ctx).agrees(1, 6)


def test_q_equal_one_is_alternating():
    ctx = make_ctx(1)
    assert [mu(b, ctx) for b in balls(1, 1, 3)] == [1, -1, 1]


@given(k=st.integers(min_value=1, max_value=20), a=st.integers(min_value=0, max_value=26))
@settings(max_examples=30)
def test_additivity_random_q(k, a):
    ctx = make_ctx(1 + 3 * k)
    assert check_additivity(Ball(a, 1, 3, 3), ctx).holds


@pytest.mark.parametrize("p", [3, 5, 7])
def test_measure_is_bounded(p):
    rational = make_ctx(1 + p, p=p)
    padic = make_ctx(1 + 2 * p, p=p, backend=Backend.PADIC, precision=6)
    for N in range(3):
        for ball in balls(1, N, p):
            assert valuation(mu(ball, rational), p) == 0
            assert mu(ball, padic).is_unit()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
