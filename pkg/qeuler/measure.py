"""The fermionic q-measure on residue discs a + d*p^N*Z_p."""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterator, List

from arith import (
    ConvergenceDomainError,
    DomainError,
    QBracketContext,
    Scalar,
    is_zero,
    q_bracket_neg,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ball:
    """
    The residue disc a + d*p^N*Z_p of X = lim Z/(d p^N)Z.

    Attributes:
        a: Residue with 0 <= a < d*p^N
        d: Odd modulus prime to p
        N: Level
        prime: p
    """

    a: int
    d: int
    N: int
    prime: int

    def __post_init__(self):
        if self.d < 1 or self.d % 2 == 0:
            raise DomainError(f"d must be odd and positive, got {self.d}")
        if gcd(self.d, self.prime) != 1:
            raise DomainError(f"d = {self.d} must be prime to p = {self.prime}")
        if self.N < 0:
            raise DomainError(f"level must be non-negative, got {self.N}")
        if not 0 <= self.a < self.modulus:
            raise DomainError(f"residue {self.a} outside [0, {self.modulus})")

    @property
    def modulus(self) -> int:
        """d*p^N."""
        return self.d * self.prime ** self.N

    def children(self) -> List["Ball"]:
        """The p discs a + i*d*p^N + d*p^(N+1)*Z_p, i = 0..p-1."""
        return [Ball(self.a + i * self.modulus, self.d, self.N + 1, self.prime)
                for i in range(self.prime)]

    def contains(self, x: int) -> bool:
        return (x - self.a) % self.modulus == 0


def balls(d: int, N: int, p: int) -> Iterator[Ball]:
    """All discs of level N."""
    for a in range(d * p ** N):
        yield Ball(a, d, N, p)


@dataclass(frozen=True)
class MeasureContext(QBracketContext):
    """A bracket context restricted to the STRICT regime, where the measure is bounded."""

    def __post_init__(self):
        if not self.q.is_strict:
            raise ConvergenceDomainError(f"the measure needs v_p(q - 1) >= 1, q = {self.q}")


def _check_ball(ball: Ball, ctx: QBracketContext):
    if ball.prime != ctx.prime:
        raise DomainError(f"ball is {ball.prime}-adic but q is {ctx.prime}-adic")


def mu(ball: Ball, ctx: QBracketContext) -> Scalar:
    """
    mu_{-q}(a + d p^N Z_p) = (-q)^a / [d p^N]_{-q}.

    Args:
        ball: The disc
        ctx: Measure context

    Returns:
        The measure of the disc (a p-adic unit in the STRICT regime)
    """
    _check_ball(ball, ctx)
    return (-ctx.q.value) ** ball.a / q_bracket_neg(ball.modulus, ctx)


def mu_product_form(ball: Ball, ctx: QBracketContext) -> Scalar:
    """(1 + q)(-1)^a q^a / (1 + q^(d p^N)); equal to mu()."""
    _check_ball(ball, ctx)
    q = ctx.q.value
    sign = -1 if ball.a % 2 else 1
    return (1 + q) * sign * q ** ball.a / (1 + q ** ball.modulus)


@dataclass(frozen=True)
class AdditivityReport:
    """Result of the distribution check on one disc."""

    ball: Ball
    residual: Scalar

    @property
    def holds(self) -> bool:
        return is_zero(self.residual)


def check_additivity(ball: Ball, ctx: QBracketContext) -> AdditivityReport:
    """
    Compare the measure of a disc with the sum over its p children.

    Args:
        ball: Disc at level N
        ctx: Measure context

    Returns:
        AdditivityReport whose residual is exactly zero (rational) or zero at precision (p-adic)
    """
    residual = sum((mu(child, ctx) for child in ball.children()), ctx.const(0)) - mu(ball, ctx)
    return AdditivityReport(ball, residual)


def total_mass(d: int, N: int, ctx: QBracketContext) -> Scalar:
    """
    Sum of mu over all discs of level N; always 1.

    Args:
        d: Odd modulus prime to p
        N: Level
        ctx: Measure context

    Returns:
        The total mass
    """
    Ball(0, d, N, ctx.prime)  # validates d and N
    n = d * ctx.prime ** N
    weight = 1 / q_bracket_neg(n, ctx)
    neg_q = -ctx.q.value
    term = weight
    total = ctx.const(0)
    for _ in range(n):
        total = total + term
        term = term * neg_q
    return total
