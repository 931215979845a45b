"""q-deformed integers: the brackets [x]_q and [x]_{-q}."""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .errors import ConvergenceDomainError, DomainError, PrecisionError
from .scalar import (
    INFINITY,
    Backend,
    PadicScalar,
    QParam,
    Scalar,
    embed,
    from_rational,
    is_zero,
    q_pow,
)

logger = logging.getLogger(__name__)

# Digits kept beyond the requested precision when a working context is lifted.
WORKING_GUARD_DIGITS = 2


@dataclass(frozen=True)
class QBracketContext:
    """
    Everything a bracket evaluation needs: q, its prime and the backend.

    Attributes:
        q: The deformation parameter
    """

    q: QParam

    @property
    def prime(self) -> int:
        return self.q.prime

    @property
    def backend(self) -> Backend:
        return self.q.backend

    @property
    def precision(self) -> Optional[int]:
        return self.q.precision

    def const(self, value: Union[int, Fraction]) -> Scalar:
        """An exact constant in the active backend."""
        return embed(value, self.backend, self.prime, self.precision)

    def at_precision(self, precision: int) -> "QBracketContext":
        """Same context with q re-embedded at another precision."""
        return replace(self, q=self.q.at_precision(precision))


def working_context(ctx: QBracketContext, degree: int,
                    precision: Optional[int] = None) -> QBracketContext:
    """
    Lift ctx so that dividing by (1 - q)^degree still leaves `precision` digits.

    Args:
        ctx: Context to lift
        degree: Power of 1/(1 - q) the caller will divide by
        precision: Digits wanted in the end (default: ctx.precision)

    Returns:
        The lifted context (ctx itself in the rational backend)
    """
    if ctx.backend is Backend.RATIONAL:
        return ctx
    target = ctx.precision if precision is None else precision
    distance = ctx.q.distance_to_one()
    loss = 0 if distance == INFINITY else degree * distance
    wanted = target + loss + WORKING_GUARD_DIGITS
    if ctx.q.exact is None:
        if ctx.precision < target:
            raise PrecisionError(f"q is only known to O({ctx.prime}^{ctx.precision}); "
                                 f"{target} digits requested")
        return ctx
    if wanted == ctx.precision:
        return ctx
    logger.debug("working precision lifted to %d for degree %d", wanted, degree)
    return ctx.at_precision(wanted)


def geometric_sum(ratio: PadicScalar, n: int) -> PadicScalar:
    """
    1 + r + ... + r^(n-1) for r in Z_p, without dividing by 1 - r.

    The quotient (1 - r^n)/(1 - r) is taken over the integers after reducing
    r^n modulo p^M * (1 - r), so the result keeps the full precision of r.

    Args:
        ratio: r with v_p(r) >= 0
        n: Number of terms (n >= 0)

    Returns:
        The sum to the precision of r
    """
    p, M = ratio.prime, ratio.precision
    if n == 0:
        return PadicScalar.zero(p, M)
    modulus = p ** M
    r = ratio.residue()
    if r % modulus == 1:
        return from_rational(n, 1, p, M)
    d = 1 - r
    big = modulus * abs(d)
    s = (1 - pow(r, n, big)) % big
    return from_rational((s // d) % modulus, 1, p, M)


def _integer_bracket(ctx: QBracketContext, n: int) -> Scalar:
    q = ctx.q.value
    if ctx.backend is Backend.RATIONAL:
        if q == 1:
            return Fraction(n)
        return (1 - q ** n) / (1 - q)
    if n >= 0:
        return geometric_sum(q, n)
    return -(q ** n) * geometric_sum(q, -n)


def q_bracket(x, ctx: QBracketContext) -> Scalar:
    """
    [x]_q = (1 - q^x)/(1 - q).

    Args:
        x: Integer, integral Fraction, or PadicScalar in Z_p
        ctx: Bracket context

    Returns:
        [x]_q in the active backend (x itself when q = 1 and x is an integer)
    """
    if isinstance(x, Fraction) and x.denominator == 1:
        x = x.numerator
    if isinstance(x, int):
        return _integer_bracket(ctx, x)

    q = ctx.q
    if q.is_one():
        raise DomainError("q = 1 only admits integer arguments in [x]_q")
    if ctx.backend is Backend.RATIONAL:
        raise DomainError("a non-integer exponent needs the p-adic backend")
    if not q.is_strict:
        raise ConvergenceDomainError(f"[x]_q for non-integer x needs v_p(q - 1) >= 1, q = {q}")
    return (1 - q_pow(q, x, ctx.precision)) / (1 - q.value)


def q_bracket_neg(x: int, ctx: QBracketContext) -> Scalar:
    """
    [x]_{-q} = (1 - (-q)^x)/(1 + q).

    Args:
        x: Non-negative integer
        ctx: Bracket context

    Returns:
        [x]_{-q}; for odd x this is (1 + q^x)/(1 + q)
    """
    if not isinstance(x, int) or x < 0:
        raise DomainError(f"[x]_(-q) is only used at non-negative integers, got {x!r}")
    q = ctx.q.value
    if is_zero(1 + q):
        raise DomainError("[x]_(-q) divides by 1 + q, which vanishes at q = -1")
    if ctx.backend is Backend.RATIONAL:
        return (1 - (-q) ** x) / (1 + q)
    return geometric_sum(-q, x)


def two_q(ctx: QBracketContext) -> Scalar:
    """[2]_q = 1 + q."""
    return 1 + ctx.q.value
