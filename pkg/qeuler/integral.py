"""Fermionic p-adic q-integral as the limit of signed q-Riemann sums."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from tqdm import tqdm

from arith import (
    Backend,
    ConvergenceDomainError,
    DomainError,
    NotConvergedError,
    PadicScalar,
    QBracketContext,
    QParam,
    Scalar,
    from_rational,
    q_bracket,
    q_bracket_neg,
    render,
    two_q,
    valuation,
    working_context,
)
from .dirichlet import Character, eval_in_backend, residue_table
from .measure import Ball, mu

logger = logging.getLogger(__name__)

DEFAULT_TARGET_PRECISION = 6


def certified_valuation(x: Scalar, p: int) -> Union[int, float]:
    """
    Digits of x known to vanish.

    Exact rationals give their valuation (infinity for 0); a p-adic
    zero-at-precision O(p^M) gives M rather than infinity.
    """
    if isinstance(x, PadicScalar):
        return x.precision if x.is_zero() else x.valuation
    return valuation(x, p)


class Integrand(ABC):
    """A function on the sample points x = 0, 1, 2, ... of Z_p (or X)."""

    @property
    def descriptor(self) -> str:
        return "f"

    @property
    def period(self) -> int:
        """Modulus d of the space X the function lives on (1 for Z_p)."""
        return 1

    @property
    def degree(self) -> int:
        """Power of 1/(1 - q) the values carry; sizes precision budgets."""
        return 0

    @abstractmethod
    def __call__(self, x: int, ctx: QBracketContext) -> Scalar:
        """Value at the integer x."""

    def shifted(self, c: int) -> "Integrand":
        """The translate x -> f(x + c)."""
        base = self
        return FunctionIntegrand(lambda x, ctx: base(x + c, ctx),
                                 f"{self.descriptor}(x+{c})", self.period, self.degree)

    def weighted_sum(self, ctx: QBracketContext, start: int, stop: int) -> Scalar:
        """
        Sum of f(x)(-q)^x over start <= x < stop.

        Args:
            ctx: Context (already lifted to working precision)
            start: First sample point
            stop: One past the last sample point

        Returns:
            The partial sum in the backend of ctx
        """
        neg_q = -ctx.q.value
        power = neg_q ** start
        total = ctx.const(0)
        for x in range(start, stop):
            total = total + self(x, ctx) * power
            power = power * neg_q
        return total


@dataclass(frozen=True)
class FunctionIntegrand(Integrand):
    """Wraps any callable fn(x, ctx) -> scalar."""

    fn: Callable[[int, QBracketContext], Any]
    label: str = "f"
    modulus: int = 1
    power: int = 0

    @property
    def descriptor(self) -> str:
        return self.label

    @property
    def period(self) -> int:
        return self.modulus

    @property
    def degree(self) -> int:
        return self.power

    def __call__(self, x: int, ctx: QBracketContext) -> Scalar:
        return self.fn(x, ctx)


@dataclass(frozen=True)
class BracketPower(Integrand):
    """
    chi(x + chi_offset) * [x + shift]_q^m.

    Attributes:
        m: Exponent
        shift: Translation inside the bracket
        chi: Optional Dirichlet character twist
        chi_offset: Translation of the character argument
    """

    m: int
    shift: int = 0
    chi: Optional[Character] = None
    chi_offset: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise DomainError(f"bracket exponent must be non-negative, got {self.m}")

    @property
    def descriptor(self) -> str:
        bracket = f"bracket_shift({self.shift})" if self.shift else "bracket"
        text = f"{bracket}^{self.m}"
        if self.chi is not None:
            offset = f"(x+{self.chi_offset})" if self.chi_offset else ""
            text = f"chi({self.chi}){offset}*{text}"
        return text

    @property
    def period(self) -> int:
        return self.chi.modulus if self.chi is not None else 1

    @property
    def degree(self) -> int:
        return self.m

    def __call__(self, x: int, ctx: QBracketContext) -> Scalar:
        value = q_bracket(x + self.shift, ctx) ** self.m
        if self.chi is not None:
            value = eval_in_backend(self.chi, x + self.chi_offset, ctx) * value
        return value

    def shifted(self, c: int) -> "BracketPower":
        return BracketPower(self.m, self.shift + c, self.chi, self.chi_offset + c)

    def weighted_sum(self, ctx: QBracketContext, start: int, stop: int) -> Scalar:
        if ctx.backend is Backend.PADIC:
            return self._padic_sum(ctx, start, stop)
        return self._rational_sum(ctx, start, stop)

    def _divisor(self, q: QParam):
        """(1 - q)^m, exact when q has a rational seed."""
        if q.exact is not None:
            return (1 - q.exact) ** self.m
        return (1 - q.value) ** self.m

    def _rational_sum(self, ctx: QBracketContext, start: int, stop: int) -> Fraction:
        q = ctx.q.value
        one = ctx.q.is_one()
        d = self.period
        chi_values = ([eval_in_backend(self.chi, i, ctx) for i in range(d)]
                      if self.chi is not None else None)
        neg_q = -q
        sign_power = neg_q ** start
        q_shift = q ** (start + self.shift)
        acc = Fraction(0)
        for x in range(start, stop):
            c = chi_values[(x + self.chi_offset) % d] if chi_values is not None else 1
            if c:
                base = (x + self.shift) if one else (1 - q_shift)
                acc += c * base ** self.m * sign_power
            sign_power *= neg_q
            q_shift *= q
        if one or self.m == 0:
            return acc
        return acc / self._divisor(ctx.q)

    def _padic_sum(self, ctx: QBracketContext, start: int, stop: int) -> PadicScalar:
        p, K = ctx.prime, ctx.precision
        modulus = p ** K
        qr = ctx.q.value.residue()
        one = ctx.q.is_one()
        d = self.period
        chi_values = residue_table(self.chi, p, K) if self.chi is not None else None
        neg_q = -qr % modulus
        sign_power = pow(neg_q, start, modulus)
        q_shift = pow(qr, start + self.shift, modulus)
        m = self.m
        acc = 0
        for x in range(start, stop):
            base = (x + self.shift) if one else (1 - q_shift)
            term = pow(base, m, modulus) * sign_power
            if chi_values is not None:
                term *= chi_values[(x + self.chi_offset) % d]
            acc = (acc + term) % modulus
            sign_power = sign_power * neg_q % modulus
            q_shift = q_shift * qr % modulus
        total = from_rational(acc, 1, p, K)
        if one or m == 0:
            return total
        return total / self._divisor(ctx.q)


@dataclass(frozen=True)
class LinearCombination(Integrand):
    """Sum of c_i * f_i."""

    terms: Tuple[Tuple[Union[int, Fraction], Integrand], ...]

    @property
    def descriptor(self) -> str:
        return " + ".join(f"{c}*{f.descriptor}" for c, f in self.terms)

    @property
    def period(self) -> int:
        return lcm(*(f.period for _, f in self.terms))

    @property
    def degree(self) -> int:
        return max(f.degree for _, f in self.terms)

    def __call__(self, x: int, ctx: QBracketContext) -> Scalar:
        return sum((c * f(x, ctx) for c, f in self.terms), ctx.const(0))

    def shifted(self, c: int) -> "LinearCombination":
        return LinearCombination(tuple((a, f.shifted(c)) for a, f in self.terms))

    def weighted_sum(self, ctx: QBracketContext, start: int, stop: int) -> Scalar:
        if any(f.period != self.period for _, f in self.terms):
            return super().weighted_sum(ctx, start, stop)
        return sum((c * f.weighted_sum(ctx, start, stop) for c, f in self.terms), ctx.const(0))


def _require_strict(ctx: QBracketContext):
    if not ctx.q.is_strict:
        raise ConvergenceDomainError(f"q-Riemann sums need v_p(q - 1) >= 1, q = {ctx.q}")


def _chunk_bounds(n: int, chunks: int) -> List[Tuple[int, int]]:
    chunks = max(1, min(chunks, n))
    step, extra = divmod(n, chunks)
    bounds = []
    lo = 0
    for i in range(chunks):
        hi = lo + step + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def riemann_sum(f: Integrand, ctx: QBracketContext, N: int, chunks: int = 1) -> Scalar:
    """
    Level-N q-Riemann sum (1/[d p^N]_{-q}) * sum_{x < d p^N} f(x)(-q)^x.

    Args:
        f: Integrand; its period d selects the space X = X_d
        ctx: Context in the STRICT regime
        N: Level (N = 0 gives f(0) for d = 1)
        chunks: Number of disjoint partial sums to combine

    Returns:
        The exact finite sum (rational backend) or its value to at least
        ctx.precision digits (p-adic backend)
    """
    _require_strict(ctx)
    if N < 0:
        raise DomainError(f"level must be non-negative, got {N}")
    p = ctx.prime
    if gcd(f.period, p) != 1:
        raise DomainError(f"period {f.period} of {f.descriptor} must be prime to p = {p}")
    work = working_context(ctx, f.degree)
    n = f.period * p ** N
    total = work.const(0)
    for lo, hi in _chunk_bounds(n, chunks):
        total = total + f.weighted_sum(work, lo, hi)
    return total / q_bracket_neg(n, work)


def riemann_sum_by_balls(f: Integrand, ctx: QBracketContext, N: int) -> Scalar:
    """The same sum written as sum_j f(j) * mu_{-q}(j + d p^N Z_p)."""
    _require_strict(ctx)
    work = working_context(ctx, f.degree)
    d, p = f.period, ctx.prime
    total = work.const(0)
    for j in range(d * p ** N):
        total = total + f(j, work) * mu(Ball(j, d, N, p), work)
    return total


@dataclass(frozen=True)
class IntegralResult:
    """
    Outcome of the stabilization loop.

    Attributes:
        value: Last Riemann sum (truncated to the requested precision for p-adics)
        prime: p
        achieved_precision: Digits certified by agreement of the last two levels
        requested_precision: Target M
        levels_used: Final level N
        level_values: Riemann sums for levels 0..N
        converged: False when the level cap was hit first
        descriptor: Integrand label
    """

    value: Scalar
    prime: int
    achieved_precision: int
    requested_precision: int
    levels_used: int
    level_values: Tuple[Scalar, ...]
    converged: bool
    descriptor: str = ""

    @property
    def valuation(self) -> Union[int, float]:
        return valuation(self.value, self.prime)

    def to_dict(self) -> Dict[str, Any]:
        v = self.valuation
        return {
            "integrand": self.descriptor,
            "value": render(self.value),
            "valuation": None if v == math.inf else v,
            "precision": self.achieved_precision,
            "levels": self.levels_used,
            "converged": self.converged,
        }


def default_level_cap(precision: int, degree: int) -> int:
    """Analytic guard N_max = M + m + 2."""
    return precision + degree + 2


def integrate(f: Integrand, ctx: QBracketContext, precision: Optional[int] = None,
              n_max: Optional[int] = None, progress: bool = False) -> IntegralResult:
    """
    I_{-q}(f) by iterating levels until two consecutive sums agree mod p^M.

    Args:
        f: Integrand
        ctx: Context in the STRICT regime
        precision: Target M (default: ctx precision, or 6 for rationals)
        n_max: Level cap (default: M + degree + 2)
        progress: Show a tqdm bar on stderr

    Returns:
        IntegralResult; converged is False when the cap was reached
    """
    _require_strict(ctx)
    p = ctx.prime
    if precision is None:
        precision = ctx.precision if ctx.backend is Backend.PADIC else DEFAULT_TARGET_PRECISION
    if ctx.backend is Backend.PADIC:
        ctx = working_context(ctx, 0, precision)
    if n_max is None:
        n_max = default_level_cap(precision, f.degree)

    previous = riemann_sum(f, ctx, 0)
    values = [previous]
    gap = -math.inf
    converged = False
    level = 0
    for level in tqdm(range(1, n_max + 1), desc=f"integrate {f.descriptor}",
                      disable=not progress, leave=False):
        current = riemann_sum(f, ctx, level)
        values.append(current)
        gap = certified_valuation(current - previous, p)
        logger.debug("%s level %d: agreement %s digits", f.descriptor, level, gap)
        previous = current
        if gap >= precision:
            converged = True
            break

    if not converged:
        logger.warning("%s did not stabilize to %d digits by level %d",
                       f.descriptor, precision, n_max)
    value = values[-1]
    if isinstance(value, PadicScalar):
        value = value.with_precision(precision)
    achieved = int(max(0, min(precision, gap)))
    return IntegralResult(value, p, achieved, precision, level, tuple(values), converged,
                          f.descriptor)


def require_converged(result: IntegralResult) -> IntegralResult:
    """Raise NotConvergedError carrying the partial result."""
    if not result.converged:
        raise NotConvergedError(
            f"{result.descriptor}: only {result.achieved_precision} of "
            f"{result.requested_precision} digits stable after level {result.levels_used}",
            partial=result)
    return result


@dataclass(frozen=True)
class FunctionalEquationReport:
    """q*I(f_1) + I(f) - [2]_q f(0) and its certified valuation."""

    residual: Scalar
    valuation: Union[int, float]
    precision: int
    shifted: IntegralResult
    unshifted: IntegralResult

    @property
    def holds(self) -> bool:
        return self.valuation >= self.precision


def check_functional_equation(f: Integrand, ctx: QBracketContext,
                              precision: Optional[int] = None,
                              n_max: Optional[int] = None) -> FunctionalEquationReport:
    """
    Evaluate q*I_{-q}(f_1) + I_{-q}(f) - [2]_q f(0), with f_1(x) = f(x + 1).

    Args:
        f: Integrand
        ctx: Context in the STRICT regime
        precision: Target M
        n_max: Level cap

    Returns:
        FunctionalEquationReport

    Raises:
        NotConvergedError: If either integral fails to stabilize
    """
    shifted = require_converged(integrate(f.shifted(1), ctx, precision, n_max))
    unshifted = require_converged(integrate(f, ctx, precision, n_max))
    M = unshifted.requested_precision
    work = working_context(ctx, f.degree, M) if ctx.backend is Backend.PADIC else ctx
    q = work.q.value
    residual = q * shifted.value + unshifted.value - two_q(work) * f(0, work)
    return FunctionalEquationReport(residual, certified_valuation(residual, ctx.prime), M,
                                    shifted, unshifted)


def q1_limit_integral(f: Integrand, p: int, precision: int = DEFAULT_TARGET_PRECISION,
                      n_max: Optional[int] = None) -> Scalar:
    """
    The q = 1 integral lim_N sum_{x < p^N} f(x)(-1)^x.

    Args:
        f: Integrand
        p: Odd prime
        precision: Target M
        n_max: Level cap

    Returns:
        The limit to M digits

    Raises:
        NotConvergedError: If the sums do not stabilize
    """
    ctx = QBracketContext(QParam.from_rational(1, 1, p, Backend.PADIC, precision))
    return require_converged(integrate(f, ctx, precision, n_max)).value
