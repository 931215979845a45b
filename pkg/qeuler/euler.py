"""q-Euler numbers and polynomials, classical Euler numbers, character twists."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Optional, Union

from tqdm import tqdm

from arith import (
    Backend,
    ConvergenceDomainError,
    DomainError,
    PadicScalar,
    QBracketContext,
    QParam,
    Scalar,
    is_zero,
    q_bracket,
    q_pow,
    two_q,
    working_context,
)
from .dirichlet import Character, eval_in_backend
from .integral import BracketPower, IntegralResult, certified_valuation, integrate

logger = logging.getLogger(__name__)

# Largest degree accepted unless the caller overrides it.
DEGREE_CAP = 64


class Method(str, Enum):
    """How a table entry was obtained."""
    CLOSED_FORM = "closed"
    INTEGRAL = "integral"


def _check_degree(m: int, cap: Optional[int] = DEGREE_CAP):
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    if cap is not None and m > cap:
        raise DomainError(f"degree {m} exceeds the cap {cap}; pass a larger cap explicitly")


def _require_q_not_one(ctx: QBracketContext):
    if ctx.q.is_one():
        raise DomainError("q = 1 makes the factor 1/(1 - q)^m singular; "
                          "use classical_euler (the `classical` subcommand)")


def _lifted(ctx: QBracketContext, degree: int) -> QBracketContext:
    """Working context for a closed form carrying 1/(1 - q)^degree."""
    if ctx.backend is Backend.RATIONAL:
        return ctx
    if not ctx.q.is_strict:
        raise ConvergenceDomainError(f"p-adic closed forms need v_p(q - 1) >= 1, q = {ctx.q}")
    return working_context(ctx, degree)


def _one_minus_q_power(ctx: QBracketContext, m: int) -> Scalar:
    """(1 - q)^m, taken from the exact seed when there is one."""
    if ctx.q.exact is not None:
        return (1 - ctx.q.exact) ** m
    return (1 - ctx.q.value) ** m


def _finish(value: Scalar, ctx: QBracketContext) -> Scalar:
    if isinstance(value, PadicScalar):
        return value.with_precision(ctx.precision)
    return value


def _nonzero(value: Scalar, what: str) -> Scalar:
    if is_zero(value):
        raise DomainError(f"{what} vanishes at this q")
    return value


def q_euler_closed(m: int, ctx: QBracketContext, cap: Optional[int] = DEGREE_CAP) -> Scalar:
    """
    E_{m,q} = [2]_q (1 - q)^(-m) sum_k C(m,k) (-1)^k / (1 + q^(k+1)).

    Args:
        m: Degree
        ctx: Context; q != 1, STRICT for the p-adic backend
        cap: Degree cap (None disables it)

    Returns:
        E_{m,q}, exact in the rational backend

    Raises:
        DomainError: At q = 1 or when some 1 + q^(k+1) vanishes
    """
    _check_degree(m, cap)
    _require_q_not_one(ctx)
    work = _lifted(ctx, m)
    q = work.q.value
    total = work.const(0)
    for k in range(m + 1):
        denominator = _nonzero(1 + q ** (k + 1), f"1 + q^{k + 1}")
        term = comb(m, k) / denominator
        total = total - term if k % 2 else total + term
    value = two_q(work) * total / _one_minus_q_power(work, m)
    return _finish(value, ctx)


def q_euler_level(m: int, ctx: QBracketContext, N: int) -> Scalar:
    """
    The exact level-N Riemann sum of [x]_q^m in closed form.

    (1 - q)^(-m) (1 + q)/(1 + q^(p^N)) sum_j C(m,j) (-1)^j (1 + q^((j+1)p^N))/(1 + q^(j+1))
    """
    _check_degree(m)
    _require_q_not_one(ctx)
    if N < 0:
        raise DomainError(f"level must be non-negative, got {N}")
    work = _lifted(ctx, m)
    q = work.q.value
    n = ctx.prime ** N
    total = work.const(0)
    for j in range(m + 1):
        term = comb(m, j) * (1 + q ** ((j + 1) * n)) / (1 + q ** (j + 1))
        total = total - term if j % 2 else total + term
    value = two_q(work) / (1 + q ** n) * total / _one_minus_q_power(work, m)
    return _finish(value, ctx)


def q_euler_integral(m: int, ctx: QBracketContext, precision: Optional[int] = None,
                     n_max: Optional[int] = None, progress: bool = False) -> IntegralResult:
    """E_{m,q} as the stabilized integral of [x]_q^m."""
    _check_degree(m)
    return integrate(BracketPower(m), ctx, precision, n_max, progress)


@lru_cache(maxsize=None)
def _classical_table(n: int) -> tuple:
    if n == 0:
        return (Fraction(1),)
    previous = _classical_table(n - 1)
    value = -Fraction(sum(comb(n, k) * e for k, e in enumerate(previous)), 2)
    return previous + (value,)


def classical_euler(m: int) -> Fraction:
    """
    Classical Euler number E_m of 2/(e^t + 1).

    Solves sum_k C(n,k) E_k + E_n = 2*delta_{n,0} for E_n.

    Args:
        m: Index, m >= 0

    Returns:
        E_m as an exact rational
    """
    if m < 0:
        raise DomainError(f"index must be non-negative, got {m}")
    return _classical_table(m)[m]


def _q_power(ctx: QBracketContext, x, exponent: int) -> Scalar:
    """q^(exponent * x) for integer or p-adic x."""
    if isinstance(x, Fraction) and x.denominator == 1:
        x = x.numerator
    if isinstance(x, int):
        return ctx.q.value ** (exponent * x)
    return q_pow(ctx.q, exponent * x, ctx.precision)


def q_euler_poly(n: int, x: Union[int, Fraction, PadicScalar], ctx: QBracketContext) -> Scalar:
    """
    E_{n,q}(x) = sum_l C(n,l) q^(l x) E_{l,q} [x]_q^(n-l).

    Args:
        n: Degree
        x: Integer, or an element of Z_p in the STRICT regime
        ctx: Context

    Returns:
        E_{n,q}(x)
    """
    _check_degree(n)
    _require_q_not_one(ctx)
    work = _lifted(ctx, n)
    bracket = q_bracket(x, work)
    total = work.const(0)
    for l in range(n + 1):
        total = total + comb(n, l) * _q_power(work, x, l) * q_euler_closed(l, work) \
            * bracket ** (n - l)
    return _finish(total, ctx)


def q_euler_poly_integral(n: int, x: int, ctx: QBracketContext, precision: Optional[int] = None,
                          n_max: Optional[int] = None, progress: bool = False) -> IntegralResult:
    """E_{n,q}(x) as the stabilized integral of [x + t]_q^n over t."""
    _check_degree(n)
    if not isinstance(x, int):
        raise DomainError(f"sampling the integrand needs an integer x, got {x!r}")
    return integrate(BracketPower(n, shift=x), ctx, precision, n_max, progress)


def generalized_q_euler(m: int, chi: Character, ctx: QBracketContext,
                        precision: Optional[int] = None, n_max: Optional[int] = None,
                        progress: bool = False) -> IntegralResult:
    """E_{m,chi,q}: the integral of chi(a)[a]_q^m over X = lim Z/(d p^N)Z."""
    _check_degree(m)
    return integrate(BracketPower(m, chi=chi), ctx, precision, n_max, progress)


def generalized_q_euler_closed(m: int, chi: Character, ctx: QBracketContext) -> Scalar:
    """
    Closed form of E_{m,chi,q}, derived by splitting a = i + d*t.

    [2]_q (1 - q)^(-m) sum_j C(m,j) (-1)^j
        [sum_{i<d} chi(i) (-1)^i q^(i(j+1))] / (1 + q^(d(j+1)))

    Args:
        m: Degree
        chi: Character of odd modulus d
        ctx: Context; q != 1

    Returns:
        The twisted number in the active backend
    """
    _check_degree(m)
    _require_q_not_one(ctx)
    work = _lifted(ctx, m)
    q = work.q.value
    d = chi.modulus
    chi_values = [eval_in_backend(chi, i, work) for i in range(d)]
    total = work.const(0)
    for j in range(m + 1):
        inner = work.const(0)
        step = q ** (j + 1)
        power = work.const(1)
        for i in range(d):
            if not is_zero(chi_values[i]):
                inner = inner + (chi_values[i] * power if i % 2 == 0 else -chi_values[i] * power)
            power = power * step
        term = comb(m, j) * inner / _nonzero(1 + q ** (d * (j + 1)), f"1 + q^{d * (j + 1)}")
        total = total - term if j % 2 else total + term
    return _finish(two_q(work) * total / _one_minus_q_power(work, m), ctx)


@dataclass
class EulerTable:
    """
    Values E_{m,q} for a set of degrees.

    Attributes:
        q: The parameter
        method: CLOSED_FORM or INTEGRAL
        entries: m -> E_{m,q}
        precision: Certified digits per m (None for exact rationals)
        results: The integration results behind INTEGRAL entries
    """

    q: QParam
    method: Method
    entries: Dict[int, Scalar] = field(default_factory=dict)
    precision: Dict[int, Optional[int]] = field(default_factory=dict)
    results: Dict[int, IntegralResult] = field(default_factory=dict)


def build_euler_table(ms: Iterable[int], ctx: QBracketContext,
                      method: Method = Method.CLOSED_FORM, precision: Optional[int] = None,
                      n_max: Optional[int] = None, progress: bool = False) -> EulerTable:
    """
    Fill an EulerTable by one method.

    Args:
        ms: Degrees
        ctx: Context
        method: CLOSED_FORM or INTEGRAL
        precision: Target digits for the integral route
        n_max: Level cap for the integral route
        progress: Show a tqdm bar on stderr

    Returns:
        The table
    """
    table = EulerTable(ctx.q, method)
    ms = list(ms)
    for m in tqdm(ms, desc=f"E_m,q ({method.value})", disable=not progress, leave=False):
        if method is Method.CLOSED_FORM:
            table.entries[m] = q_euler_closed(m, ctx)
            table.precision[m] = ctx.precision
        else:
            result = q_euler_integral(m, ctx, precision, n_max)
            table.entries[m] = result.value
            table.precision[m] = result.achieved_precision
            table.results[m] = result
    logger.info("built %s table for %d degrees", method.value, len(ms))
    return table


def compare_tables(a: EulerTable, b: EulerTable) -> Dict[int, Union[int, float]]:
    """Certified valuation of a[m] - b[m] for the degrees both tables hold."""
    p = a.q.prime
    return {m: certified_valuation(a.entries[m] - b.entries[m], p)
            for m in sorted(set(a.entries) & set(b.entries))}


def functional_equation_closed(m: int, ctx: QBracketContext) -> Scalar:
    """q E_{m,q}(1) + E_{m,q} - [2]_q delta_{m,0}; zero for every m."""
    work = _lifted(ctx, m) if ctx.backend is Backend.PADIC else ctx
    q = work.q.value
    residual = q * q_euler_poly(m, 1, work) + q_euler_closed(m, work)
    if m == 0:
        residual = residual - two_q(work)
    return _finish(residual, ctx)


def classical_limit_gap(m: int, p: int, k: int) -> Union[int, float]:
    """v_p(E_{m,q} - E_m) at q = 1 + p^k, computed exactly."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    ctx = QBracketContext(QParam.from_rational(1 + p ** k, 1, p, Backend.RATIONAL))
    return certified_valuation(q_euler_closed(m, ctx) - classical_euler(m), p)


def classical_limit_gaps(ms: Iterable[int], p: int, ks: Iterable[int]) -> List[Dict[str, int]]:
    """Rows {m, k, gap} for the classical limit check."""
    ks = list(ks)
    return [{"m": m, "k": k, "gap": classical_limit_gap(m, p, k)} for m in ms for k in ks]
