"""Truncated exponential generating functions and the q-difference equation."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb, inf
from typing import Any, Dict, List, Optional, Tuple, Union

from sympy import Symbol, exp, factorial, series

from arith import Backend, DomainError, PadicScalar, QBracketContext, QParam, Scalar, render, two_q
from .euler import classical_euler, q_euler_closed, q_euler_integral
from .integral import BracketPower, certified_valuation, riemann_sum

logger = logging.getLogger(__name__)

ERRATUM_NOTE = ("constant term of the q-difference equation taken as [2]_q = 1 + q; "
                "the printed constant 1 is inconsistent with E_0,q = 1")


@dataclass(frozen=True)
class TruncatedEGF:
    """
    sum_k c_k t^k/k! + O(t^(K+1)).

    Attributes:
        coefficients: c_0..c_K
        q: The parameter the coefficients belong to
    """

    coefficients: Tuple[Scalar, ...]
    q: QParam

    @property
    def K(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> Scalar:
        return self.coefficients[k]


def _check_order(K: int):
    if K < 0:
        raise DomainError(f"truncation order must be non-negative, got {K}")


def build_egf(ctx: QBracketContext, K: int) -> TruncatedEGF:
    """
    F_q(t) truncated after t^K, with c_k = E_{k,q}.

    Args:
        ctx: Context; at q = 1 the classical numbers are used
        K: Truncation order

    Returns:
        TruncatedEGF
    """
    _check_order(K)
    if ctx.q.is_one():
        coefficients = [ctx.const(classical_euler(k)) for k in range(K + 1)]
    else:
        coefficients = [q_euler_closed(k, ctx) for k in range(K + 1)]
    return TruncatedEGF(tuple(coefficients), ctx.q)


def classical_egf(K: int) -> List[Fraction]:
    """Coefficients c_k of 2/(e^t + 1) = sum c_k t^k/k!, by series expansion."""
    _check_order(K)
    t = Symbol("t")
    expansion = series(2 / (exp(t) + 1), t, 0, K + 1).removeO()
    out = []
    for k in range(K + 1):
        c = expansion.coeff(t, k) * factorial(k)
        out.append(Fraction(int(c.p), int(c.q)))
    return out


def level_egf(ctx: QBracketContext, K: int, N: int) -> TruncatedEGF:
    """
    Level-N truncation of (1/[p^N]_{-q}) sum_i (-q)^i e^([i]_q t).

    Coefficient k equals riemann_sum([x]_q^k, N).
    """
    _check_order(K)
    coefficients = []
    for k in range(K + 1):
        value = riemann_sum(BracketPower(k), ctx, N)
        if isinstance(value, PadicScalar):
            value = value.with_precision(ctx.precision)
        coefficients.append(value)
    return TruncatedEGF(tuple(coefficients), ctx.q)


@dataclass(frozen=True)
class QDifferenceReport:
    """Per-coefficient residuals of E_n + q sum_k C(n,k) q^k E_k - [2]_q delta_{n,0}."""

    residuals: Tuple[Scalar, ...]
    valuations: Tuple[Union[int, float], ...]
    precision: Optional[int]
    note: str = ERRATUM_NOTE

    @property
    def holds(self) -> bool:
        target = inf if self.precision is None else self.precision
        return all(v >= target for v in self.valuations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "residuals": [render(r) for r in self.residuals],
            "valuations": [None if v == inf else v for v in self.valuations],
            "holds": self.holds,
            "note": self.note,
        }


def check_q_difference(egf: TruncatedEGF) -> QDifferenceReport:
    """
    Compare F_q(t) with -q e^t F_q(qt) + [2]_q coefficient by coefficient.

    Args:
        egf: Series with K >= 1

    Returns:
        QDifferenceReport; exact zeros in the rational backend
    """
    if egf.K < 1:
        raise DomainError("the q-difference check needs K >= 1")
    ctx = QBracketContext(egf.q)
    q = egf.q.value
    residuals = []
    for n in range(egf.K + 1):
        acc = ctx.const(0)
        power = ctx.const(1)
        for k in range(n + 1):
            acc = acc + comb(n, k) * power * egf[k]
            power = power * q
        residual = egf[n] + q * acc
        if n == 0:
            residual = residual - two_q(ctx)
        residuals.append(residual)
    valuations = tuple(certified_valuation(r, egf.q.prime) for r in residuals)
    precision = egf.q.precision if egf.q.backend is Backend.PADIC else None
    if precision is not None:
        precision = min([precision] + [c.precision for c in egf.coefficients
                                       if isinstance(c, PadicScalar)])
    report = QDifferenceReport(tuple(residuals), valuations, precision)
    logger.debug("q-difference residual valuations: %s", report.valuations)
    return report


def egf_integral_agreement(egf: TruncatedEGF, ctx: QBracketContext,
                           precision: Optional[int] = None,
                           n_max: Optional[int] = None) -> List[Dict[str, Any]]:
    """
    Coefficient k against the stabilized integral of [x]_q^k.

    Args:
        egf: Series built by build_egf
        ctx: Context in the STRICT regime
        precision: Target digits
        n_max: Level cap

    Returns:
        Rows {k, coefficient, integral, agree_valuation, converged}
    """
    rows = []
    for k, coefficient in enumerate(egf.coefficients):
        result = q_euler_integral(k, ctx, precision, n_max)
        gap = certified_valuation(coefficient - result.value, ctx.prime)
        rows.append({
            "k": k,
            "coefficient": render(coefficient),
            "integral": render(result.value),
            "agree_valuation": None if gap == inf else gap,
            "converged": result.converged,
        })
    return rows
