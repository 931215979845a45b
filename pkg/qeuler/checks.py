"""Invariant suites behind the `check` subcommand."""

import logging
from dataclasses import dataclass, field
from math import inf
from typing import Any, Dict, Iterable, List, Optional, Union

from tqdm import tqdm

from arith import Backend, ConvergenceDomainError, QBracketContext, Scalar, render, to_padic
from .euler import DEGREE_CAP, classical_limit_gaps, functional_equation_closed
from .integral import BracketPower, certified_valuation, check_functional_equation
from .measure import balls, check_additivity, mu, mu_product_form, total_mass
from .series import build_egf, check_q_difference

logger = logging.getLogger(__name__)

# Levels N for the bound v_p(q^(p^N) - 1) >= N + v_p(q - 1).
LIMIT_LEVELS = 8
LIMIT_K = 5
LIMIT_M = 6


@dataclass(frozen=True)
class CheckCase:
    """One residual and the number of digits it must vanish to."""

    label: str
    residual: str
    valuation: Union[int, float]
    target: Union[int, float]

    @property
    def passed(self) -> bool:
        return self.valuation >= self.target

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.label,
            "residual": self.residual,
            "valuation": None if self.valuation == inf else self.valuation,
            "target": None if self.target == inf else self.target,
            "passed": self.passed,
        }


@dataclass
class CheckReport:
    """All cases of one suite."""

    suite: str
    cases: List[CheckCase] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def first_failure(self) -> Optional[CheckCase]:
        return next((c for c in self.cases if not c.passed), None)

    def add(self, label: str, residual: Scalar, p: int, target: Union[int, float]):
        self.cases.append(CheckCase(label, render(residual), certified_valuation(residual, p),
                                    target))

    def to_dict(self) -> Dict[str, Any]:
        out = {"suite": self.suite, "passed": self.passed,
               "cases": [c.to_dict() for c in self.cases]}
        if self.note:
            out["note"] = self.note
        return out


def _target(ctx: QBracketContext) -> Union[int, float]:
    """Exact zero for rationals, zero to the working precision for p-adics."""
    return ctx.precision if ctx.backend is Backend.PADIC else inf


def check_distribution(ctx: QBracketContext, d: int, N: int,
                       progress: bool = False) -> CheckReport:
    """
    Additivity mu(ball) = sum mu(children) and the product form, levels 0..N.

    Args:
        ctx: Context in the STRICT regime
        d: Odd modulus prime to p
        N: Deepest level whose balls are split
        progress: Show a tqdm bar on stderr

    Returns:
        CheckReport
    """
    report = CheckReport("distribution")
    p = ctx.prime
    target = _target(ctx)
    for level in tqdm(range(N + 1), desc="distribution", disable=not progress, leave=False):
        for ball in balls(d, level, p):
            label = f"a={ball.a} d={d} N={level}"
            report.add(f"additivity {label}", check_additivity(ball, ctx).residual, p, target)
            report.add(f"product form {label}", mu_product_form(ball, ctx) - mu(ball, ctx),
                       p, target)
    return report


def check_mass(ctx: QBracketContext, d: int, N: int) -> CheckReport:
    """Total mass of every level 0..N equals 1."""
    report = CheckReport("mass")
    target = _target(ctx)
    for level in range(N + 1):
        report.add(f"d={d} N={level}", total_mass(d, level, ctx) - 1, ctx.prime, target)
    return report


def check_feq(ctx: QBracketContext, ms: Iterable[int], precision: Optional[int] = None,
              n_max: Optional[int] = None, progress: bool = False) -> CheckReport:
    """
    q I(f_1) + I(f) = [2]_q f(0) for f = [x]_q^m.

    The p-adic backend integrates; the rational backend uses closed forms
    and demands an exact zero.

    Raises:
        NotConvergedError: When an integral fails to stabilize
    """
    report = CheckReport("feq")
    p = ctx.prime
    for m in tqdm(list(ms), desc="feq", disable=not progress, leave=False):
        if ctx.backend is Backend.PADIC:
            result = check_functional_equation(BracketPower(m), ctx, precision, n_max)
            report.add(f"m={m}", result.residual, p, result.precision)
        else:
            report.add(f"m={m}", functional_equation_closed(m, ctx), p, inf)
    return report


def check_qdiff(ctx: QBracketContext, K: int) -> CheckReport:
    """Coefficient residuals of the corrected q-difference equation up to t^K."""
    result = check_q_difference(build_egf(ctx, K))
    target = inf if result.precision is None else result.precision
    report = CheckReport("qdiff", note=result.note)
    for n, residual in enumerate(result.residuals):
        report.add(f"n={n}", residual, ctx.prime, target)
    return report


def check_limit(ctx: QBracketContext, levels: int = LIMIT_LEVELS, ks: int = LIMIT_K,
                ms: int = LIMIT_M) -> CheckReport:
    """
    v_p(q^(p^N) - 1) >= N + v_p(q - 1) for N <= levels, then
    v_p(E_{m,1+p^k} - E_m) >= k - m for k <= ks, m <= ms.
    """
    report = CheckReport("limit")
    p = ctx.prime
    q = ctx.q
    if q.is_one():
        logger.info("q = 1: skipping the q^(p^N) bound")
    elif not q.is_strict:
        raise ConvergenceDomainError(f"the q^(p^N) bound needs v_p(q - 1) >= 1, q = {q}")
    else:
        v = int(q.distance_to_one())
        width = levels + v + 2
        seed = q.exact if q.exact is not None else q.value
        qp = to_padic(seed, p, width)
        for N in range(levels + 1):
            report.add(f"q^(p^{N}) - 1", qp ** (p ** N) - 1, p, N + v)
    for row in classical_limit_gaps(range(min(ms, DEGREE_CAP) + 1), p, range(1, ks + 1)):
        m, k, gap = row["m"], row["k"], row["gap"]
        report.cases.append(CheckCase(f"E_{m} at q=1+{p}^{k}", str(gap), gap, k - m))
    return report


SUITES = ("distribution", "feq", "qdiff", "mass", "limit")