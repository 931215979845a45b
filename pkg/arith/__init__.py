"""Exact and p-adic scalar arithmetic plus q-deformed integers."""

from .errors import (
    QEulerError,
    DomainError,
    ConvergenceDomainError,
    PrecisionError,
    CharacterError,
    UnsupportedValueError,
    IndeterminateDivisionError,
    GrammarError,
    NotConvergedError,
)
from .scalar import (
    Backend,
    Comparison,
    Regime,
    PadicScalar,
    QParam,
    Scalar,
    from_rational,
    valuation,
    is_zero,
    embed,
    to_padic,
    render,
    parse_scalar,
    exp_p,
    log_p,
    q_pow,
    teichmuller,
)
from .qnum import QBracketContext, working_context, geometric_sum, q_bracket, q_bracket_neg, two_q

__all__ = [
    'QEulerError', 'DomainError', 'ConvergenceDomainError', 'PrecisionError',
    'CharacterError', 'UnsupportedValueError', 'IndeterminateDivisionError',
    'GrammarError', 'NotConvergedError',
    'Backend', 'Comparison', 'Regime', 'PadicScalar', 'QParam', 'Scalar',
    'from_rational', 'valuation', 'is_zero', 'embed', 'to_padic', 'render',
    'parse_scalar', 'exp_p', 'log_p', 'q_pow', 'teichmuller',
    'QBracketContext', 'working_context', 'geometric_sum', 'q_bracket',
    'q_bracket_neg', 'two_q',
]
