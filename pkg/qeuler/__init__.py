"""Fermionic p-adic q-integrals, q-Euler numbers and their checks."""

from .measure import Ball, MeasureContext, balls, mu, mu_product_form, check_additivity, total_mass
from .dirichlet import (
    Character,
    build_character,
    is_primitive,
    conductor,
    eval_in_backend,
    residue_table,
    trivial_character,
)
from .integral import (
    Integrand,
    BracketPower,
    FunctionIntegrand,
    LinearCombination,
    IntegralResult,
    FunctionalEquationReport,
    riemann_sum,
    riemann_sum_by_balls,
    integrate,
    check_functional_equation,
    q1_limit_integral,
)
from .euler import (
    Method,
    EulerTable,
    q_euler_closed,
    q_euler_level,
    q_euler_integral,
    classical_euler,
    q_euler_poly,
    q_euler_poly_integral,
    generalized_q_euler,
    generalized_q_euler_closed,
    build_euler_table,
    compare_tables,
    functional_equation_closed,
    classical_limit_gap,
)
from .series import (
    TruncatedEGF,
    QDifferenceReport,
    build_egf,
    classical_egf,
    level_egf,
    check_q_difference,
    egf_integral_agreement,
)
from .parser import parse_q, parse_degrees, parse_character, parse_integrand

__all__ = [
    'Ball', 'MeasureContext', 'balls', 'mu', 'mu_product_form', 'check_additivity', 'total_mass',
    'Character', 'build_character', 'is_primitive', 'conductor', 'eval_in_backend',
    'residue_table', 'trivial_character',
    'Integrand', 'BracketPower', 'FunctionIntegrand', 'LinearCombination', 'IntegralResult',
    'FunctionalEquationReport', 'riemann_sum', 'riemann_sum_by_balls', 'integrate',
    'check_functional_equation', 'q1_limit_integral',
    'Method', 'EulerTable', 'q_euler_closed', 'q_euler_level', 'q_euler_integral',
    'classical_euler', 'q_euler_poly', 'q_euler_poly_integral', 'generalized_q_euler',
    'generalized_q_euler_closed', 'build_euler_table', 'compare_tables',
    'functional_equation_closed', 'classical_limit_gap',
    'TruncatedEGF', 'QDifferenceReport', 'build_egf', 'classical_egf', 'level_egf',
    'check_q_difference', 'egf_integral_agreement',
    'parse_q', 'parse_degrees', 'parse_character', 'parse_integrand',
]
