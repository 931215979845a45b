"""Dirichlet characters of odd modulus given by explicit value tables."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple, Union

from sympy import divisors, primitive_root

from arith import (
    Backend,
    CharacterError,
    DomainError,
    PadicScalar,
    QBracketContext,
    Scalar,
    UnsupportedValueError,
    from_rational,
    teichmuller,
)

logger = logging.getLogger(__name__)

# A table entry: 0, 1, -1, or (n, k) for zeta_n^k.
TableValue = Union[int, Tuple[int, int]]


def _angle(value: TableValue, index: int) -> Optional[Fraction]:
    """Map a table entry to k/n mod 1 (None for zero)."""
    if isinstance(value, tuple):
        n, k = value
        if n < 1:
            raise CharacterError(f"zeta({n},{k}) at residue {index}: order must be positive")
        return Fraction(k, n) % 1
    if value == 0:
        return None
    if value == 1:
        return Fraction(0)
    if value == -1:
        return Fraction(1, 2)
    raise CharacterError(f"residue {index}: value {value!r} is not 0, 1, -1 or zeta(n,k)")


@dataclass(frozen=True)
class Character:
    """
    A Dirichlet character modulo an odd d.

    Attributes:
        modulus: d
        angles: For each residue i < d, chi(i) = exp(2*pi*i*angle) or None when chi(i) = 0
    """

    modulus: int
    angles: Tuple[Optional[Fraction], ...]

    def angle(self, i: int) -> Optional[Fraction]:
        return self.angles[i % self.modulus]

    def descriptor(self, i: int) -> Optional[Tuple[int, int]]:
        """(n, k) with chi(i) = zeta_n^k in lowest terms, None for zero."""
        a = self.angle(i)
        if a is None:
            return None
        return a.denominator, a.numerator

    @property
    def order(self) -> int:
        return lcm(*(a.denominator for a in self.angles if a is not None))

    @property
    def is_trivial(self) -> bool:
        return all(a is None or a == 0 for a in self.angles)

    @property
    def primitive(self) -> bool:
        return is_primitive(self)

    def __str__(self):
        parts = []
        for a in self.angles:
            if a is None:
                parts.append("0")
            elif a == 0:
                parts.append("1")
            elif a == Fraction(1, 2):
                parts.append("-1")
            else:
                parts.append(f"zeta({a.denominator},{a.numerator})")
        return f"{self.modulus}:" + ",".join(parts)


def build_character(d: int, table: Sequence[TableValue]) -> Character:
    """
    Validate a value table and build the character.

    Args:
        d: Odd positive modulus
        table: Values on residues 0, 1, ...; any whole number of periods

    Returns:
        The validated Character

    Raises:
        DomainError: If d is not an odd positive integer
        CharacterError: Naming the violated identity
    """
    if not isinstance(d, int) or d < 1:
        raise DomainError(f"modulus must be a positive integer, got {d!r}")
    if d % 2 == 0:
        raise DomainError(f"modulus must be odd, got {d}")
    if not table or len(table) % d:
        raise CharacterError(f"table of length {len(table)} does not cover whole periods mod {d}")

    angles = [_angle(v, i) for i, v in enumerate(table)]
    for i in range(d, len(angles)):
        if angles[i] != angles[i % d]:
            raise CharacterError(f"periodicity chi(i + {d}) = chi(i) fails at i = {i % d}")
    angles = angles[:d]

    for i, a in enumerate(angles):
        if (a is None) != (gcd(i, d) > 1):
            raise CharacterError(f"chi(i) = 0 iff gcd(i, d) > 1 fails at i = {i}")
    if angles[1 % d] != 0:
        raise CharacterError("chi(1) = 1 fails")

    units = [i for i in range(d) if angles[i] is not None]
    for a in units:
        for b in units:
            if angles[a * b % d] != (angles[a] + angles[b]) % 1:
                raise CharacterError(f"multiplicativity chi({a}*{b}) = chi({a})chi({b}) fails")

    chi = Character(d, tuple(angles))
    logger.debug("built character %s of order %d", chi, chi.order)
    return chi


def _induced_from(chi: Character, e: int) -> bool:
    """True when chi is constant on unit classes modulo the divisor e."""
    d = chi.modulus
    return all(chi.angle(a) == 0 for a in range(1, d, e) if chi.angle(a) is not None)


def is_primitive(chi: Character) -> bool:
    """
    True iff chi is not induced by a character of a proper divisor modulus.

    Args:
        chi: A validated character

    Returns:
        Primitivity flag (the trivial character mod 1 is primitive)
    """
    return conductor(chi) == chi.modulus


def conductor(chi: Character) -> int:
    """Smallest divisor e of d such that chi factors through (Z/eZ)^*."""
    for e in divisors(chi.modulus):
        if _induced_from(chi, e):
            return int(e)
    return chi.modulus


@lru_cache(maxsize=None)
def _root_of_unity_generator(p: int, precision: int) -> int:
    """Teichmuller lift of the least primitive root mod p, as an integer mod p^M."""
    return teichmuller(primitive_root(p), p, precision).residue()


def _realize(chi: Character, i: int, p: int, precision: int, backend: Backend) -> int:
    """Integer representative of chi(i) mod p^precision (or the exact ±1, 0)."""
    a = chi.angle(i)
    if a is None:
        return 0
    n = a.denominator
    if n == 1:
        return 1
    if n == 2:
        return -1
    if backend is Backend.RATIONAL:
        raise UnsupportedValueError(f"chi({i}) has order {n}; only ±1 are rational")
    if (p - 1) % n:
        raise UnsupportedValueError(
            f"chi({i}) has order {n}, which does not divide p - 1 = {p - 1}")
    exponent = a.numerator * (p - 1) // n
    return pow(_root_of_unity_generator(p, precision), exponent, p ** precision)


def eval_in_backend(chi: Character, i: int, ctx: QBracketContext) -> Scalar:
    """
    chi(i) as a scalar of the active backend.

    Args:
        chi: The character
        i: Any integer (reduced mod d)
        ctx: Context supplying prime, precision and backend

    Returns:
        0, ±1, or a Teichmuller-realized root of unity in Z_p
    """
    value = _realize(chi, i, ctx.prime, ctx.precision or 1, ctx.backend)
    if ctx.backend is Backend.RATIONAL:
        return Fraction(value)
    return from_rational(value, 1, ctx.prime, ctx.precision)


def residue_table(chi: Character, p: int, precision: int) -> List[int]:
    """Values chi(0..d-1) as integers mod p^precision."""
    modulus = p ** precision
    return [_realize(chi, i, p, precision, Backend.PADIC) % modulus for i in range(chi.modulus)]


def trivial_character() -> Character:
    """The character mod 1."""
    return build_character(1, [1])
