"""Scalar backends: exact rationals and fixed-precision p-adic numbers."""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Union

from sympy import isprime

from .errors import (
    ConvergenceDomainError,
    DomainError,
    GrammarError,
    IndeterminateDivisionError,
    PrecisionError,
)

logger = logging.getLogger(__name__)

INFINITY = math.inf

# Extra digits carried while summing the exp/log series.
SERIES_GUARD_DIGITS = 2

Rational = Union[int, Fraction]


class Backend(str, Enum):
    """Which arithmetic carries the computation."""

    RATIONAL = "rational"
    PADIC = "padic"


class Comparison(Enum):
    """Outcome of comparing two p-adic values at a given precision."""

    EQUAL = "equal"
    UNEQUAL = "unequal"
    INDETERMINATE = "indeterminate"


class Regime(str, Enum):
    """Position of q relative to the convergence disc around 1."""

    STRICT = "strict"
    OUTSIDE = "outside"


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """
    Validate that p is an odd prime.

    Args:
        p: Candidate prime

    Returns:
        p unchanged

    Raises:
        DomainError: If p is not an odd prime
    """
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise DomainError(f"p must be an odd prime, got {p!r}")
    return p


def int_valuation(n: int, p: int) -> Union[int, float]:
    """Exponent of p in the integer n (infinity for n = 0)."""
    if n == 0:
        return INFINITY
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(r: Rational, p: int) -> Union[int, float]:
    """p-adic valuation of an exact rational."""
    r = Fraction(r)
    if r == 0:
        return INFINITY
    return int_valuation(r.numerator, p) - int_valuation(r.denominator, p)


@dataclass(frozen=True, eq=False)
class PadicScalar:
    """
    An element u*p^v + O(p^M) of Q_p.

    The zero-at-precision element O(p^M) has valuation infinity and unit 0.
    Instances are canonical: the unit is coprime to p and reduced modulo
    p^(M - v).
    """

    prime: int
    precision: int
    valuation: Union[int, float]
    unit: int

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicScalar":
        """The element O(p^precision)."""
        return cls(p, precision, INFINITY, 0)

    @classmethod
    def from_rational(cls, num: int, den: int, p: int, precision: int) -> "PadicScalar":
        """Alias of the module-level from_rational."""
        return from_rational(num, den, p, precision)

    @classmethod
    def _normalize(cls, p: int, precision: int, n: int, shift: int) -> "PadicScalar":
        """Build the canonical form of n*p^shift + O(p^precision)."""
        if n == 0 or shift >= precision:
            return cls.zero(p, precision)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        v += shift
        if v >= precision:
            return cls.zero(p, precision)
        return cls(p, precision, v, n % p ** (precision - v))

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise DomainError(f"cannot combine {self.prime}-adic and {other.prime}-adic values")
            return other
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            return from_rational(r.numerator, r.denominator, self.prime, self.precision)
        return NotImplemented

    def _coerce_factor(self, other) -> "PadicScalar":
        """Coerce an exact factor so that it costs no precision in a product."""
        if isinstance(other, PadicScalar):
            return self._coerce(other)
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        r = Fraction(other)
        if r == 0:
            return PadicScalar.zero(self.prime, self.precision)
        vr = rational_valuation(r, self.prime)
        if self.is_zero():
            needed = self.precision + 1
        else:
            needed = self.precision - self.valuation + vr + 1
        return from_rational(r.numerator, r.denominator, self.prime, max(needed, vr + 1))

    # ------------------------------------------------------------------
    # predicates and views

    def is_zero(self) -> bool:
        """True for the zero-at-precision element."""
        return self.valuation == INFINITY

    def is_unit(self) -> bool:
        """True when the value is known to have valuation 0."""
        return self.valuation == 0

    def with_precision(self, precision: int) -> "PadicScalar":
        """Truncate to absolute precision; never extends."""
        if precision >= self.precision:
            return self
        if self.is_zero() or self.valuation >= precision:
            return PadicScalar.zero(self.prime, precision)
        return PadicScalar(self.prime, precision, self.valuation,
                           self.unit % self.prime ** (precision - self.valuation))

    def lift(self) -> Rational:
        """Smallest non-negative representative (a Fraction for negative valuation)."""
        if self.is_zero():
            return 0
        if self.valuation >= 0:
            return self.unit * self.prime ** self.valuation
        return Fraction(self.unit, self.prime ** -self.valuation)

    def residue(self, precision: Optional[int] = None) -> int:
        """Integer representative modulo p^precision of an element of Z_p."""
        precision = self.precision if precision is None else precision
        if precision > self.precision:
            raise PrecisionError(f"value known to O({self.prime}^{self.precision}), "
                                 f"residue requested mod {self.prime}^{precision}")
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise DomainError("residue requested for a non-integral p-adic value")
        return self.lift() % self.prime ** precision

    def digits(self) -> List[int]:
        """Base-p digits d_0..d_{M-1} of an integral value."""
        n = self.residue()
        out = []
        for _ in range(max(self.precision, 0)):
            n, d = divmod(n, self.prime)
            out.append(d)
        return out

    def compare(self, other, precision: Optional[int] = None) -> Comparison:
        """
        Three-valued comparison.

        Args:
            other: Value to compare against (scalar, int or Fraction)
            precision: Number of digits that must agree (default: all known digits)

        Returns:
            EQUAL, UNEQUAL, or INDETERMINATE when the difference is zero only
            to fewer digits than requested
        """
        diff = self - other
        target = diff.precision if precision is None else precision
        if not diff.is_zero():
            return Comparison.EQUAL if diff.valuation >= target else Comparison.UNEQUAL
        return Comparison.EQUAL if diff.precision >= target else Comparison.INDETERMINATE

    def agrees(self, other, precision: int) -> bool:
        """True when self and other agree modulo p^precision."""
        return self.compare(other, precision) is Comparison.EQUAL

    # ------------------------------------------------------------------
    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.prime
        precision = min(self.precision, other.precision)
        if self.is_zero():
            return other.with_precision(precision)
        if other.is_zero():
            return self.with_precision(precision)
        v = min(self.valuation, other.valuation)
        n = self.unit * p ** (self.valuation - v) + other.unit * p ** (other.valuation - v)
        return PadicScalar._normalize(p, precision, n, v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        modulus = self.prime ** (self.precision - self.valuation)
        return PadicScalar(self.prime, self.precision, self.valuation, -self.unit % modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce_factor(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.prime
        if self.is_zero() and other.is_zero():
            return PadicScalar.zero(p, self.precision + other.precision)
        if self.is_zero():
            return PadicScalar.zero(p, self.precision + other.valuation)
        if other.is_zero():
            return PadicScalar.zero(p, other.precision + self.valuation)
        precision = min(self.valuation + other.precision, other.valuation + self.precision)
        return PadicScalar._normalize(p, precision, self.unit * other.unit,
                                      self.valuation + other.valuation)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        """Multiplicative inverse; relative precision is preserved."""
        if self.is_zero():
            raise IndeterminateDivisionError(
                f"division by O({self.prime}^{self.precision})")
        relative = self.precision - self.valuation
        unit = pow(self.unit, -1, self.prime ** relative)
        return PadicScalar(self.prime, relative - self.valuation, -self.valuation, unit)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise IndeterminateDivisionError("division by exact zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        p = self.prime
        if exponent == 0:
            return from_rational(1, 1, p, max(self.precision, 1))
        if exponent < 0:
            return self.inverse() ** -exponent
        if self.is_zero():
            return PadicScalar.zero(p, self.precision * exponent)
        relative = self.precision - self.valuation
        unit = pow(self.unit, exponent, p ** relative)
        shift = self.valuation * exponent
        return PadicScalar._normalize(p, shift + relative, unit, shift)

    def __eq__(self, other):
        try:
            return self.compare(other) is Comparison.EQUAL
        except (DomainError, TypeError):
            return NotImplemented

    def __str__(self):
        p, M = self.prime, self.precision
        if self.is_zero():
            return f"O({p}^{M})"
        if self.valuation < 0:
            return f"{self.unit}*{p}^{self.valuation} + O({p}^{M})"
        terms = []
        for i, d in enumerate(self.digits()):
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            elif i == 1:
                terms.append(f"{d}*{p}")
            else:
                terms.append(f"{d}*{p}^{i}")
        terms.append(f"O({p}^{M})")
        return " + ".join(terms)

    def __repr__(self):
        return f"PadicScalar({self})"


Scalar = Union[Fraction, PadicScalar]


def from_rational(num: int, den: int, p: int, precision: int) -> PadicScalar:
    """
    Canonical p-adic expansion of num/den to absolute precision O(p^precision).

    Args:
        num: Numerator
        den: Nonzero denominator
        p: Odd prime
        precision: Absolute precision M

    Returns:
        PadicScalar (zero-at-precision when v_p(num/den) >= M)
    """
    if den == 0:
        raise DomainError("denominator is zero")
    check_prime(p)
    if num == 0:
        return PadicScalar.zero(p, precision)
    vn = int_valuation(num, p)
    vd = int_valuation(den, p)
    v = vn - vd
    if v >= precision:
        return PadicScalar.zero(p, precision)
    modulus = p ** (precision - v)
    unit = (num // p ** vn) * pow(den // p ** vd, -1, modulus) % modulus
    return PadicScalar(p, precision, v, unit)


def valuation(x, p: Optional[int] = None) -> Union[int, float]:
    """
    p-adic valuation of a scalar of either backend.

    Args:
        x: PadicScalar, Fraction or int
        p: Prime (required for rationals)

    Returns:
        The valuation, or infinity for zero
    """
    if isinstance(x, PadicScalar):
        return x.valuation
    if p is None:
        raise DomainError("a prime is needed to take the valuation of a rational")
    return rational_valuation(x, p)


def is_zero(x) -> bool:
    """Exact zero for rationals, zero-at-precision for p-adics."""
    if isinstance(x, PadicScalar):
        return x.is_zero()
    return x == 0


def embed(value: Rational, backend: Backend, p: int, precision: Optional[int] = None) -> Scalar:
    """Bring an exact rational into the requested backend."""
    r = Fraction(value)
    if backend is Backend.RATIONAL:
        return r
    if precision is None:
        raise PrecisionError("the p-adic backend needs an explicit precision")
    return from_rational(r.numerator, r.denominator, p, precision)


def to_padic(x, p: int, precision: int) -> PadicScalar:
    """View a scalar of either backend as a p-adic number."""
    if isinstance(x, PadicScalar):
        return x.with_precision(precision)
    return embed(x, Backend.PADIC, p, precision)


def render(x) -> str:
    """Canonical text rendering used for all CLI output."""
    if isinstance(x, PadicScalar):
        return str(x)
    r = Fraction(x)
    return f"{r.numerator}/{r.denominator}" if r.denominator != 1 else str(r.numerator)


_TERM = re.compile(r"^(?P<d>\d+)(?:\*(?P<p>\d+)(?:\^(?P<e>-?\d+))?)?$")
_BIG_O = re.compile(r"^O\((?P<p>\d+)\^(?P<e>-?\d+)\)$")


def parse_scalar(text: str, p: int, backend: Optional[Backend] = None) -> Scalar:
    """
    Inverse of render().

    Args:
        text: A rendered scalar
        p: Prime used for p-adic renderings
        backend: Force a backend; inferred from the presence of O(...) otherwise

    Returns:
        Fraction or PadicScalar
    """
    text = text.strip()
    if backend is None:
        backend = Backend.PADIC if "O(" in text else Backend.RATIONAL
    if backend is Backend.RATIONAL:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise GrammarError(f"not a rational number: {text!r}", 0) from e

    total = Fraction(0)
    precision = None
    offset = 0
    for part in text.split(" + "):
        big_o = _BIG_O.match(part)
        if big_o:
            if int(big_o["p"]) != p:
                raise GrammarError(f"prime {big_o['p']} does not match {p}", offset)
            precision = int(big_o["e"])
        else:
            term = _TERM.match(part)
            if term is None or precision is not None:
                raise GrammarError(f"unexpected term {part!r}", offset)
            if term["p"] is not None and int(term["p"]) != p:
                raise GrammarError(f"prime {term['p']} does not match {p}", offset)
            if term["p"] is None:
                exponent = 0
            else:
                exponent = int(term["e"]) if term["e"] is not None else 1
            total += int(term["d"]) * Fraction(p) ** exponent
        offset += len(part) + 3
    if precision is None:
        raise GrammarError("missing O(p^M) term", len(text))
    return from_rational(total.numerator, total.denominator, p, precision)


# ----------------------------------------------------------------------
# analytic primitives


def _series_guarded_target(x: PadicScalar) -> int:
    return x.precision + SERIES_GUARD_DIGITS


def exp_p(x: PadicScalar) -> PadicScalar:
    """
    p-adic exponential sum x^k/k!.

    Args:
        x: Element with v_p(x) >= 1

    Returns:
        exp(x) to the precision of x

    Raises:
        ConvergenceDomainError: If v_p(x) < 1
    """
    p, M = x.prime, x.precision
    if x.is_zero():
        return from_rational(1, 1, p, M)
    if x.valuation < 1:
        raise ConvergenceDomainError(f"exp_p needs v_p(x) >= 1, got {x.valuation}")
    target = _series_guarded_target(x)
    lifted = Fraction(x.lift())
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    # every term from k on has valuation >= k*v - (k-1)/(p-1), increasing in k
    while k * x.valuation - Fraction(k - 1, p - 1) < target:
        total += term
        k += 1
        term = term * lifted / k
    return from_rational(total.numerator, total.denominator, p, M)


def _ilog(k: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


def log_p(x: PadicScalar) -> PadicScalar:
    """
    p-adic logarithm sum (-1)^(k+1) (x-1)^k / k.

    Args:
        x: Element with v_p(x - 1) >= 1

    Returns:
        log(x) to the precision of x

    Raises:
        ConvergenceDomainError: If v_p(x - 1) < 1
    """
    p = x.prime
    y = x - 1
    if y.is_zero():
        return PadicScalar.zero(p, y.precision)
    if y.valuation < 1:
        raise ConvergenceDomainError(f"log_p needs v_p(x - 1) >= 1, got {y.valuation}")
    target = _series_guarded_target(y)
    lifted = Fraction(y.lift())
    total = Fraction(0)
    power = lifted
    k = 1
    # v(y^k / k) >= k*v(y) - floor(log_p k), increasing in k
    while k * y.valuation - _ilog(k, p) < target:
        total += power / k if k % 2 else -power / k
        k += 1
        power *= lifted
    return from_rational(total.numerator, total.denominator, p, y.precision)


def teichmuller(a: int, p: int, precision: int) -> PadicScalar:
    """
    Teichmuller lift: the (p-1)-th root of unity congruent to a mod p.

    Args:
        a: Integer prime to p
        p: Odd prime
        precision: Absolute precision M

    Returns:
        omega(a) as the limit of a^(p^N) mod p^M
    """
    check_prime(p)
    if a % p == 0:
        raise DomainError(f"teichmuller lift needs gcd(a, p) = 1, got a = {a}")
    modulus = p ** precision
    w = a % modulus
    for _ in range(precision + 1):
        nxt = pow(w, p, modulus)
        if nxt == w:
            break
        w = nxt
    return from_rational(w, 1, p, precision)


# ----------------------------------------------------------------------
# the deformation parameter


@dataclass(frozen=True)
class QParam:
    """
    The parameter q together with its prime.

    Attributes:
        value: q in the active backend
        prime: The prime p
        exact: The rational seed when q was given as num/den; lets callers
            re-embed q at a higher working precision
    """

    value: Scalar
    prime: int
    exact: Optional[Fraction] = None

    @classmethod
    def from_rational(cls, num: int, den: int, p: int, backend: Backend,
                      precision: Optional[int] = None) -> "QParam":
        """
        Build q from an exact rational.

        Args:
            num: Numerator of q
            den: Denominator of q
            p: Odd prime
            backend: Target backend
            precision: Absolute precision (p-adic backend only)
        """
        check_prime(p)
        if den == 0:
            raise DomainError("q has a zero denominator")
        exact = Fraction(num, den)
        return cls(embed(exact, backend, p, precision), p, exact)

    @property
    def backend(self) -> Backend:
        return Backend.PADIC if isinstance(self.value, PadicScalar) else Backend.RATIONAL

    @property
    def precision(self) -> Optional[int]:
        return self.value.precision if isinstance(self.value, PadicScalar) else None

    def distance_to_one(self) -> Union[int, float]:
        """v_p(q - 1)."""
        return valuation(self.value - 1, self.prime)

    @property
    def regime(self) -> Regime:
        return Regime.STRICT if self.distance_to_one() >= 1 else Regime.OUTSIDE

    @property
    def is_strict(self) -> bool:
        return self.regime is Regime.STRICT

    def is_one(self) -> bool:
        """q = 1 exactly (rational) or to full precision (p-adic)."""
        return is_zero(self.value - 1)

    def at_precision(self, precision: int) -> "QParam":
        """Re-embed at a new precision; only truncation is possible without a rational seed."""
        if self.backend is Backend.RATIONAL:
            return self
        if self.exact is not None:
            return QParam(embed(self.exact, Backend.PADIC, self.prime, precision),
                          self.prime, self.exact)
        return QParam(self.value.with_precision(precision), self.prime)

    def padic(self, precision: Optional[int] = None) -> PadicScalar:
        """q as a p-adic number."""
        if self.backend is Backend.PADIC and (precision is None or self.exact is None):
            return self.value if precision is None else self.value.with_precision(precision)
        if precision is None:
            raise PrecisionError("embedding a rational q needs a precision")
        return embed(self.exact if self.exact is not None else self.value,
                     Backend.PADIC, self.prime, precision)

    def __str__(self):
        if self.exact is not None:
            return render(self.exact)
        return render(self.value)


def q_pow(q: QParam, x, precision: Optional[int] = None) -> PadicScalar:
    """
    q^x = exp(x log q) for x in Z_p.

    Args:
        q: Parameter in the STRICT regime
        x: Exponent (PadicScalar, int or Fraction) with v_p(x) >= 0
        precision: Working precision when neither q nor x fixes one

    Returns:
        q^x as a PadicScalar
    """
    if not q.is_strict:
        raise ConvergenceDomainError(f"q^x needs v_p(q - 1) >= 1, q = {q}")
    if precision is None:
        precision = x.precision if isinstance(x, PadicScalar) else q.precision
    if precision is None:
        raise PrecisionError("q_pow needs a precision for a rational q and exponent")
    qv = q.padic(precision)
    if isinstance(x, PadicScalar):
        xv = x
    else:
        r = Fraction(x)
        xv = from_rational(r.numerator, r.denominator, q.prime, precision)
    if valuation(xv) < 0:
        raise ConvergenceDomainError("q^x needs |x|_p <= 1")
    return exp_p(xv * log_p(qv))
