"""Scalar arithmetic over the local fields R, C and Q_p.

Archimedean scalars are plain Python floats and complexes.  p-adic scalars
are backed by exact rationals together with a count of known significant
digits, mimicking a fixed-precision p-adic model: arithmetic propagates the
digit count, and an operation whose nonzero result would retain less than
one known digit raises PrecisionExhaustedError instead of returning noise.
Exact cancellation yields an exact zero, so structural identities such as
x - x = 0 hold on the nose.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PrecisionExhaustedError

DEFAULT_PADIC_PRECISION = 40

_relative_tolerance = 1e-9


def relative_tolerance() -> float:
    """Relative tolerance used by archimedean equality-like checks."""
    return _relative_tolerance


def set_relative_tolerance(tol: float) -> None:
    global _relative_tolerance
    if not 0.0 < tol < 1.0:
        raise DomainError(f"relative tolerance must lie in (0, 1), got {tol}")
    _relative_tolerance = tol


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


class Kind(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    PADIC = "padic"


@dataclass(frozen=True)
class FieldSpec:
    """One of the supported local fields, with precision data for Q_p."""

    kind: Kind
    prime: int | None = None
    precision: int | None = None

    def __post_init__(self):
        if self.kind is Kind.PADIC:
            if self.prime is None or not _is_prime(self.prime):
                raise DomainError(f"p-adic field needs a prime, got {self.prime}")
            if self.precision is None:
                object.__setattr__(self, "precision", DEFAULT_PADIC_PRECISION)
            if not isinstance(self.precision, int) or self.precision < 1:
                raise DomainError(f"precision must be a positive integer, got {self.precision}")
        elif self.prime is not None or self.precision is not None:
            raise DomainError("prime/precision only make sense for p-adic fields")

    @property
    def is_padic(self) -> bool:
        return self.kind is Kind.PADIC

    @property
    def is_archimedean(self) -> bool:
        return self.kind is not Kind.PADIC

    @property
    def d(self) -> float:
        """Proximality constant: 4 archimedean, p non-archimedean."""
        return float(self.prime) if self.is_padic else 4.0

    def zero(self):
        return self.scalar(0)

    def one(self):
        return self.scalar(1)

    def scalar(self, x):
        """Coerce x into this field's scalar type."""
        if self.kind is Kind.PADIC:
            if isinstance(x, PadicScalar):
                if x.field != self:
                    raise DomainError(f"scalar belongs to {x.field}, not {self}")
                return x
            return PadicScalar(self, x)
        if isinstance(x, PadicScalar):
            raise DomainError("cannot coerce a p-adic scalar into an archimedean field")
        if self.kind is Kind.COMPLEX:
            return complex(x)
        value = complex(x)
        if value.imag != 0.0:
            raise DomainError(f"value {x} has a nonzero imaginary part")
        return value.real

    def __str__(self) -> str:
        if self.kind is Kind.REAL:
            return "R"
        if self.kind is Kind.COMPLEX:
            return "C"
        return f"Q_{self.prime}"


REAL = FieldSpec(Kind.REAL)
COMPLEX = FieldSpec(Kind.COMPLEX)


def padic(prime: int, precision: int = DEFAULT_PADIC_PRECISION) -> FieldSpec:
    return FieldSpec(Kind.PADIC, prime, precision)


def _vp(x: Fraction, p: int):
    """Exact p-adic valuation of a rational; +inf for zero."""
    if not x:
        return math.inf
    n = x.numerator
    if n % p == 0:
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v
    d = x.denominator
    v = 0
    while d % p == 0:
        d //= p
        v -= 1
    return v


class PadicScalar:
    """Element of Q_p: an exact rational plus known-digit bookkeeping.

    ``digits`` counts known significant base-p digits; a full-precision
    scalar has ``field.precision`` of them.  Addition can destroy digits
    through cancellation, multiplication keeps the minimum of the two
    counts.  Instances are immutable.
    """

    __slots__ = ("field", "value", "digits", "valuation")

    def __init__(self, field: FieldSpec, value, digits: int | None = None):
        if not field.is_padic:
            raise DomainError("PadicScalar needs a p-adic field")
        if isinstance(value, float):
            raise DomainError("floats cannot be read as p-adic scalars; use ints or Fractions")
        value = Fraction(value)
        if digits is None or not value:
            digits = field.precision
        if digits < 1:
            raise PrecisionExhaustedError(
                f"p-adic scalar with {digits} known digits (need at least 1)")
        self.field = field
        self.value = value
        self.digits = digits
        self.valuation = _vp(value, field.prime)

    @classmethod
    def from_unit_digits(cls, field: FieldSpec, val: int, unit_digits: list[int]) -> "PadicScalar":
        """Rebuild p^val * (sum of unit_digits[i] * p^i) from little-endian digits."""
        p = field.prime
        if not unit_digits or unit_digits[0] % p == 0:
            raise DomainError("unit digits must start with a nonzero digit mod p")
        unit = sum(d % p * p ** i for i, d in enumerate(unit_digits))
        return cls(field, Fraction(unit) * Fraction(p) ** val, len(unit_digits))

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.field != self.field:
                raise DomainError(f"mixed fields: {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar(self.field, other)
        raise DomainError(f"cannot treat {type(other).__name__} as a p-adic scalar")

    def _from_abs_precision(self, value: Fraction, abs_prec) -> "PadicScalar":
        # abs_prec = valuation + digits of the least precisely known operand
        if not value:
            return PadicScalar(self.field, 0)
        v = _vp(value, self.field.prime)
        digits = abs_prec - v
        if digits < 1:
            raise PrecisionExhaustedError(
                f"cancellation left a result of valuation {v} known only modulo "
                f"{self.field.prime}^{abs_prec}")
        return PadicScalar(self.field, value, min(int(digits), self.field.precision))

    def __add__(self, other):
        other = self._coerce(other)
        prec = min(self.valuation + self.digits, other.valuation + other.digits)
        return self._from_abs_precision(self.value + other.value, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.field, -self.value, self.digits)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        return PadicScalar(self.field, self.value * other.value, min(self.digits, other.digits))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.value:
            raise DomainError("division by zero")
        return PadicScalar(self.field, self.value / other.value, min(self.digits, other.digits))

    def __rtruediv__(self, other):
        if not self.value:
            raise DomainError("division by zero")
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise DomainError("only integer powers of p-adic scalars are supported")
        if not self.value:
            if k <= 0:
                raise DomainError(f"0**{k} is not defined")
            return self
        return PadicScalar(self.field, self.value ** k, self.digits)

    def __eq__(self, other):
        if isinstance(other, PadicScalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    def abs(self) -> float:
        if not self.value:
            return 0.0
        return float(self.field.prime) ** (-self.valuation)

    def unit_digits(self, count: int | None = None) -> list[int]:
        """Little-endian base-p digits of the unit part, to ``count`` places."""
        if not self.value:
            raise DomainError("zero has no unit part")
        if count is None:
            count = self.digits
        p = self.field.prime
        unit = self.value / Fraction(p) ** self.valuation
        m = p ** count
        u = unit.numerator * pow(unit.denominator, -1, m) % m
        out = []
        for _ in range(count):
            out.append(u % p)
            u //= p
        return out

    def __repr__(self):
        return f"PadicScalar({self.value}, p={self.field.prime}, digits={self.digits})"


def abs_value(x, field: FieldSpec) -> float:
    """|x| in the given field: usual modulus, or p^(-valuation)."""
    if field.is_padic:
        if not isinstance(x, PadicScalar):
            x = PadicScalar(field, x)
        elif x.field != field:
            raise DomainError(f"scalar belongs to {x.field}, not {field}")
        return x.abs()
    return abs(field.scalar(x))


def valuation(x, field: FieldSpec):
    """Exponent j with |x| = p^(-j); +inf for zero.  p-adic fields only."""
    if not field.is_padic:
        raise DomainError(f"valuation is only defined over p-adic fields, not {field}")
    if isinstance(x, PadicScalar):
        if x.field != field:
            raise DomainError(f"scalar belongs to {x.field}, not {field}")
        return x.valuation
    if isinstance(x, float):
        raise DomainError("floats cannot be read as p-adic scalars; use ints or Fractions")
    return _vp(Fraction(x), field.prime)
