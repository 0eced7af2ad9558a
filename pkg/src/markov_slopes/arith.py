"""Exact rationals and certified real enclosures.

Every real number in the package is carried as a :class:`RealEnclosure`,
a closed interval with dyadic (or exact rational) endpoints that is
guaranteed to contain the true value.  Elementary functions are evaluated
with integer fixed-point arithmetic and directed rounding, so no floating
point ever enters a certified statement.

A *lazily refinable real* is any callable ``prec -> RealEnclosure`` (or a
plain rational).  :func:`certified_compare` doubles the precision of both
sides until their enclosures separate.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

DEFAULT_PRECISION = 128
PRECISION_CAP = 16384

# extra bits carried by intermediate results of interval operations
_GUARD = 24

Rational = Union[int, Fraction]


class UndecidedAtCap(ArithmeticError):
    """Raised when a certified decision is still open at the precision cap."""


class Comparison(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    UNDECIDED_AT_CAP = "UndecidedAtCap"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _magnitude_exponent(x: Fraction) -> int:
    """Smallest e >= 0 with max(1, |x|) <= 2**e (may overshoot by one)."""
    if x == 0:
        return 0
    e = abs(x.numerator).bit_length() - x.denominator.bit_length() + 1
    return max(e, 0)


def _round_down(x: Fraction, bits: int, mag: int | None = None) -> Fraction:
    if mag is None:
        mag = _magnitude_exponent(x)
    shift = bits - mag
    if shift >= 0:
        d = x.denominator
        if d & (d - 1) == 0 and d <= (1 << shift):
            return x
        return Fraction((x.numerator << shift) // d, 1 << shift)
    scale = 1 << -shift
    return Fraction((x.numerator // (x.denominator * scale)) * scale)


def _round_up(x: Fraction, bits: int, mag: int | None = None) -> Fraction:
    return -_round_down(-x, bits, mag)


def _is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


@dataclass(frozen=True)
class RealEnclosure:
    """Closed interval ``[lo, hi]`` known to contain a real number.

    Arithmetic between enclosures (and with exact rationals) rounds the
    result outward, so containment is preserved through any expression.
    Comparison operators are deliberately not defined; use
    :meth:`certainly_less`, :func:`certified_compare` and friends.
    """

    lo: Fraction
    hi: Fraction
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be positive")

    @classmethod
    def exact(cls, x: Rational, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
        x = as_fraction(x)
        return cls(x, x, precision_bits)

    @classmethod
    def outward(cls, lo: Fraction, hi: Fraction, precision_bits: int, bits: int | None = None) -> RealEnclosure:
        """Round ``[lo, hi]`` outward onto a dyadic grid of ``bits`` bits."""
        if bits is None:
            bits = precision_bits + _GUARD
        if lo == hi and (_is_dyadic(lo) or lo.denominator < (1 << 16)):
            return cls(lo, hi, precision_bits)
        mag = max(_magnitude_exponent(lo), _magnitude_exponent(hi))
        return cls(_round_down(lo, bits, mag), _round_up(hi, bits, mag), precision_bits)

    # -- inspection -------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x) -> bool:
        if isinstance(x, RealEnclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def overlaps(self, other) -> bool:
        other = _coerce(other, self.precision_bits)
        return not (self.hi < other.lo or other.hi < self.lo)

    def certainly_less(self, other) -> bool:
        other = _coerce(other, self.precision_bits)
        return self.hi < other.lo

    def certainly_greater(self, other) -> bool:
        other = _coerce(other, self.precision_bits)
        return self.lo > other.hi

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def certainly_negative(self) -> bool:
        return self.hi < 0

    def with_precision(self, precision_bits: int) -> RealEnclosure:
        return RealEnclosure(self.lo, self.hi, precision_bits)

    # -- arithmetic -------------------------------------------------------

    def _prec(self, other: RealEnclosure) -> int:
        return min(self.precision_bits, other.precision_bits)

    def __neg__(self) -> RealEnclosure:
        return RealEnclosure(-self.hi, -self.lo, self.precision_bits)

    def __abs__(self) -> RealEnclosure:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RealEnclosure(Fraction(0), max(-self.lo, self.hi), self.precision_bits)

    def __add__(self, other) -> RealEnclosure:
        if not isinstance(other, (RealEnclosure, int, Fraction)):
            return NotImplemented
        other = _coerce(other, self.precision_bits)
        return RealEnclosure.outward(self.lo + other.lo, self.hi + other.hi, self._prec(other))

    __radd__ = __add__

    def __sub__(self, other) -> RealEnclosure:
        if not isinstance(other, (RealEnclosure, int, Fraction)):
            return NotImplemented
        other = _coerce(other, self.precision_bits)
        return RealEnclosure.outward(self.lo - other.hi, self.hi - other.lo, self._prec(other))

    def __rsub__(self, other) -> RealEnclosure:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return _coerce(other, self.precision_bits) - self

    def __mul__(self, other) -> RealEnclosure:
        if not isinstance(other, (RealEnclosure, int, Fraction)):
            return NotImplemented
        other = _coerce(other, self.precision_bits)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RealEnclosure.outward(min(products), max(products), self._prec(other))

    __rmul__ = __mul__

    def reciprocal(self) -> RealEnclosure:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure straddles zero")
        return RealEnclosure.outward(1 / self.hi, 1 / self.lo, self.precision_bits)

    def __truediv__(self, other) -> RealEnclosure:
        if not isinstance(other, (RealEnclosure, int, Fraction)):
            return NotImplemented
        other = _coerce(other, self.precision_bits)
        if other.is_exact:
            if other.lo == 0:
                raise ZeroDivisionError("division by exact zero")
            a, b = self.lo / other.lo, self.hi / other.lo
            return RealEnclosure.outward(min(a, b), max(a, b), self._prec(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> RealEnclosure:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return _coerce(other, self.precision_bits) / self

    def hull(self, other) -> RealEnclosure:
        other = _coerce(other, self.precision_bits)
        return RealEnclosure(min(self.lo, other.lo), max(self.hi, other.hi), self._prec(other))

    # -- printing ---------------------------------------------------------

    def to_strings(self) -> tuple[str, str]:
        """Endpoints as strings that re-parse (via ``Fraction``) to the same values."""
        return exact_decimal(self.lo), exact_decimal(self.hi)

    def __str__(self) -> str:
        return format_enclosure(self, 20)


def _coerce(x, precision_bits: int) -> RealEnclosure:
    if isinstance(x, RealEnclosure):
        return x
    return RealEnclosure.exact(as_fraction(x), precision_bits)


def exact_decimal(x: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational, otherwise ``p/q``."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    if not _is_dyadic(x):
        return f"{x.numerator}/{x.denominator}"
    k = x.denominator.bit_length() - 1
    digits = abs(x.numerator) * 5**k
    sign = "-" if x < 0 else ""
    s = str(digits).rjust(k + 1, "0")
    return f"{sign}{s[:-k]}.{s[-k:]}".rstrip("0")


def format_enclosure(e: RealEnclosure, digits: int = 20) -> str:
    """Short human-readable form: outward-rounded decimals with ``digits`` places."""
    scale = 10**digits
    lo = math.floor(e.lo * scale)
    hi = math.ceil(e.hi * scale)

    def fmt(n: int) -> str:
        sign = "-" if n < 0 else ""
        s = str(abs(n)).rjust(digits + 1, "0")
        return f"{sign}{s[:-digits]}.{s[-digits:]}"

    return f"[{fmt(lo)}, {fmt(hi)}]"


# ---------------------------------------------------------------------------
# elementary functions on exact rationals (fixed point, directed rounding)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _atanh_fixed(zlo: int, zhi: int, w: int) -> tuple[int, int]:
    """Bounds on atanh(z) * 2**w for a z with zlo <= z * 2**w <= zhi, 0 <= z <= 1/3 + ulp."""
    one = 1 << w
    # lower bound: every step floors, tail dropped (all terms positive)
    z2 = (zlo * zlo) >> w
    t, s, i = zlo, 0, 0
    while t:
        s += t // (2 * i + 1)
        t = (t * z2) >> w
        i += 1
    lo = s
    # upper bound: every step ceils, geometric tail added
    z2 = _ceil_div(zhi * zhi, one)
    t, s, i = zhi, 0, 0
    while t > 1:
        s += _ceil_div(t, 2 * i + 1)
        t = _ceil_div(t * z2, one)
        i += 1
    # remaining terms are <= t * sum(z2**j) <= 9/8 * t with t <= 1
    hi = s + (2 if zhi else 0)
    return lo, hi


@functools.lru_cache(maxsize=64)
def _ln2_fixed(w: int) -> tuple[int, int]:
    """Bounds on ln(2) * 2**w, using ln 2 = 2 atanh(1/3)."""
    zlo = (1 << w) // 3
    lo, hi = _atanh_fixed(zlo, zlo + 1, w)
    return 2 * lo, 2 * hi


def _log_bounds(x: Fraction, w: int) -> tuple[Fraction, Fraction]:
    a, b = x.numerator, x.denominator
    k = a.bit_length() - b.bit_length()
    # normalise so that 2**k <= x < 2**(k+1)
    if k >= 0:
        num, den = a, b << k
    else:
        num, den = a << -k, b
    if num < den:
        k -= 1
        if k >= 0:
            num, den = a, b << k
        else:
            num, den = a << -k, b
    elif num >= 2 * den:
        k += 1
        if k >= 0:
            num, den = a, b << k
        else:
            num, den = a << -k, b
    wk = w + abs(k).bit_length() + 4
    zn, zd = num - den, num + den
    zlo = (zn << wk) // zd
    zhi = zlo if (zn << wk) % zd == 0 else zlo + 1
    slo, shi = _atanh_fixed(zlo, zhi, wk)
    l2lo, l2hi = _ln2_fixed(wk)
    if k >= 0:
        lo = k * l2lo + 2 * slo
        hi = k * l2hi + 2 * shi
    else:
        lo = k * l2hi + 2 * slo
        hi = k * l2lo + 2 * shi
    scale = 1 << wk
    return Fraction(lo, scale), Fraction(hi, scale)


def _sqrt_bounds(x: Fraction, w: int) -> tuple[Fraction, Fraction]:
    a, b = x.numerator, x.denominator
    # sqrt(a/b) = sqrt(a*b)/b
    n = (a * b) << (2 * w)
    r = math.isqrt(n)
    den = b << w
    if r * r == n:
        return Fraction(r, den), Fraction(r, den)
    return Fraction(r, den), Fraction(r + 1, den)


def _exp_bounds_positive(x: Fraction, w: int) -> tuple[Fraction, Fraction]:
    """exp(x) for rational x > 0: halve until x/2**s <= 2**-8, Taylor, square back."""
    s = max(0, x.numerator.bit_length() - x.denominator.bit_length() + 9)
    wp = w + 2 * s + 16
    one = 1 << wp
    rn, rd = x.numerator, x.denominator << s

    t, total, i = one, 0, 0
    while t:
        total += t
        i += 1
        t = (t * rn) // (rd * i)
    lo = total

    t, total, i = one, 0, 0
    while t > 1 or i < 2:
        total += t
        i += 1
        t = _ceil_div(t * rn, rd * i)
    # ratio of successive terms is <= r < 1/256
    hi = total + 2

    for _ in range(s):
        lo = (lo * lo) >> wp
        hi = _ceil_div(hi * hi, one)
    return Fraction(lo, one), Fraction(hi, one)


def _exp_bounds(x: Fraction, w: int) -> tuple[Fraction, Fraction]:
    if x == 0:
        return Fraction(1), Fraction(1)
    if x > 0:
        return _exp_bounds_positive(x, w)
    lo, hi = _exp_bounds_positive(-x, w + 4)
    return 1 / hi, 1 / lo


# ---------------------------------------------------------------------------
# public enclosure constructors


def _primitive(lo: Fraction, hi: Fraction, precision_bits: int) -> RealEnclosure:
    return RealEnclosure.outward(lo, hi, precision_bits, bits=precision_bits + 2)


def enclose_sqrt(x, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """Enclosure of the square root of an exact rational (or of an enclosure).

    Square roots of rational squares come back as zero-width intervals.
    """
    if isinstance(x, RealEnclosure):
        if x.lo < 0:
            raise ValueError("sqrt of an enclosure with negative part")
        lo = enclose_sqrt(x.lo, precision_bits).lo
        hi = enclose_sqrt(x.hi, precision_bits).hi
        return RealEnclosure(lo, hi, precision_bits)
    x = as_fraction(x)
    if x < 0:
        raise ValueError(f"sqrt of negative number {x}")
    a, b = x.numerator, x.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return RealEnclosure.exact(Fraction(ra, rb), precision_bits)
    lo, hi = _sqrt_bounds(x, precision_bits + _GUARD)
    return _primitive(lo, hi, precision_bits)


def enclose_log(x, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """Enclosure of the natural logarithm of a positive rational (or enclosure)."""
    if isinstance(x, RealEnclosure):
        if x.lo <= 0:
            raise ValueError("log of an enclosure that is not positive")
        if x.is_exact:
            return enclose_log(x.lo, precision_bits)
        lo = enclose_log(x.lo, precision_bits).lo
        hi = enclose_log(x.hi, precision_bits).hi
        return RealEnclosure(lo, hi, precision_bits)
    x = as_fraction(x)
    if x <= 0:
        raise ValueError(f"log of non-positive number {x}")
    if x == 1:
        return RealEnclosure.exact(0, precision_bits)
    lo, hi = _log_bounds(x, precision_bits + _GUARD)
    return _primitive(lo, hi, precision_bits)


def enclose_exp(x, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """Enclosure of exp at a rational (or across an enclosure)."""
    if isinstance(x, RealEnclosure):
        if x.is_exact:
            return enclose_exp(x.lo, precision_bits)
        lo = enclose_exp(x.lo, precision_bits).lo
        hi = enclose_exp(x.hi, precision_bits).hi
        return RealEnclosure(lo, hi, precision_bits)
    x = as_fraction(x)
    if x == 0:
        return RealEnclosure.exact(1, precision_bits)
    lo, hi = _exp_bounds(x, precision_bits + _GUARD)
    return _primitive(lo, hi, precision_bits)


def enclose_acosh(x, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """acosh(x) = log(x + sqrt(x^2 - 1)) for rational x >= 1 (or an enclosure)."""
    if isinstance(x, RealEnclosure):
        if x.lo < 1:
            raise ValueError("acosh of an enclosure reaching below 1")
        if x.is_exact:
            return enclose_acosh(x.lo, precision_bits)
        lo = enclose_acosh(x.lo, precision_bits).lo
        hi = enclose_acosh(x.hi, precision_bits).hi
        return RealEnclosure(lo, hi, precision_bits)
    x = as_fraction(x)
    if x < 1:
        raise ValueError(f"acosh undefined at {x} < 1")
    if x == 1:
        return RealEnclosure.exact(0, precision_bits)
    w = precision_bits + _GUARD
    slo, shi = _sqrt_bounds(x * x - 1, w)
    lo = _log_bounds(x + slo, w)[0]
    hi = _log_bounds(x + shi, w)[1]
    return _primitive(lo, hi, precision_bits)


def enclose_cosh(x, precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """cosh on an enclosure; uses evenness so intervals straddling 0 stay tight."""
    e = _coerce(x, precision_bits)
    a = abs(e)
    lo = enclose_exp(a.lo, precision_bits + 4)
    hi = enclose_exp(a.hi, precision_bits + 4)
    clo = (lo + lo.reciprocal()) / 2
    chi = (hi + hi.reciprocal()) / 2
    return RealEnclosure(clo.lo, chi.hi, precision_bits)


# ---------------------------------------------------------------------------
# certified comparison

Refinable = Union[int, Fraction, RealEnclosure, Callable[[int], "RealEnclosure | int | Fraction"]]


def evaluate(value: Refinable, precision_bits: int) -> RealEnclosure:
    if callable(value):
        value = value(precision_bits)
    return _coerce(value, precision_bits)


def precision_schedule(start: int = DEFAULT_PRECISION, cap: int = PRECISION_CAP):
    p = start
    while p <= cap:
        yield p
        p *= 2


def certified_compare(
    a: Refinable,
    b: Refinable,
    start: int = DEFAULT_PRECISION,
    cap: int = PRECISION_CAP,
) -> Comparison:
    """Compare two lazily refinable reals.

    ``LESS``/``GREATER`` are returned only for disjoint enclosures and
    ``EQUAL`` only when both sides evaluate to the same exact rational.
    """
    for p in precision_schedule(start, cap):
        ea, eb = evaluate(a, p), evaluate(b, p)
        if ea.hi < eb.lo:
            return Comparison.LESS
        if ea.lo > eb.hi:
            return Comparison.GREATER
        if ea.is_exact and eb.is_exact and ea.lo == eb.lo:
            return Comparison.EQUAL
        if not callable(a) and not callable(b):
            break
    return Comparison.UNDECIDED_AT_CAP


def certified_sign(value: Refinable, start: int = DEFAULT_PRECISION, cap: int = PRECISION_CAP) -> int:
    """Sign of a refinable real; raises :class:`UndecidedAtCap` if it cannot be settled."""
    c = certified_compare(value, 0, start, cap)
    if c is Comparison.UNDECIDED_AT_CAP:
        raise UndecidedAtCap("sign undecided at precision cap")
    return {Comparison.LESS: -1, Comparison.EQUAL: 0, Comparison.GREATER: 1}[c]


def refine_until(
    value: Callable[[int], RealEnclosure],
    accept: Callable[[RealEnclosure], bool],
    start: int = DEFAULT_PRECISION,
    cap: int = PRECISION_CAP,
) -> RealEnclosure:
    """Evaluate ``value`` at doubling precision until ``accept`` holds."""
    for p in precision_schedule(start, cap):
        e = value(p)
        if accept(e):
            return e
    raise UndecidedAtCap("refinement did not settle below the precision cap")
