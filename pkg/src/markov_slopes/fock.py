"""Fock's function Psi on [0, 1/2], its one-sided derivatives, and the corner
slopes of the stable-norm ball."""

from __future__ import annotations

import enum
import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import (
    DEFAULT_PRECISION,
    RealEnclosure,
    enclose_acosh,
    enclose_log,
    enclose_sqrt,
    refine_until,
)
from .farey import (
    HALF,
    ZERO,
    CoprimePair,
    FareyFraction,
    as_farey,
    farey_parents,
    t_inverse,
    t_map_fraction,
)
from .markov import MarkovCache, markov_number, markov_triple_at
from .norm import half_length, stable_norm

log = logging.getLogger(__name__)


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Radical(enum.Enum):
    """Which label sits under the square root in the derivative constant term.

    ``TWIST`` uses the label of the twisting curve (``sqrt(9 n^2 - 4)``);
    ``NEIGHBOUR`` uses the neighbour label instead.  Only ``TWIST`` agrees
    with the difference-quotient oracle; the other is kept for comparison.
    """

    TWIST = "twist"
    NEIGHBOUR = "neighbour"


def _in_domain(f) -> FareyFraction:
    f = as_farey(f)
    if f.is_infinity or 2 * f.p > f.q:
        raise ValueError(f"{f} is outside the domain [0, 1/2] of Psi")
    return f


def psi(f, precision_bits: int = DEFAULT_PRECISION, cache: Optional[MarkovCache] = None) -> RealEnclosure:
    """``Psi(p/q) = acosh(3/2 m_T(p/q)) / q``."""
    f = _in_domain(f)
    if cache is None:
        return _psi_memo(f, precision_bits)
    return _psi(f, precision_bits, cache)


def _psi(f: FareyFraction, precision_bits: int, cache: Optional[MarkovCache]) -> RealEnclosure:
    m = markov_number(t_map_fraction(f), cache)
    return enclose_acosh(Fraction(3 * m, 2), precision_bits) / f.q


@functools.lru_cache(maxsize=8192)
def _psi_memo(f: FareyFraction, precision_bits: int) -> RealEnclosure:
    return _psi(f, precision_bits, None)


def twist_constant(
    n_far: int,
    n_twist: int,
    n_near: int,
    precision_bits: int = DEFAULT_PRECISION,
    radical: Radical = Radical.TWIST,
) -> RealEnclosure:
    """``log(3 a/2 - (9 g a - 6 b) / (2 sqrt(9 g^2 - 4)))`` with a=n_far, g=n_twist, b=n_near.

    This is the constant term of the half-length of a curve twisted many
    times around the curve labelled ``n_twist``.
    """
    root_label = n_twist if radical is Radical.TWIST else n_far
    # the two terms agree to about log2(n_far * n_twist) bits
    p = precision_bits + 16 + (n_far * n_twist * n_twist).bit_length()
    root = enclose_sqrt(9 * root_label * root_label - 4, p)
    arg = Fraction(3 * n_far, 2) - (9 * n_twist * n_far - 6 * n_near) / (2 * root)
    if not arg.certainly_positive():
        raise ValueError("twist constant has a non-positive log argument")
    return enclose_log(arg, p).with_precision(precision_bits)


def psi_left_derivative(
    f,
    precision_bits: int = DEFAULT_PRECISION,
    cache: Optional[MarkovCache] = None,
    radical: Radical = Radical.TWIST,
) -> RealEnclosure:
    """Closed-form left derivative of Psi at ``f`` in ``(0, 1/2]``."""
    f = _in_domain(f)
    if f == ZERO:
        raise ValueError("left derivative of Psi is undefined at 0")
    n1, n, n2 = markov_triple_at(f, cache)
    s2 = farey_parents(f).right.q
    p = precision_bits + 16
    value = -s2 * enclose_acosh(Fraction(3 * n, 2), p) - f.q * twist_constant(n2, n, n1, p, radical)
    if not value.certainly_negative():
        raise ArithmeticError(f"left derivative at {f} not certified negative")
    return value.with_precision(precision_bits)


def psi_right_derivative(
    f,
    precision_bits: int = DEFAULT_PRECISION,
    cache: Optional[MarkovCache] = None,
    radical: Radical = Radical.TWIST,
) -> RealEnclosure:
    """Closed-form right derivative of Psi at ``f`` in ``[0, 1/2)``."""
    f = _in_domain(f)
    if f == HALF:
        raise ValueError("right derivative of Psi is undefined at 1/2")
    n1, n, n2 = markov_triple_at(f, cache)
    left = farey_parents(f).left
    s1 = 0 if left is None else left.q
    p = precision_bits + 16
    value = s1 * enclose_acosh(Fraction(3 * n, 2), p) + f.q * twist_constant(n1, n, n2, p, radical)
    return value.with_precision(precision_bits)


def psi_derivative(f, side: Side, precision_bits: int = DEFAULT_PRECISION, cache: Optional[MarkovCache] = None, radical: Radical = Radical.TWIST) -> RealEnclosure:
    if cache is None:
        return _derivative_memo(as_farey(f), Side(side), precision_bits, Radical(radical))
    if Side(side) is Side.LEFT:
        return psi_left_derivative(f, precision_bits, cache, radical)
    return psi_right_derivative(f, precision_bits, cache, radical)


@functools.lru_cache(maxsize=4096)
def _derivative_memo(f: FareyFraction, side: Side, precision_bits: int, radical: Radical) -> RealEnclosure:
    if side is Side.LEFT:
        return psi_left_derivative(f, precision_bits, None, radical)
    return psi_right_derivative(f, precision_bits, None, radical)


def twist_sequence_point(f, side: Side, k: int) -> FareyFraction:
    """k-th Dehn-twist approximant of ``f`` from the given side.

    Left: ``(r1 + k p)/(s1 + k q)``; right: ``(r2 + k p)/(s2 + k q)``.
    """
    f = as_farey(f)
    tri = farey_parents(f)
    nb = tri.left if Side(side) is Side.LEFT else tri.right
    return FareyFraction(nb.p + k * f.p, nb.q + k * f.q)


def finite_difference_derivative(
    f,
    side: Side,
    k: int,
    precision_bits: int = DEFAULT_PRECISION,
    cache: Optional[MarkovCache] = None,
) -> RealEnclosure:
    """Difference quotient of Psi between ``f`` and its k-th twist approximant."""
    f = _in_domain(f)
    side = Side(side)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if side is Side.LEFT and f == ZERO:
        raise ValueError("no left approximants of 0")
    if side is Side.RIGHT and f == HALF:
        raise ValueError("no right approximants of 1/2 inside the domain")
    g = twist_sequence_point(f, side, k)
    # |f - g| = 1/(q * v) for Farey neighbours, so the quotient scales the
    # difference by q*v; carry enough extra bits to absorb that.
    p = precision_bits + (f.q * g.q).bit_length() + 8
    dt = Fraction(f.p, f.q) - Fraction(g.p, g.q)
    value = (psi(f, p, cache) - psi(g, p, cache)) / dt
    return value.with_precision(precision_bits)


def adjudicate_radical(f, side: Side = Side.LEFT, k: int = 12, precision_bits: int = 256) -> Radical:
    """Return the radical convention that the difference-quotient oracle supports at ``f``."""
    oracle = finite_difference_derivative(f, side, k, precision_bits)
    gaps = {}
    for r in Radical:
        try:
            gaps[r] = abs(psi_derivative(f, side, precision_bits, radical=r) - oracle).hi
        except (ValueError, ArithmeticError):
            gaps[r] = None
    best = min((r for r in gaps if gaps[r] is not None), key=lambda r: gaps[r])
    log.info(
        "derivative radical at %s (%s): oracle confirms %s (gaps %s)",
        as_farey(f), Side(side).value, best.value,
        {r.value: (float(g) if g is not None else None) for r, g in gaps.items()},
    )
    return best


@dataclass(frozen=True)
class CornerSlopes:
    """One-sided boundary slopes (dp/dq) of the stable-norm ball at ``at``.

    ``mu_plus`` is the slope on the side towards the diagonal and needs the
    right derivative ``R``; ``mu_minus`` is the slope towards the q-axis and
    needs ``L``.  An undefined side is ``None``.
    """

    at: CoprimePair
    ell: RealEnclosure
    mu_minus: Optional[RealEnclosure]
    mu_plus: Optional[RealEnclosure]
    L: Optional[RealEnclosure]
    R: Optional[RealEnclosure]


def corner_slopes(v, precision_bits: int = DEFAULT_PRECISION, cache: Optional[MarkovCache] = None) -> CornerSlopes:
    v = v if isinstance(v, CoprimePair) else CoprimePair(*v)
    q, p = v.q, v.p
    t = t_inverse(FareyFraction(p, q))
    wp = precision_bits + 16
    ell = half_length(q, p, wp, cache)
    L = R = mu_minus = mu_plus = None
    if p > 0:
        L = psi_left_derivative(t, wp, cache)
        mu_minus = -(ell - L * p) / (ell + L * q)
    if p < q:
        R = psi_right_derivative(t, wp, cache)
        mu_plus = -(ell - R * p) / (ell + R * q)

    def narrow(e):
        return None if e is None else e.with_precision(precision_bits)

    return CornerSlopes(v, narrow(ell), narrow(mu_minus), narrow(mu_plus), narrow(L), narrow(R))


def sigma_minus(precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``mu_plus`` at ``(1, 0)``: below this slope the Markov order decreases along lines."""
    return corner_slopes((1, 0), precision_bits).mu_plus


def sigma_plus(precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``mu_minus`` at ``(1, 1)``: above this slope the Markov order increases along lines."""
    return corner_slopes((1, 1), precision_bits).mu_minus


def sigma_minus_closed_form(precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``-log(3/2 + sqrt5/2) / log(3/2 + 3 sqrt5/10)``."""
    p = precision_bits + 16
    r5 = enclose_sqrt(5, p)
    num = enclose_log(Fraction(3, 2) + r5 / 2, p)
    den = enclose_log(Fraction(3, 2) + r5 * Fraction(3, 10), p)
    return (-num / den).with_precision(precision_bits)


def sigma_plus_closed_form(precision_bits: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``-log(3/2 + 3 sqrt2/4) / log(4/3 + 2 sqrt2/3)``."""
    p = precision_bits + 16
    r2 = enclose_sqrt(2, p)
    num = enclose_log(Fraction(3, 2) + r2 * Fraction(3, 4), p)
    den = enclose_log(Fraction(4, 3) + r2 * Fraction(2, 3), p)
    return (-num / den).with_precision(precision_bits)


def graph_to_sphere(t, precision_bits: int = DEFAULT_PRECISION, cache: Optional[MarkovCache] = None) -> tuple[RealEnclosure, RealEnclosure]:
    """``((1 - t) / (2 Psi(t)), t / (2 Psi(t)))``, a point of the unit sphere."""
    t = _in_domain(t)
    x = Fraction(t.p, t.q)
    two_psi = psi(t, precision_bits + 8, cache) * 2
    return ((1 - x) / two_psi).with_precision(precision_bits), (x / two_psi).with_precision(precision_bits)


def norm_of_real_point(point: tuple[RealEnclosure, RealEnclosure], direction: tuple[int, int], precision_bits: int = DEFAULT_PRECISION, cache: Optional[MarkovCache] = None) -> RealEnclosure:
    """Stable norm of a real point known to lie on the ray through the lattice ``direction``.

    By homogeneity it is ``(x / q) * ||(q, p)||_s``.
    """
    q, p = direction
    n = stable_norm(q, p, precision_bits, cache)
    return point[0] * n / q


@dataclass(frozen=True)
class DehnRow:
    k: int
    half_length: RealEnclosure
    predicted: RealEnclosure
    residual: RealEnclosure


def dehn_asymptotics(
    f,
    k_max: int,
    precision_bits: int = 512,
    k_min: int = 0,
    cache: Optional[MarkovCache] = None,
) -> list[DehnRow]:
    """Residuals of the Dehn-twist half-length expansion at ``f`` in ``(0, 1/2]``.

    The twisting curve is ``gamma = T(q, p)``; the twisted curve is
    ``T(s1, r1)`` and the third curve of the triangle is ``T(s2, r2)``.
    Row ``k`` compares the exact half-length of ``tau_gamma^k T(s1, r1)``
    (from its Markov number) with ``(k + 1) l(gamma) + constant``.
    """
    f = _in_domain(f)
    if f == ZERO:
        raise ValueError("Dehn asymptotics need a left Farey parent")
    n1, n, n2 = markov_triple_at(f, cache)
    wp = precision_bits + 16
    ell_gamma = enclose_acosh(Fraction(3 * n, 2), wp)
    const = twist_constant(n2, n, n1, wp)
    rows = []
    for k in range(k_min, k_max + 1):
        # lattice point of the twisted class: T(s1 + k q, r1 + k p)
        g = twist_sequence_point(f, Side.LEFT, k)
        m = markov_number(t_map_fraction(g), cache)
        exact = enclose_acosh(Fraction(3 * m, 2), wp)
        predicted = ell_gamma * (k + 1) + const
        rows.append(DehnRow(
            k,
            exact.with_precision(precision_bits),
            predicted.with_precision(precision_bits),
            (exact - predicted).with_precision(precision_bits),
        ))
    return rows


def certified_derivative_gap(f, side: Side, k: int, start: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``|finite difference - closed form|`` refined until its relative width is below 1/16."""

    def gap(prec: int) -> RealEnclosure:
        return abs(finite_difference_derivative(f, side, k, prec) - psi_derivative(f, side, prec))

    return refine_until(gap, lambda e: e.lo > 0 and e.width * 16 < e.lo, start)
