"""Farey / Stern-Brocot combinatorics on [0, 1] plus the formal fraction 1/0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional


@dataclass(frozen=True)
class FareyFraction:
    """Reduced fraction ``p/q`` with ``0 <= p/q <= 1``, or the formal ``1/0``.

    Ordering uses exact cross-multiplication; ``1/0`` sorts above everything.
    """

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if (p, q) == (1, 0):
            return
        if q <= 0 or p < 0 or p > q:
            raise ValueError(f"{p}/{q} is not a fraction in [0, 1] or 1/0")
        if math.gcd(p, q) != 1:
            raise ValueError(f"{p}/{q} is not reduced")

    @classmethod
    def parse(cls, text: str) -> FareyFraction:
        """Read ``p/q``; a bare integer ``p`` means ``p/1``."""
        try:
            p, _, q = text.strip().partition("/")
            return cls(int(p), int(q) if q else 1)
        except ValueError as exc:
            raise ValueError(f"invalid fraction {text!r}: {exc}") from None

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def key(self) -> tuple[int, int]:
        return (self.p, self.q)

    def __lt__(self, other: FareyFraction) -> bool:
        return self.p * other.q < other.p * self.q

    def __le__(self, other: FareyFraction) -> bool:
        return self.p * other.q <= other.p * self.q

    def __gt__(self, other: FareyFraction) -> bool:
        return other < self

    def __ge__(self, other: FareyFraction) -> bool:
        return other <= self

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


ZERO = FareyFraction(0, 1)
ONE = FareyFraction(1, 1)
HALF = FareyFraction(1, 2)
INFINITY = FareyFraction(1, 0)


def as_farey(f) -> FareyFraction:
    if isinstance(f, FareyFraction):
        return f
    if isinstance(f, str):
        return FareyFraction.parse(f)
    p, q = f
    return FareyFraction(p, q)


@dataclass(frozen=True)
class CoprimePair:
    """Lattice point ``(q, p)`` of the sector ``q >= p >= 0`` with ``gcd(q, p) = 1``."""

    q: int
    p: int

    def __post_init__(self):
        if not (self.q >= self.p >= 0) or math.gcd(self.q, self.p) != 1:
            raise ValueError(f"({self.q},{self.p}) is not a coprime sector pair")

    @property
    def fraction(self) -> FareyFraction:
        return FareyFraction(self.p, self.q)

    def __iter__(self):
        yield self.q
        yield self.p

    def __str__(self) -> str:
        return f"({self.q},{self.p})"


@dataclass(frozen=True)
class FareyTriple:
    """Farey triangle ``left < center < right`` with ``center`` their mediant.

    ``left`` is ``None`` only for the centre ``0/1``, which has no left
    parent inside ``[0, 1]``.
    """

    left: Optional[FareyFraction]
    center: FareyFraction
    right: FareyFraction

    def is_valid(self) -> bool:
        c, r = self.center, self.right
        if abs(r.p * c.q - r.q * c.p) != 1 or not c < r:
            return False
        if self.left is None:
            return c == ZERO
        l = self.left
        return (
            l < c
            and abs(l.p * c.q - l.q * c.p) == 1
            and c.p == l.p + r.p
            and c.q == l.q + r.q
        )


def farey_parents(f) -> FareyTriple:
    """Farey parents of ``f`` via the extended Euclidean algorithm.

    The left parent ``r1/s1`` solves ``p*s1 - q*r1 = 1`` with ``0 < s1 < q``.
    """
    f = as_farey(f)
    if f.is_infinity:
        raise ValueError("1/0 has no Farey parents")
    if f == ZERO:
        return FareyTriple(None, f, ONE)
    if f == ONE:
        return FareyTriple(ZERO, f, INFINITY)
    p, q = f.p, f.q
    s1 = pow(p, -1, q)
    r1 = (p * s1 - 1) // q
    left = FareyFraction(r1, s1)
    right = FareyFraction(p - r1, q - s1)
    return FareyTriple(left, f, right)


def t_map(pair) -> tuple[int, int]:
    """``T(q, p) = (q - p, p)`` on lattice points."""
    q, p = pair
    return (q - p, p)


def t_map_fraction(f) -> FareyFraction:
    """``T(p/q) = p/(q - p)``; sends ``1/2`` to ``1/1`` and ``1/1`` to ``1/0``.

    Only fractions in ``[0, 1/2]`` land back in ``[0, 1]``; ``1/1`` is
    mapped to the formal ``1/0``.
    """
    f = as_farey(f)
    if f.is_infinity:
        raise ValueError("T is not defined at 1/0")
    if 2 * f.p > f.q and f != ONE:
        raise ValueError(f"T({f}) lies outside [0, 1]")
    return FareyFraction(f.p, f.q - f.p)


def t_inverse(f) -> FareyFraction:
    """``T^-1(p/q) = p/(p + q)``, mapping ``[0, 1]`` onto ``[0, 1/2]``."""
    f = as_farey(f)
    return FareyFraction(f.p, f.p + f.q)


def continued_fraction(p: int, q: int) -> list[int]:
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def tree_path(f) -> str:
    """Word over ``{L, R}`` from the root ``1/2`` down to ``f``."""
    f = as_farey(f)
    if f.is_infinity or f.q < 2:
        raise ValueError(f"{f} is not a node of the Farey tree")
    lo, hi = (0, 1), (1, 1)
    word = []
    while True:
        mp, mq = lo[0] + hi[0], lo[1] + hi[1]
        c = f.p * mq - mp * f.q
        if c == 0:
            return "".join(word)
        if c < 0:
            word.append("L")
            hi = (mp, mq)
        else:
            word.append("R")
            lo = (mp, mq)


def coprime_pairs(max_q: int) -> Iterator[CoprimePair]:
    """All coprime sector pairs with ``q <= max_q``, ordered by ``(q, p)``."""
    for q in range(1, max_q + 1):
        for p in range(0, q + 1):
            if math.gcd(q, p) == 1:
                yield CoprimePair(q, p)


def count_coprime_pairs(max_q: int) -> int:
    """``1 + sum_{q<=max_q} phi(q)``, via a totient sieve."""
    if max_q < 1:
        return 0
    phi = list(range(max_q + 1))
    for i in range(2, max_q + 1):
        if phi[i] == i:
            for j in range(i, max_q + 1, i):
                phi[j] -= phi[j] // i
    return 1 + sum(phi[1:])
