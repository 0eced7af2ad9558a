"""Stable norm on the homology of the modular torus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import DEFAULT_PRECISION, RealEnclosure, enclose_acosh
from .farey import CoprimePair
from .markov import MarkovCache, markov_number

NORM_PRECISION = 192

IntMatrix = tuple[int, int, int, int]

_ROTATION: IntMatrix = (0, -1, 1, 1)  # (x, y) -> (-y, x + y), order 6
_SWAP: IntMatrix = (0, 1, 1, 0)  # (x, y) -> (y, x)


def _apply(m: IntMatrix, v: tuple[int, int]) -> tuple[int, int]:
    return (m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1])


def _compose(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def symmetry_group() -> list[IntMatrix]:
    """The dihedral group of order 12 generated by the order-6 rotation and the swap."""
    group = [(1, 0, 0, 1)]
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for s in (_ROTATION, _SWAP):
                h = _compose(s, g)
                if h not in group:
                    group.append(h)
                    nxt.append(h)
        frontier = nxt
    return group


_GROUP = symmetry_group()


def reduce_to_sector(x: int, y: int) -> tuple[int, int]:
    """Image of ``(x, y)`` in the sector ``q >= p >= 0`` under the symmetry group."""
    if x == 0 and y == 0:
        raise ValueError("the zero class has no sector representative")
    for g in _GROUP:
        q, p = _apply(g, (x, y))
        if q >= p >= 0:
            return (q, p)
    raise AssertionError("symmetry group failed to reach the sector")


def half_length(q: int, p: int, precision_bits: int = NORM_PRECISION, cache: Optional[MarkovCache] = None) -> RealEnclosure:
    """``acosh(3 m / 2)`` for a coprime sector pair: half the geodesic length."""
    m = markov_number((p, q), cache)
    return enclose_acosh(Fraction(3 * m, 2), precision_bits)


def stable_norm(q: int, p: int, precision_bits: int = NORM_PRECISION, cache: Optional[MarkovCache] = None) -> RealEnclosure:
    """``||(q, p)||_s = g * 2 acosh(3 m_{primitive} / 2)`` on the sector."""
    if not q >= p >= 0:
        raise ValueError(f"({q},{p}) is outside the sector q >= p >= 0")
    if q == 0:
        raise ValueError("stable norm of the zero vector requested")
    g = math.gcd(q, p)
    return half_length(q // g, p // g, precision_bits, cache) * (2 * g)


def extend_norm(x: int, y: int, precision_bits: int = NORM_PRECISION, cache: Optional[MarkovCache] = None) -> RealEnclosure:
    """Stable norm of an arbitrary nonzero integer class."""
    q, p = reduce_to_sector(x, y)
    return stable_norm(q, p, precision_bits, cache)


@dataclass(frozen=True)
class SpherePoint:
    direction: CoprimePair
    coords: tuple[RealEnclosure, RealEnclosure]


def sphere_point(v, precision_bits: int = NORM_PRECISION, cache: Optional[MarkovCache] = None) -> SpherePoint:
    """``v / ||v||_s`` for a coprime sector pair ``v = (q, p)``."""
    v = v if isinstance(v, CoprimePair) else CoprimePair(*v)
    n = stable_norm(v.q, v.p, precision_bits, cache)
    inv = n.reciprocal()
    return SpherePoint(v, (inv * v.q, inv * v.p))


def turning(a: SpherePoint, b: SpherePoint, c: SpherePoint) -> RealEnclosure:
    """Cross product ``(b - a) x (c - b)``; positive means a left turn."""
    (ax, ay), (bx, by), (cx, cy) = a.coords, b.coords, c.coords
    return (bx - ax) * (cy - by) - (by - ay) * (cx - bx)


__all__ = [
    "DEFAULT_PRECISION",
    "NORM_PRECISION",
    "SpherePoint",
    "extend_norm",
    "half_length",
    "reduce_to_sector",
    "sphere_point",
    "stable_norm",
    "symmetry_group",
    "turning",
]
