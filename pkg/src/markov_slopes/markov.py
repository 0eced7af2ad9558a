"""Markov labels of Farey fractions, the Cohn-matrix trace oracle, and
Markov distances of non-primitive lattice points."""

from __future__ import annotations

import logging
import math
import os
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .farey import INFINITY, ONE, ZERO, FareyFraction, as_farey, farey_parents, t_map_fraction

log = logging.getLogger(__name__)

Matrix = tuple[int, int, int, int]

# seeds chosen so that traces at 0/1 and 1/1 are 3*1 and 3*2
COHN_ZERO: Matrix = (1, 1, 1, 2)
COHN_ONE: Matrix = (3, 2, 4, 3)


@dataclass(frozen=True)
class MarkovTriple:
    x: int
    y: int
    z: int

    def is_valid(self) -> bool:
        x, y, z = self.x, self.y, self.z
        return min(x, y, z) > 0 and x * x + y * y + z * z == 3 * x * y * z

    def mutate(self, index: int) -> MarkovTriple:
        """Replace one coordinate ``c`` by ``3ab - c``."""
        t = [self.x, self.y, self.z]
        a, b = (t[i] for i in range(3) if i != index)
        t[index] = 3 * a * b - t[index]
        return MarkovTriple(*t)


@dataclass(frozen=True)
class LabelledNode:
    fraction: FareyFraction
    label: int
    parent_labels: tuple[int, int]

    def triple(self) -> MarkovTriple:
        return MarkovTriple(self.parent_labels[0], self.label, self.parent_labels[1])


class MarkovCache:
    """Append-only map from reduced fractions ``(p, q)`` to Markov numbers.

    Reads are lock-free; inserts are serialized.
    """

    def __init__(self):
        self._labels: dict[tuple[int, int], int] = {(0, 1): 1, (1, 1): 2, (1, 0): 1}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, key) -> bool:
        return key in self._labels

    def get(self, key: tuple[int, int]) -> Optional[int]:
        return self._labels.get(key)

    def insert(self, key: tuple[int, int], label: int) -> None:
        with self._lock:
            old = self._labels.setdefault(key, label)
        if old != label:
            raise RuntimeError(f"cache conflict at {key}: {old} != {label}")

    def items(self):
        return list(self._labels.items())

    def label(self, f) -> int:
        """Markov number of ``f``, descending the tree from the root triangle."""
        key = f if isinstance(f, tuple) else as_farey(f).key()
        hit = self._labels.get(key)
        if hit is not None:
            return hit
        p, q = key
        if q <= 0 or not 0 <= p <= q or math.gcd(p, q) != 1:
            raise ValueError(f"{p}/{q} is not a reduced fraction in [0, 1] or 1/0")
        # triangle (left, right, far) with the far vertex opposite the edge left-right
        left, right, far = (0, 1), (1, 1), (1, 0)
        ml, mr, mf = 1, 2, 1
        labels = self._labels
        while True:
            med = (left[0] + right[0], left[1] + right[1])
            mm = labels.get(med)
            if mm is None:
                mm = 3 * ml * mr - mf
                self.insert(med, mm)
            if med == key:
                return mm
            if p * med[1] < med[0] * q:
                far, mf = right, mr
                right, mr = med, mm
            else:
                far, mf = left, ml
                left, ml = med, mm

    # -- snapshot file: one ``p/q<TAB>m`` record per line --------------------

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            for (p, q), m in sorted(self._labels.items(), key=lambda kv: (kv[0][1], kv[0][0])):
                fh.write(f"{p}/{q}\t{m}\n")

    @classmethod
    def load(cls, path: str | os.PathLike, sample_rate: float = 0.01, seed: int = 0) -> MarkovCache:
        """Read a snapshot, checking the Markov cubic on a random sample of records."""
        records: dict[tuple[int, int], int] = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    frac, label = line.split("\t")
                    f = FareyFraction.parse(frac)
                    records[f.key()] = int(label)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: malformed record {line!r}") from exc
        cache = cls()
        for key in ((0, 1), (1, 1), (1, 0)):
            if key in records and records[key] != cache._labels[key]:
                raise ValueError(f"{path}: wrong base label at {key[0]}/{key[1]}")
        rng = random.Random(seed)
        keys = sorted(k for k in records if k[1] >= 2)
        n = max(1, math.ceil(sample_rate * len(keys))) if keys else 0
        for key in rng.sample(keys, min(n, len(keys))):
            tri = farey_parents(FareyFraction(*key))
            a = records.get(tri.left.key()) or cache.label(tri.left.key())
            c = records.get(tri.right.key()) or cache.label(tri.right.key())
            if not MarkovTriple(a, records[key], c).is_valid():
                raise ValueError(f"{path}: record {key[0]}/{key[1]} fails the Markov cubic")
        cache._labels.update(records)
        return cache


_default_cache = MarkovCache()


def default_cache() -> MarkovCache:
    return _default_cache


def set_default_cache(cache: MarkovCache) -> None:
    global _default_cache
    _default_cache = cache


def load_cache_from_env(var: str = "MARKOV_CACHE") -> Optional[MarkovCache]:
    """Install the snapshot named by ``$MARKOV_CACHE`` as default cache, if set and present."""
    path = os.environ.get(var)
    if not path or not os.path.exists(path):
        return None
    cache = MarkovCache.load(path)
    set_default_cache(cache)
    log.info("loaded %d Markov labels from %s", len(cache), path)
    return cache


def markov_number(f, cache: Optional[MarkovCache] = None) -> int:
    """Markov number ``m_{p/q}`` for ``p/q`` in ``[0, 1]`` or ``1/0``."""
    return (cache or _default_cache).label(f)


def labelled_nodes(max_q: int) -> Iterator[LabelledNode]:
    """Depth-first walk of the Farey tree, yielding every node with ``q <= max_q``.

    Each child label costs one mutation: with ``(x, z, y)`` the labels of
    (left parent, node, right parent), the left child is ``3xz - y`` and the
    right child ``3zy - x``.
    """
    if max_q < 2:
        return
    stack = [((0, 1), (1, 1), 1, 2, 1)]  # left, right, m_left, m_right, m_far
    while stack:
        left, right, ml, mr, mf = stack.pop()
        med = (left[0] + right[0], left[1] + right[1])
        if med[1] > max_q:
            continue
        mm = 3 * ml * mr - mf
        yield LabelledNode(FareyFraction(*med), mm, (ml, mr))
        stack.append((med, right, mm, mr, ml))
        stack.append((left, med, ml, mm, mr))


def label_table(max_q: int, cache: Optional[MarkovCache] = None) -> dict[tuple[int, int], int]:
    """Markov numbers of every coprime sector pair ``(q, p)`` with ``q <= max_q``."""
    cache = cache or _default_cache
    table = {(1, 0): 1, (1, 1): 2} if max_q >= 1 else {}
    for node in labelled_nodes(max_q):
        f = node.fraction
        table[(f.q, f.p)] = node.label
        if f.key() not in cache:
            cache.insert(f.key(), node.label)
    return table


# -- independent oracle: Cohn matrix words ----------------------------------


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def mat_inv(a: Matrix) -> Matrix:
    """Inverse of a determinant-one integer matrix."""
    return (a[3], -a[1], -a[2], a[0])


def cohn_matrix(f) -> Matrix:
    """Word ``W(f)`` with ``W(mediant(a, c)) = W(a) W(c)``."""
    f = as_farey(f)
    if f.is_infinity:
        raise ValueError("no Cohn word at 1/0")
    if f == ZERO:
        return COHN_ZERO
    if f == ONE:
        return COHN_ONE
    lo, hi = (0, 1), (1, 1)
    wl, wh = COHN_ZERO, COHN_ONE
    while True:
        med = (lo[0] + hi[0], lo[1] + hi[1])
        wm = mat_mul(wl, wh)
        if med == (f.p, f.q):
            return wm
        if f.p * med[1] < med[0] * f.q:
            hi, wh = med, wm
        else:
            lo, wl = med, wm


def cohn_trace(f) -> int:
    a = cohn_matrix(f)
    return a[0] + a[3]


# -- Markov distance --------------------------------------------------------


def markov_distance(q: int, p: int, cache: Optional[MarkovCache] = None) -> Fraction:
    """Markov distance of ``(q, p)``: ``c_g / 3`` from a Chebyshev-type recurrence.

    With ``g = gcd(q, p)`` and ``m0`` the label of the primitive part,
    ``c_0 = 2``, ``c_1 = 3 m0``, ``c_{k+1} = 3 m0 c_k - c_{k-1}``.
    """
    if not q >= p >= 0:
        raise ValueError(f"({q},{p}) is outside the sector q >= p >= 0")
    if q == 0:
        raise ValueError("Markov distance of (0,0) is undefined")
    g = math.gcd(q, p)
    m0 = markov_number((p // g, q // g), cache)
    return Fraction(chebyshev_trace(3 * m0, g), 3)


def chebyshev_trace(t: int, g: int) -> int:
    """``c_g`` with ``c_0 = 2``, ``c_1 = t``: the trace of the ``g``-th power."""
    prev, cur = 2, t
    if g == 0:
        return prev
    for _ in range(g - 1):
        prev, cur = cur, t * cur - prev
    return cur


def markov_triple_at(f, cache: Optional[MarkovCache] = None) -> tuple[int, int, int]:
    """``(n1, n, n2) = (m_T(r1/s1), m_T(f), m_T(r2/s2))`` for ``f`` in ``[0, 1/2]``.

    At ``0/1`` the left neighbour is the formal ``1/0`` whose image carries label 1.
    """
    f = as_farey(f)
    if f.is_infinity or 2 * f.p > f.q:
        raise ValueError(f"{f} is outside [0, 1/2]")
    tri = farey_parents(f)
    n = markov_number(t_map_fraction(f), cache)
    n2 = markov_number(t_map_fraction(tri.right), cache)
    n1 = 1 if tri.left is None else markov_number(t_map_fraction(tri.left), cache)
    return (n1, n, n2)
