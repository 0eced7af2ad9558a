"""The Markov ordering on sector lattice points: exact comparison, the
support-line comparator, lattice-line scans and witness searches."""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .arith import (
    DEFAULT_PRECISION,
    PRECISION_CAP,
    Comparison,
    UndecidedAtCap,
    certified_compare,
)
from .farey import CoprimePair
from .fock import CornerSlopes, corner_slopes, sigma_minus, sigma_plus
from .markov import MarkovCache, markov_distance, markov_number

log = logging.getLogger(__name__)


class Order(enum.Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"


def _sector(point) -> tuple[int, int]:
    q, p = point
    if not q >= p >= 0 or q == 0:
        raise ValueError(f"{tuple(point)} is not a nonzero sector point")
    return q, p


def compare_markov(a, b, cache: Optional[MarkovCache] = None) -> Order:
    """Exact comparison of Markov distances; ``LESS`` means ``a`` precedes ``b``."""
    da = markov_distance(*_sector(a), cache=cache)
    db = markov_distance(*_sector(b), cache=cache)
    if da < db:
        return Order.LESS
    if da > db:
        return Order.GREATER
    return Order.EQUAL


# ---------------------------------------------------------------------------
# support-line comparator


class Verdict(enum.Enum):
    CONCLUDES = "ConcludesBasePrecedesOther"
    INCONCLUSIVE = "Inconclusive"


class Reading(enum.Enum):
    """How the segment ratio is formed before comparing with the corner slopes.

    ``SLOPE`` uses ``(p' - p)/(q' - q)``, a dp/dq slope like the corner
    slopes themselves.  ``INVERTED`` uses ``(q' - q)/(p' - p)``; it is kept
    only so its failures can be exhibited.
    """

    SLOPE = "slope"
    INVERTED = "inverted"


@functools.lru_cache(maxsize=100_000)
def _corner(q: int, p: int, precision_bits: int) -> CornerSlopes:
    return corner_slopes((q, p), precision_bits)


def _mu(q: int, p: int, which: str):
    def value(prec: int):
        return getattr(_corner(q, p, prec), which)

    return value


def _ratio(base, other, reading: Reading) -> Optional[Fraction]:
    (q, p), (q2, p2) = base, other
    num, den = (p2 - p, q2 - q) if reading is Reading.SLOPE else (q2 - q, p2 - p)
    return None if den == 0 else Fraction(num, den)


def support_plane_compare(
    base,
    other,
    reading: Reading = Reading.SLOPE,
    start: int = DEFAULT_PRECISION,
    cap: int = PRECISION_CAP,
) -> Verdict:
    """Decide ``base < other`` in the Markov order from corner slopes at ``base``.

    For ``q' < q`` the conclusion needs ``s <= mu_plus``; for ``q' > q`` it
    needs ``s >= mu_minus``.  Comparisons are certified; an undecided one
    yields ``INCONCLUSIVE``.
    """
    base = CoprimePair(*base)
    other = CoprimePair(*other)
    if base == other:
        raise ValueError("base and other coincide")
    (q, p), (q2, p2) = tuple(base), tuple(other)
    s = _ratio((q, p), (q2, p2), reading)
    if reading is Reading.SLOPE and q2 == q:
        # vertical segment: moving up from a corner always leaves the ball
        return Verdict.CONCLUDES if p2 > p else Verdict.INCONCLUSIVE
    if q2 < q:
        if p == q:
            return Verdict.INCONCLUSIVE
        if s is None:
            return Verdict.CONCLUDES  # ratio is -infinity
        c = certified_compare(s, _mu(q, p, "mu_plus"), start, cap)
        ok = c in (Comparison.LESS, Comparison.EQUAL)
    else:
        if p == 0:
            return Verdict.INCONCLUSIVE
        if s is None:
            return Verdict.CONCLUDES  # ratio is +infinity
        c = certified_compare(s, _mu(q, p, "mu_minus"), start, cap)
        ok = c in (Comparison.GREATER, Comparison.EQUAL)
    if c is Comparison.UNDECIDED_AT_CAP:
        log.warning("support comparison %s vs %s undecided at cap", base, other)
    return Verdict.CONCLUDES if ok else Verdict.INCONCLUSIVE


def support_plane_batch(base, others_q: np.ndarray, others_p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vectorised :func:`support_plane_compare` with the ``SLOPE`` reading.

    Float comparisons settle every pair farther than ``tol`` from the
    relevant corner slope; the remaining pairs go through the certified
    scalar path.  Returns a boolean array (True = concludes).
    """
    q, p = base
    oq = np.asarray(others_q, dtype=np.int64)
    op = np.asarray(others_p, dtype=np.int64)
    dq, dp = oq - q, op - p
    out = np.zeros(oq.shape, dtype=bool)
    same = (dq == 0) & (dp == 0)

    vertical = (dq == 0) & ~same
    out[vertical] = dp[vertical] > 0

    cs = _corner(q, p, DEFAULT_PRECISION)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = dp / dq
    undecided = np.zeros(oq.shape, dtype=bool)
    left = dq < 0
    if cs.mu_plus is not None:
        lo, hi = float(cs.mu_plus.lo), float(cs.mu_plus.hi)
        out[left & (s <= lo - tol)] = True
        undecided |= left & (s > lo - tol) & (s < hi + tol)
    right = dq > 0
    if cs.mu_minus is not None:
        lo, hi = float(cs.mu_minus.lo), float(cs.mu_minus.hi)
        out[right & (s >= hi + tol)] = True
        undecided |= right & (s > lo - tol) & (s < hi + tol)
    for i in np.flatnonzero(undecided):
        verdict = support_plane_compare((q, p), (int(oq[i]), int(op[i])))
        out[i] = verdict is Verdict.CONCLUDES
    return out


# ---------------------------------------------------------------------------
# lattice lines


class Mode(enum.Enum):
    ALL_SECTOR = "AllSector"
    COPRIME_ONLY = "CoprimeOnly"


@dataclass(frozen=True)
class LatticeLine:
    """Points ``base + k (v, -u)``; the slope dp/dq is ``-u/v``."""

    u: int
    v: int
    base: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.v <= 0 or math.gcd(self.u, self.v) != 1:
            raise ValueError("direction (v, -u) must be primitive with v > 0")

    @classmethod
    def with_slope(cls, slope, through=(0, 0)) -> LatticeLine:
        s = Fraction(slope)
        return cls(-s.numerator, s.denominator, tuple(through))

    @property
    def slope(self) -> Fraction:
        return Fraction(-self.u, self.v)

    @property
    def level(self) -> int:
        """``u q + v p``, constant along the line."""
        return self.u * self.base[0] + self.v * self.base[1]

    def sector_points(self, q_bound: int) -> list[tuple[int, int]]:
        q0, p0 = self.base
        k_lo = -(q0 // self.v)  # ceil(-q0 / v)
        k_hi = (q_bound - q0) // self.v
        pts = []
        for k in range(k_lo, k_hi + 1):
            q, p = q0 + k * self.v, p0 - k * self.u
            if q >= p >= 0 and q > 0:
                pts.append((q, p))
        return pts


def line_at_level(u: int, v: int, level: int) -> LatticeLine:
    """The line ``u q + v p = level`` with a canonical base point."""
    if u == 0:
        if level % v:
            raise ValueError("level not attained")
        return LatticeLine(0, 1, (0, level // v))
    g, x, y = _ext_gcd(u, v)
    return LatticeLine(u, v, (x * level, y * level))


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _ext_gcd(b, a % b)
    return (g, y, x - (a // b) * y)


@dataclass(frozen=True)
class Classification:
    kind: str  # Trivial | Increasing | Decreasing | StrictlyAntimodal | Other
    j: Optional[int] = None  # 1-based index of the minimum for StrictlyAntimodal

    def __str__(self) -> str:
        return f"{self.kind}({self.j})" if self.kind == "StrictlyAntimodal" else self.kind


def classify(values: Sequence) -> Classification:
    n = len(values)
    if n <= 1:
        return Classification("Trivial")
    diffs = [(b > a) - (b < a) for a, b in zip(values, values[1:])]
    if 0 in diffs:
        return Classification("Other")
    if all(d > 0 for d in diffs):
        return Classification("Increasing")
    if all(d < 0 for d in diffs):
        return Classification("Decreasing")
    j = diffs.index(1)  # first rise; values[j] is the candidate minimum (0-based)
    if all(d > 0 for d in diffs[j:]) and j >= 1:
        return Classification("StrictlyAntimodal", j + 1)
    return Classification("Other")


@dataclass(frozen=True)
class ScanResult:
    line: LatticeLine
    mode: Mode
    points: list[tuple[int, int]]
    distances: list[Fraction]
    classification: Classification

    def to_dict(self) -> dict:
        return {
            "slope": str(self.line.slope),
            "through": list(self.line.base),
            "mode": self.mode.value,
            "points": [list(pt) for pt in self.points],
            "distances": [str(d) for d in self.distances],
            "classification": self.classification.kind,
            "minimum_index": self.classification.j,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScanResult:
        line = LatticeLine.with_slope(Fraction(d["slope"]), tuple(d["through"]))
        return cls(
            line,
            Mode(d["mode"]),
            [tuple(pt) for pt in d["points"]],
            [Fraction(x) for x in d["distances"]],
            Classification(d["classification"], d["minimum_index"]),
        )


def scan_line(line: LatticeLine, q_bound: int, mode: Mode = Mode.ALL_SECTOR, cache: Optional[MarkovCache] = None) -> ScanResult:
    """Markov distances along ``line`` within ``0 <= q <= q_bound``, classified."""
    if q_bound < 1:
        raise ValueError("q_bound must be at least 1")
    mode = Mode(mode)
    pts = line.sector_points(q_bound)
    if mode is Mode.COPRIME_ONLY:
        pts = [pt for pt in pts if math.gcd(*pt) == 1]
        dists = [Fraction(markov_number((p, q), cache)) for q, p in pts]
    else:
        dists = [markov_distance(q, p, cache) for q, p in pts]
    result = ScanResult(line, mode, pts, dists, classify(dists))
    if result.classification.kind == "Other" and len(set(dists)) < len(dists):
        log.warning("tie in Markov distances along %s: %s", line, pts)
    return result


def lines_of_slope(slope, q_bound: int) -> list[LatticeLine]:
    """Every line of the given slope that meets the sector within ``q <= q_bound``."""
    line = LatticeLine.with_slope(slope)
    u, v = line.u, line.v
    levels = set()
    for q in range(1, q_bound + 1):
        for p in range(0, q + 1):
            levels.add(u * q + v * p)
    return [line_at_level(u, v, c) for c in sorted(levels)]


def slope_regime(slope) -> str:
    """``below`` (< sigma_-), ``between`` or ``above`` (> sigma_+), certified."""
    s = Fraction(slope)
    lo = certified_compare(s, sigma_minus)
    hi = certified_compare(s, sigma_plus)
    if Comparison.UNDECIDED_AT_CAP in (lo, hi):
        raise UndecidedAtCap(f"cannot place slope {s} relative to sigma bounds")
    if lo is Comparison.LESS:
        return "below"
    if hi is Comparison.GREATER:
        return "above"
    return "between"


@dataclass
class RegimeReport:
    slope: Fraction
    q_bound: int
    expected: str
    passed: bool
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "slope": str(self.slope),
            "q_bound": self.q_bound,
            "expected": self.expected,
            "pass": self.passed,
            "counts": dict(sorted(self.counts.items())),
            "failures": [r.to_dict() for r in self.failures],
        }


def verify_monotone_regime(slope, q_bound: int, cache: Optional[MarkovCache] = None) -> RegimeReport:
    """Scan every coprime-only line of ``slope`` and check the predicted monotonicity."""
    s = Fraction(slope)
    regime = slope_regime(s)
    if regime == "between":
        raise ValueError(f"slope {s} lies in [sigma_-, sigma_+]; no monotone regime")
    expected = "Decreasing" if regime == "below" else "Increasing"
    report = RegimeReport(s, q_bound, expected, True)
    for line in lines_of_slope(s, q_bound):
        res = scan_line(line, q_bound, Mode.COPRIME_ONLY, cache)
        kind = res.classification.kind
        report.counts[kind] = report.counts.get(kind, 0) + 1
        if kind not in ("Trivial", expected):
            report.passed = False
            report.failures.append(res)
    return report


def find_antimodal(
    slope,
    k_start: int = 2,
    k_max: int = 10_000,
    limit: Optional[int] = None,
    cache: Optional[MarkovCache] = None,
) -> list[ScanResult]:
    """Lines through ``(k, k-1)`` whose coprime-only scan is strictly antimodal.

    Scans ``k = k_start .. k_max`` and stops early once ``limit`` witnesses
    have been found.
    """
    s = Fraction(slope)
    if slope_regime(s) != "between":
        raise ValueError(f"slope {s} is not strictly between sigma_- and sigma_+")
    line0 = LatticeLine.with_slope(s)
    witnesses = []
    for k in range(max(k_start, 1), k_max + 1):
        line = LatticeLine(line0.u, line0.v, (k, k - 1))
        q_end = k + line.v * (((k - 1) // line.u) if line.u > 0 else 0)
        res = scan_line(line, max(q_end, k), Mode.COPRIME_ONLY, cache)
        if res.classification.kind == "StrictlyAntimodal":
            witnesses.append(res)
            if limit is not None and len(witnesses) >= limit:
                break
    return witnesses


# ---------------------------------------------------------------------------
# Aigner's monotonicity statements


def aigner_failures(q_bound: int, table: dict[tuple[int, int], int]) -> dict[str, list]:
    """Violations of the three Aigner monotonicity properties among coprime pairs.

    (i) fixed p, increasing in q; (ii) fixed q, increasing in p;
    (iii) fixed p + q, increasing in q.
    """
    out = {"i": [], "ii": [], "iii": []}

    def check(name, chain: Iterable[tuple[int, int]]):
        chain = [pt for pt in chain if pt in table]
        for a, b in zip(chain, chain[1:]):
            if not table[a] < table[b]:
                out[name].append((a, b))

    for p in range(0, q_bound + 1):
        check("i", ((q, p) for q in range(max(p, 1), q_bound + 1)))
    for q in range(1, q_bound + 1):
        check("ii", ((q, p) for p in range(0, q + 1)))
    for total in range(1, q_bound + 1):
        check("iii", ((q, total - q) for q in range((total + 1) // 2, total + 1)))
    return out
