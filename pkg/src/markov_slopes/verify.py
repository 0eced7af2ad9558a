"""Desk-scale verification suites behind ``markov-slopes verify``.

Each suite returns a :class:`SuiteReport` whose ``details`` hold only
exact or decimal-string data, so reports are reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .arith import UndecidedAtCap, certified_sign, enclose_acosh, enclose_exp
from .farey import FareyFraction, coprime_pairs, t_map_fraction
from .fock import (
    Side,
    adjudicate_radical,
    certified_derivative_gap,
    corner_slopes,
    dehn_asymptotics,
    finite_difference_derivative,
    psi_derivative,
    sigma_minus,
    sigma_plus,
)
from .markov import label_table, markov_number, markov_triple_at
from .norm import sphere_point, turning
from .ordering import (
    Mode,
    Reading,
    Verdict,
    aigner_failures,
    find_antimodal,
    lines_of_slope,
    scan_line,
    support_plane_batch,
    support_plane_compare,
    verify_monotone_regime,
)

SUITES = ("aigner", "llrs", "thm11", "thm14", "dehn", "derivatives", "convexity")


@dataclass
class SuiteReport:
    suite: str
    bound: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "bound": self.bound, "pass": self.passed, "details": self.details}


def run_suite(name: str, bound: int | None = None) -> SuiteReport:
    try:
        fn, default = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(default if bound is None else bound)


# ---------------------------------------------------------------------------


def aigner(bound: int = 300) -> SuiteReport:
    table = label_table(bound)
    fails = aigner_failures(bound, table)
    details = {k: [[list(a), list(b)] for a, b in v[:10]] for k, v in fails.items()}
    details["pairs_checked"] = len(table)
    return SuiteReport("aigner", bound, not any(fails.values()), details)


def lattice_line_regimes(bound: int = 300, k_max: int = 10_000) -> SuiteReport:
    inc = verify_monotone_regime(Fraction(-8, 7), bound)
    dec = verify_monotone_regime(Fraction(-5, 4), bound)
    witnesses = {}
    for s in (Fraction(-7, 6), Fraction(-6, 5)):
        found = find_antimodal(s, 2, k_max, limit=1)
        witnesses[str(s)] = [w.to_dict() for w in found]
    ok = inc.passed and dec.passed and all(witnesses.values())
    return SuiteReport("llrs", bound, ok, {
        "slope -8/7": inc.to_dict(),
        "slope -5/4": dec.to_dict(),
        "antimodal_witnesses": witnesses,
    })


MONOTONE_PANEL = [Fraction(s) for s in ("-3", "-2", "-3/2", "-4/3", "-5/4", "-8/7", "-9/8", "-1", "-1/2", "0", "1/2", "1", "2")]
ANTIMODAL_PANEL = [Fraction(s) for s in ("-6/5", "-7/6", "-11/9", "-13/11", "-17/14")]


def slope_dichotomy(bound: int = 150) -> SuiteReport:
    """Monotone regimes outside [sigma-, sigma+], witnesses inside, and the
    unimodality dichotomy for all-sector scans."""
    details: dict = {"monotone": {}, "antimodal": {}, "dichotomy_violations": []}
    ok = True
    for s in MONOTONE_PANEL:
        rep = verify_monotone_regime(s, bound)
        details["monotone"][str(s)] = {"expected": rep.expected, "pass": rep.passed}
        ok &= rep.passed
    for s in ANTIMODAL_PANEL:
        found = find_antimodal(s, 2, 10_000, limit=1)
        details["antimodal"][str(s)] = [list(w.line.base) for w in found]
        ok &= bool(found)
    for s in MONOTONE_PANEL + ANTIMODAL_PANEL:
        for line in lines_of_slope(s, bound):
            res = scan_line(line, bound, Mode.ALL_SECTOR)
            if res.classification.kind == "Other":
                details["dichotomy_violations"].append(res.to_dict())
    ok &= not details["dichotomy_violations"]
    return SuiteReport("thm11", bound, ok, details)


def support_line_soundness(bound: int = 150) -> SuiteReport:
    """Support-line conclusions never contradict the exact order."""
    pts = [tuple(c) for c in coprime_pairs(bound)]
    table = label_table(bound)
    order = sorted(pts, key=lambda pt: table[pt])
    rank = {pt: i for i, pt in enumerate(order)}
    qs = np.array([q for q, _ in pts], dtype=np.int64)
    ps = np.array([p for _, p in pts], dtype=np.int64)
    ranks = np.array([rank[pt] for pt in pts], dtype=np.int64)
    conclusions = 0
    contradictions = []
    for i, base in enumerate(pts):
        concl = support_plane_batch(base, qs, ps)
        concl[i] = False
        conclusions += int(concl.sum())
        bad = np.flatnonzero(concl & (ranks <= ranks[i]))
        contradictions.extend([list(base), [int(qs[j]), int(ps[j])]] for j in bad[:5])
    # the inverted ratio on a small range, for contrast
    small = [tuple(c) for c in coprime_pairs(min(bound, 12))]
    inverted_bad = [
        [list(b), list(o)]
        for b in small
        for o in small
        if b != o and o[0] != b[0] and o[1] != b[1]
        and support_plane_compare(b, o, Reading.INVERTED) is Verdict.CONCLUDES
        and table[b] > table[o]
    ]
    return SuiteReport("thm14", bound, not contradictions, {
        "pairs": len(pts) * (len(pts) - 1),
        "conclusions": conclusions,
        "contradictions": contradictions[:20],
        "inverted_reading_contradictions": len(inverted_bad),
        "inverted_reading_examples": inverted_bad[:5],
    })


DEHN_SAMPLES = ("1/2", "1/3", "2/5", "1/4", "2/7")


def dehn_check(f, k_lo: int = 3, k_hi: int = 10) -> dict:
    """Residual decay and the factor-100 band for ``residual * exp(2 k ell)``."""
    n = markov_triple_at(f)[1]
    prec = 128 + int(2 * (k_hi + 1) * math.log(3 * n) / math.log(2))
    rows = dehn_asymptotics(f, k_hi, k_min=k_lo, precision_bits=prec)
    residuals = [abs(r.residual) for r in rows]
    decreasing = all(b.certainly_less(a) for a, b in zip(residuals, residuals[1:]))
    ell = enclose_acosh(Fraction(3 * n, 2), prec)
    scaled = [res * enclose_exp(ell * (2 * r.k), prec) for res, r in zip(residuals, rows)]
    lo = min(s.lo for s in scaled)
    hi = max(s.hi for s in scaled)
    band = lo > 0 and hi < 100 * lo
    return {
        "fraction": str(f),
        "decreasing": decreasing,
        "band_ratio": f"{float(hi / lo):.6g}" if lo > 0 else "inf",
        "within_band": band,
        "residuals": [f"{float(r.residual.mid):.6e}" for r in rows],
    }


def dehn(bound: int = 10) -> SuiteReport:
    checks = [dehn_check(FareyFraction.parse(f), 3, max(bound, 4)) for f in DEHN_SAMPLES]
    ok = all(c["decreasing"] and c["within_band"] for c in checks)
    return SuiteReport("dehn", bound, ok, {"samples": checks})


def _fractions_in_domain(bound: int):
    for q in range(1, bound + 1):
        for p in range(0, q // 2 + 1):
            if math.gcd(p, q) == 1:
                yield FareyFraction(p, q)


def derivative_check(f: FareyFraction, side: Side, k_eval: int = 20, k_mono: int = 5, tol=Fraction(1, 10**4)) -> dict:
    fd = finite_difference_derivative(f, side, k_eval)
    cf = psi_derivative(f, side)
    agree = (abs(fd - cf)).hi < tol
    gaps = [certified_derivative_gap(f, side, k, start=_gap_precision(f, k)) for k in range(k_mono, k_eval + 1)]
    monotone = all(b.certainly_less(a) for a, b in zip(gaps, gaps[1:]))
    return {
        "fraction": str(f),
        "side": side.value,
        "agree": agree,
        "monotone_gaps": monotone,
        "gap_at_k": f"{float(gaps[-1].hi):.3e}",
    }


def _gap_precision(f: FareyFraction, k: int) -> int:
    """Rough precision needed to resolve the k-th gap: its size is about exp(-2 k ell)."""
    m = markov_number(t_map_fraction(f))
    ell = math.log(3 * m) if m > 1 else 1.0
    bits = int(2 * k * ell / math.log(2)) + 96
    return 1 << max(7, (bits - 1).bit_length())


def derivatives(bound: int = 30) -> SuiteReport:
    checks = []
    for f in _fractions_in_domain(bound):
        sides = []
        if f.p > 0:
            sides.append(Side.LEFT)
        if 2 * f.p < f.q:
            sides.append(Side.RIGHT)
        for side in sides:
            checks.append(derivative_check(f, side))
    failures = [c for c in checks if not (c["agree"] and c["monotone_gaps"])]
    confirmed = adjudicate_radical(FareyFraction(1, 3)).value
    return SuiteReport("derivatives", bound, not failures, {
        "checked": len(checks),
        "failures": failures,
        "radical_confirmed_by_oracle": confirmed,
    })


def convexity(bound: int = 100, slope_bound: int = 50) -> SuiteReport:
    turning_failures = strict_turning(bound)
    order_failures, bound_failures = slope_ordering(min(slope_bound, bound))
    ok = not (turning_failures or order_failures or bound_failures)
    return SuiteReport("convexity", bound, ok, {
        "turning_failures": turning_failures,
        "slope_order_failures": order_failures,
        "sigma_bound_failures": bound_failures,
    })


def _angle_sorted(bound: int) -> list[tuple[int, int]]:
    pts = [tuple(c) for c in coprime_pairs(bound)]
    pts.sort(key=lambda pt: Fraction(pt[1], pt[0]))
    return pts


def strict_turning(bound: int) -> list:
    """Consecutive sphere points (by angle) must turn strictly left."""
    pts = _angle_sorted(bound)
    failures = []
    for a, b, c in zip(pts, pts[1:], pts[2:]):
        def cross(prec, a=a, b=b, c=c):
            return turning(sphere_point(a, prec), sphere_point(b, prec), sphere_point(c, prec))

        try:
            sign = certified_sign(cross, start=_turn_precision(c))
        except UndecidedAtCap:
            sign = 0
        if sign <= 0:
            failures.append([list(a), list(b), list(c)])
    return failures


def _turn_precision(pt) -> int:
    bits = 6 * pt[0] + 128
    return 1 << max(7, (bits - 1).bit_length())


def slope_ordering(bound: int) -> tuple[list, list]:
    """Two checks over corners with ``q <= bound``, sorted by ``p/q``:
    ``mu+`` at each corner lies below ``mu-`` at every later corner, and
    ``sigma- <= mu- < mu+ <= sigma+`` wherever both slopes exist."""
    pts = _angle_sorted(bound)
    prec = _turn_precision((2 * bound, 0))
    corners = [corner_slopes(pt, prec) for pt in pts]
    s_lo, s_hi = sigma_minus(prec), sigma_plus(prec)
    order_failures, bound_failures = [], []
    prev_plus = None  # largest mu+ upper endpoint so far, with its corner
    for cs in corners:
        if cs.mu_minus is not None and prev_plus is not None and not prev_plus[0] < cs.mu_minus.lo:
            order_failures.append([str(prev_plus[1]), str(cs.at)])
        if cs.mu_plus is not None and (prev_plus is None or cs.mu_plus.hi > prev_plus[0]):
            prev_plus = (cs.mu_plus.hi, cs.at)
        if cs.mu_minus is not None and cs.mu_plus is not None:
            inside = (
                s_lo.hi <= cs.mu_minus.lo
                and cs.mu_minus.certainly_less(cs.mu_plus)
                and cs.mu_plus.hi <= s_hi.lo
            )
            if not inside:
                bound_failures.append(str(cs.at))
    return order_failures, bound_failures


_REGISTRY: dict[str, tuple[Callable[[int], SuiteReport], int]] = {
    "aigner": (aigner, 300),
    "llrs": (lattice_line_regimes, 300),
    "thm11": (slope_dichotomy, 150),
    "thm14": (support_line_soundness, 150),
    "dehn": (dehn, 10),
    "derivatives": (derivatives, 30),
    "convexity": (convexity, 100),
}
