"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or directly as a script.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from markov_slopes.arith import (
    Comparison,
    certified_compare,
    enclose_log,
    enclose_sqrt,
)
from markov_slopes.farey import FareyFraction, coprime_pairs, count_coprime_pairs, t_map_fraction
from markov_slopes.fock import (
    graph_to_sphere,
    norm_of_real_point,
    psi_left_derivative,
    psi_right_derivative,
    sigma_minus,
    sigma_minus_closed_form,
    sigma_plus,
    sigma_plus_closed_form,
)
from markov_slopes.markov import MarkovCache, cohn_trace, markov_distance, markov_number
from markov_slopes.norm import stable_norm
from markov_slopes.ordering import Reading, Verdict, support_plane_compare
from markov_slopes.collisions import collision_census
from markov_slopes.verify import run_suite

# tolerances and budgets
CONST_TOL = Fraction(1, 10**30)
EXAMPLE_TOL = Fraction(1, 10**12)
BUDGET = {1: 0.001, 2: 10, 3: 1, 4: 1, 5: 60, 6: 300, 7: 120, 8: 120, 9: 30, 10: 120, 11: 10, 12: 60}


class Outcome:
    def __init__(self):
        self.ok = True
        self.notes = []

    def check(self, cond, note):
        self.ok &= bool(cond)
        if not cond:
            self.notes.append(note)
        return cond


@contextmanager
def criterion(n, title, capsys):
    out = Outcome()
    start = time.perf_counter()
    try:
        yield out
    except Exception as exc:  # report, then let pytest see it
        out.ok = False
        out.notes.append(f"{type(exc).__name__}: {exc}")
        raise
    finally:
        elapsed = time.perf_counter() - start
        out.check(elapsed < BUDGET[n], f"took {elapsed:.3g}s, budget {BUDGET[n]}s")
        status = "PASS" if out.ok else "FAIL"
        line = f"[{status}] criterion {n:2d}: {title} ({elapsed:.3g}s)"
        if out.notes:
            line += " -- " + "; ".join(out.notes)
        with capsys.disabled():
            print("\n" + line)
    assert out.ok, line


def rounds_to(e, digits, text):
    scale = 10**digits
    target = Fraction(text) * scale
    return round(e.lo * scale) == round(e.hi * scale) == target


def test_criterion_01_tree_values(capsys):
    expected = {(0, 1): 1, (1, 1): 2, (1, 2): 5, (1, 3): 13, (2, 3): 29, (2, 5): 194, (3, 5): 433}
    cache = MarkovCache()  # cold: every label is computed by descent
    with criterion(1, "Markov tree values at seven fractions", capsys) as c:
        got = {f: cache.label(f) for f in expected}
        c.check(got == expected, f"got {got}")


def test_criterion_02_cohn_trace_oracle(capsys):
    with criterion(2, "Cohn trace equals 3m for q <= 200", capsys) as c:
        bad = []
        count = 0
        for pair in coprime_pairs(200):
            f = (pair.p, pair.q)
            count += 1
            if cohn_trace(f) != 3 * markov_number(f):
                bad.append(f)
        c.check(not bad, f"mismatches at {bad[:5]}")
        c.check(count == count_coprime_pairs(200), "wrong pair count")


def test_criterion_03_constants(capsys):
    with criterion(3, "sigma constants, closed forms and the two example derivatives", capsys) as c:
        lo, hi = sigma_minus(), sigma_plus()
        c.check(rounds_to(lo, 4, "-1.2417"), f"sigma- = {lo}")
        c.check(rounds_to(hi, 4, "-1.1432"), f"sigma+ = {hi}")
        for name, e, closed in (("sigma-", lo, sigma_minus_closed_form()), ("sigma+", hi, sigma_plus_closed_form())):
            hull = e.hull(closed)
            c.check(e.overlaps(closed) and hull.width < CONST_TOL, f"{name} vs closed form: width {float(hull.width):.3g}")
        left_half = psi_left_derivative(FareyFraction(1, 2))
        c.check(abs(left_half - enclose_log(Fraction(8, 9))).hi < EXAMPLE_TOL, "L(1/2) != log(8/9)")
        r0 = enclose_log(Fraction(3, 2) - enclose_sqrt(5) * Fraction(3, 10))
        c.check(abs(psi_right_derivative(FareyFraction(0, 1)) - r0).hi < EXAMPLE_TOL, "R(0) mismatch")


def test_criterion_04_inequality_chain(capsys):
    with criterion(4, "-5/4 < sigma- < -6/5 < -7/6 < sigma+ < -8/7", capsys) as c:
        chain = [Fraction(-5, 4), sigma_minus, Fraction(-6, 5), Fraction(-7, 6), sigma_plus, Fraction(-8, 7)]
        for a, b in zip(chain, chain[1:]):
            c.check(certified_compare(a, b) is Comparison.LESS, f"{a} < {b} not certified")


def test_criterion_05_aigner(capsys):
    with criterion(5, "Aigner properties (i)-(iii) for q <= 300", capsys) as c:
        report = run_suite("aigner", 300)
        c.check(report.passed, str({k: v for k, v in report.details.items() if k != "pairs_checked"}))


def test_criterion_06_llrs(capsys):
    with criterion(6, "monotone lines at -8/7 and -5/4, antimodal witnesses at -7/6 and -6/5", capsys) as c:
        report = run_suite("llrs", 300)
        d = report.details
        c.check(d["slope -8/7"]["pass"], "slope -8/7 has non-increasing lines")
        c.check(d["slope -5/4"]["pass"], "slope -5/4 has non-decreasing lines")
        for s, found in d["antimodal_witnesses"].items():
            c.check(found, f"no antimodal line at {s}")


def test_criterion_07_support_soundness(capsys):
    with criterion(7, "support-line soundness for q <= 150; inverted ratio fails at ((4,3),(5,2))", capsys) as c:
        report = run_suite("thm14", 150)
        c.check(report.passed, f"contradictions {report.details['contradictions'][:3]}")
        inverted = support_plane_compare((4, 3), (5, 2), Reading.INVERTED)
        wrong = inverted is Verdict.CONCLUDES and markov_distance(4, 3) > markov_distance(5, 2)
        c.check(
            inverted is not Verdict.CONCLUDES or wrong,
            "inverted ratio at ((4,3),(5,2)) is -1, same as the slope, and concludes correctly (169 < 194)",
        )


def test_criterion_08_derivative_oracle(capsys):
    with criterion(8, "finite differences at k=20 within 1e-4, gaps decreasing from k=5, q <= 30", capsys) as c:
        report = run_suite("derivatives", 30)  # k = 20, tolerance 1e-4
        c.check(report.passed, f"failures {report.details['failures'][:3]}")


def test_criterion_09_dehn(capsys):
    with criterion(9, "Dehn twist residuals decay, k = 3..10, factor-100 band", capsys) as c:
        report = run_suite("dehn", 10)
        for s in report.details["samples"]:
            c.check(s["decreasing"], f"{s['fraction']} residuals not decreasing")
            c.check(s["within_band"], f"{s['fraction']} band ratio {s['band_ratio']}")
        c.check(len(report.details["samples"]) == 5, "expected five samples")


def test_criterion_10_convexity(capsys):
    with criterion(10, "strict turning q <= 100, slope ordering and sigma bounds q <= 50", capsys) as c:
        report = run_suite("convexity", 100)
        for key in ("turning_failures", "slope_order_failures", "sigma_bound_failures"):
            c.check(not report.details[key], f"{key}: {report.details[key][:3]}")


def _sample_rationals(n):
    out = []
    q = 1
    while len(out) < n:
        out += [FareyFraction(p, q) for p in range(q // 2 + 1) if math.gcd(p, q) == 1]
        q += 1
    return out[:n]


def test_criterion_11_markov_distance(capsys):
    with criterion(11, "Markov distances, homogeneity, unit norm of the graph map at 50 rationals", capsys) as c:
        c.check(markov_distance(2, 0) == Fraction(7, 3), "(2,0)")
        c.check(markov_distance(2, 2) == Fraction(34, 3), "(2,2)")
        for t in _sample_rationals(50):
            d = t_map_fraction(t)
            v = (d.q, d.p)
            for k in (2, 3):
                c.check(stable_norm(k * v[0], k * v[1]).overlaps(stable_norm(*v) * k), f"homogeneity at {v}, k={k}")
            point = graph_to_sphere(t, 160)
            c.check(norm_of_real_point(point, v, 160).contains(1), f"unit norm fails at t={t}")


def test_criterion_12_census(capsys):
    with criterion(12, "label census q <= 300: multiplicity 1, bucket count matches enumeration", capsys) as c:
        report = collision_census(300)
        direct = sum(1 for q in range(1, 301) for p in range(q + 1) if math.gcd(p, q) == 1)
        c.check(report.max_multiplicity == 1, f"max multiplicity {report.max_multiplicity}")
        c.check(len(report.label_index) == direct == report.pair_count, "bucket count mismatch")


if __name__ == "__main__":
    raise SystemExit(pytest.main(["-v", __file__]))
