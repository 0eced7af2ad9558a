from fractions import Fraction

import mpmath
import pytest


def mp_to_fraction(x: mpmath.mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


def encloses(e, x: mpmath.mpf, slack_bits: int = 20) -> bool:
    """True if the enclosure contains the mpmath value, allowing for mpmath's own rounding."""
    v = mp_to_fraction(x)
    tol = abs(v) * Fraction(1, 2 ** (mpmath.mp.prec - slack_bits)) + Fraction(1, 2 ** (mpmath.mp.prec * 2))
    return e.lo - tol <= v <= e.hi + tol


@pytest.fixture(autouse=True)
def _mp_precision():
    with mpmath.workprec(600):
        yield
