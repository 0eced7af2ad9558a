"""Command-line entry point: ``markov-slopes <subcommand> ...``.

Every invocation prints one JSON document on stdout.  Exit status is 0 on
success, 2 for usage errors and 3 when a certified comparison stalls at the
precision cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .arith import DEFAULT_PRECISION, PRECISION_CAP, RealEnclosure, UndecidedAtCap, refine_until
from .collisions import collision_census
from .farey import FareyFraction, tree_path
from .fock import Side, corner_slopes, psi, psi_derivative, sigma_minus, sigma_plus
from .markov import load_cache_from_env, markov_distance, markov_number
from .ordering import LatticeLine, Mode, find_antimodal, scan_line
from .render import ball_svg
from .verify import SUITES, run_suite

EXIT_USAGE = 2
EXIT_UNDECIDED = 3


class UsageError(Exception):
    pass


def enclosure_json(e: Optional[RealEnclosure]):
    """``[lo, hi]`` as exact decimal strings plus the precision; ``None`` stays null."""
    if e is None:
        return None
    lo, hi = e.to_strings()
    return {"interval": [lo, hi], "precision_bits": e.precision_bits}


def enclosure_from_json(d) -> Optional[RealEnclosure]:
    if d is None:
        return None
    lo, hi = d["interval"]
    return RealEnclosure(Fraction(lo), Fraction(hi), d["precision_bits"])


def _fraction(text: str) -> FareyFraction:
    try:
        return FareyFraction.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid rational {text!r}") from None


def _point(text: str) -> tuple[int, int]:
    try:
        q, p = (int(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"expected q,p but got {text!r}") from None
    return q, p


def _rounded(e_at, digits: int, start: int) -> str:
    """Correctly rounded decimal, refining until both endpoints round alike."""
    scale = 10**digits

    def settled(e):
        return round(e.lo * scale) == round(e.hi * scale)

    bits = max(start, int(digits * 3.33) + 32)
    e = refine_until(e_at, settled, bits, PRECISION_CAP)
    n = round(e.lo * scale)
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


# ---------------------------------------------------------------------------
# subcommands; each returns (inputs, results)


def cmd_markov(args):
    if args.pair is not None:
        q, p = args.pair
        if not q >= p >= 0 or q == 0:
            raise UsageError("--pair needs q >= p >= 0 and q > 0")
        return {"pair": [q, p]}, {"markov_distance": str(markov_distance(q, p))}
    if args.fraction is None:
        raise UsageError("give a fraction p/q or --pair q p")
    f = _fraction(args.fraction)
    if f.is_infinity or f.p > f.q:
        raise UsageError("fraction must lie in [0, 1]")
    path = tree_path(f) if f.q > 1 else None  # the roots have no path
    return {"fraction": str(f)}, {"markov_number": str(markov_number(f)), "tree_path": path}


def cmd_psi(args):
    f = _fraction(args.fraction)
    if f.is_infinity or 2 * f.p > f.q:
        raise UsageError("Psi is defined on [0, 1/2]")
    inputs = {"fraction": str(f), "deriv": args.deriv}
    try:
        if args.deriv is None:
            return inputs, {"psi": enclosure_json(psi(f, args.prec))}
        value = psi_derivative(f, Side(args.deriv), args.prec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return inputs, {"derivative": enclosure_json(value)}


def cmd_slopes(args):
    q, p = args.q, args.p
    if not q >= p >= 0 or q == 0:
        raise UsageError("need q >= p >= 0 with q > 0")
    try:
        cs = corner_slopes((q, p), args.prec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"q": q, "p": p}, {
        "mu_minus": enclosure_json(cs.mu_minus),
        "mu_plus": enclosure_json(cs.mu_plus),
        "ell": enclosure_json(cs.ell),
        "L": enclosure_json(cs.L),
        "R": enclosure_json(cs.R),
    }


def cmd_sigma(args):
    if args.digits < 0:
        raise UsageError("--digits must be non-negative")
    return {"digits": args.digits}, {
        "sigma_minus": _rounded(sigma_minus, args.digits, args.prec),
        "sigma_plus": _rounded(sigma_plus, args.digits, args.prec),
        "sigma_minus_enclosure": enclosure_json(sigma_minus(args.prec)),
        "sigma_plus_enclosure": enclosure_json(sigma_plus(args.prec)),
    }


def cmd_scan_line(args):
    slope = _rational(args.slope)
    through = _point(args.through)
    if args.bound < 1:
        raise UsageError("--bound must be positive")
    line = LatticeLine.with_slope(slope, through)
    mode = Mode.COPRIME_ONLY if args.coprime else Mode.ALL_SECTOR
    res = scan_line(line, args.bound, mode)
    return {"slope": str(slope), "through": list(through), "coprime": args.coprime, "bound": args.bound}, res.to_dict()


def cmd_find_antimodal(args):
    slope = _rational(args.slope)
    try:
        found = find_antimodal(slope, args.kstart, args.kmax, args.limit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inputs = {"slope": str(slope), "kstart": args.kstart, "kmax": args.kmax, "limit": args.limit}
    return inputs, {"witnesses": [w.to_dict() for w in found]}


def cmd_verify(args):
    report = run_suite(args.suite, args.bound)
    return {"suite": args.suite, "bound": report.bound}, report.to_dict()


def cmd_census(args):
    if args.bound < 1:
        raise UsageError("--bound must be positive")
    return {"bound": args.bound}, collision_census(args.bound).to_dict()


def cmd_ball_svg(args):
    if args.bound < 1:
        raise UsageError("--bound must be positive")
    svg = ball_svg(args.bound, args.stubs, max(args.prec, 128))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return {"bound": args.bound, "out": args.out}, {"bytes": len(svg.encode())}


# ---------------------------------------------------------------------------


def _precision(text: str) -> int:
    try:
        bits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid precision {text!r}") from None
    if not 16 <= bits <= PRECISION_CAP:
        raise argparse.ArgumentTypeError(f"precision must be between 16 and {PRECISION_CAP} bits")
    return bits


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="markov-slopes", description="Markov numbers, Fock's function and the stable-norm ball.")
    parser.add_argument("--prec", type=_precision, default=DEFAULT_PRECISION, help="working precision in bits (default 128)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("markov", help="Markov number of p/q, or Markov distance of a pair")
    p.add_argument("fraction", nargs="?")
    p.add_argument("--pair", nargs=2, type=int, metavar=("Q", "P"))
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("psi", help="Psi(p/q) or a one-sided derivative")
    p.add_argument("fraction")
    p.add_argument("--deriv", choices=[s.value for s in Side])
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("slopes", help="corner slopes of the unit ball at (q, p)")
    p.add_argument("q", type=int)
    p.add_argument("p", type=int)
    p.set_defaults(func=cmd_slopes)

    p = sub.add_parser("sigma", help="the limiting slopes sigma- and sigma+")
    p.add_argument("--digits", type=int, default=20)
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("scan-line", help="Markov distances along a lattice line")
    p.add_argument("--slope", required=True)
    p.add_argument("--through", required=True, metavar="Q0,P0")
    p.add_argument("--coprime", action="store_true", help="keep only primitive points")
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_scan_line)

    p = sub.add_parser("find-antimodal", help="strictly antimodal lines through (k, k-1)")
    p.add_argument("--slope", required=True)
    p.add_argument("--kmax", type=int, default=200)
    p.add_argument("--kstart", type=int, default=2)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_find_antimodal)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", help="Markov-label multiplicities")
    p.add_argument("--bound", type=int, default=300)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("ball-svg", help="write an SVG of the unit sphere")
    p.add_argument("--bound", type=int, default=30)
    p.add_argument("--stubs", type=int, default=None, help="draw tangent stubs for q up to this (default min(bound, 12))")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ball_svg)
    return parser


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse reads "-7/6" as an option; attach it to the flag instead
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok == "--slope" and out[i + 1].startswith("-"):
            out[i] = f"--slope={out[i + 1]}"
            out[i + 1] = None
    return [t for t in out if t is not None]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    load_cache_from_env()

    start = time.perf_counter()
    try:
        inputs, results = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"markov-slopes {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UndecidedAtCap as exc:
        print(f"markov-slopes {args.command}: precision cap reached: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    elapsed = time.perf_counter() - start

    record = {
        "command": ["markov-slopes", *argv],
        "inputs": {"prec": args.prec, **inputs},
        "results": results,
        "timing": {"seconds": round(elapsed, 6)},
    }
    json.dump(record, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
