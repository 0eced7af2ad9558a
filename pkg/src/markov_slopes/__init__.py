"""Markov numbers, the stable norm of the modular torus and the slopes of its unit ball."""

from .arith import RealEnclosure, UndecidedAtCap, certified_compare
from .farey import CoprimePair, FareyFraction, farey_parents
from .fock import corner_slopes, psi, psi_left_derivative, psi_right_derivative, sigma_minus, sigma_plus
from .markov import MarkovCache, cohn_trace, markov_distance, markov_number
from .norm import stable_norm
from .ordering import LatticeLine, Mode, find_antimodal, scan_line, support_plane_compare

__version__ = "0.1.0"

__all__ = [
    "CoprimePair",
    "FareyFraction",
    "LatticeLine",
    "MarkovCache",
    "Mode",
    "RealEnclosure",
    "UndecidedAtCap",
    "certified_compare",
    "cohn_trace",
    "corner_slopes",
    "farey_parents",
    "find_antimodal",
    "markov_distance",
    "markov_number",
    "psi",
    "psi_left_derivative",
    "psi_right_derivative",
    "scan_line",
    "sigma_minus",
    "sigma_plus",
    "stable_norm",
    "support_plane_compare",
]
