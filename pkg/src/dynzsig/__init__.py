"""Primitive divisors in orbit sequences of rational maps over Q."""

__version__ = "0.1.0"

from .arith import FactorBudget, coprime_part, factor, is_prime, ord_p
from .dynseq import (
    Mode,
    build_system,
    rank_of_apparition,
    subsequence_disjointness,
    verify_growth_law,
    zsigmondy_set,
)
from .heights import canonical_height, is_preperiodic, norm_growth_report, weil_height
from .modp import orbit_mod_p, prime_divisor_density, strong_conjecture_scan, weak_conjecture_scan
from .ratmap import ProjectivePoint, RationalMap, evaluate, iterate, normalize, parse_map
