"""
Ranks of apparition and the growth of valuations
================================================

"""

from fractions import Fraction

from dynzsig import build_system, parse_map
from dynzsig.arith import ord_p
from dynzsig.dynseq import orbit_terms, rank_of_apparition, subsequence_disjointness, verify_growth_law

# (2z^2 + z^3)/(5 + z) vanishes to order 2 at 0, so valuations double once p appears
s = build_system(parse_map("(2*z^2+z^3)/(5+z)"), 1, 0)
print("e =", s.vanishing_e, "S =", sorted(s.bad_set_S))
A = [t.A for t in orbit_terms(s, 7)]
print("ord_31:", [ord_p(a, 31) for a in A[1:]])
print(rank_of_apparition(s, 31, 7).to_dict())

rep = verify_growth_law(s, 8, 10**4)
print(len(rep.checks), "checks, passed:", rep.passed)

# a 2-cycle target: each good prime sticks to one parity class
d = subsequence_disjointness(build_system(parse_map("z^2-1"), Fraction(1, 3), 0), 10)
print("k =", d.k, "exceptions:", d.exceptions)
