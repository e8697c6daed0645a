"""
Orbit sequences and their Zsigmondy sets
========================================

"""

from fractions import Fraction

from dynzsig import parse_map
from dynzsig.dynseq import build_system, orbit_terms, zsigmondy_set

# the map z^2 + z fixes 0, and the numerators of phi^n(1) are 1, 2, 6, 42, 1806, ...
phi = parse_map("z^2+z")
s = build_system(phi, 1, 0)
print(s.period_k, s.vanishing_e, sorted(s.bad_set_S))
for t in orbit_terms(s, 5):
    print(t.n, t.A)

# every term past the seed picks up a new prime
rep = zsigmondy_set(s, 12)
print("Zsigmondy set:", rep.zsigmondy_set)
for r in rep.records[1:6]:
    print(r.n, r.witness_primes)

# z^2/(1+z) is of polynomial type at 0: A_n is a power of 2, so nothing is ever primitive
r = zsigmondy_set(build_system(parse_map("z^2/(1+z)"), Fraction(2, 3), 0, "relaxed"), 8)
print("polynomial type:", r.zsigmondy_set)
