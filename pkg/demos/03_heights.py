"""
Canonical heights with certified error
======================================

"""

from fractions import Fraction

import mpmath

from dynzsig import parse_map
from dynzsig.dynseq import build_system
from dynzsig.heights import canonical_height, height_constant, is_preperiodic, norm_growth_report

mpmath.mp.dps = 30

# for z^2 the canonical height is the naive one
print(canonical_height(parse_map("z^2"), Fraction(2, 3), tol=1e-9).to_dict())

phi = parse_map("z^2+z")
print("C_phi =", height_constant(phi).C)
est = canonical_height(phi, 1, tol=1e-8)
print(est.value, "+/-", est.error_bound, "after", est.iterations_used, "steps")

# 0 is a 2-cycle of z^2 - 1, 1/3 wanders off
for x in ["0", "1/3"]:
    v = is_preperiodic(parse_map("z^2-1"), Fraction(x))
    print(x, v.preperiodic, v.cycle, v.height_lower_bound)

# log A_n / 2^n creeps up to the canonical height
rep = norm_growth_report(build_system(phi, Fraction(1, 2), 0), 12)
print(rep.to_csv())
