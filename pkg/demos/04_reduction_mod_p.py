"""
Orbits over finite fields
=========================

"""

from dynzsig import parse_map
from dynzsig.modp import (
    double_index_terms,
    orbit_mod_p,
    prime_divisor_density,
    strong_conjecture_scan,
    tail_cycle_sweep,
    weak_conjecture_scan,
)

f = parse_map("z^2+1")

# 0 -> 1 -> 2 -> 0 mod 5: no tail, a 3-cycle
o = orbit_mod_p(f, 0, 5)
print(o.tail, o.cycle, o.trajectory)

# so 5 divides A_{m,n} = num(phi^{m+n}(0) - phi^m(0)) exactly when 3 | n
grid = double_index_terms(f, 0, 2, 6)
print([(m, n) for (m, n), t in sorted(grid.items()) if t.A % 5 == 0])

sweep = tail_cycle_sweep(f, 0, 6, 6, 100)
print("tail/cycle sweep passed:", sweep.passed, "over", len(sweep.reports), "primes")

print("weak scan:", weak_conjecture_scan(f, 0, 8).zsigmondy_set)
print("strong scan:", strong_conjecture_scan(f, 0, 3, 3).zsigmondy_set)

# how many primes p see 0 come back to 0 mod p?
s = prime_divisor_density(f, 0, 2000)
print(s.count, "of", len(s.rows), "primes, fraction", round(s.fraction, 3))
