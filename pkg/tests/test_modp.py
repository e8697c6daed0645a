from fractions import Fraction

import pytest

from dynzsig.errors import AlphaPreperiodic, BadReduction
from dynzsig.modp import (
    double_index_terms,
    orbit_mod_p,
    prime_divisor_density,
    reduce_point,
    strong_conjecture_scan,
    strong_coverage_check,
    tail_cycle_sweep,
    verify_tail_cycle_criterion,
    weak_conjecture_scan,
)
from dynzsig.ratmap import has_good_reduction, parse_map

from oracles import frac_orbit, reduce_mod_p, trial_factor

PRIMES = [p for p in range(2, 100) if all(p % q for q in range(2, p))]
FIXTURES = [("z^2+1", "0"), ("z^2+z", "1"), ("z^2-1", "1/3"), ("(2*z^2+z^3)/(5+z)", "1"), ("z^2+z", "1/2"),
            ("3-z+9*z^2", "0")]


def test_orbit_mod_p_examples():
    f = parse_map("z^2+1")
    o5 = orbit_mod_p(f, 0, 5)
    assert (o5.tail, o5.cycle, o5.trajectory) == (0, 3, (0, 1, 2))
    o2 = orbit_mod_p(f, 0, 2)
    assert (o2.tail, o2.cycle) == (0, 2)
    fixed = orbit_mod_p(parse_map("z^2+z"), 0, 7)
    assert fixed.cycle == 1
    with pytest.raises(BadReduction):
        orbit_mod_p(parse_map("z^2/(2*z+3)"), 1, 3)


@pytest.mark.parametrize("text,a", FIXTURES)
def test_trajectory_matches_exact_reduction(text, a):
    phi = parse_map(text)
    for p in PRIMES:
        if not has_good_reduction(phi, p):
            continue
        orb = orbit_mod_p(phi, a, p)
        # exact orbits grow doubly exponentially, so compare only a prefix
        n = min(orb.tail + orb.cycle, 9)
        exact = frac_orbit(phi.numerator.coeffs, phi.denominator.coeffs, Fraction(a), n)
        assert len(orb.trajectory) == orb.tail + orb.cycle
        assert [reduce_mod_p(x, p) for x in exact] == [orb.residue(i) for i in range(n + 1)]
        # minimality: the first repeat closes the cycle
        assert len(set(orb.trajectory)) == len(orb.trajectory)
        assert orb.residue(orb.tail + orb.cycle) == orb.trajectory[orb.tail]


def test_reduce_point():
    assert reduce_point(Fraction(1, 2), 5) == 3
    assert reduce_point(Fraction(1, 5), 5) == 5


def test_double_index_examples():
    g = double_index_terms(parse_map("z^2+1"), 0, 2, 3)
    assert g[(0, 3)].A == 5
    assert g[(1, 1)].A == 1
    h = double_index_terms(parse_map("3-z+3*z^2"), 0, 0, 2)
    assert (h[(0, 1)].A, h[(0, 2)].A) == (3, 27)
    with pytest.raises(AlphaPreperiodic):
        double_index_terms(parse_map("z^2-1"), 0, 2, 2)


@pytest.mark.parametrize("text,a", FIXTURES)
def test_double_index_matches_fraction_oracle(text, a):
    phi = parse_map(text)
    orbit = frac_orbit(phi.numerator.coeffs, phi.denominator.coeffs, Fraction(a), 8)
    grid = double_index_terms(phi, a, 4, 4)
    for (m, n), t in grid.items():
        x, y = orbit[m + n], orbit[m]
        expected = 1 if (x is None or y is None) else abs((x - y).numerator)
        assert t.A == expected


def test_tail_cycle_examples():
    f = parse_map("z^2+1")
    r5 = verify_tail_cycle_criterion(f, 0, 5, 6, 6)
    assert r5.passed and r5.cells_checked == 7 * 6
    row = double_index_terms(f, 0, 0, 6)
    assert [n for n in range(1, 7) if row[(0, n)].A % 5 == 0] == [3, 6]
    assert verify_tail_cycle_criterion(f, 0, 2, 6, 6).passed


@pytest.mark.parametrize("text,a", FIXTURES)
def test_tail_cycle_all_fixtures(text, a):
    sweep = tail_cycle_sweep(parse_map(text), a, 6, 6)
    assert sweep.passed
    assert all(r.cells_checked + len(r.infinity_cells) == 7 * 6 for r in sweep.reports)


def test_tail_cycle_infinity_cells_reported_separately():
    # alpha = 1 under z^2/(2z+3) reaches infinity mod 5, where the congruence criterion says nothing
    sweep = tail_cycle_sweep(parse_map("z^2/(2*z+3)"), 1, 6, 6)
    assert sweep.passed
    assert 3 in sweep.bad_reduction
    r5 = next(r for r in sweep.reports if r.p == 5)
    assert r5.infinity_cells


def test_weak_conjecture_examples():
    rep = weak_conjecture_scan(parse_map("z^2+1"), 0, 6)
    # A_n = phi^n(0) - 0 = 1, 2, 5, 26, ...; A_1 = 1 has no prime at all
    assert rep.zsigmondy_set == [1]
    assert all(r.has_primitive for r in rep.records[2:])
    rep = weak_conjecture_scan(parse_map("3-z+9*z^2"), 0, 3, track_primes=[3])
    assert rep.tracked_valuations[3][1:3] == [1, 4]
    with pytest.raises(AlphaPreperiodic):
        weak_conjecture_scan(parse_map("z^2-1"), 0, 4)


def test_remark_fixture_valuations():
    from dynzsig.dynseq import build_system, zsigmondy_set

    s = build_system(parse_map("z^2-3*z+9"), 3, 0, "relaxed")
    v = zsigmondy_set(s, 3, track_primes=[3]).tracked_valuations[3]
    assert v[:2] == [1, 2]


def test_strong_conjecture_scan():
    f = parse_map("z^2+1")
    rep = strong_conjecture_scan(f, 0, 4, 4)
    grid = double_index_terms(f, 0, 4, 4)
    cells = {(c.m, c.n): c.has_primitive for c in rep.cells}
    assert cells[(0, 1)] == (grid[(0, 1)].A > 1)
    # oracle: literal definition with factored cells
    primes = {k: set(trial_factor(v.A)) for k, v in grid.items()}
    for (m, n), ps in primes.items():
        earlier = set().union(*(primes[(i, j)] for (i, j) in primes if i < m or j < n))
        assert cells[(m, n)] == bool(ps - earlier)
    assert set(rep.zsigmondy_set) == {k for k, v in cells.items() if not v}
    assert "boundary_note" in rep.to_dict()


def test_strong_coverage():
    cov = strong_coverage_check(parse_map("z^2+1"), 0, 6, 6)
    assert cov["uncovered"] == []
    assert cov["covered"]


def test_density_examples():
    f = parse_map("z^2+1")
    s = prime_divisor_density(f, 0, 100, target=0)
    assert 5 in s.to_dict()["dividing_primes"]
    assert 0 <= s.fraction <= 1
    t = prime_divisor_density(f, 0, 200)
    assert 0 <= t.fraction <= 1
    assert t.to_csv().splitlines()[0] == "p,rho,sigma,divides_some_term"


def test_density_matches_exact_divisibility():
    phi = parse_map("z^2+z")
    s = prime_divisor_density(phi, Fraction(1, 2), 300, target=0)
    for row in s.rows:
        p = row.p
        # hand-rolled iteration of x -> x^2 + x on F_p (p odd here: 2 divides the denominator)
        x = pow(2, -1, p) if p != 2 else None
        if x is None:
            continue
        hits = False
        for _ in range(p + 2):
            hits |= x == 0
            x = (x * x + x) % p
        assert hits == row.divides_some_term, p


def test_density_skips_target_at_infinity():
    s = prime_divisor_density(parse_map("z^2+1"), 0, 30, target=Fraction(1, 7))
    assert 7 in s.target_at_infinity and all(r.p != 7 for r in s.rows)


def test_survey_determinism():
    a = prime_divisor_density(parse_map("z^2+1"), 0, 500).to_csv()
    b = prime_divisor_density(parse_map("z^2+1"), 0, 500).to_csv()
    assert a == b
