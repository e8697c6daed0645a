"""
Orbits modulo p and the doubly indexed sequence A_{m,n}, plus scans aimed
at the single- and doubly-indexed Zsigmondy conjectures.

Points of P^1(F_p) are encoded as integers 0..p-1, with p standing for
infinity.

For good reduction at p and phi^m(alpha) finite mod p,

    p | A_{m,n}  <=>  phi^(m+n)(alpha) = phi^m(alpha) in P^1(F_p)
                 <=>  m >= rho and sigma | n,

where (rho, sigma) is the tail/cycle of the reduced orbit.  When
phi^m(alpha) reduces to infinity the difference of two p-adically large
numbers can have any valuation, so those cells are reported separately.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .arith import FactorBudget, coprime_part, digit_count, primes_up_to
from .dynseq import (
    Mode,
    ZsigmondyReport,
    build_system,
    difference_terms,
    zsigmondy_set,
)
from .errors import AlphaPreperiodic, BadReduction
from .heights import is_preperiodic
from .ratmap import ProjectivePoint, RationalMap, _hom_eval, has_good_reduction, iterate

TAIL_CYCLE_PRIME_BOUND = 100


def reduce_point(P, p: int) -> int:
    """Image of P in P^1(F_p), encoded as a residue or p for infinity."""
    P = ProjectivePoint.of(P)
    if P.b % p == 0:
        return p
    return P.a * pow(P.b, -1, p) % p


def _eval_mod(phi: RationalMap, r: int, p: int) -> int:
    x, y = (1, 0) if r == p else (r, 1)
    u = _hom_eval(phi.num, x, y) % p
    v = _hom_eval(phi.den, x, y) % p
    if v == 0:
        return p
    return u * pow(v, -1, p) % p


@dataclass(frozen=True)
class OrbitModP:
    p: int
    tail: int
    cycle: int
    trajectory: tuple[int, ...]

    def residue(self, i: int) -> int:
        """phi^i(alpha) mod p for any i >= 0."""
        if i < len(self.trajectory):
            return self.trajectory[i]
        return self.trajectory[self.tail + (i - self.tail) % self.cycle]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "rho": self.tail,
            "sigma": self.cycle,
            "trajectory": ["inf" if r == self.p else r for r in self.trajectory],
        }


def orbit_mod_p(phi: RationalMap, alpha, p: int) -> OrbitModP:
    if not has_good_reduction(phi, p):
        raise BadReduction(f"phi has bad reduction at p = {p}")
    index: dict[int, int] = {}
    traj = []
    r = reduce_point(alpha, p)
    while r not in index:
        index[r] = len(traj)
        traj.append(r)
        r = _eval_mod(phi, r, p)
    rho = index[r]
    return OrbitModP(p, rho, len(traj) - rho, tuple(traj))


@dataclass(frozen=True)
class DoubleIndexTerm:
    m: int
    n: int
    A: int


def double_index_terms(phi: RationalMap, alpha, M: int, N: int) -> dict[tuple[int, int], DoubleIndexTerm]:
    """A_{m,n} = numerator of phi^(m+n)(alpha) - phi^m(alpha), 0 <= m <= M, 1 <= n <= N."""
    if M < 0 or N < 1:
        raise ValueError("need M >= 0 and N >= 1")
    orbit = iterate(phi, ProjectivePoint.of(alpha), M + N)
    grid = {}
    for m in range(M + 1):
        for n in range(1, N + 1):
            A, _ = difference_terms(orbit[m + n], orbit[m])
            if A == 0:
                raise AlphaPreperiodic(f"phi^{m + n}(alpha) = phi^{m}(alpha)")
            grid[(m, n)] = DoubleIndexTerm(m, n, A)
    return grid


@dataclass
class TailCycleReport:
    p: int
    orbit: OrbitModP
    M: int
    N: int
    mismatches: list[tuple[int, int]] = field(default_factory=list)
    infinity_cells: list[tuple[int, int, bool, bool]] = field(default_factory=list)
    cells_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "rho": self.orbit.tail,
            "sigma": self.orbit.cycle,
            "cells_checked": self.cells_checked,
            "mismatches": [list(c) for c in self.mismatches],
            "infinity_cells": [
                {"m": m, "n": n, "divides": a, "predicted": b} for m, n, a, b in self.infinity_cells
            ],
            "passed": self.passed,
        }


def verify_tail_cycle_criterion(
    phi: RationalMap, alpha, p: int, M: int, N: int, grid=None
) -> TailCycleReport:
    """Exact p | A_{m,n} against m >= rho and sigma | n on the grid m <= M, 1 <= n <= N."""
    orb = orbit_mod_p(phi, alpha, p)
    grid = grid or double_index_terms(phi, alpha, M, N)
    rep = TailCycleReport(p, orb, M, N)
    for m in range(M + 1):
        for n in range(1, N + 1):
            divides = grid[(m, n)].A % p == 0
            predicted = m >= orb.tail and n % orb.cycle == 0
            if orb.residue(m) == p:
                rep.infinity_cells.append((m, n, divides, predicted))
                continue
            rep.cells_checked += 1
            if divides != predicted:
                rep.mismatches.append((m, n))
    return rep


@dataclass
class TailCycleSweep:
    map: str
    alpha: str
    M: int
    N: int
    p_bound: int
    reports: list[TailCycleReport]
    bad_reduction: list[int]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "kind": "tailcycle",
            "map": self.map,
            "alpha": self.alpha,
            "M": self.M,
            "N": self.N,
            "p_bound": self.p_bound,
            "bad_reduction_primes": self.bad_reduction,
            "primes": [r.to_dict() for r in self.reports],
            "exceptions": sum(len(r.mismatches) for r in self.reports),
            "passed": self.passed,
        }


def tail_cycle_sweep(
    phi: RationalMap, alpha, M: int, N: int, p_bound: int = TAIL_CYCLE_PRIME_BOUND
) -> TailCycleSweep:
    """verify_tail_cycle_criterion for every good-reduction prime p < p_bound."""
    grid = double_index_terms(phi, alpha, M, N)
    reports, bad = [], []
    for p in primes_up_to(p_bound - 1):
        if not has_good_reduction(phi, p):
            bad.append(p)
            continue
        reports.append(verify_tail_cycle_criterion(phi, alpha, p, M, N, grid))
    return TailCycleSweep(str(phi), str(ProjectivePoint.of(alpha)), M, N, p_bound, reports, bad)


def _require_wandering(phi: RationalMap, alpha) -> None:
    verdict = is_preperiodic(phi, alpha)
    if verdict.preperiodic:
        raise AlphaPreperiodic(f"alpha = {alpha} has finite orbit {verdict.cycle}")


def weak_conjecture_scan(
    phi: RationalMap, alpha, N: int, factor_budget: FactorBudget | None = None, track_primes=()
) -> ZsigmondyReport:
    """Zsigmondy report for A_n = numerator of phi^n(alpha) - alpha (relaxed, gamma := alpha).

    A_0 = 0 is recorded with hits_gamma and plays no part in stripping.
    """
    _require_wandering(phi, alpha)
    sys_ = build_system(phi, alpha, gamma=alpha, mode=Mode.RELAXED)
    return zsigmondy_set(sys_, N, factor_budget, track_primes)


@dataclass
class StrongCell:
    m: int
    n: int
    A: int
    has_primitive: bool


@dataclass
class StrongReport:
    map: str
    alpha: str
    M: int
    N: int
    cells: list[StrongCell]

    @property
    def zsigmondy_set(self) -> list[tuple[int, int]]:
        return [(c.m, c.n) for c in self.cells if not c.has_primitive]

    def to_dict(self) -> dict:
        return {
            "kind": "strong_conjecture",
            "map": self.map,
            "alpha": self.alpha,
            "M": self.M,
            "N": self.N,
            "definition": "p | A_{m,n} and p divides no A_{i,j} with i < m or j < n",
            "boundary_note": (
                "comparanda with i < m, j > N or j < n, i > M lie outside the grid; "
                "a larger grid can only shrink the primitive cells, so the reported "
                "Zsigmondy set is a subset of the true one restricted to the grid"
            ),
            "cells": [
                {"m": c.m, "n": c.n, "digits_A": digit_count(c.A), "has_primitive": c.has_primitive}
                for c in self.cells
            ],
            "zsigmondy_set": [list(c) for c in self.zsigmondy_set],
        }


def strong_conjecture_scan(
    phi: RationalMap, alpha, M: int, N: int, factor_budget: FactorBudget | None = None
) -> StrongReport:
    """Doubly indexed primitive divisors over the grid 0 <= m <= M, 1 <= n <= N.

    ``factor_budget`` is accepted for interface symmetry; the verdicts only
    need gcd stripping.
    """
    _require_wandering(phi, alpha)
    grid = double_index_terms(phi, alpha, M, N)
    cells = []
    for (m, n), t in sorted(grid.items()):
        A = t.A
        for (i, j), s in grid.items():
            if A == 1:
                break
            if (i < m or j < n) and s.A > 1:
                A = coprime_part(A, s.A)
        cells.append(StrongCell(m, n, t.A, A > 1))
    return StrongReport(str(phi), str(ProjectivePoint.of(alpha)), M, N, cells)


def strong_coverage_check(
    phi: RationalMap, alpha, M: int, N: int, p_bound: int = TAIL_CYCLE_PRIME_BOUND
) -> dict:
    """Every good p < p_bound with (rho_p, sigma_p) <= (M, N) divides some grid cell."""
    grid = double_index_terms(phi, alpha, M, N)
    covered, uncovered, out_of_range = [], [], []
    for p in primes_up_to(p_bound - 1):
        if not has_good_reduction(phi, p):
            continue
        orb = orbit_mod_p(phi, alpha, p)
        if orb.tail > M or orb.cycle > N:
            out_of_range.append(p)
        elif any(t.A % p == 0 for t in grid.values()):
            covered.append(p)
        else:
            uncovered.append(p)
    return {"covered": covered, "uncovered": uncovered, "out_of_range": out_of_range}


@dataclass
class DensityRow:
    p: int
    rho: int
    sigma: int
    divides_some_term: bool


@dataclass
class DensitySurvey:
    map: str
    alpha: str
    target: str
    p_max: int
    rows: list[DensityRow]
    bad_reduction: list[int]
    target_at_infinity: list[int]

    @property
    def count(self) -> int:
        return sum(r.divides_some_term for r in self.rows)

    @property
    def fraction(self) -> float:
        return self.count / len(self.rows) if self.rows else 0.0

    def to_dict(self) -> dict:
        return {
            "kind": "density",
            "map": self.map,
            "alpha": self.alpha,
            "target": self.target,
            "p_max": self.p_max,
            "primes_considered": len(self.rows),
            "count": self.count,
            "fraction": self.fraction,
            "dividing_primes": [r.p for r in self.rows if r.divides_some_term],
            "bad_reduction_primes": self.bad_reduction,
            "target_at_infinity_primes": self.target_at_infinity,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "rho", "sigma", "divides_some_term"])
        for r in self.rows:
            w.writerow([r.p, r.rho, r.sigma, int(r.divides_some_term)])
        return buf.getvalue()


def prime_divisor_density(phi: RationalMap, alpha, p_max: int, target="alpha") -> DensitySurvey:
    """Which good primes p <= p_max divide some A_n, decided on the reduced orbit.

    ``target="alpha"`` is the sequence phi^n(alpha) - alpha (n >= 1): p divides
    a term iff alpha is purely periodic mod p.  A rational target gamma gives
    phi^n(alpha) - gamma (n >= 0): p divides a term iff the reduced orbit meets
    gamma mod p.  Primes where gamma reduces to infinity are listed, not counted.
    """
    alpha = ProjectivePoint.of(alpha)
    gamma = None if target == "alpha" else ProjectivePoint.of(target)
    rows, bad, at_inf = [], [], []
    for p in primes_up_to(p_max):
        if not has_good_reduction(phi, p):
            bad.append(p)
            continue
        if gamma is not None and gamma.b % p == 0:
            at_inf.append(p)
            continue
        orb = orbit_mod_p(phi, alpha, p)
        if gamma is None:
            hit = orb.tail == 0
        else:
            hit = reduce_point(gamma, p) in orb.trajectory
        rows.append(DensityRow(p, orb.tail, orb.cycle, hit))
    return DensitySurvey(
        str(phi), str(alpha), "alpha" if gamma is None else str(gamma), p_max, rows, bad, at_inf
    )
