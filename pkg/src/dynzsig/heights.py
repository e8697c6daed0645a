"""
Weil and canonical heights on P^1(Q), preperiodicity certificates, and
numerical companions to the norm-growth estimates for A_n.

All real arithmetic runs at 100 significant decimal digits through mpmath.

The canonical height comes with a certified error bound.  If
|h(phi(Q)) - d h(Q)| <= C for every Q, telescoping gives

    | hhat(P) - h(phi^n(P)) / d^n | <= C / (d^n (d - 1)).

C is assembled from two explicit pieces:

* upper: h(phi(Q)) <= d h(Q) + log max(|F|_1, |G|_1)  (triangle inequality)
* lower: R X^(2d-1) = f F + g G and R Y^(2d-1) = f' F + g' G with integer
  forms of degree d-1, read off the adjugate of the linear map
  (f, g) -> f F + g G.  Since gcd(F(x, y), G(x, y)) divides R this yields
  h(phi(Q)) >= d h(Q) - log max(|f|_1 + |g|_1, |f'|_1 + |g'|_1).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from .arith import coprime_part, digit_count
from .errors import Undecided
from .ratmap import ProjectivePoint, RationalMap, evaluate

WORKING_DPS = 100
DEFAULT_MAX_BITS = 8_000_000


def _log_int(n: int) -> mpf:
    return mpmath.log(mpf(n))


def weil_height(P) -> mpf:
    """h(a/b) = log max(|a|, |b|); h(inf) = 0."""
    P = ProjectivePoint.of(P)
    with mpmath.workdps(WORKING_DPS):
        return +_log_int(max(abs(P.a), P.b))


@dataclass(frozen=True)
class HeightConstant:
    upper: mpf
    lower: mpf

    @property
    def C(self) -> mpf:
        return max(self.upper, self.lower)


def _solve_adjugate_column(M: list[list[int]], j: int) -> tuple[int, list[int]]:
    """(det M, adj(M) e_j) by exact Gaussian elimination over Q."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(1 if r == j else 0)] for r, row in enumerate(M)]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return 0, [0] * n
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c] / A[c][c]
                for k in range(c, n + 1):
                    A[r][k] -= f * A[c][k]
    x = [A[r][n] / A[r][r] for r in range(n)]
    adj = [xi * det for xi in x]
    assert all(v.denominator == 1 for v in adj)
    return int(det), [int(v) for v in adj]


@lru_cache(maxsize=64)
def height_constant(phi: RationalMap) -> HeightConstant:
    """Certified C_phi with |h(phi(Q)) - d h(Q)| <= C_phi for all Q in P^1(Q)."""
    d = phi.degree
    F, G = phi.num, phi.den
    # columns: f_0..f_{d-1}, g_0..g_{d-1}; rows: coefficient of X^r Y^(2d-1-r)
    M = [[0] * (2 * d) for _ in range(2 * d)]
    for i in range(d):
        for l in range(d + 1):
            M[i + l][i] += F[l]
            M[i + l][d + i] += G[l]
    worst = 0
    for j in (0, 2 * d - 1):
        det, v = _solve_adjugate_column(M, j)
        if det == 0:
            raise ValueError("map is degenerate")
        worst = max(worst, sum(abs(x) for x in v))
    with mpmath.workdps(WORKING_DPS):
        upper = _log_int(max(sum(abs(c) for c in F), sum(abs(c) for c in G)))
        lower = _log_int(worst)
    return HeightConstant(upper=upper, lower=lower)


def periodic_height_bound(phi: RationalMap) -> mpf:
    """C_phi/(d-1) plus a hair: no preperiodic point has larger Weil height."""
    with mpmath.workdps(WORKING_DPS):
        return height_constant(phi).C / (phi.degree - 1) + mpf(10) ** (-WORKING_DPS // 2)


@dataclass
class HeightEstimate:
    value: mpf
    error_bound: mpf
    iterations_used: int
    max_iterations: bool = False

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "error_bound": float(self.error_bound),
            "iterations_used": self.iterations_used,
            "max_iterations": self.max_iterations,
        }


def canonical_height(
    phi: RationalMap, P, tol: float = 1e-6, max_bits: int = DEFAULT_MAX_BITS
) -> HeightEstimate:
    """hhat_phi(P) to within ``tol`` (or flagged when orbit sizes exceed ``max_bits``).

    An orbit that revisits a point within the bounded-height region is
    preperiodic, and then the answer is exactly 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = phi.degree
    if d < 2:
        raise ValueError("canonical height needs degree >= 2")
    Q = ProjectivePoint.of(P)
    with mpmath.workdps(WORKING_DPS):
        C = height_constant(phi).C
        tol = mpf(tol)
        bound = C / (d - 1)
        seen = set()
        n = 0
        while True:
            h = _log_int(max(abs(Q.a), Q.b))
            err = C / (mpf(d) ** n * (d - 1))
            if err <= tol:
                return HeightEstimate(+(h / mpf(d) ** n), +err, n)
            if h <= bound:
                if Q in seen:
                    return HeightEstimate(mpf(0), mpf(0), n)
                seen.add(Q)
            if max(abs(Q.a), Q.b).bit_length() > max_bits:
                return HeightEstimate(+(h / mpf(d) ** n), +err, n, max_iterations=True)
            Q = evaluate(phi, Q)
            n += 1


@dataclass
class PreperiodicityVerdict:
    preperiodic: bool
    cycle: tuple[int, int] | None = None
    height_lower_bound: mpf | None = None
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "preperiodic": self.preperiodic,
            "cycle": list(self.cycle) if self.cycle else None,
            "height_lower_bound": (
                float(self.height_lower_bound) if self.height_lower_bound is not None else None
            ),
            "iterations": self.iterations,
        }


def is_preperiodic(phi: RationalMap, P, max_iterations: int = 64) -> PreperiodicityVerdict:
    """Certify finite orbit (a repeat phi^m(P) = phi^m'(P)) or infinite orbit.

    Infinite orbit is certified once h(phi^n(P)) exceeds C/(d-1), the height
    bound every preperiodic point obeys; then hhat(P) is at least
    (h(phi^n P) - C/(d-1)) / d^n > 0.
    """
    d = phi.degree
    Q = ProjectivePoint.of(P)
    seen: dict[ProjectivePoint, int] = {}
    with mpmath.workdps(WORKING_DPS):
        bound = periodic_height_bound(phi)
        for n in range(max_iterations + 1):
            if Q in seen:
                return PreperiodicityVerdict(True, (seen[Q], n), iterations=n)
            seen[Q] = n
            h = _log_int(max(abs(Q.a), Q.b))
            if h > bound:
                lower = (h - bound) / mpf(d) ** n
                return PreperiodicityVerdict(False, None, +lower, iterations=n)
            Q = evaluate(phi, Q)
    raise Undecided(f"no certificate for {P} within {max_iterations} iterations")


def prime_to_S_norm(n: int, S) -> int:
    """The part of n supported outside the primes in S."""
    m = 1
    for p in S:
        m *= p
    return coprime_part(n, m) if m > 1 else abs(n)


@dataclass
class NormGrowthRow:
    n: int
    digits_A: int
    log_A: mpf | None
    log_NS_A: mpf | None
    log_A_over_dn: mpf | None
    upper_bound: mpf
    upper_ok: bool


@dataclass
class NormGrowthReport:
    system: dict
    hhat: HeightEstimate
    C_phi: mpf
    rows: list[NormGrowthRow] = field(default_factory=list)

    @property
    def upper_bound_holds(self) -> bool:
        return all(r.upper_ok for r in self.rows)

    def to_dict(self) -> dict:
        hh = float(self.hhat.value)

        def f(x):
            return None if x is None else float(x)

        return {
            "kind": "norm_growth",
            "system": self.system,
            "hhat": self.hhat.to_dict(),
            "C_phi": float(self.C_phi),
            "upper_bound_holds": self.upper_bound_holds,
            "rows": [
                {
                    "n": r.n,
                    "digits_A": r.digits_A,
                    "log_A": f(r.log_A),
                    "log_NS_A": f(r.log_NS_A),
                    "log_A_over_dn": f(r.log_A_over_dn),
                    "hhat": hh,
                    "err": float(self.hhat.error_bound),
                    "ratio": (float(r.log_A_over_dn) / hh if hh > 0 and r.log_A_over_dn is not None else None),
                    "upper_bound": float(r.upper_bound),
                    "upper_ok": r.upper_ok,
                }
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "digits_A", "log_A_over_dn", "hhat", "err"])
        for row in self.to_dict()["rows"]:
            w.writerow([row["n"], row["digits_A"], repr(row["log_A_over_dn"]), repr(row["hhat"]), repr(row["err"])])
        return buf.getvalue()


def norm_growth_report(sys_, N: int, tol: float = 1e-6) -> NormGrowthReport:
    """Rows (n, log N_S A_n, log A_n / d^n) against hhat, with the upper bound

        log A_n <= d^n (hhat + err) + C_psi / (d - 1)

    where psi is phi conjugated so the target is 0 (A_n are psi's numerators).
    """
    from .dynseq import orbit_terms

    psi = sys_.shifted
    d = psi.degree
    start = sys_.alpha
    if not start.is_infinity:
        start = ProjectivePoint.of(start.as_fraction() - sys_.gamma.as_fraction())
    est = canonical_height(psi, start, tol=tol)
    S = sys_.bad_set_S or frozenset()
    rows = []
    with mpmath.workdps(WORKING_DPS):
        C = height_constant(psi).C
        slack = C / (d - 1)
        for t in orbit_terms(sys_, N):
            dn = mpf(d) ** t.n
            ub = dn * (est.value + est.error_bound) + slack
            if t.A == 0:
                rows.append(NormGrowthRow(t.n, 1, None, None, None, ub, True))
                continue
            logA = _log_int(t.A)
            logNS = _log_int(prime_to_S_norm(t.A, S))
            rows.append(
                NormGrowthRow(t.n, digit_count(t.A), logA, logNS, logA / dn, ub, bool(logA <= ub))
            )
    return NormGrowthReport(sys_.describe(), est, C, rows)


def archimedean_proximity(sys_, N: int) -> list[mpf]:
    """log max(1, 1/|phi^n(alpha) - gamma|) / d^n for n = 0..N."""
    from .dynseq import orbit_terms

    d = sys_.degree
    out = []
    with mpmath.workdps(WORKING_DPS):
        for t in orbit_terms(sys_, N):
            if t.B == 0:
                out.append(mpf(0))
            elif t.A == 0:
                out.append(mpmath.inf)
            else:
                v = _log_int(t.B) - _log_int(t.A)
                out.append(+(max(v, mpf(0)) / mpf(d) ** t.n))
    return out
