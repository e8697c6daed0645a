"""
Orbit numerator sequences A_n of phi^n(alpha) - gamma and their primitive
divisors. Ranks of apparition, the p-adic growth law and the period-k
subsequence disjointness are checked on top of these.

Ideals over Q are positive integers here: A_n is the absolute value of the
numerator of phi^n(alpha) - gamma in lowest terms, B_n its denominator.
When phi^n(alpha) is infinity, A_n = 1 and B_n = 0.

Primitive-divisor existence never needs a factorization.  A_n has a
primitive divisor iff something survives after stripping from A_n every
prime shared with A_0, ..., A_{n-1}, which is a chain of gcds.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

from .arith import (
    FactorBudget,
    coprime_part,
    digit_count,
    factor,
    gcd,
    ord_p,
    small_prime_divisors,
)
from .errors import (
    AlphaPreperiodic,
    DegreeTooSmall,
    DynZsigError,
    GammaNotPeriodic,
    OrbitHitsGamma,
    PeriodOne,
    PolynomialType,
    ZeroTerm,
)
from .ratmap import (
    DEFAULT_PERIOD_BOUND,
    ProjectivePoint,
    RationalMap,
    bad_primes,
    conjugate_translation,
    detect_period,
    evaluate,
    is_polynomial_type,
    iterate_map,
    vanishing_order,
)


class Mode(str, enum.Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


@dataclass(frozen=True)
class OrbitTerm:
    n: int
    value: ProjectivePoint
    A: int
    B: int

    @property
    def hits_gamma(self) -> bool:
        return self.A == 0


def difference_terms(P: ProjectivePoint, Q: ProjectivePoint) -> tuple[int, int]:
    """(|numerator|, denominator) of P - Q in lowest terms; infinity gives (1, 0).

    Q must be finite.  Uses gcd(num, b*e) | gcd(b, e)^2 to keep the gcd
    small when P is huge.
    """
    if P.is_infinity:
        return 1, 0
    a, b = P.a, P.b
    c, e = Q.a, Q.b
    if c == 0:
        return abs(a), b
    num = a * e - c * b
    den = b * e
    t = gcd(b, e)
    if t > 1:
        g = gcd(gcd(num % (t * t), t * t), den)
        if g > 1:
            num //= g
            den //= g
    return abs(num), den


@dataclass(eq=False)
class DynSystem:
    """A validated (phi, alpha, gamma) with memoized orbit terms.

    ``shifted`` is phi conjugated by z -> z + gamma (so the target sits at
    0), ``return_map`` its k-th iterate.  In relaxed mode the period data
    are filled in only when gamma happens to be periodic.
    """

    phi: RationalMap
    alpha: ProjectivePoint
    gamma: ProjectivePoint
    mode: Mode = Mode.STRICT
    period_k: int | None = None
    vanishing_e: int | None = None
    bad_set_S: frozenset[int] | None = None
    shifted: RationalMap | None = None
    return_map: RationalMap | None = None
    _orbit: list[ProjectivePoint] = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def degree(self) -> int:
        return self.phi.degree

    def orbit(self, N: int) -> list[ProjectivePoint]:
        """phi^n(alpha) for n = 0..N (cached, extended under a lock)."""
        with self._lock:
            if not self._orbit:
                self._orbit.append(self.alpha)
            while len(self._orbit) <= N:
                self._orbit.append(evaluate(self.phi, self._orbit[-1]))
            return self._orbit[: N + 1]

    def describe(self) -> dict:
        return {
            "map": str(self.phi),
            "alpha": str(self.alpha),
            "gamma": str(self.gamma),
            "mode": self.mode.value,
            "degree": self.degree,
            "period_k": self.period_k,
            "vanishing_e": self.vanishing_e,
            "bad_set_S": sorted(self.bad_set_S) if self.bad_set_S is not None else None,
        }


def build_system(
    phi: RationalMap,
    alpha,
    gamma=0,
    mode: Mode | str = Mode.STRICT,
    *,
    k_max: int = DEFAULT_PERIOD_BOUND,
    preperiodic_iterations: int = 64,
) -> DynSystem:
    """Validate the theorem's hypotheses (strict) or just package the data (relaxed)."""
    from .heights import is_preperiodic

    mode = Mode(mode)
    alpha = ProjectivePoint.of(alpha)
    gamma = ProjectivePoint.of(gamma)
    if phi.degree < 2:
        raise DegreeTooSmall(f"degree {phi.degree} < 2")
    if gamma.is_infinity:
        raise DynZsigError("the target gamma must be a finite rational")

    k = detect_period(phi, gamma, k_max)
    if mode is Mode.STRICT:
        if k is None:
            raise GammaNotPeriodic(f"{gamma} is not periodic with period <= {k_max}")
        if is_polynomial_type(phi, gamma, k):
            raise PolynomialType(f"phi is of polynomial type at {gamma}")
        verdict = is_preperiodic(phi, alpha, max_iterations=preperiodic_iterations)
        if verdict.preperiodic:
            raise AlphaPreperiodic(f"alpha = {alpha} has finite orbit {verdict.cycle}")
    elif k is not None and is_polynomial_type(phi, gamma, k):
        k = None

    sys_ = DynSystem(phi=phi, alpha=alpha, gamma=gamma, mode=mode)
    sys_.shifted = conjugate_translation(phi, gamma.as_fraction())
    if k is not None:
        sys_.period_k = k
        sys_.return_map = iterate_map(sys_.shifted, k)
        sys_.vanishing_e = vanishing_order(sys_.return_map)
        sys_.bad_set_S = bad_primes(sys_.return_map)
        if mode is Mode.STRICT:
            assert 0 < sys_.vanishing_e < phi.degree**k
    return sys_


def orbit_terms(sys_: DynSystem, N: int) -> list[OrbitTerm]:
    """(A_n, B_n) for n = 0..N."""
    out = []
    for n, P in enumerate(sys_.orbit(N)):
        A, B = difference_terms(P, sys_.gamma)
        if A == 0 and sys_.mode is Mode.STRICT:
            raise OrbitHitsGamma(f"phi^{n}(alpha) = gamma")
        out.append(OrbitTerm(n, P, A, B))
    return out


def primitive_part(n: int, terms: list[OrbitTerm]) -> int:
    """A_n with every prime of A_0..A_{n-1} stripped out."""
    A = terms[n].A
    if A == 0:
        raise ZeroTerm(f"A_{n} = 0")
    # the most recent terms share the most primes; strip them first
    for i in range(n - 1, -1, -1):
        if A == 1:
            break
        Ai = terms[i].A
        if Ai > 1:
            A = coprime_part(A, Ai)
    return A


def has_primitive_divisor(sys_: DynSystem, n: int, terms: list[OrbitTerm] | None = None) -> bool:
    if terms is None:
        terms = orbit_terms(sys_, n)
    return primitive_part(n, terms) > 1


@dataclass
class TermRecord:
    n: int
    A: int
    has_primitive: bool | None
    witness_primes: tuple[int, ...] = ()
    residual_composite: int | None = None
    hits_gamma: bool = False

    def to_dict(self, full_integers: bool = False) -> dict:
        d = {
            "n": self.n,
            "digits_A": digit_count(self.A),
            "has_primitive": self.has_primitive,
            "witness_primes": list(self.witness_primes),
            "residual_composite_digits": (
                digit_count(self.residual_composite) if self.residual_composite else None
            ),
            "hits_gamma": self.hits_gamma,
        }
        if full_integers:
            d["A"] = str(self.A)
            d["residual_composite"] = (
                str(self.residual_composite) if self.residual_composite else None
            )
        return d


@dataclass
class ZsigmondyReport:
    horizon: int
    records: list[TermRecord]
    zsigmondy_set: list[int]
    system: dict = field(default_factory=dict)
    tracked_valuations: dict[int, list[int | None]] = field(default_factory=dict)

    def to_dict(self, full_integers: bool = False) -> dict:
        return {
            "kind": "zsigmondy",
            "horizon": self.horizon,
            "system": self.system,
            "zsigmondy_set": list(self.zsigmondy_set),
            "terms": [r.to_dict(full_integers) for r in self.records],
            "tracked_valuations": {str(p): v for p, v in sorted(self.tracked_valuations.items())},
        }


def _witnesses(m: int, budget: FactorBudget) -> tuple[tuple[int, ...], int | None]:
    if m <= 1:
        return (), None
    f = factor(m, budget)
    return tuple(f.primes), (f.cofactor if not f.complete else None)


def zsigmondy_report_from_terms(
    terms: list[OrbitTerm],
    budget: FactorBudget | None = None,
    system: dict | None = None,
    track_primes=(),
) -> ZsigmondyReport:
    """Per-index primitive-divisor verdicts; index 0 is recorded but never in the set."""
    budget = budget or FactorBudget()
    records = []
    zset = []
    for t in terms:
        if t.A == 0:
            # (0) is not a proper ideal: recorded, never counted
            records.append(TermRecord(t.n, 0, None, hits_gamma=True))
            continue
        prim = primitive_part(t.n, terms)
        wit, resid = _witnesses(prim, budget)
        records.append(TermRecord(t.n, t.A, prim > 1, wit, resid))
        if t.n >= 1 and prim == 1:
            zset.append(t.n)
    tracked = {
        p: [ord_p(t.A, p) if t.A else None for t in terms] for p in sorted(set(track_primes))
    }
    return ZsigmondyReport(
        horizon=terms[-1].n if terms else 0,
        records=records,
        zsigmondy_set=zset,
        system=system or {},
        tracked_valuations=tracked,
    )


def zsigmondy_set(
    sys_: DynSystem, N: int, factor_budget: FactorBudget | None = None, track_primes=()
) -> ZsigmondyReport:
    if N < 1:
        raise ValueError("horizon N must be >= 1")
    terms = orbit_terms(sys_, N)
    return zsigmondy_report_from_terms(terms, factor_budget, sys_.describe(), track_primes)


@dataclass
class ApparitionRecord:
    p: int
    r_p: int | None
    valuations: list[tuple[int, int | None]]

    @property
    def above_horizon(self) -> bool:
        return self.r_p is None

    def to_dict(self) -> dict:
        return {
            "kind": "rank",
            "p": self.p,
            "r_p": self.r_p if self.r_p is not None else "above_horizon",
            "valuations": [[n, v] for n, v in self.valuations],
        }


def rank_of_apparition(sys_: DynSystem, p: int, N: int) -> ApparitionRecord:
    """First index with p | A_n.  A_n = 0 counts as divisible (valuation None)."""
    vals = []
    r = None
    for t in orbit_terms(sys_, N):
        v = ord_p(t.A, p) if t.A else None
        vals.append((t.n, v))
        if r is None and (v is None or v > 0):
            r = t.n
    return ApparitionRecord(p, r, vals)


# --------------------------------------------------------------------------
# growth law
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthCheck:
    p: int
    residue: int
    n: int
    kind: str  # "before_rank": ord A_{n-1} = 0; "after_rank": ord A_n = e ord A_{n-1}
    observed: int
    expected: int

    @property
    def passed(self) -> bool:
        return self.observed == self.expected


@dataclass
class GrowthLawReport:
    system: dict
    horizon: int
    p_bound: int
    e: int
    S: list[int]
    checks: list[GrowthCheck]
    ranks: dict[tuple[int, int], int]

    @property
    def failures(self) -> list[GrowthCheck]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def primes_checked(self) -> list[int]:
        return sorted({p for p, _ in self.ranks})

    def to_dict(self) -> dict:
        return {
            "kind": "growth_law",
            "system": self.system,
            "horizon": self.horizon,
            "p_bound": self.p_bound,
            "e": self.e,
            "S": self.S,
            "primes_checked": self.primes_checked,
            "ranks": [
                {"p": p, "residue": i, "r_p": r} for (p, i), r in sorted(self.ranks.items())
            ],
            "n_checks": len(self.checks),
            "n_failures": len(self.failures),
            "passed": self.passed,
            "failures": [
                {"p": c.p, "residue": c.residue, "n": c.n, "kind": c.kind,
                 "observed": c.observed, "expected": c.expected}
                for c in self.failures
            ],
        }


def verify_growth_law(sys_: DynSystem, N: int, p_bound: int) -> GrowthLawReport:
    """Check ord_p A_n = e * ord_p A_{n-1} past the rank of apparition.

    With gamma of period k the check runs on each subsequence
    (A_{i + jk})_j, which is the sequence of the return map phi^k started at
    phi^i(alpha); e and S belong to that return map.  Primes in S are skipped.
    """
    if sys_.mode is not Mode.STRICT:
        raise DynZsigError("growth-law verification needs a strict-mode system")
    k = sys_.period_k
    e = sys_.vanishing_e
    S = sys_.bad_set_S
    terms = orbit_terms(sys_, N)
    checks: list[GrowthCheck] = []
    ranks: dict[tuple[int, int], int] = {}
    for i in range(k):
        sub = terms[i::k]
        primes = sorted(
            {p for t in sub for p in small_prime_divisors(t.A, p_bound) if p not in S}
        )
        for p in primes:
            vals = [ord_p(t.A, p) for t in sub]
            r = next(j for j, v in enumerate(vals) if v > 0)
            ranks[(p, i)] = sub[r].n
            for j in range(1, len(sub)):
                if j <= r:
                    checks.append(GrowthCheck(p, i, sub[j].n, "before_rank", vals[j - 1], 0))
                else:
                    checks.append(
                        GrowthCheck(p, i, sub[j].n, "after_rank", vals[j], e * vals[j - 1])
                    )
    return GrowthLawReport(sys_.describe(), N, p_bound, e, sorted(S), checks, ranks)


# --------------------------------------------------------------------------
# period-k disjointness
# --------------------------------------------------------------------------

@dataclass
class DisjointnessReport:
    system: dict
    horizon: int
    k: int
    excluded_primes: list[int]
    excluded_cofactor: int
    exceptions: list[tuple[int, int, int]]
    small_prime_classes: dict[int, list[int]]
    pairs_checked: int
    condition_b_range: str = "1 <= i < k"

    @property
    def passed(self) -> bool:
        return not self.exceptions

    def to_dict(self) -> dict:
        return {
            "kind": "disjointness",
            "system": self.system,
            "horizon": self.horizon,
            "k": self.k,
            "condition_b_range": self.condition_b_range,
            "condition_b_note": "i = 0 would exclude every prime; checked for 1 <= i < k",
            "excluded_primes": self.excluded_primes,
            "excluded_cofactor_digits": (
                digit_count(self.excluded_cofactor) if self.excluded_cofactor > 1 else 0
            ),
            "pairs_checked": self.pairs_checked,
            "small_prime_classes": {
                str(p): c for p, c in sorted(self.small_prime_classes.items())
            },
            "exceptions": [
                {"i": i, "j": j, "shared_good_part_digits": digit_count(g)}
                for i, j, g in self.exceptions
            ],
            "passed": self.passed,
        }


def _cross(P: ProjectivePoint, Q: ProjectivePoint) -> int:
    """P and Q agree mod p iff p divides this."""
    return P.a * Q.b - P.b * Q.a


def non_good_product(sys_: DynSystem) -> int:
    """An integer whose prime divisors are exactly the primes outside the good set.

    Bad means: bad reduction for phi, or phi^i(gamma) = gamma mod p for some
    1 <= i < k.
    """
    from .ratmap import _resultant_of

    out = abs(_resultant_of(sys_.phi))
    P = sys_.gamma
    for _ in range(1, sys_.period_k):
        P = evaluate(sys_.phi, P)
        out *= abs(_cross(P, sys_.gamma))
    return out


def subsequence_disjointness(sys_: DynSystem, N: int, p_scan: int = 10**4) -> DisjointnessReport:
    """Good primes divide terms of at most one residue class mod k.

    Exact over all primes: for every pair of indices in different classes,
    gcd(A_i, A_j) with the non-good primes stripped must be 1.
    """
    k = sys_.period_k
    if k is None:
        raise GammaNotPeriodic("gamma is not periodic")
    if k == 1:
        raise PeriodOne("gamma is a fixed point; there is only one subsequence")
    terms = orbit_terms(sys_, N)
    bad = non_good_product(sys_)
    exceptions = []
    pairs = 0
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if (j - i) % k == 0 or terms[i].A == 0 or terms[j].A == 0:
                continue
            pairs += 1
            g = gcd(terms[i].A, terms[j].A)
            if g > 1:
                g = coprime_part(g, bad)
                if g > 1:
                    exceptions.append((i, j, g))
    classes: dict[int, set[int]] = {}
    for t in terms:
        if t.A > 1:
            for p in small_prime_divisors(t.A, p_scan):
                classes.setdefault(p, set()).add(t.n % k)
    fb = factor(bad, FactorBudget(rho_iterations=200_000)) if bad > 1 else None
    return DisjointnessReport(
        system=sys_.describe(),
        horizon=N,
        k=k,
        excluded_primes=fb.primes if fb else [],
        excluded_cofactor=fb.cofactor if fb else 1,
        exceptions=exceptions,
        small_prime_classes={p: sorted(c) for p, c in classes.items()},
        pairs_checked=pairs,
    )


def translated_system(sys_: DynSystem) -> DynSystem:
    """The same sequence seen through f(z) = z + gamma: (f^-1 phi f, alpha - gamma, 0)."""
    shifted_alpha = sys_.alpha
    if not sys_.alpha.is_infinity:
        shifted_alpha = ProjectivePoint.of(sys_.alpha.as_fraction() - sys_.gamma.as_fraction())
    return build_system(sys_.shifted, shifted_alpha, 0, Mode.RELAXED)

