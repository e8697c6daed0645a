"""
Rational maps on P^1(Q) with integer coefficients.

A map is stored as a numerator/denominator pair of integer polynomials,
normalized so the joint content is 1 and the leading coefficient of the
denominator is positive.  Everything projective (evaluation at poles and
at infinity, conjugation, composition) goes through the degree-d
homogenizations

    F(X, Y) = sum a_i X^i Y^(d-i),    G(X, Y) = sum b_i X^i Y^(d-i).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from .arith import FactorBudget, factor
from .errors import (
    DegenerateMap,
    GammaNotFixed,
    GammaNotPeriodic,
    ParseError,
    ZeroDenominator,
)

DEFAULT_PERIOD_BOUND = 64


# --------------------------------------------------------------------------
# integer polynomials (coefficient tuples, lowest degree first)
# --------------------------------------------------------------------------

def _trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add(f, g):
    n = max(len(f), len(g))
    return _trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def _scale(f, k):
    return _trim([k * a for a in f])


def _mul(f, g):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _trim(out)


def _pow(f, n):
    out = (1,)
    base = f
    while n:
        if n & 1:
            out = _mul(out, base)
        n >>= 1
        if n:
            base = _mul(base, base)
    return out


def _deg(f) -> int:
    return len(f) - 1


@dataclass(frozen=True)
class IntPolynomial:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def homogeneous(self, d: int) -> tuple[int, ...]:
        """Coefficients padded to length d+1."""
        return self.coeffs + (0,) * (d + 1 - len(self.coeffs))

    def __str__(self):
        return _poly_str(self.coeffs)


def _poly_str(c: Sequence[int]) -> str:
    if not c:
        return "0"
    terms = []
    for i in range(len(c) - 1, -1, -1):
        a = c[i]
        if a == 0:
            continue
        mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        if mono and abs(a) == 1:
            body = mono
        elif mono:
            body = f"{abs(a)}*{mono}"
        else:
            body = str(abs(a))
        sign = "-" if a < 0 else "+"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f"{sign}{body}"
    return out


# --------------------------------------------------------------------------
# resultants
# --------------------------------------------------------------------------

def _prem(a, b):
    """Pseudo-remainder of a by b: lc(b)^(deg a - deg b + 1) * a mod b."""
    lb = b[-1]
    db = _deg(b)
    r = list(a)
    e = _deg(a) - db + 1
    while r and _deg(r) >= db:
        lr = r[-1]
        shift = _deg(r) - db
        r = [lb * x for x in r]
        for i, bc in enumerate(b):
            r[i + shift] -= lr * bc
        r = list(_trim(r))
        e -= 1
    return _scale(r, lb**e) if e > 0 else _trim(r)


def _content(f) -> int:
    return reduce(gcd, f, 0)


def _res_univariate(a, b) -> int:
    """Resultant of univariate integer polynomials by the subresultant PRS.

    Equals the determinant of the Sylvester matrix (rows of ``a`` first).
    Only exact integer divisions occur.
    """
    if not a or not b:
        return 0
    da, db = _deg(a), _deg(b)
    s = 1
    if da < db:
        a, b = b, a
        da, db = db, da
        if da % 2 and db % 2:
            s = -1
    if db == 0:
        return s * b[0] ** da
    ca, cb = _content(a), _content(b)
    a = tuple(x // ca for x in a)
    b = tuple(x // cb for x in b)
    t = ca**db * cb**da
    g = h = 1
    while True:
        da, db = _deg(a), _deg(b)
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        r = _prem(a, b)
        if not r:
            return 0
        a = b
        div = g * h**delta
        b = tuple(x // div for x in r)
        g = a[-1]
        # h <- h^(1-delta) g^delta, exact
        if delta == 1:
            h = g
        elif delta > 1:
            h = g**delta // h ** (delta - 1)
        if _deg(b) == 0:
            dA = _deg(a)
            h = b[0] ** dA // h ** (dA - 1) if dA > 1 else b[0] ** dA * h ** (1 - dA)
            return s * t * h


def resultant(F: IntPolynomial | Sequence[int], G: IntPolynomial | Sequence[int], d: int) -> int:
    """Resultant of the degree-``d`` homogenizations of ``F`` and ``G``.

    Sign convention: determinant of the 2d x 2d Sylvester matrix whose first
    d rows carry the coefficients of F (highest degree first).
    """
    f = F.coeffs if isinstance(F, IntPolynomial) else _trim(F)
    g = G.coeffs if isinstance(G, IntPolynomial) else _trim(G)
    if not f or not g:
        return 0
    m, n = _deg(f), _deg(g)
    if m > d or n > d:
        raise ValueError("polynomial degree exceeds the homogenization degree")
    if m < d and n < d:
        # both forms vanish at infinity
        return 0
    if m == d:
        return f[-1] ** (d - n) * _res_univariate(f, g)
    # swapping the two blocks of d rows costs (-1)^(d*d)
    sign = -1 if d % 2 else 1
    return sign * g[-1] ** (d - m) * _res_univariate(g, f)


# --------------------------------------------------------------------------
# points of P^1(Q)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectivePoint:
    """[a : b] in lowest terms with b >= 0; infinity is [1 : 0]."""

    a: int
    b: int

    def __post_init__(self):
        a, b = int(self.a), int(self.b)
        if a == 0 and b == 0:
            raise ValueError("[0:0] is not a point")
        if b < 0:
            a, b = -a, -b
        if b == 0:
            a = 1
        g = gcd(a, b)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)

    @classmethod
    def of(cls, value) -> "ProjectivePoint":
        if isinstance(value, ProjectivePoint):
            return value
        if isinstance(value, str):
            return parse_point(value)
        q = Fraction(value)
        return cls(q.numerator, q.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise ZeroDivisionError("infinity has no rational value")
        return Fraction(self.a, self.b)

    def __str__(self):
        if self.is_infinity:
            return "inf"
        return str(self.a) if self.b == 1 else f"{self.a}/{self.b}"


INFINITY = ProjectivePoint(1, 0)


def parse_point(text: str) -> ProjectivePoint:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INFINITY
    try:
        q = Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc
    return ProjectivePoint(q.numerator, q.denominator)


# --------------------------------------------------------------------------
# rational maps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMap:
    numerator: IntPolynomial
    denominator: IntPolynomial
    degree: int
    res: int = field(default=0, compare=False, repr=False)

    @property
    def num(self) -> tuple[int, ...]:
        return self.numerator.homogeneous(self.degree)

    @property
    def den(self) -> tuple[int, ...]:
        return self.denominator.homogeneous(self.degree)

    def __str__(self):
        if self.denominator.coeffs == (1,):
            return f"({self.numerator})"
        return f"({self.numerator})/({self.denominator})"

    def __call__(self, P):
        return evaluate(self, ProjectivePoint.of(P))


def _clear(coeffs: Iterable) -> list[Fraction]:
    return [Fraction(c) for c in coeffs]


def normalize(num_coeffs: Sequence, den_coeffs: Sequence, *, check: bool = True) -> RationalMap:
    """Build a RationalMap from coefficient lists (lowest degree first).

    Rational coefficients are cleared, the joint content is divided out and
    the denominator's leading coefficient is made positive.

    >>> str(normalize([0, 0, 2], [2]))
    '(z^2)'
    """
    num = _clear(num_coeffs)
    den = _clear(den_coeffs)
    if not any(den):
        raise ZeroDenominator("denominator is the zero polynomial")
    scale = lcm(*(c.denominator for c in num + den))
    num_i = _trim(int(c * scale) for c in num)
    den_i = _trim(int(c * scale) for c in den)
    content = reduce(gcd, num_i + den_i, 0)
    num_i = tuple(c // content for c in num_i)
    den_i = tuple(c // content for c in den_i)
    if den_i[-1] < 0:
        num_i = tuple(-c for c in num_i)
        den_i = tuple(-c for c in den_i)
    d = max(_deg(num_i), _deg(den_i))
    if d < 1:
        raise DegenerateMap("constant map has degree 0")
    r = resultant(num_i, den_i, d) if check or d <= 8 else 0
    if check and r == 0:
        raise DegenerateMap(
            f"numerator and denominator share a factor; ({_poly_str(num_i)})/({_poly_str(den_i)}) "
            "does not have degree %d" % d
        )
    return RationalMap(IntPolynomial(num_i), IntPolynomial(den_i), d, r)


def _hom_eval(c: Sequence[int], x: int, y: int) -> int:
    """Evaluate sum c_i x^i y^(d-i), with d = len(c) - 1, by Horner in x/y."""
    d = len(c) - 1
    acc = c[d]
    ypow = y
    for i in range(d - 1, -1, -1):
        acc = acc * x + c[i] * ypow
        ypow *= y
    return acc


_EVAL_RESULTANT_DEGREE = 16


def _resultant_of(phi: RationalMap) -> int:
    if phi.res == 0:
        r = resultant(phi.numerator, phi.denominator, phi.degree)
        object.__setattr__(phi, "res", r)
    return phi.res


def evaluate(phi: RationalMap, P: ProjectivePoint) -> ProjectivePoint:
    """phi(P) in lowest terms, through the homogeneous forms.

    The common factor of F(x, y) and G(x, y) divides the resultant, so it is
    found by gcds against that (small) integer instead of the huge values.
    """
    x, y = P.a, P.b
    u = _hom_eval(phi.num, x, y)
    v = _hom_eval(phi.den, x, y)
    if phi.res == 0 and phi.degree > _EVAL_RESULTANT_DEGREE:
        # high iterates: the resultant costs more than one direct gcd
        g = gcd(u, v)
    else:
        r = abs(_resultant_of(phi))
        g = gcd(gcd(r, u % r), v % r) if r != 1 else 1
    if g > 1:
        u //= g
        v //= g
    if v < 0:
        u, v = -u, -v
    if v == 0:
        return INFINITY
    return _make_point(u, v)


def _make_point(a: int, b: int) -> ProjectivePoint:
    # caller guarantees gcd(a, b) == 1 and b >= 0
    p = ProjectivePoint.__new__(ProjectivePoint)
    object.__setattr__(p, "a", a)
    object.__setattr__(p, "b", b)
    return p


def iterate(phi: RationalMap, P, n: int) -> list[ProjectivePoint]:
    """[P, phi(P), ..., phi^n(P)]."""
    P = ProjectivePoint.of(P)
    out = [P]
    for _ in range(n):
        P = evaluate(phi, P)
        out.append(P)
    return out


def _substitute(c: Sequence[int], p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """sum c_i p^i q^(d-i) for univariate p, q."""
    d = len(c) - 1
    out: tuple[int, ...] = ()
    ppow = [(1,)]
    for _ in range(d):
        ppow.append(_mul(ppow[-1], p))
    qpow = (1,)
    for i in range(d, -1, -1):
        if c[i]:
            out = _add(out, _scale(_mul(ppow[i], qpow), c[i]))
        qpow = _mul(qpow, q)
    return out


def compose(phi: RationalMap, psi: RationalMap) -> RationalMap:
    """phi o psi."""
    p, q = psi.num, psi.den
    # dehomogenized forms of psi: P(z, 1), Q(z, 1)
    num = _substitute(phi.num, _trim(p), _trim(q))
    den = _substitute(phi.den, _trim(p), _trim(q))
    out = normalize(num, den, check=False)
    if out.degree != phi.degree * psi.degree:
        raise DegenerateMap("composition dropped degree")
    return out


def iterate_map(phi: RationalMap, k: int) -> RationalMap:
    """phi^k as a rational map (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = phi
    for _ in range(k - 1):
        out = compose(phi, out)
    return out


def conjugate(phi: RationalMap, m: tuple[int, int, int, int]) -> RationalMap:
    """M^-1 o phi o M for M(z) = (p z + q) / (r z + s)."""
    p, q, r, s = m
    if p * s - q * r == 0:
        raise ValueError("singular Mobius transformation")
    mz = _trim((q, p))
    nz = _trim((s, r))
    u = _substitute(phi.num, mz, nz)
    v = _substitute(phi.den, mz, nz)
    # M^-1 has matrix (s, -q, -r, p)
    new_num = _add(_scale(u, s), _scale(v, -q))
    new_den = _add(_scale(u, -r), _scale(v, p))
    out = normalize(new_num, new_den, check=False)
    if out.degree != phi.degree:
        raise DegenerateMap("conjugation changed degree")
    return out


def conjugate_translation(phi: RationalMap, gamma) -> RationalMap:
    """f^-1 o phi o f with f(z) = z + gamma."""
    g = Fraction(gamma)
    if g == 0:
        return phi
    return conjugate(phi, (g.denominator, g.numerator, 0, g.denominator))


def conjugate_inversion(phi: RationalMap) -> RationalMap:
    """Conjugate by z -> 1/z, which swaps 0 and infinity."""
    return conjugate(phi, (0, 1, 1, 0))


def vanishing_order(phi: RationalMap) -> int:
    """Order of vanishing of phi at z = 0 (0 when phi(0) != 0)."""
    c = phi.numerator.coeffs
    if c[0] != 0:
        return 0
    return next(i for i, a in enumerate(c) if a != 0)


def bad_primes(phi: RationalMap, budget: FactorBudget | None = None) -> frozenset[int]:
    """Primes dividing a_e * b_0 for phi fixing 0 (the growth-law bad set)."""
    if phi.numerator.coeff(0) != 0:
        raise GammaNotFixed("phi(0) != 0; translate the target to 0 first")
    e = vanishing_order(phi)
    n = abs(phi.numerator.coeff(e) * phi.denominator.coeff(0))
    f = factor(n, budget or FactorBudget(rho_iterations=10**6))
    primes = set(f.primes)
    if not f.complete:
        raise ArithmeticError(f"could not factor a_e*b_0 = {n}")
    return frozenset(primes)


def has_good_reduction(phi: RationalMap, p: int) -> bool:
    return _resultant_of(phi) % p != 0


def detect_period(phi: RationalMap, gamma, k_max: int = DEFAULT_PERIOD_BOUND) -> int | None:
    """Smallest k <= k_max with phi^k(gamma) = gamma, or None."""
    from .heights import periodic_height_bound, weil_height

    gamma = ProjectivePoint.of(gamma)
    # periodic points have height <= C/(d-1); past that the orbit wanders
    bound = periodic_height_bound(phi) if phi.degree >= 2 else None
    seen = {gamma}
    P = gamma
    for k in range(1, k_max + 1):
        P = evaluate(phi, P)
        if P == gamma:
            return k
        if P in seen or (bound is not None and weil_height(P) > bound):
            return None
        seen.add(P)
    return None


def move_to_zero(phi: RationalMap, gamma: ProjectivePoint) -> RationalMap:
    """Conjugate phi so that gamma sits at 0."""
    if gamma.is_infinity:
        return conjugate_inversion(phi)
    return conjugate_translation(phi, gamma.as_fraction())


def is_polynomial_type(phi: RationalMap, gamma, k: int) -> bool:
    """True iff phi^k is totally ramified at its fixed point gamma.

    After moving gamma to 0 this means the numerator of phi^k is a single
    monomial of degree d^k.
    """
    gamma = ProjectivePoint.of(gamma)
    if iterate(phi, gamma, k)[-1] != gamma:
        raise GammaNotPeriodic(f"{gamma} is not fixed by phi^{k}")
    psi = iterate_map(move_to_zero(phi, gamma), k)
    return vanishing_order(psi) == phi.degree**k


# --------------------------------------------------------------------------
# map-expression grammar
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(z)|(\*\*|[-+*/^()]))")


class _RatFunc:
    """Unreduced quotient of Fraction-coefficient polynomials, parse-time only."""

    __slots__ = ("n", "d")

    def __init__(self, n, d):
        self.n, self.d = n, d

    def __add__(self, o):
        return _RatFunc(_add(_mul(self.n, o.d), _mul(o.n, self.d)), _mul(self.d, o.d))

    def __sub__(self, o):
        return self + _RatFunc(_scale(o.n, -1), o.d)

    def __mul__(self, o):
        return _RatFunc(_mul(self.n, o.n), _mul(self.d, o.d))

    def __truediv__(self, o):
        if not o.n:
            raise ZeroDenominator("division by the zero polynomial")
        return _RatFunc(_mul(self.n, o.d), _mul(self.d, o.n))

    def power(self, k):
        return _RatFunc(_pow(self.n, k), _pow(self.d, k))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos} in {self.text!r}")
            if m.group(1):
                self.tokens.append(("num", int(m.group(1))))
            elif m.group(2):
                self.tokens.append(("z", None))
            else:
                op = m.group(3)
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> _RatFunc:
        if not self.tokens:
            raise ParseError("empty map expression")
        out = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return out

    def expr(self):
        sign = 1
        while self.peek() in (("op", "+"), ("op", "-")):
            if self.take()[1] == "-":
                sign = -sign
        out = self.term()
        if sign < 0:
            out = _RatFunc(_scale(out.n, -1), out.d)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.factor()
                out = out * rhs if tok[1] == "*" else out / rhs
            elif tok[0] in ("num", "z") or tok == ("op", "("):
                # implicit multiplication: 2z, 3(z+1), z(z+1)
                out = out * self.factor()
            else:
                return out

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            base = base.power(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return _RatFunc((Fraction(val),) if val else (), (Fraction(1),))
        if kind == "z":
            return _RatFunc((Fraction(0), Fraction(1)), (Fraction(1),))
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.take(")")
            return inner
        if (kind, val) == ("op", "-"):
            inner = self.factor()
            return _RatFunc(_scale(inner.n, -1), inner.d)
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_map(text: str) -> RationalMap:
    """Parse expressions such as ``(z^2+z)`` or ``(z^3)/(1+2*z)``.

    >>> str(parse_map("(z^2 + z)"))
    '(z^2+z)'
    """
    rf = _Parser(text).parse()
    if not rf.d:
        raise ZeroDenominator("denominator is the zero polynomial")
    return normalize(rf.n, rf.d)
