"""Slow, obviously-correct reference implementations used only by the tests.

None of these share code with the package beyond plain Python integers and
fractions.Fraction.
"""

from fractions import Fraction
from math import gcd


def trial_factor(n):
    """{p: e} by plain trial division."""
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def poly_eval(coeffs, x):
    return sum(Fraction(c) * x**i for i, c in enumerate(coeffs))


def frac_map(num, den):
    """phi as a function on Fraction | None (None is infinity) via affine evaluation."""
    d = max(len(num), len(den)) - 1

    def phi(x):
        if x is None:
            # compare leading coefficients of degree d
            a = num[d] if len(num) > d else 0
            b = den[d] if len(den) > d else 0
            return None if b == 0 else Fraction(a, b)
        u, v = poly_eval(num, x), poly_eval(den, x)
        return None if v == 0 else u / v

    return phi


def frac_orbit(num, den, x, n):
    phi = frac_map(num, den)
    out = [x]
    for _ in range(n):
        x = phi(x)
        out.append(x)
    return out


def orbit_numerators(num, den, alpha, gamma, N):
    """A_n = |numerator(phi^n(alpha) - gamma)|, 1 when phi^n(alpha) is infinity."""
    out = []
    for x in frac_orbit(num, den, Fraction(alpha), N):
        out.append(1 if x is None else abs((x - Fraction(gamma)).numerator))
    return out


def det(M):
    M = [[Fraction(x) for x in row] for row in M]
    n = len(M)
    sign = 1
    acc = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        acc *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
    return int(sign * acc)


def sylvester_resultant(F, G, d):
    """Res of degree-d binary forms (coefficient lists low to high in X/Y), F rows first."""
    F = list(F) + [0] * (d + 1 - len(F))
    G = list(G) + [0] * (d + 1 - len(G))
    fhi, ghi = F[::-1], G[::-1]  # highest power of X first
    size = 2 * d
    rows = []
    for i in range(d):
        rows.append([0] * i + fhi + [0] * (size - d - 1 - i))
    for i in range(d):
        rows.append([0] * i + ghi + [0] * (size - d - 1 - i))
    return det(rows)


def expand_conjugate_translation(num, den, gamma):
    """Coefficients of phi(z + gamma) - gamma as a Fraction rational function (num, den)."""
    gamma = Fraction(gamma)

    def shift(coeffs):
        # p(z + gamma) by repeated Horner with polynomial arithmetic
        out = [Fraction(0)]
        for c in reversed(coeffs):
            # out = out * (z + gamma) + c
            nxt = [Fraction(0)] * (len(out) + 1)
            for i, a in enumerate(out):
                nxt[i] += a * gamma
                nxt[i + 1] += a
            nxt[0] += c
            out = nxt
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    N, D = shift(num), shift(den)
    # N/D - gamma = (N - gamma D)/D
    L = max(len(N), len(D))
    N = N + [Fraction(0)] * (L - len(N))
    Dp = D + [Fraction(0)] * (L - len(D))
    top = [a - gamma * b for a, b in zip(N, Dp)]
    return top, D


def primitive_by_factoring(As, n):
    """True iff A_n has a prime factor dividing no earlier nonzero A_i."""
    earlier = set()
    for a in As[:n]:
        if a:
            earlier |= set(trial_factor(a))
    return bool(set(trial_factor(As[n])) - earlier)


def reduce_mod_p(x, p):
    """Fraction | None to residue (p for infinity)."""
    if x is None or x.denominator % p == 0:
        return p
    return x.numerator * pow(x.denominator, -1, p) % p


def coprime(a, b):
    return gcd(a, b) == 1
