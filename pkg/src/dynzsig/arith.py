"""
Big-integer kernels: primality, bounded factorization, valuations and
gcd stripping.

Orbit numerators grow doubly exponentially, so nothing here promises a
complete factorization.  :func:`factor` returns whatever it could split
within its budget and carries the rest as a composite cofactor.  The
primitive-divisor machinery elsewhere only needs :func:`coprime_part`,
which never factors at all.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import gmpy2
from gmpy2 import mpz

from .errors import OrdOfZero

# Deterministic Miller-Rabin below 2**64 (Sinclair / Jaeschke bound).
_SMALL_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_RANDOM_ROUNDS = 40
_TRIAL_BLOCK = 256

DEFAULT_TRIAL_BOUND = 10**6
DEFAULT_RHO_ITERATIONS = 20_000
BUDGET_ENV = "DYNZSIG_FACTOR_BUDGET"


@dataclass(frozen=True)
class FactorBudget:
    """Effort bound for :func:`factor`.

    ``rho_iterations`` caps the total number of Brent steps spent on one
    call, summed over every composite it tries to split.
    """

    trial_bound: int = DEFAULT_TRIAL_BOUND
    rho_iterations: int = DEFAULT_RHO_ITERATIONS
    seed: int = 0

    @classmethod
    def from_env(cls, seed: int = 0) -> "FactorBudget":
        """Read ``TRIAL,RHO`` (or just ``RHO``) from ``DYNZSIG_FACTOR_BUDGET``."""
        raw = os.environ.get(BUDGET_ENV, "").strip()
        if not raw:
            return cls(seed=seed)
        parts = [int(x) for x in raw.split(",")]
        if len(parts) == 1:
            return cls(rho_iterations=parts[0], seed=seed)
        if len(parts) == 2:
            return cls(trial_bound=parts[0], rho_iterations=parts[1], seed=seed)
        raise ValueError(f"{BUDGET_ENV} must be 'RHO' or 'TRIAL,RHO', got {raw!r}")


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[int, int], ...] = ()
    cofactor: int = 1
    complete: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "complete", self.cofactor == 1)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        out = self.cofactor
        for p, e in self.factors:
            out *= p**e
        return out


def gcd(a: int, b: int) -> int:
    return int(gmpy2.gcd(a, b))


def digit_count(n: int) -> int:
    """Number of decimal digits of ``|n|`` (0 has one digit), without str()."""
    n = abs(n)
    if n < 10:
        return 1
    k = int((n.bit_length() - 1) * 0.30102999566398120) + 1
    # k is exact or one short
    return k + 1 if n >= 10**k else k


@lru_cache(maxsize=8)
def primes_up_to(bound: int) -> tuple[int, ...]:
    if bound < 2:
        return ()
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


@lru_cache(maxsize=8)
def _prime_blocks(bound: int) -> tuple[tuple[mpz, tuple[int, ...]], ...]:
    ps = primes_up_to(bound)
    blocks = []
    for i in range(0, len(ps), _TRIAL_BLOCK):
        chunk = ps[i : i + _TRIAL_BLOCK]
        prod = mpz(1)
        for p in chunk:
            prod *= p
        blocks.append((prod, chunk))
    return tuple(blocks)


def small_prime_divisors(n: int, bound: int) -> list[int]:
    """Primes ``p <= bound`` dividing ``n``, found by gcd against prime blocks."""
    if n == 0:
        raise OrdOfZero("every prime divides 0")
    n = mpz(abs(n))
    found = []
    for prod, chunk in _prime_blocks(bound):
        g = gmpy2.gcd(n, prod)
        for p in chunk:
            if g == 1:
                break
            if g % p == 0:
                found.append(p)
                g //= p
    return found


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 2**64, 40 seeded random rounds above."""
    if n < 2:
        return False
    for p in _SMALL_WITNESSES:
        if n % p == 0:
            return n == p
    n = mpz(n)
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1

    def passes(a) -> bool:
        x = gmpy2.powmod(a, d, n)
        if x == 1 or x == n - 1:
            return True
        for _ in range(s - 1):
            x = gmpy2.powmod(x, 2, n)
            if x == n - 1:
                return True
        return False

    if n < 1 << 64:
        return all(passes(a) for a in _SMALL_WITNESSES)
    # seeded by n itself so verdicts are reproducible
    rng = random.Random(int(n))
    return all(passes(rng.randrange(2, int(n) - 1)) for _ in range(_RANDOM_ROUNDS))


def ord_p(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``."""
    if n == 0:
        raise OrdOfZero("ord_p(0) is infinite")
    _, v = gmpy2.remove(n, p)
    return int(v)


def coprime_part(n: int, m: int) -> int:
    """Largest divisor of ``n`` coprime to ``m``, by repeated gcd stripping.

    >>> coprime_part(1806, 42)
    43
    """
    n = mpz(abs(n))
    g = gmpy2.gcd(n, m)
    while g > 1:
        n //= g
        g = gmpy2.gcd(n, g)
    return int(n)


def _perfect_power(n: mpz) -> tuple[mpz, int] | None:
    for k in range(2, n.bit_length() + 1):
        r, exact = gmpy2.iroot(n, k)
        if r < 2:
            break
        if exact:
            return r, k
    return None


def _brent(n: mpz, rng: random.Random, cap: int) -> tuple[mpz | None, int]:
    """One Brent rho run on composite ``n``; returns (factor or None, steps used)."""
    y = mpz(rng.randrange(1, int(n)))
    c = mpz(rng.randrange(1, int(n)))
    m = 128
    g = r = q = mpz(1)
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gmpy2.gcd(q, n)
            k += m
        used += min(k, r)
        r *= 2
        if used >= cap and g == 1:
            return None, used
    if g == n:
        # batched gcd overshot; back up one step at a time
        while True:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            if g > 1:
                break
    if g == n:
        return None, used
    return g, used


def factor(n: int, budget: FactorBudget | None = None) -> Factorization:
    """Trial division up to ``budget.trial_bound`` then Brent rho.

    Never raises on hard inputs: anything not split within the budget is
    left in ``cofactor`` and ``complete`` is False.
    """
    if n < 1:
        raise ValueError("factor() expects a positive integer")
    budget = budget or FactorBudget()
    found: dict[int, int] = {}
    rest = mpz(n)
    for prod, chunk in _prime_blocks(budget.trial_bound):
        if rest == 1 or chunk[0] * chunk[0] > rest:
            break
        g = gmpy2.gcd(rest, prod)
        if g == 1:
            continue
        for p in chunk:
            if g % p == 0:
                rest, e = gmpy2.remove(rest, p)
                found[p] = int(e)
                g //= p
                if g == 1:
                    break
    if rest > 1 and budget.trial_bound >= 2 and rest < mpz(budget.trial_bound + 1) ** 2:
        # no factor up to the trial bound, so what is left is prime
        found[int(rest)] = found.get(int(rest), 0) + 1
        rest = mpz(1)

    rng = None
    remaining = budget.rho_iterations
    leftover = mpz(1)
    stack = [(rest, 1)] if rest > 1 else []
    while stack:
        m, mult = stack.pop()
        if is_prime(int(m)):
            found[int(m)] = found.get(int(m), 0) + mult
            continue
        pp = _perfect_power(m)
        if pp is not None:
            stack.append((pp[0], mult * pp[1]))
            continue
        d = None
        if rng is None:
            rng = random.Random(budget.seed)
        while d is None and remaining > 0:
            d, used = _brent(m, rng, remaining)
            remaining -= used
        if d is None:
            leftover *= m**mult
            continue
        stack.append((d, mult))
        stack.append((m // d, mult))

    factors = tuple(sorted(found.items()))
    return Factorization(factors=factors, cofactor=int(leftover))

