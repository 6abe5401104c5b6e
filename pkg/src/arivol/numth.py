"""Exact number-theory kernel.

Rationals are :class:`fractions.Fraction` throughout (aliased as ``Rat``).
Bernoulli numbers follow the ``B_1 = -1/2`` convention, so that
``L(1 - n, chi) = -B_{n,chi} / n`` holds for every Dirichlet character.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt

import sympy

Rat = Fraction
INF = "inf"


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


def factorint(n: int) -> dict[int, int]:
    return {int(p): int(e) for p, e in sympy.factorint(abs(n)).items()}


def primes_up_to(n: int) -> list[int]:
    return [int(p) for p in sympy.primerange(2, n + 1)]


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(n).values())


def sigma1(n: int) -> int:
    return int(sympy.divisor_sigma(n, 1))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def square_free_part(x) -> int:
    """Squarefree integer in the same square class as the nonzero rational x."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no square class")
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return sign * out


def is_rational_square(x) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    return all(isqrt(t) ** 2 == t for t in (x.numerator, x.denominator))


# --- Kronecker symbol ---------------------------------------------------------

def _jacobi(a: int, n: int) -> int:
    # n odd positive
    a %= n
    res = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), completely multiplicative in both arguments."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            res = -res
    if n == 1:
        return res
    return res * _jacobi(a, n)


# --- Hilbert symbol -----------------------------------------------------------

@lru_cache(maxsize=4096)
def _solvable_mod_2k(a: int, b: int, k: int) -> bool:
    """Primitive solution of z^2 = a x^2 + b y^2 mod 2^k with some coordinate odd,
    lifted through the Hensel-safe exponent k."""
    m = 1 << k
    sq = [(t * t) % m for t in range(m)]
    for x in range(m):
        ax = a * sq[x]
        for y in range(m):
            r = (ax + b * sq[y]) % m
            for z in range(m):
                if (x | y | z) & 1 and sq[z] == r:
                    return True
    return False


def hilbert_symbol(a, b, place) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals a, b at a prime or ``INF``.

    Odd primes use the closed formula; p = 2 is decided by an exhaustive search
    for primitive solutions modulo 2^k, where k = 3 beyond the valuations of the
    squarefree representatives (a primitive solution mod 2^(v+3) lifts 2-adically).
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place == INF or place is None:
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    # squarefree representatives of the square classes: valuations are 0 or 1
    A, B = square_free_part(a), square_free_part(b)
    if p == 2:
        k = 3 + valuation(A, 2) + valuation(B, 2)
        return 1 if _solvable_mod_2k(A % (1 << k), B % (1 << k), k) else -1
    al, be = valuation(A, p), valuation(B, p)
    u, v = A // p**al, B // p**be
    eps = 1 if (p - 1) // 2 % 2 == 0 else -1  # (-1)^((p-1)/2)
    val = (eps if (al * be) % 2 else 1)
    if be % 2:
        val *= _jacobi(u % p, p)
    if al % 2:
        val *= _jacobi(v % p, p)
    return val


# --- Bernoulli numbers --------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(comb(m + 1, k) * B[k] for k in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, from the recurrence sum_{k<=n} C(n+1,k) B_k = 0."""
    if n < 0:
        raise ValueError("n >= 0 required")
    # Fill in chunks so the cache stays small and idempotent under concurrency.
    size = max(16, 1 << (n.bit_length()))
    return _bernoulli_table(size)[n]


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum(comb(n, k) * bernoulli(k) * x ** (n - k) for k in range(n + 1))


# --- Quadratic characters -----------------------------------------------------

def is_fundamental_discriminant(d: int) -> bool:
    if d == 1 or d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


@dataclass(frozen=True)
class FundamentalDiscriminant:
    dF: int

    def __post_init__(self):
        if self.dF <= 1 or not is_fundamental_discriminant(self.dF):
            raise ValueError(f"{self.dF} is not a positive fundamental discriminant")

    def __int__(self):
        return self.dF


def fundamental_discriminants(bound: int) -> list[int]:
    return [d for d in range(2, bound) if is_fundamental_discriminant(d)]


@dataclass(frozen=True)
class QuadChar:
    """The character chi_F = (dF | .) of a real quadratic field."""
    modulus: FundamentalDiscriminant

    @classmethod
    def of(cls, dF: int) -> "QuadChar":
        return cls(FundamentalDiscriminant(dF))

    @property
    def conductor(self) -> int:
        return self.modulus.dF

    def __call__(self, n: int) -> int:
        return kronecker(self.modulus.dF, n)

    def values(self) -> list[int]:
        d = self.conductor
        return [self(a) for a in range(d)]


def gen_bernoulli(chi: QuadChar, n: int) -> Fraction:
    """B_{n,chi} = q^(n-1) sum_{a=1..q} chi(a) B_n(a/q)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    q = chi.conductor
    return q ** (n - 1) * sum(chi(a) * bernoulli_poly(n, Fraction(a, q)) for a in range(1, q + 1))


def fundamental_part(D: int) -> int:
    """Discriminant of Q(sqrt D); 1 when D is a nonzero square."""
    if D == 0:
        raise ValueError("D must be nonzero")
    sf = square_free_part(D)
    if sf == 1:
        return 1
    return sf if sf % 4 == 1 else 4 * sf
