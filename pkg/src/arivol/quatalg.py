"""Quaternion algebras (a, b / Q), their ramification, and the quadratic space V0."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count

import numpy as np

from .numth import INF, factorint, hilbert_symbol, is_squarefree, kronecker


class SearchBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class QuaternionAlgebra:
    """Basis 1, i, j, k with i^2 = a, j^2 = b, k = ij = -ji (so k^2 = -ab)."""
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == 0 or self.b == 0:
            raise ValueError("a and b must be nonzero")

    def elt(self, *coords) -> "QuatElt":
        return QuatElt(self, tuple(Fraction(c) for c in coords))

    @property
    def is_indefinite(self) -> bool:
        return not (self.a < 0 and self.b < 0)


@dataclass(frozen=True)
class QuatElt:
    alg: QuaternionAlgebra
    coords: tuple

    def __mul__(self, other: "QuatElt") -> "QuatElt":
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElt(self.alg, (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ))

    def __add__(self, other):
        return QuatElt(self.alg, tuple(u + v for u, v in zip(self.coords, other.coords)))

    def __neg__(self):
        return QuatElt(self.alg, tuple(-u for u in self.coords))


def conj(x: QuatElt) -> QuatElt:
    """Main involution x -> x^iota."""
    x0, x1, x2, x3 = x.coords
    return QuatElt(x.alg, (x0, -x1, -x2, -x3))


def nrd(x: QuatElt) -> Fraction:
    y = x * conj(x)
    assert all(c == 0 for c in y.coords[1:])
    return y.coords[0]


def trd(x: QuatElt) -> Fraction:
    return 2 * x.coords[0]


def ramified_places(A: QuaternionAlgebra) -> frozenset:
    """Places v with (a, b)_v = -1, among infinity and the primes dividing 2ab."""
    places = {2} | set(factorint(A.a.numerator * A.a.denominator)) \
        | set(factorint(A.b.numerator * A.b.denominator))
    out = {v for v in places if hilbert_symbol(A.a, A.b, v) == -1}
    if hilbert_symbol(A.a, A.b, INF) == -1:
        out.add(INF)
    return frozenset(out)


def smallest_nonsplit_prime(dF: int) -> int:
    for q in count(2):
        if all(q % p for p in range(2, int(q ** 0.5) + 1)) and kronecker(dF, q) != 1:
            return q


def target_ramification(dF: int, split_primes) -> frozenset:
    S = set(split_primes)
    if len(S) % 2:
        S.add(smallest_nonsplit_prime(dF))
    return frozenset(S)


def find_b0(dF: int, split_primes, height_bound: int = 10 ** 4) -> QuaternionAlgebra:
    """Indefinite quaternion algebra over Q ramified exactly at the prescribed set.

    Squarefree pairs (a, b) are scanned by increasing max(|a|, |b|), then by
    (|a|, |b|, sign) so the answer is reproducible.  A ramified place always
    divides 2ab, which lets the scan require the odd target primes to divide ab.
    """
    split_primes = list(split_primes)
    if not split_primes or len(set(split_primes)) != len(split_primes):
        raise ValueError("split_primes must be nonempty and distinct")
    for p in split_primes:
        if kronecker(dF, p) != 1:
            raise ValueError(f"{p} is not split in Q(sqrt {dF})")
    target = target_ramification(dF, split_primes)
    odd = [p for p in target if p != 2]
    prod_odd = int(np.prod(odd)) if odd else 1

    sqf = [v for v in range(1, height_bound + 1) if is_squarefree(v)]
    for h in sqf:
        for m in sqf:
            if m > h:
                break
            for a_abs, b_abs in ((m, h), (h, m)) if m != h else ((h, h),):
                if (a_abs * b_abs) % prod_odd:
                    continue
                for sa in (1, -1):
                    for sb in (1, -1):
                        if sa < 0 and sb < 0:
                            continue
                        A = QuaternionAlgebra(sa * a_abs, sb * b_abs)
                        if ramified_places(A) == target:
                            return A
    raise SearchBoundExceeded(f"no (a, b) with max(|a|,|b|) <= {height_bound}")


def v0_gram(A: QuaternionAlgebra, dF: int) -> np.ndarray:
    """Diagonal Gram matrix diag(1, -dF a, -dF b, dF a b) of V0, as an object array of Fractions.

    The ``1`` entry is the quadratic form value Q(e_1) and the matrix is the
    Gram matrix of Q itself: Q(x) = sum_i G_ii x_i^2.
    """
    if not A.is_indefinite:
        raise ValueError("definite quaternion algebra rejected")
    d = Fraction(dF)
    return np.diag(np.array([Fraction(1), -d * A.a, -d * A.b, d * A.a * A.b], dtype=object))


def signature(gram) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(np.array(gram, dtype=float))
    return int((ev > 0).sum()), int((ev < 0).sum())
