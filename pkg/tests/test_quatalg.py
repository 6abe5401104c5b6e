from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arivol.numth import INF, is_squarefree, kronecker
from arivol.quatalg import (QuaternionAlgebra, conj, find_b0, nrd, ramified_places, signature,
                            smallest_nonsplit_prime, target_ramification, trd, v0_gram)
from test_numth import hilbert_formula

sqf = st.integers(-40, 40).filter(lambda v: v != 0 and is_squarefree(abs(v)))


def ram_oracle(a, b):
    primes = [p for p in range(2, 42) if all(p % q for q in range(2, p))]
    out = {p for p in primes if hilbert_formula(a, b, p) == -1}
    if a < 0 and b < 0:
        out.add(INF)
    return frozenset(out)


def test_ramification_examples():
    assert ramified_places(QuaternionAlgebra(-1, -1)) == {2, INF}
    assert ramified_places(QuaternionAlgebra(1, 7)) == frozenset()
    assert ramified_places(QuaternionAlgebra(-1, 3)) == ram_oracle(-1, 3) == {2, 3}


@given(sqf, sqf)
def test_ramification_matches_oracle_and_is_even(a, b):
    R = ramified_places(QuaternionAlgebra(a, b))
    assert R == ram_oracle(a, b)
    assert len(R) % 2 == 0


def test_find_b0_examples():
    A = find_b0(5, [11, 19])
    assert ramified_places(A) == {11, 19}
    assert INF not in ramified_places(A)
    with pytest.raises(ValueError):
        find_b0(5, [2])
    q = smallest_nonsplit_prime(5)
    assert q == 2 and kronecker(5, q) != 1
    assert ramified_places(find_b0(5, [11])) == {11, q}
    assert target_ramification(5, [11]) == {11, 2}


@pytest.mark.parametrize("dF,ps", [(5, [11, 19]), (8, [7, 17]), (13, [3, 17]), (5, [29])])
def test_find_b0_is_indefinite_with_exact_ramification(dF, ps):
    A = find_b0(dF, ps)
    assert A.is_indefinite
    assert ramified_places(A) == target_ramification(dF, ps)


def test_v0_gram():
    G = v0_gram(QuaternionAlgebra(1, 1), 5)
    assert [G[i, i] for i in range(4)] == [1, -5, -5, 5]
    assert signature(G) == (2, 2)
    assert np.prod([G[i, i] for i in range(4)]) == 125
    with pytest.raises(ValueError):
        v0_gram(QuaternionAlgebra(-1, -3), 5)


@given(sqf, sqf, st.sampled_from([5, 8, 13]))
def test_v0_signature_iff_indefinite(a, b, d):
    A = QuaternionAlgebra(a, b)
    if A.is_indefinite:
        assert signature(v0_gram(A, d)) == (2, 2)
    else:
        with pytest.raises(ValueError):
            v0_gram(A, d)


rat = st.fractions(-5, 5, max_denominator=7)


@given(sqf, sqf, st.lists(rat, min_size=8, max_size=8))
def test_norm_multiplicative_and_trace(a, b, c):
    A = QuaternionAlgebra(a, b)
    x, y = A.elt(*c[:4]), A.elt(*c[4:])
    assert nrd(x * y) == nrd(x) * nrd(y)
    assert trd(x) == (x + conj(x)).coords[0]
    assert nrd(A.elt(1, 0, 0, 0)) == 1
    assert nrd(A.elt(0, 1, 0, 0)) == -Fraction(a)


@given(sqf, sqf, st.lists(rat, min_size=12, max_size=12))
def test_multiplication_associative(a, b, c):
    A = QuaternionAlgebra(a, b)
    x, y, z = A.elt(*c[:4]), A.elt(*c[4:8]), A.elt(*c[8:])
    assert (x * y) * z == x * (y * z)
