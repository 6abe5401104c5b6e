import itertools
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from arivol.constants import GAMMA, LOGPI, ONE, ZQ_LD, zf_ld
from arivol.eisen import (NORMALIZATION, EisensteinLattice, NotStabilized, PrincipalPart,
                          StateBudgetExceeded, arch_derivative, arch_value_at_center, arch_whittaker,
                          calibrate_normalization, coefficient_components, constant_term_derivative,
                          divisor_sum_kappa, eis_coefficient, eis_derivative_constant, local_density,
                          modularity_defect, pairing_residue_check, q_expansion, rational_snap,
                          shimura_xi, twisted_divisor_sum)
from arivol.numth import QuadChar, factorint, is_squarefree
from arivol.suites import A_PLUS_H, A_PLUS_H_PLUS_2


def brute_density(G, ell, m, k):
    n = len(G)
    M = ell ** k
    cnt = 0
    for x in itertools.product(range(M), repeat=n):
        q = sum(G[i][j] * x[i] * x[j] for i in range(n) for j in range(n))
        cnt += (q - m) % M == 0
    return Fraction(cnt, ell ** (k * (n - 1)))


# --- local densities -----------------------------------------------------------------

def test_density_examples():
    d = local_density(np.diag([1, 1, 1, 1]), 3, 1)
    assert d.value == Fraction(8, 9) and d.stabilized_at == 1
    assert brute_density(np.diag([1, 1, 1, 1]).tolist(), 3, 1, 1) == Fraction(24, 27)


def test_density_sum_of_three_squares_at_2():
    G = np.diag([1, 1, 1])
    vals = [local_density(G, 2, m).value for m in range(1, 9)]
    assert vals == [Fraction(3, 2), Fraction(3, 2), 1, Fraction(3, 4), Fraction(3, 2), Fraction(3, 2), 0,
                    Fraction(3, 4)]
    # 7 mod 8 is not a sum of three squares
    assert local_density(G, 2, 7).value == 0 == local_density(G, 2, 28).value


def test_density_rank_one():
    assert local_density([[1]], 3, 3).value == 0
    assert local_density([[1]], 3, 2).value == 0
    assert local_density([[1]], 5, 4).value == 2
    assert local_density([[1]], 3, 9).value == brute_density([[1]], 3, 9, 5)


small_gram = st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(
    lambda c: [[c[0] or 1, c[1]], [c[1], c[2] or 1]])


@given(small_gram, st.sampled_from([2, 3, 5]), st.integers(-12, 12))
@settings(max_examples=30)
def test_density_matches_brute_force(G, ell, m):
    det = G[0][0] * G[1][1] - G[0][1] ** 2
    assume(det != 0)
    try:
        d = local_density(G, ell, m, k_max=9, max_states=10 ** 6)
    except (NotStabilized, StateBudgetExceeded):
        # isotropic targets (m = 0) never stabilize; refusing is the contract
        assume(False)
    k = d.stabilized_at + 1
    assume(ell ** (2 * k) <= 200_000)
    assert brute_density(G, ell, m, k) == d.value


@given(st.lists(st.sampled_from([1, 2, 3, 5, 7]), min_size=3, max_size=4),
       st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 30))
@settings(max_examples=30)
def test_density_stable_at_k1_off_the_bad_primes(diag, ell, m):
    assume(all(x % ell for x in diag) and m % ell)
    d = local_density(np.diag(diag), ell, m)
    assert d.stabilized_at == 1
    G = np.diag(diag).tolist()
    if ell ** (2 * len(diag)) <= 50_000:
        assert brute_density(G, ell, m, 1) == brute_density(G, ell, m, 2) == d.value


def test_density_large_prime_is_fast_and_exact():
    d = local_density(np.diag([1, 1, 1, 1, 3]), 29, 58)
    assert d.value == Fraction(707280, 707281)


def test_density_errors():
    with pytest.raises(StateBudgetExceeded):
        local_density([[1, 0], [0, 1]], 2, 1, max_states=4)
    with pytest.raises(NotStabilized):
        local_density(np.diag([1, 1, 1]), 2, 1, k_max=2)
    with pytest.raises(ValueError):
        local_density([[1, 1], [1, 1]], 3, 1)


# --- snapping -------------------------------------------------------------------------------

def test_rational_snap_examples():
    assert rational_snap(0.333333333333, 10 ** 6, 1e-9) == Fraction(1, 3)
    assert rational_snap(mpmath.pi, 10 ** 3, 1e-12) is None
    assert rational_snap(1.0833333333333333) == Fraction(13, 12)
    assert rational_snap(complex(0.5, 1e-3)) is None
    assert rational_snap(complex(-2.5, 1e-14)) == Fraction(-5, 2)


@given(st.fractions(-100, 100, max_denominator=1000))
def test_rational_snap_roundtrip(r):
    with mpmath.workprec(200):
        x = mpmath.mpf(r.numerator) / r.denominator
    assert rational_snap(x, 1000, 1e-30) == r


# --- the (2,2) Eisenstein series ------------------------------------------------------------

@lru_cache(maxsize=None)
def L22():
    return EisensteinLattice.of(A_PLUS_H)


@lru_cache(maxsize=None)
def expansion22():
    return q_expansion(L22(), 8)


FROZEN_22 = {  # cross-checked against the divisor-sum formula in test_bruinier_bundschuh_sum, then frozen
    Fraction(1, 5): -5, Fraction(4, 5): -15, Fraction(1): -30, Fraction(6, 5): -10,
    Fraction(9, 5): -35, Fraction(2): -20, Fraction(11, 5): -60, Fraction(14, 5): -30,
    Fraction(3): -40, Fraction(16, 5): -55, Fraction(19, 5): -100, Fraction(4): -90,
    Fraction(5): -130, Fraction(6): -60, Fraction(7): -120, Fraction(8): -100,
}


def test_lattice_data():
    L = L22()
    assert L.signature == (2, 2) and L.kappa == 2 and L.rank == 4
    assert [L.D.q(mu) for mu in L.D.elements] == [0, Fraction(1, 5), Fraction(4, 5), Fraction(4, 5),
                                                  Fraction(1, 5)]


def test_constant_term():
    c = eis_coefficient(L22(), 0)
    assert c.component_snaps == (1, 0, 0, 0, 0)


def test_frozen_coefficients():
    co = expansion22()
    for n, want in FROZEN_22.items():
        snaps = [rational_snap(complex(x)) for x in co[n]]
        assert want in snaps, (n, snaps)
        assert all(s in (0, want) for s in snaps)


def chi5(d):
    return QuadChar.of(5)(d)


def bruinier_bundschuh(n):
    """(2 / L(-1, chi_5)) sum_{d | n} d (chi(d) + chi(n/d)), L(-1, chi_5) = -2/5."""
    s = sum(d * (chi5(d) + chi5(n // d)) for d in range(1, n + 1) if n % d == 0)
    return Fraction(2) / Fraction(-2, 5) * s


def test_bruinier_bundschuh_sum():
    co = expansion22()
    assert bruinier_bundschuh(1) == -10 and bruinier_bundschuh(4) == -30
    for n in range(1, 41):
        c = co.get(Fraction(n, 5))
        total = 0 if c is None else sum(rational_snap(complex(x)) for x in c)
        assert total == bruinier_bundschuh(n), n


def test_coefficients_rational_and_many():
    snapped = [rational_snap(complex(x), 10 ** 6, 1e-9) for c in expansion22().values() for x in c if abs(x) > 0]
    assert len(snapped) >= 10 and all(s is not None for s in snapped)


@pytest.mark.parametrize("tau", [1j, 0.2 + 1.3j, -0.35 + 1.05j])
def test_modularity_probe(tau):
    assert modularity_defect(L22(), expansion22(), tau) < 1e-6


def test_probe_detects_a_wrong_normalization():
    co = expansion22()
    assert modularity_defect(L22(), co, 1j, K=1.05) > 1e-3


def test_calibration_reproduces_frozen_unit():
    K = calibrate_normalization(L22(), expansion22())
    assert abs(K - NORMALIZATION[0]) < 1e-10


# --- the (3,2) series ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def L32():
    return EisensteinLattice.of(A_PLUS_H_PLUS_2)


@pytest.mark.parametrize("n,want", [(Fraction(1, 20), Fraction(-5, 13)), (Fraction(1, 5), Fraction(-35, 13)),
                                    (Fraction(1, 4), Fraction(-24, 13)), (Fraction(1), Fraction(-264, 13)),
                                    (Fraction(9, 20), Fraction(-125, 13))])
def test_odd_rank_coefficients(n, want):
    comps = coefficient_components(L32(), n)
    snaps = [rational_snap(complex(x)) for x in comps]
    assert want in snaps and all(s in (0, want) for s in snaps)


@pytest.mark.slow
def test_odd_rank_calibration():
    co = q_expansion(L32(), 5)
    raw = {n: c if n == 0 else c / NORMALIZATION[1] for n, c in co.items()}
    K = calibrate_normalization(L32(), raw, taus=(1j, 1.1j, 0.15 + 1.05j))
    assert abs(K - NORMALIZATION[1]) < 1e-8
    assert abs(calibrate_normalization(L32(), co) - 1) < 1e-8
    assert modularity_defect(L32(), co, 1.1j) < 1e-6


# --- archimedean profile ------------------------------------------------------------------

@pytest.mark.parametrize("h", [0.7, -0.4, 0.0])
def test_shimura_xi_matches_quadrature(h):
    y, a, b = 1.3, 1.7, 0.6
    with mpmath.workdps(25):
        f = lambda x: mpmath.expjpi(-2 * h * x) * (x + 1j * y) ** (-a) * (x - 1j * y) ** (-b)
        if h == 0:
            num = mpmath.quad(f, [-mpmath.inf, -20, 0, 20, mpmath.inf])
        else:
            num = mpmath.quadosc(lambda x: f(x) + f(-x), [0, mpmath.inf], omega=2 * mpmath.pi * abs(h))
        assert abs(shimura_xi(y, h, a, b) - num) < 1e-10


@pytest.mark.parametrize("kappa", [2, Fraction(5, 2), 3])
def test_value_at_center(kappa):
    k = float(kappa)
    for n, v in ((1, 0.9), (3, 1.4)):
        w = arch_whittaker(n, v, k - 1, k)
        assert abs(complex(w) - arch_value_at_center(k) * n ** (k - 1)) < 1e-10
    assert abs(arch_value_at_center(2) + 4 * np.pi ** 2) < 1e-12


def test_negative_index_term_vanishes():
    for v in (2, 10, 50):
        assert abs(arch_whittaker(-1, v, 1, 2)) == 0
    vals = [abs(arch_whittaker(-1, v, 1.3, 2)) for v in (2, 10, 50)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-100


def test_constant_term_log_slope_is_one_half():
    slope = lambda v: (constant_term_derivative(2 * v, 2) - constant_term_derivative(v, 2)) / mpmath.log(2)
    assert abs(slope(1e4) - 0.5) < 2e-4
    assert abs(slope(1e5) - 0.5) < 2e-5


def test_log_derivative_limit():
    k = 2
    lim = 0.5 * (mpmath.log(mpmath.pi) - mpmath.digamma(k))
    r = arch_derivative(1, 300, k) / arch_whittaker(1, 300, k - 1, k)
    assert abs(r - lim) < 1e-3
    assert abs(lim - (0.5 * mpmath.log(mpmath.pi) + 0.5 * mpmath.euler - 0.5)) < 1e-15


# --- divisor sums, derivative constant, pairing ------------------------------------------------

def test_twisted_divisor_sum_examples():
    chi = QuadChar.of(5)
    assert twisted_divisor_sum(1, 4, chi) == 1
    for p in (2, 3, 11, 19):
        assert twisted_divisor_sum(p, 4, chi) == 1 + chi(p) * p ** 2
    assert twisted_divisor_sum(12, 3, {2: 1, 3: -1}) == pytest.approx(
        sum(c * d ** 1.5 for d, c in ((1, 1), (2, 1), (3, -1), (4, 1), (6, -1), (12, -1))))


@given(st.integers(1, 3000).filter(is_squarefree), st.integers(3, 6), st.integers(0, 2 ** 10))
def test_divisor_sum_lower_bound(m, b, bits):
    ps = sorted(factorint(m))
    chi = {p: (1 if bits >> i & 1 else -1) for i, p in enumerate(ps)}
    assert abs(twisted_divisor_sum(m, b, chi)) >= divisor_sum_kappa(b) * m ** (b / 2) * (1 - 1e-12)


def test_divisor_sum_kappa_domain():
    with pytest.raises(ValueError):
        divisor_sum_kappa(2)


def test_eis_derivative_constant():
    c = eis_derivative_constant(5, 7, 3)
    assert c[GAMMA] == Fraction(1, 2) and c[zf_ld(5)] == -1
    assert c[LOGPI] == Fraction(1, 2) and c[ONE] == Fraction(-1, 2) and c[ZQ_LD] == 1
    for bad in ((5, 6, 3), (5, 7, 4), (5, 0, 3)):
        with pytest.raises(ValueError):
            eis_derivative_constant(*bad)


def g_coeffs():
    L = L22()
    return [eis_coefficient(L, n) for n in (Fraction(1, 5), Fraction(4, 5), Fraction(1))]


def test_pairing_trivial():
    assert pairing_residue_check(g_coeffs(), PrincipalPart({}, (0, 0, 0, 0, 0))) == 0


def test_pairing_synthetic_and_perturbed():
    a = (Fraction(0), Fraction(1), Fraction(0), Fraction(0), Fraction(2))
    base = sum(rational_snap(complex(x)) * y for x, y in zip(g_coeffs()[0].components, a))
    f = PrincipalPart({Fraction(1, 5): a}, (-base, 0, 0, 0, 0))
    assert abs(pairing_residue_check(g_coeffs(), f)) < 1e-10
    eps = Fraction(1, 7)
    f2 = PrincipalPart({Fraction(1, 5): a}, (-base + eps, 0, 0, 0, 0))
    assert abs(pairing_residue_check(g_coeffs(), f2) - float(eps)) < 1e-10


def test_principal_part_validation():
    with pytest.raises(TypeError):
        PrincipalPart({1: (0.5,)}, (0,))
    with pytest.raises(ValueError):
        PrincipalPart({-1: (1,)}, (0,))
    with pytest.raises(KeyError):
        pairing_residue_check(g_coeffs(), PrincipalPart({Fraction(2): (1, 0, 0, 0, 0)}, (0,) * 5))
