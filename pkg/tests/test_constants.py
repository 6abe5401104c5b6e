import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from arivol import constants as C
from arivol.constants import (GAMMA, LOG2, LOGPI, ONE, ZPM1, ZQ_LD, ConstExpr, QuotientMode,
                              log_p, quotient_compare, zf_ld)
from arivol.eisen import eis_derivative_constant

SYMS = [ONE, GAMMA, LOGPI, LOG2, ZQ_LD, ZPM1, "LOG_P(3)", "LOG_P(7)", zf_ld(5)]
rats = st.builds(Fraction, st.integers(-500, 500), st.integers(1, 50))
exprs = st.dictionaries(st.sampled_from(SYMS), rats, max_size=6).map(ConstExpr)


# --- vector space laws ------------------------------------------------------------------------

@given(exprs, exprs, exprs)
def test_addition_associative_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a - a == ConstExpr()


@given(exprs, exprs, rats, rats)
def test_scaling_distributive(a, b, r, s):
    assert r * (a + b) == r * a + r * b
    assert (r + s) * a == r * a + s * a
    assert (r * s) * a == r * (s * a)


@given(exprs)
def test_json_round_trip_is_byte_stable(a):
    text = a.to_json()
    b = ConstExpr.from_json(text)
    assert b == a and b.to_json() == text
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_zero_coefficients_are_dropped():
    assert ConstExpr({ONE: 0, GAMMA: Fraction(1, 3)}).support == {GAMMA}


def test_json_format():
    assert C.const(ONE=Fraction(-1, 12), GAMMA=2).to_json() == '{"GAMMA": "2/1", "ONE": "-1/12"}'


def test_log_p_symbols():
    assert log_p(2) == LOG2 and log_p(7) == "LOG_P(7)"
    with pytest.raises(ValueError):
        log_p(9)


# --- quotient modes -----------------------------------------------------------------------------

def test_rn_masks_log_primes_dividing_n():
    y = C.thm_main_constant(5)
    x = y + 3 * ConstExpr({log_p(7): 1})
    assert quotient_compare(x, y, QuotientMode.parse("RN:14"))
    assert not quotient_compare(x, y, QuotientMode("R"))
    assert not quotient_compare(x, y, QuotientMode("RN", 6))
    assert quotient_compare(x + ConstExpr({LOG2: 5}), y, QuotientMode("RN", 14))


def test_log_quotients_mask_every_log_prime():
    x = ConstExpr({LOG2: 1, "LOG_P(101)": -2, ONE: 1})
    for m in ("logQ", "logQbar", "R_mod_logQ", "R_mod_logQbar"):
        assert QuotientMode.parse(m).reduce(x) == ConstExpr({ONE: 1})


def test_bad_modes_rejected():
    for m in ("Q", "RN:0", "RN:x"):
        with pytest.raises(ValueError):
            QuotientMode.parse(m)


def test_thm_main_matches_shimura_curve_constant_mod_logs():
    x = C.thm_main_constant(5) - ConstExpr({zf_ld(5): 1})
    assert quotient_compare(x, C.shimura_curve_constant(), QuotientMode("logQbar"))


# --- headline formulas -------------------------------------------------------------------------

def test_coefficients():
    t, h, lam, b = (C.thm_main_constant(5), C.hormann_constant(5), C.lambda_logderiv(5),
                    C.borcherds_integral_constant(5))
    assert t[GAMMA] == -2 and t[ZQ_LD] == 0 and t[LOGPI] == -4 and t[zf_ld(5)] == 1
    assert h[ONE] == 3 and h[LOGPI] == -12 and h[ZQ_LD] == 2
    assert lam[LOGPI] == Fraction(-3, 2) and lam[ZQ_LD] == 1
    assert b[ZQ_LD] == -2 and b[LOG2] == 0 and b[zf_ld(5)] == 2


@pytest.mark.parametrize("dF", [5, 8, 12, 13, 17, 21, 24, 28])
def test_first_reduction(dF):
    assert C.first_reduction_check(dF)
    t, h, b = C.thm_main_constant(dF), C.hormann_constant(dF), C.borcherds_integral_constant(dF)
    assert 4 * t[GAMMA] == h[GAMMA] + b[GAMMA] == -8
    assert h[ZQ_LD] + b[ZQ_LD] == 0


@pytest.mark.parametrize("D_B", [209, 6, 2 * 3 * 5 * 7, 1])
def test_hormann_from_lambda(D_B):
    hl = C.hormann_from_lambda(5, D_B)
    assert quotient_compare(hl, C.hormann_constant(5), QuotientMode("logQbar"))
    assert not quotient_compare(hl, C.hormann_constant(5), QuotientMode("R"))


def test_metric_constants():
    mc = C.metric_constants(209)
    assert mc.log_c_taut == ConstExpr({GAMMA: -2, LOGPI: -6, LOG2: -18, "LOG_P(11)": 4, "LOG_P(19)": 4})
    assert mc.log_fritz[GAMMA] == -1
    assert mc.log_metric_Lj == ConstExpr({LOG2: 4, LOGPI: 2, "LOG_P(11)": -1, "LOG_P(19)": -1})
    assert C.metric_constants(12).log_c_taut[LOG2] == -18 + 8
    with pytest.raises(ValueError):
        C.metric_constants(0)


def test_eis_derivative_constant_has_no_log_primes():
    e = eis_derivative_constant(5, 3, 11)
    assert e[GAMMA] == Fraction(1, 2) and e[zf_ld(5)] == -1
    assert all(QuotientMode("RN", N).reduce(e) == e for N in (2, 30, 209))


# --- arithmetic Riemann-Roch -----------------------------------------------------------------

def test_r_genus_coeff():
    assert C.r_genus_coeff(1) == ConstExpr({ZPM1: 2, ONE: Fraction(-1, 12)})
    assert C.r_genus_coeff(3)[ONE] == Fraction(1, 120) * Fraction(11, 6)
    assert C.r_genus_coeff(5)[ONE] == Fraction(-1, 252) * Fraction(137, 60)
    for m in (0, 2, -1):
        with pytest.raises(ValueError):
            C.r_genus_coeff(m)


def test_zeta_at_negative_odd_against_mpmath():
    for m in (1, 3, 5, 7, 9):
        assert abs(float(C.zeta_at_negative_odd(m)) - float(mpmath.zeta(-m))) < 1e-15


def test_arr_specializations():
    assert C.arr_surface_rhs(0, 0).is_zero()
    assert C.arr_threefold_rhs(-24, 0) == ConstExpr({ONE: 1})
    assert C.arr_surface_rhs(12, 2) == ConstExpr({ONE: 1}) + C.r_genus_coeff(1)
    assert C.arr_threefold_rhs(0, 4) == -1 * C.r_genus_coeff(1)
    assert C.arr_surface_rhs(0, 1)[ZPM1] == 1


def test_bookkeeping():
    b = C.noether_bookkeeping()
    assert b.chi_over_c1sq == Fraction(1, 8)
    assert b.chi_new_over_chi_curve == Fraction(-1, 2)
    assert b.deg_c1sq_over_deg_c1 == 2


# --- numerics -----------------------------------------------------------------------------------

def test_numeric_simple_symbols():
    assert C.numeric_eval(ConstExpr({ONE: 1})).value == 1
    v = C.numeric_eval(ConstExpr({LOGPI: 1}), prec=128)
    with mpmath.workprec(160):
        assert abs(v.value - mpmath.mpf("1.1447298858494001741434273513530587116")) < mpmath.mpf(2) ** -120


def _oracle_thm_main_5(dps=50):
    # zeta_F = zeta * L(., chi_5); log-derivatives by numerical differentiation
    with mpmath.workdps(dps):
        chi = [0, 1, -1, -1, 1]
        zF = lambda s: mpmath.zeta(s) * mpmath.dirichlet(s, chi)
        ld = mpmath.diff(zF, 2) / zF(2)
        return -4 * mpmath.log(mpmath.pi) - 2 * mpmath.euler + 1 + ld


def test_thm_main_numeric_against_independent_oracle():
    v = C.numeric_eval(C.thm_main_constant(5), 5, 128)
    with mpmath.workprec(200):
        assert abs(v.value - _oracle_thm_main_5()) < mpmath.mpf(10) ** -30
    assert v.err < mpmath.mpf(2) ** -100


def test_thm_main_numeric_frozen():
    v = C.numeric_eval(C.thm_main_constant(5), 5, 128)
    with mpmath.workprec(160):
        assert abs(v.value - mpmath.mpf("-5.01634097636711643169874574576422409")) < mpmath.mpf(10) ** -34


def test_precision_consistency():
    for x in (C.thm_main_constant(5), C.hormann_constant(5), C.borcherds_integral_constant(5)):
        a, b = C.numeric_eval(x, 5, 128), C.numeric_eval(x, 5, 256)
        with mpmath.workprec(300):
            assert abs(a.value - b.value) < mpmath.mpf(2) ** -120


def test_numeric_rejects_unresolved_symbols():
    with pytest.raises(C.UnresolvedSymbol):
        C.numeric_eval(C.r_genus_coeff(3))
    with pytest.raises(C.UnresolvedSymbol):
        C.numeric_eval(C.thm_main_constant(8), dF=5)
