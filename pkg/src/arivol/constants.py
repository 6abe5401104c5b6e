"""Exact constants over a formal transcendental basis.

A ``ConstExpr`` is a finitely supported map from basis symbols to rationals.
The symbols ``LOGPI``, ``GAMMA``, ``ONE``, the zeta log-derivatives and
zeta'(-m) are treated as independent; this is a bookkeeping convention, not
a claim of linear independence.  Quotients such as R / (sum_{p | N} Q log p)
are modelled by masking the ``LOG2`` and ``LOG_P(p)`` coordinates.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .numth import bernoulli, factorint, is_prime
from .specialvals import (BigFloat, _bits, _finish, euler_gamma, zeta_prime_minus1,
                          zetaF_logderiv_at_2, zetaQ_logderiv_at_2)

ONE = "ONE"
GAMMA = "GAMMA"
LOGPI = "LOGPI"
LOG2 = "LOG2"
ZQ_LD = "ZQ_LD"
ZPM1 = "ZPM1"


class UnresolvedSymbol(KeyError):
    pass


def log_p(p: int) -> str:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return LOG2 if p == 2 else f"LOG_P({p})"


def zf_ld(dF: int) -> str:
    """zeta_F'(2) / zeta_F(2) for F = Q(sqrt dF)."""
    return f"ZF_LD({dF})"


def zpm(m: int) -> str:
    """zeta'(-m)."""
    return ZPM1 if m == 1 else f"ZPM({m})"


_LOG_RE = re.compile(r"LOG_P\((\d+)\)$")
_ZF_RE = re.compile(r"ZF_LD\((\d+)\)$")


def _is_log_symbol(sym: str) -> bool:
    return sym == LOG2 or _LOG_RE.match(sym) is not None


def _log_prime(sym: str):
    if sym == LOG2:
        return 2
    m = _LOG_RE.match(sym)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class ConstExpr:
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: Fraction(v) for k, v in self.coeffs.items() if Fraction(v) != 0}
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, sym: str) -> Fraction:
        return self.coeffs.get(sym, Fraction(0))

    def coeff(self, sym: str) -> Fraction:
        return self[sym]

    def __add__(self, other: "ConstExpr") -> "ConstExpr":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ConstExpr(out)

    def __neg__(self):
        return ConstExpr({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = Fraction(c)
        return ConstExpr({k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ConstExpr) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    @property
    def support(self) -> frozenset:
        return frozenset(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> str:
        return json.dumps({k: f"{v.numerator}/{v.denominator}" for k, v in self.coeffs.items()},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConstExpr":
        return cls({k: Fraction(v) for k, v in json.loads(text).items()})

    def __repr__(self):
        return f"ConstExpr({self.to_json()})"


def const(**kw) -> ConstExpr:
    return ConstExpr(kw)


# --- quotient modes --------------------------------------------------------------

_MODE_ALIASES = {"R_mod_logQ": "logQ", "R_mod_logQbar": "logQbar"}


@dataclass(frozen=True)
class QuotientMode:
    """``R``, ``RN`` (with N), ``logQ`` or ``logQbar``."""
    mode: str = "R"
    N: int = 1

    def __post_init__(self):
        if self.mode not in ("R", "RN", "logQ", "logQbar"):
            raise ValueError(f"unknown quotient mode {self.mode!r}")
        if self.mode == "RN" and self.N < 1:
            raise ValueError("R_N needs a positive N")

    @classmethod
    def parse(cls, text: str) -> "QuotientMode":
        if text.startswith("RN:"):
            try:
                return cls("RN", int(text[3:]))
            except ValueError:
                raise ValueError(f"bad modulus in {text!r}") from None
        return cls(_MODE_ALIASES.get(text, text))

    def masks(self, sym: str) -> bool:
        if not _is_log_symbol(sym):
            return False
        if self.mode == "R":
            return False
        if self.mode == "RN":
            return self.N % _log_prime(sym) == 0
        return True

    def reduce(self, x: ConstExpr) -> ConstExpr:
        return ConstExpr({k: v for k, v in x.coeffs.items() if not self.masks(k)})


def rn_reduce(x: ConstExpr, N: int) -> ConstExpr:
    return QuotientMode("RN", N).reduce(x)


def quotient_compare(x: ConstExpr, y: ConstExpr, mode: QuotientMode = QuotientMode()) -> bool:
    return mode.reduce(x - y).is_zero()


# --- the formulas ------------------------------------------------------------------

def thm_main_constant(dF: int) -> ConstExpr:
    return ConstExpr({LOGPI: -4, GAMMA: -2, ONE: 1, zf_ld(dF): 1})


def hormann_constant(dF: int) -> ConstExpr:
    return ConstExpr({LOGPI: -12, GAMMA: -6, ONE: 3, zf_ld(dF): 2, ZQ_LD: 2})


def lambda_logderiv(dF: int) -> ConstExpr:
    """Logarithmic derivative at 0 of the completed function Gamma^3 zeta(2+2s) L(2+s), mod log 2."""
    h = Fraction(3, 2)
    return ConstExpr({LOGPI: -h, GAMMA: -h, ONE: h, zf_ld(dF): 1, ZQ_LD: 1})


def borcherds_integral_constant(dF: int) -> ConstExpr:
    return ConstExpr({GAMMA: -2, LOGPI: -4, ONE: 1, zf_ld(dF): 2, ZQ_LD: -2})


def shimura_curve_constant() -> ConstExpr:
    """The universal part -4 log pi - 2 gamma + 1 of the Shimura curve volume."""
    return ConstExpr({LOGPI: -4, GAMMA: -2, ONE: 1})


def first_reduction_check(dF: int) -> bool:
    return 4 * thm_main_constant(dF) == hormann_constant(dF) + borcherds_integral_constant(dF)


def _log_of_integer(n: int) -> ConstExpr:
    return ConstExpr({log_p(p): e for p, e in factorint(n).items()}) if n > 1 else ConstExpr()


@dataclass(frozen=True)
class MetricConstants:
    log_c_taut: ConstExpr          # log(e^{-2 gamma} D_B^4 pi^{-6} 64^{-3})
    log_fritz: ConstExpr           # log(e^{-gamma - log 2 pi} / 4), the absolute value of the normalization
    log_metric_Lj: ConstExpr       # log(16 pi^2 / D_B)


def metric_constants(D_B: int) -> MetricConstants:
    if D_B < 1:
        raise ValueError("D_B must be a positive integer")
    logD = _log_of_integer(D_B)
    c = ConstExpr({GAMMA: -2, LOGPI: -6, LOG2: -18}) + 4 * logD
    fritz = ConstExpr({GAMMA: -1, LOG2: -3, LOGPI: -1})
    lj = ConstExpr({LOG2: 4, LOGPI: 2}) - logD
    return MetricConstants(c, fritz, lj)


def hormann_from_lambda(dF: int, D_B: int) -> ConstExpr:
    """2 * lambda'/lambda + (3/2) log c, to be compared with hormann_constant modulo logs of rationals."""
    return 2 * lambda_logderiv(dF) + Fraction(3, 2) * metric_constants(D_B).log_c_taut


# --- arithmetic Riemann-Roch -------------------------------------------------------

def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


def zeta_at_negative_odd(m: int) -> Fraction:
    """zeta(-m) = -B_{m+1} / (m + 1)."""
    return -bernoulli(m + 1) / (m + 1)


def r_genus_coeff(m: int) -> ConstExpr:
    """2 zeta'(-m) + zeta(-m) H_m."""
    if m < 1 or m % 2 == 0:
        raise ValueError("m must be odd and positive")
    return ConstExpr({zpm(m): 2, ONE: zeta_at_negative_odd(m) * harmonic(m)})


def arr_surface_rhs(X, geo_deg) -> ConstExpr:
    return ConstExpr({ONE: Fraction(X) / 12}) + Fraction(geo_deg) * Fraction(1, 2) * r_genus_coeff(1)


def arr_threefold_rhs(X, geo_deg) -> ConstExpr:
    return ConstExpr({ONE: -Fraction(X) / 24}) - Fraction(geo_deg) * Fraction(1, 4) * r_genus_coeff(1)


@dataclass(frozen=True)
class BookkeepingResult:
    chi_over_c1sq: Fraction        # chi = (1/12)(c1^2 + c2) with c1^2 = 2 c2
    chi_new_over_chi_curve: Fraction
    chi_curve_over_deg_c1: Fraction
    deg_c1sq_over_deg_c1: Fraction


def noether_bookkeeping() -> BookkeepingResult:
    """The rational chain relating the new part of c1^2 to the degree of c1 on the curve.

    chi(O) = (c1^2 + c2)/12 and c1^2 = 2 c2 give chi = c1^2 / 8.  Combined with
    chi_new = -chi(S1)/2 and chi(S1) = -deg c1(S1)/2 this yields
    deg_new c1^2 = 8 chi_new = 2 deg c1(S1).
    """
    c1sq = Fraction(1)
    c2 = c1sq / 2
    chi_over = (c1sq + c2) / 12 / c1sq
    chi_new_over_curve = Fraction(-1, 2)
    curve_over_deg = Fraction(-1, 2)
    ratio = chi_new_over_curve * curve_over_deg / chi_over
    return BookkeepingResult(chi_over, chi_new_over_curve, curve_over_deg, ratio)


# --- numerics -----------------------------------------------------------------------

def _symbol_value(sym: str, dF, prec: int):
    if sym == ONE:
        return mpmath.mpf(1), mpmath.mpf(0)
    if sym == LOGPI:
        return mpmath.log(mpmath.pi), mpmath.mpf(0)
    if sym == GAMMA:
        g = euler_gamma(prec)
        return g.value, g.err
    if _is_log_symbol(sym):
        return mpmath.log(_log_prime(sym)), mpmath.mpf(0)
    if sym == ZQ_LD:
        b = zetaQ_logderiv_at_2(prec)
        return b.value, b.err
    if sym == ZPM1:
        b = zeta_prime_minus1(prec)
        return b.value, b.err
    m = _ZF_RE.match(sym)
    if m:
        d = int(m.group(1))
        if dF is not None and d != dF:
            raise UnresolvedSymbol(f"{sym} does not match dF = {dF}")
        b = zetaF_logderiv_at_2(d, prec)
        return b.value, b.err
    raise UnresolvedSymbol(sym)


def numeric_eval(x: ConstExpr, dF=None, prec=None) -> BigFloat:
    p = _bits(prec)
    with mpmath.workprec(p + 32):
        tot, err = mpmath.mpf(0), mpmath.mpf(0)
        for sym, c in sorted(x.coeffs.items()):
            v, e = _symbol_value(sym, dF, p + 16)
            cf = mpmath.mpf(c.numerator) / c.denominator
            tot += cf * v
            err += abs(cf) * e
        return _finish(tot, err + mpmath.mpf(2) ** (-p - 16), p)
