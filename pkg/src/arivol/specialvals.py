"""Certified arbitrary-precision values of zeta and L-functions on the real line.

One engine does everything: Euler-Maclaurin summation of the Hurwitz zeta
function and of its s-derivative, with the first omitted Bernoulli term used as
the truncation bound.  Riemann zeta, Dirichlet L(s, chi_F), Dedekind zeta of a
real quadratic field and the Euler constant are all built on top of it.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt

import mpmath
from mpmath import mpf

from . import DEFAULT_PREC

from .numth import QuadChar, bernoulli, gen_bernoulli, sigma1


class PoleError(ValueError):
    pass


class PrecisionUnreachable(RuntimeError):
    pass


def default_prec() -> int:
    return int(os.environ.get("ARIVOL_PREC", DEFAULT_PREC))


@dataclass(frozen=True)
class Precision:
    bits: int = DEFAULT_PREC

    def __post_init__(self):
        if int(self.bits) < 64:
            raise ValueError("precision must be at least 64 bits")


def _bits(prec) -> int:
    if prec is None:
        prec = default_prec()
    b = prec.bits if isinstance(prec, Precision) else int(prec)
    Precision(b)
    return b


@dataclass(frozen=True)
class BigFloat:
    """A real number with working precision and an absolute error bound.

    Every producer in this package guarantees ``err <= 2**(8 - prec)``.
    """
    value: mpf
    prec: int
    err: mpf

    def __float__(self):
        return float(self.value)

    def close_to(self, other, tol) -> bool:
        o = other.value if isinstance(other, BigFloat) else other
        return abs(self.value - o) <= tol

    def __str__(self):
        return mpmath.nstr(self.value, max(15, int(self.prec * 0.30103)))


def _finish(value, err, prec) -> BigFloat:
    # round at prec + 16 bits whatever the caller's context, and charge the rounding
    with mpmath.workprec(prec + 16):
        v = +value
        err = err + abs(v) * mpf(2) ** (-prec - 15)
    cap = mpf(2) ** (8 - prec)
    if err > cap:
        raise PrecisionUnreachable(f"error bound {mpmath.nstr(err, 5)} exceeds 2^(8-{prec})")
    return BigFloat(v, prec, err)


def _em_params(prec: int, s) -> tuple[int, int]:
    m = int(0.35 * prec) + 10
    n = m + 10 + int(max(0, -float(s)))
    return n, m


def _hurwitz_em(s, x, prec: int, deriv: int, n_terms: int, m_terms: int, finite_part=False):
    """Euler-Maclaurin for d^deriv/ds^deriv zeta(s, x), deriv in {0,1}.

    Returns (value, truncation_bound).  With ``finite_part`` the pole term
    (N+x)^(1-s)/(s-1) is replaced at s = 1 by its finite part -log(N+x), which
    is what survives in character-weighted sums whose weights add to zero.
    """
    N, M = n_terms, m_terms
    a = N + x
    la = mpmath.log(a)
    if deriv == 0:
        head = mpmath.fsum((k + x) ** (-s) for k in range(N))
    else:
        head = -mpmath.fsum(mpmath.log(k + x) * (k + x) ** (-s) for k in range(N))
    if s == 1:
        if not finite_part:
            raise PoleError("Hurwitz zeta has a pole at s = 1")
        pole = -la if deriv == 0 else la * la / 2
    elif deriv == 0:
        pole = a ** (1 - s) / (s - 1)
    else:
        pole = -a ** (1 - s) * (la / (s - 1) + 1 / (s - 1) ** 2)
    half = a ** (-s) / 2 if deriv == 0 else -la * a ** (-s) / 2
    tail = mpf(0)
    r, dr = s, mpf(1)  # (s)_{2j-1} and its s-derivative, updated two factors at a time
    p = a ** (-s - 1)
    inv_a2 = 1 / (a * a)
    for j in range(1, M + 2):
        if j > 1:
            f = (s + 2 * j - 3) * (s + 2 * j - 2)
            df = 2 * s + 4 * j - 5
            r, dr = r * f, dr * f + r * df
            p *= inv_a2
        B = bernoulli(2 * j)
        c = mpf(B.numerator) / B.denominator / factorial(2 * j)
        t = c * r * p if deriv == 0 else c * (dr - la * r) * p
        if j == M + 1:
            nxt = abs(t)
        else:
            tail += t
    # For real s > 1 - 2M the remainder is bounded by the first omitted term; the
    # factor (1 + la) covers the log introduced by differentiating the remainder.
    bound = 2 * nxt * (1 + la) + N * mpf(2) ** (-mpmath.mp.prec + 4) * (1 + la) * (
        abs(head) + 1)
    return head + pole + half + tail, bound


def _hurwitz(s, x, prec, deriv, finite_part=False):
    prec = _bits(prec)
    s_ = Fraction(s) if isinstance(s, int) else s
    N, M = _em_params(prec, float(s_))
    # guard bits: for s < 1 the partial sums grow like N^(1-s) log N
    guard = 32 + int(max(0.0, 1 - float(s_)) * (N.bit_length() + 7))
    with mpmath.workprec(prec + guard):
        sv, xv = _to_mpf(s_), _to_mpf(x)
        if xv <= 0:
            raise ValueError("x must be positive")
        for _ in range(6):
            val, bound = _hurwitz_em(sv, xv, prec, deriv, N, M, finite_part)
            if bound < mpf(2) ** (-prec - 2):
                break
            N *= 2
        return val, bound


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def hurwitz_zeta(s, x, prec=None) -> BigFloat:
    """zeta(s, x) = sum_{k>=0} (k + x)^(-s) for real s != 1 and x > 0."""
    p = _bits(prec)
    v, b = _hurwitz(s, x, p, 0)
    return _finish(v, b, p)


def hurwitz_zeta_ds(s, x, prec=None) -> BigFloat:
    """d/ds zeta(s, x)."""
    p = _bits(prec)
    v, b = _hurwitz(s, x, p, 1)
    return _finish(v, b, p)


def hurwitz_truncation_pair(s, x, prec=None, deriv=0):
    """Values at the default truncation N and at N/2, 2N, with the bound at N.

    Used to audit the advertised bound empirically.
    """
    p = _bits(prec)
    with mpmath.workprec(p + 40):
        sv, xv = _to_mpf(Fraction(s) if isinstance(s, int) else s), _to_mpf(x)
        N, M = _em_params(p, float(sv))
        out = {}
        for key, n in (("half", N // 2), ("base", N), ("double", 2 * N)):
            out[key] = _hurwitz_em(sv, xv, p, deriv, n, M)
    return out


def zeta(s, prec=None) -> BigFloat:
    return hurwitz_zeta(s, 1, prec)


def zeta_prime(s, prec=None) -> BigFloat:
    return hurwitz_zeta_ds(s, 1, prec)


def euler_gamma(prec=None) -> BigFloat:
    """gamma = lim (H_N - log N), via Euler-Maclaurin on the harmonic sum."""
    p = _bits(prec)
    with mpmath.workprec(p + 24):
        N, M = _em_params(p, 1)
        for _ in range(6):
            # H_{N-1} - log N + 1/(2N) + sum_j B_2j / (2j N^2j)
            v = mpmath.fsum(mpf(1) / k for k in range(1, N)) - mpmath.log(N) + mpf(1) / (2 * N)
            for j in range(1, M + 2):
                B = bernoulli(2 * j)
                t = mpf(B.numerator) / B.denominator / (2 * j) / mpf(N) ** (2 * j)
                if j == M + 1:
                    nxt = abs(t)
                else:
                    v += t
            err = 2 * nxt + N * mpf(2) ** (-p - 20)
            if err < mpf(2) ** (-p - 2):
                break
            N *= 2
        return _finish(v, err, p)


def zeta_prime_minus1(prec=None) -> BigFloat:
    """zeta'(-1) from the functional equation:

        zeta'(-1) = (1 - gamma - log 2 pi) / 12 + zeta'(2) / (12 zeta(2)).
    """
    p = _bits(prec)
    z2, dz2, g = zeta(2, p), zeta_prime(2, p), euler_gamma(p)
    with mpmath.workprec(p + 24):
        v = (1 - g.value - mpmath.log(2 * mpmath.pi)) / 12 + dz2.value / (12 * z2.value)
        err = (g.err + dz2.err / z2.value + abs(dz2.value) * z2.err / z2.value ** 2) / 12 \
            + mpf(2) ** (-p - 16)
    return _finish(v, err, p)


def zeta_prime_minus1_direct(prec=None) -> BigFloat:
    """Oracle route: Euler-Maclaurin for the derivative evaluated directly at s = -1."""
    return zeta_prime(-1, prec)


# --- Dirichlet L and Dedekind zeta of F --------------------------------------

def _check_s(s):
    if float(s) <= 0:
        raise ValueError("only s > 0 is supported")


def _L_parts(s, dF, prec, deriv):
    chi = QuadChar.of(dF)
    p = _bits(prec)
    acc, accd, err = mpf(0), mpf(0), mpf(0)
    with mpmath.workprec(p + 24):
        for a in range(1, dF):
            c = chi(a)
            if c == 0:
                continue
            v, b = _hurwitz(s, Fraction(a, dF), p + 8, 0, finite_part=True)
            acc += c * v
            err += b
            if deriv:
                vd, bd = _hurwitz(s, Fraction(a, dF), p + 8, 1, finite_part=True)
                accd += c * vd
                err += bd
    return chi, acc, accd, err


def dirichlet_L(s, dF: int, prec=None) -> BigFloat:
    """L(s, chi_F) = dF^(-s) sum_a chi(a) zeta(s, a/dF), for real s > 0."""
    _check_s(s)
    p = _bits(prec)
    _, acc, _, err = _L_parts(s, dF, p, 0)
    with mpmath.workprec(p + 24):
        sv = _to_mpf(Fraction(s) if isinstance(s, int) else s)
        scale = mpf(dF) ** (-sv)
        return _finish(scale * acc, scale * err + mpf(2) ** (-p - 16), p)


def dirichlet_L_ds(s, dF: int, prec=None) -> BigFloat:
    """d/ds L(s, chi_F) = -log(dF) L + dF^(-s) sum_a chi(a) d/ds zeta(s, a/dF)."""
    _check_s(s)
    if s == 1:
        raise ValueError("derivative at s = 1 is not provided")
    p = _bits(prec)
    _, acc, accd, err = _L_parts(s, dF, p, 1)
    with mpmath.workprec(p + 24):
        sv = _to_mpf(Fraction(s) if isinstance(s, int) else s)
        scale = mpf(dF) ** (-sv)
        v = scale * (accd - mpmath.log(dF) * acc)
        return _finish(v, scale * err * (1 + mpmath.log(dF)) + mpf(2) ** (-p - 16), p)


def zetaF(s, dF: int, prec=None) -> BigFloat:
    """Dedekind zeta of Q(sqrt dF): zeta(s) L(s, chi_F)."""
    p = _bits(prec)
    z, L = zeta(s, p), dirichlet_L(s, dF, p)
    with mpmath.workprec(p + 24):
        return _finish(z.value * L.value, z.err * abs(L.value) + L.err * abs(z.value) + z.err * L.err, p)


def zetaQ_logderiv_at_2(prec=None) -> BigFloat:
    p = _bits(prec)
    z, dz = zeta(2, p), zeta_prime(2, p)
    with mpmath.workprec(p + 24):
        return _finish(dz.value / z.value, (dz.err + abs(dz.value / z.value) * z.err) / z.value, p)


def L_logderiv_at_2(dF: int, prec=None) -> BigFloat:
    p = _bits(prec)
    L, dL = dirichlet_L(2, dF, p), dirichlet_L_ds(2, dF, p)
    with mpmath.workprec(p + 24):
        return _finish(dL.value / L.value, (dL.err + abs(dL.value / L.value) * L.err) / L.value, p)


def zetaF_logderiv_at_2(dF: int, prec=None) -> BigFloat:
    """zeta_F'(2) / zeta_F(2) = zeta'/zeta(2) + L'/L(2, chi_F)."""
    p = _bits(prec)
    a, b = zetaQ_logderiv_at_2(p), L_logderiv_at_2(dF, p)
    with mpmath.workprec(p + 24):
        return _finish(a.value + b.value, a.err + b.err, p)


# --- exact special values ------------------------------------------------------

def zetaF_minus1(dF: int) -> Fraction:
    """zeta_F(-1) = zeta(-1) L(-1, chi_F) = (-1/12)(-B_{2,chi}/2) = B_{2,chi} / 24."""
    return gen_bernoulli(QuadChar.of(dF), 2) / 24


def siegel_zetaF_minus1(dF: int) -> Fraction:
    """Siegel's formula (1/60) sum_{b^2 < dF, b = dF mod 2} sigma_1((dF - b^2)/4)."""
    QuadChar.of(dF)
    total = 0
    r = isqrt(dF)
    for b in range(-r, r + 1):
        if b * b < dF and (dF - b * b) % 4 == 0:
            total += sigma1((dF - b * b) // 4)
    return Fraction(total, 60)


def zetaF2_rational_part(dF: int) -> Fraction:
    """The exact rational zeta_F(2) dF^(3/2) / pi^4.

    L(2, chi) = pi^2 B_{2,chi} / dF^(3/2) for even primitive chi, and zeta(2) = pi^2/6,
    so the ratio is B_{2,chi}/6 = 4 zeta_F(-1).
    """
    return 4 * zetaF_minus1(dF)


def zetaF2_normalized(dF: int, prec=None) -> BigFloat:
    """Numeric zeta_F(2) dF^(3/2) / pi^4 (to be snapped to a rational)."""
    p = _bits(prec)
    z = zetaF(2, dF, p)
    with mpmath.workprec(p + 24):
        c = mpf(dF) ** mpf(1.5) / mpmath.pi ** 4
        return _finish(z.value * c, z.err * c + mpf(2) ** (-p - 16), p)


def kronecker_L(s, D: int, prec=None) -> BigFloat:
    """L(s, (f | .)) for f the fundamental discriminant of Q(sqrt D), s > 1.

    D of either sign is allowed; a square D gives the Riemann zeta function.
    """
    from .numth import fundamental_part, kronecker
    if float(s) <= 1:
        raise ValueError("only s > 1 is supported")
    f = fundamental_part(D)
    p = _bits(prec)
    if f == 1:
        return zeta(s, p)
    q = abs(f)
    acc, err = mpf(0), mpf(0)
    with mpmath.workprec(p + 24):
        for a in range(1, q):
            c = kronecker(f, a)
            if c:
                v, b = _hurwitz(s, Fraction(a, q), p + 8, 0)
                acc += c * v
                err += b
        sv = _to_mpf(Fraction(s) if isinstance(s, int) else s)
        scale = mpf(q) ** (-sv)
        return _finish(scale * acc, scale * err + mpf(2) ** (-p - 16), p)


def kronecker_L_afe(s, D: int, dps: int = 30):
    """Fast L(s, (f | .)) through the smoothed functional equation.

    For a real primitive character of conductor q and parity a the completed
    function Lambda(s) = (q/pi)^((s+a)/2) Gamma((s+a)/2) L(s) equals

        sum_n chi(n) [G(s, n) + G(1 - s, n)],  G(s, n) = (q/pi)^((s+a)/2) n^-s Gamma((s+a)/2, pi n^2/q),

    the root number being 1.  Terms decay like exp(-pi n^2 / q).  Not
    certified; ``kronecker_L`` is the reference.
    """
    from .numth import fundamental_part, kronecker
    f = fundamental_part(D)
    with mpmath.workdps(dps):
        s = mpmath.mpmathify(s if not isinstance(s, Fraction) else mpf(s.numerator) / s.denominator)
        if f == 1:
            return mpmath.zeta(s)
        q = abs(f)
        a = 0 if f > 0 else 1
        c = mpmath.pi / q
        tot = mpf(0)
        n = 1
        while True:
            x = c * n * n
            if x > dps * 2.4 + 10:
                break
            chi = kronecker(f, n)
            if chi:
                g1 = (1 / c) ** ((s + a) / 2) * mpf(n) ** (-s) * mpmath.gammainc((s + a) / 2, x)
                g2 = (1 / c) ** ((1 - s + a) / 2) * mpf(n) ** (s - 1) * mpmath.gammainc((1 - s + a) / 2, x)
                tot += chi * (g1 + g2)
            n += 1
        return tot / ((1 / c) ** ((s + a) / 2) * mpmath.gamma((s + a) / 2))
