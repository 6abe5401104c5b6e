"""Discriminant forms and the Weil representation of Mp2(Z).

Gram matrices here are even: (x, y) = x^T S y with even diagonal and q(x) = (x, x)/2.
Finite quadratic module values: ``norm`` is (mu, mu) mod 2 (Q/2Z-valued) and the
bilinear form is (mu, nu) mod 1.  With sig = b+ - b-,

    rho(T) e_mu = e(q(mu)) e_mu,
    rho(S) e_mu = e(-sig/8) / sqrt|D| * sum_nu e(-(mu, nu)) e_nu,

which makes the vector-valued theta function of a positive-definite lattice
transform with rho (checked numerically on S = (2) in the test suite).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form


class OddLattice(ValueError):
    pass


def _e(x) -> complex:
    return np.exp(2j * np.pi * float(x))


def _frac_mod1(v):
    return tuple(x - (x.numerator // x.denominator) for x in v)


@dataclass(frozen=True)
class DiscriminantForm:
    gram: tuple                # integer even Gram matrix S
    elements: tuple            # representatives mu in S^{-1} Z^n / Z^n, with elements[0] = 0
    cyclic_orders: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def bil(self, mu, nu) -> Fraction:
        S = self.gram
        n = len(S)
        return sum(mu[i] * S[i][j] * nu[j] for i in range(n) for j in range(n))

    def norm(self, mu) -> Fraction:
        """(mu, mu) mod 2."""
        return self.bil(mu, mu) % 2

    def q(self, mu) -> Fraction:
        """q(mu) = (mu, mu)/2 mod 1."""
        return (self.bil(mu, mu) / 2) % 1

    def b(self, mu, nu) -> Fraction:
        return self.bil(mu, nu) % 1

    def index(self, mu) -> int:
        return self._idx[_frac_mod1(tuple(Fraction(x) for x in mu))]

    @property
    def _idx(self):
        d = self.__dict__.get("_idx_cache")
        if d is None:
            d = {mu: i for i, mu in enumerate(self.elements)}
            object.__setattr__(self, "_idx_cache", d)
        return d

    def neg(self, i: int) -> int:
        return self.index(tuple(-x for x in self.elements[i]))

    def add(self, i: int, j: int) -> int:
        return self.index(tuple(a + b for a, b in zip(self.elements[i], self.elements[j])))

    def level(self) -> int:
        from math import lcm
        out = 1
        for mu in self.elements:
            out = lcm(out, self.q(mu).denominator)
        return out

    def milgram_sum(self) -> complex:
        return sum(_e(self.q(mu)) for mu in self.elements)

    def signature_mod8(self) -> int:
        g = self.milgram_sum() / np.sqrt(self.order)
        k = np.angle(g) / (2 * np.pi) * 8
        return int(round(k)) % 8


def discriminant_form(gram) -> DiscriminantForm:
    S = [[int(x) for x in row] for row in np.asarray(gram, dtype=object).tolist()]
    n = len(S)
    M = Matrix(S)
    if M.det() == 0:
        raise ValueError("degenerate Gram matrix")
    if any(S[i][i] % 2 for i in range(n)) or any(S[i][j] != S[j][i] for i in range(n) for j in range(n)):
        raise OddLattice("even symmetric Gram matrix required")
    Sinv = M.inv()
    gens = [_frac_mod1(tuple(Fraction(int(Sinv[i, j].p), int(Sinv[i, j].q)) for i in range(n)))
            for j in range(n)]
    zero = tuple(Fraction(0) for _ in range(n))
    seen = {zero: 0}
    order = [zero]
    frontier = [zero]
    while frontier:
        nxt = []
        for mu in frontier:
            for g in gens:
                nu = _frac_mod1(tuple(a + b for a, b in zip(mu, g)))
                if nu not in seen:
                    seen[nu] = len(order)
                    order.append(nu)
                    nxt.append(nu)
        frontier = nxt
    snf = smith_normal_form(M)
    cyc = tuple(abs(int(snf[i, i])) for i in range(n) if abs(int(snf[i, i])) != 1)
    D = DiscriminantForm(tuple(tuple(r) for r in S), tuple(order), cyc)
    assert D.order == abs(int(M.det()))
    return D


@dataclass(frozen=True)
class WeilMatrices:
    T: np.ndarray
    S: np.ndarray
    signature_mod8: int

    def dual(self) -> "WeilMatrices":
        return WeilMatrices(self.T.conj(), self.S.conj(), (-self.signature_mod8) % 8)


def weil_matrices(D: DiscriminantForm, signature) -> WeilMatrices:
    bp, bm = signature
    sig = (bp - bm) % 8
    if D.signature_mod8() != sig:
        raise ValueError(f"signature {signature} inconsistent with Milgram ({D.signature_mod8()} mod 8)")
    N = D.order
    T = np.diag([_e(D.q(mu)) for mu in D.elements])
    ph = _e(Fraction(-sig, 8)) / np.sqrt(N)
    S = np.array([[ph * _e(-D.b(nu, mu)) for mu in D.elements] for nu in D.elements])
    # rows index the image: (rho(S) e_mu)_nu = S[nu, mu]
    return WeilMatrices(T, S, sig)


def is_unitary(M, tol=1e-12) -> bool:
    return np.abs(M @ M.conj().T - np.eye(len(M))).max() < tol


def check_relations(D: DiscriminantForm, W: WeilMatrices, tol=1e-12) -> dict:
    S, T = W.S, W.T
    ST = S @ T
    neg = np.zeros_like(S)
    for i in range(D.order):
        neg[D.neg(i), i] = 1
    z = _e(Fraction(-W.signature_mod8, 4))
    lvl = D.level()
    return {
        "ST3=S2": np.abs(ST @ ST @ ST - S @ S).max() < tol,
        "S2=phase*neg": np.abs(S @ S - z * neg).max() < tol,
        "S unitary": is_unitary(S, tol),
        "T unitary": is_unitary(T, tol),
        "T^level=1": np.abs(np.linalg.matrix_power(T, lvl) - np.eye(D.order)).max() < tol,
        "milgram": abs(D.milgram_sum() - np.sqrt(D.order) * _e(Fraction(W.signature_mod8, 8))) < tol,
    }


@dataclass
class SLVector:
    """Element of C[L'/L]; ``rational`` marks membership in Q[L'/L]."""
    D: DiscriminantForm
    coeffs: np.ndarray
    rational: bool = False

    @classmethod
    def basis(cls, D, i=0):
        v = np.zeros(D.order, dtype=object)
        v[:] = Fraction(0)
        v[i] = Fraction(1)
        return cls(D, v, True)

    def as_complex(self):
        return np.array([complex(c) for c in self.coeffs])
