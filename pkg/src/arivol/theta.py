"""Jacobi and Siegel theta functions with certified truncation.

Conventions: lattices are Z^n with an even Gram matrix S, bilinear form
<x, y> = x^T S y and Q(x) = <x, x>/2.  A point of the period domain is an
isotropic complex vector zeta with <zeta, zeta-bar> < 0, and

    R(lam, zeta) = |<lam, zeta>|^2 / |<zeta, zeta-bar>| = -Q(lam_-),

so Q + 2R is the positive majorant Q(lam_+) - Q(lam_-).  The Siegel theta sum
uses the Gaussian e^{-2 pi v * c * R} with c = ``majorant_factor``; c = 2 is the
value for which |summand| = exp(-2 pi v (Q + 2R)) and the series converges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, exp, log, pi, sqrt

import numpy as np

_E = 2j * np.pi

# Gram matrix of (M_2, det) in coordinates (x11, x12, x21, x22), so Q = det.
DET_GRAM = np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float)


class TruncationTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class ThetaConfig:
    majorant_factor: float = 2.0
    max_points: int = 2_000_000


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    truncation_radius: float      # bound T on the majorant form 2(Q + 2R)
    tail_bound: float
    n_terms: int = 0


# --- Jacobi theta -------------------------------------------------------------

def jacobi_theta(tau: complex, tail_eps: float = 1e-15, shift: float = 0.0) -> ThetaValue:
    """sum_{n in Z + shift} e(n^2 tau)."""
    v = tau.imag
    if v <= 0:
        raise ValueError("Im tau must be positive")
    c = 2 * pi * v
    # tail over |n| > R is at most 2 e^{-c R^2} / (1 - e^{-2cR})
    R = 1
    while 2 * exp(-c * R * R) / (1 - exp(-2 * c * R)) >= tail_eps:
        R += 1
    n = np.arange(-R - 1, R + 2) + shift
    n = n[np.abs(n) <= R]
    val = complex(np.exp(_E * tau * n * n).sum())
    return ThetaValue(val, float(R), 2 * exp(-c * R * R) / (1 - exp(-2 * c * R)), len(n))


def jacobi_theta_vector(tau: complex, tail_eps: float = 1e-15) -> np.ndarray:
    """Components for the discriminant group (1/2)Z/Z of Z e with Q(e) = 1."""
    return np.array([jacobi_theta(tau, tail_eps, 0.0).value, jacobi_theta(tau, tail_eps, 0.5).value])


# --- points of the period domain ------------------------------------------------

def _isometry_from_det_model(S: np.ndarray) -> np.ndarray:
    """Real P with P^T S P = DET_GRAM, for S of signature (2, 2)."""
    def frame(G):
        w, U = np.linalg.eigh(G)
        order = np.argsort(-w)           # positive eigenvalues first
        w, U = w[order], U[:, order]
        for k in range(U.shape[1]):      # deterministic eigenvector signs
            j = np.argmax(np.abs(U[:, k]))
            if U[j, k] < 0:
                U[:, k] = -U[:, k]
        return np.diag(np.sqrt(np.abs(w))) @ U.T   # G = A^T J A
    if S.shape != (4, 4):
        raise ValueError("signature (2,2) rank-4 Gram expected")
    A, B = frame(S), frame(DET_GRAM)
    return np.linalg.solve(A, B)


@dataclass(frozen=True)
class DomainPoint:
    """(z1, z2) with Im z1 Im z2 > 0, realised as an isotropic line in a lattice."""
    z1: complex
    z2: complex
    zeta: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.z1.imag * self.z2.imag <= 0:
            raise ValueError("need Im(z1) Im(z2) > 0")

    @staticmethod
    def det_model_vector(z1, z2) -> np.ndarray:
        return np.array([z1, -z1 * z2, 1, -z2], dtype=complex)

    @classmethod
    def on(cls, gram, z1, z2) -> "DomainPoint":
        S = np.asarray(gram, dtype=float)
        zd = cls.det_model_vector(z1, z2)
        zeta = zd if np.array_equal(S, DET_GRAM) else _isometry_from_det_model(S) @ zd
        return cls(complex(z1), complex(z2), zeta)

    def moved(self, g) -> "DomainPoint":
        """Image under a lattice isometry g (acting on the isotropic vector)."""
        return DomainPoint(self.z1, self.z2, np.asarray(g, dtype=float) @ self.zeta)

    def padded(self, extra: int) -> np.ndarray:
        return np.concatenate([self.zeta, np.zeros(extra, dtype=complex)])


def _zeta_of(z, n):
    zeta = z.zeta if isinstance(z, DomainPoint) else np.asarray(z, dtype=complex)
    if len(zeta) < n:
        zeta = np.concatenate([zeta, np.zeros(n - len(zeta), dtype=complex)])
    return zeta


def majorant(gram, z, lam) -> float:
    """R(lam, z) = |<lam, zeta>|^2 / |<zeta, zeta-bar>|."""
    S = np.asarray(gram, dtype=float)
    zeta = _zeta_of(z, len(S))
    lam = np.asarray(lam, dtype=float)
    return float(abs(lam @ S @ zeta) ** 2 / abs(zeta.conj() @ S @ zeta))


def majorant_gram(gram, z) -> np.ndarray:
    """Positive definite G with lam^T G lam = 2 (Q(lam) + 2 R(lam, z))."""
    S = np.asarray(gram, dtype=float)
    zeta = _zeta_of(z, len(S))
    w = S @ zeta
    nrm = abs(zeta.conj() @ S @ zeta)
    W = (np.outer(w.real, w.real) + np.outer(w.imag, w.imag)) / nrm
    return S + 4 * W


# --- short vectors ---------------------------------------------------------------

def enumerate_shifted(G: np.ndarray, T: float, shift=None, max_points=2_000_000) -> np.ndarray:
    """All x in Z^n + shift with x^T G x <= T (Fincke-Pohst on the Cholesky factor)."""
    n = len(G)
    shift = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)
    Rm = np.linalg.cholesky(G).T            # G = Rm^T Rm, Rm upper triangular
    q = np.zeros((n, n))
    for i in range(n):
        q[i, i] = Rm[i, i] ** 2
        for j in range(i + 1, n):
            q[i, j] = Rm[i, j] / Rm[i, i]
    out = []
    x = np.zeros(n)

    def rec(i, remaining):
        # coordinate i; centre from the already fixed coordinates i+1..n-1
        c = -sum(q[i, j] * x[j] for j in range(i + 1, n))
        r = sqrt(max(remaining, 0.0) / q[i, i])
        lo = ceil(c - r - shift[i] - 1e-12)
        hi = int(np.floor(c + r - shift[i] + 1e-12))
        for k in range(lo, hi + 1):
            x[i] = k + shift[i]
            rem = remaining - q[i, i] * (x[i] - c) ** 2
            if rem < -1e-12:
                continue
            if i == 0:
                out.append(x.copy())
                if len(out) > max_points:
                    raise TruncationTooLarge("enumeration budget exceeded")
            else:
                rec(i - 1, rem)

    rec(n - 1, T)
    return np.array(out).reshape(-1, n)


def _tail_bound(G, v, T, weight) -> float:
    """weight * sum_{x^T G x > T} exp(-pi v x^T G x) over any shifted lattice.

    Bounded by weight * e^{-pi v T / 2} * sum_x exp(-pi v x^T G x / 2), and the
    last sum by prod_i sum_k exp(-c (k + s_i)^2) <= (1 + sqrt(pi / c))^n with
    c = pi v mu_min / 2.
    """
    mu_min = float(np.linalg.eigvalsh(G).min())
    c = pi * v * mu_min / 2
    return weight * exp(-pi * v * T / 2) * (1 + sqrt(pi / c)) ** len(G)


def _radius_for(G, v, tail_eps, weight) -> float:
    T0 = _tail_bound(G, v, 0.0, weight)
    return max(2 * log(T0 / tail_eps) / (pi * v), 1.0)


def siegel_theta(gram, tau: complex, z, tail_eps: float = 1e-13, coset=None,
                 config: ThetaConfig = ThetaConfig(), radius_scale: float = 1.0) -> ThetaValue:
    """Theta(tau, z)(1_{coset + L}) = v sum_{lam in coset + L} e^{-2 pi v c R} e(tau Q(lam))."""
    S = np.asarray(gram, dtype=float)
    n = len(S)
    v = tau.imag
    if v <= 0:
        raise ValueError("Im tau must be positive")
    zeta = _zeta_of(z, n)
    if config.majorant_factor != 2.0:
        raise ValueError("only the convergent majorant factor 2 can be truncated with a certified tail")
    G = majorant_gram(S, zeta)
    T = _radius_for(G, v, tail_eps, v) * radius_scale
    tail = _tail_bound(G, v, T, v)
    pts = enumerate_shifted(G, T, coset, config.max_points)
    Qv = 0.5 * np.einsum("ij,jk,ik->i", pts, S, pts)
    w = pts @ S @ zeta
    R = np.abs(w) ** 2 / abs(zeta.conj() @ S @ zeta)
    terms = np.exp(-2 * pi * v * config.majorant_factor * R) * np.exp(_E * tau * Qv)
    return ThetaValue(complex(v * terms.sum()), T, tail, len(pts))


def factorization_check(L_gram, tau: complex, z: DomainPoint, tail_eps: float = 1e-13,
                        coset_L=None, coset_e: float = 0.0) -> tuple[float, float]:
    """|Theta_Lambda(tau, j(z))(phi0 x phi1) - Theta_L(tau, z)(phi0) Theta^Jac(tau)(phi1)|.

    Lambda = L + Z e with Q(e) = 1 (Gram block (2)).  Returns (defect, certified tail sum).
    """
    S = np.asarray(L_gram, dtype=float)
    n = len(S)
    Lam = np.zeros((n + 1, n + 1))
    Lam[:n, :n] = S
    Lam[n, n] = 2
    cL = np.zeros(n) if coset_L is None else np.asarray(coset_L, dtype=float)
    big = siegel_theta(Lam, tau, z.padded(1), tail_eps, np.concatenate([cL, [coset_e]]))
    small = siegel_theta(S, tau, z, tail_eps, cL)
    jac = jacobi_theta(tau, tail_eps, coset_e)
    defect = abs(big.value - small.value * jac.value)
    tails = big.tail_bound + small.tail_bound * abs(jac.value) + abs(small.value) * jac.tail_bound
    return defect, tails
