"""Invariant suites run by ``arivol verify``; each returns a list of result records."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np

# Even test lattices: A + H has signature (2, 2) and discriminant Z/5; adding (2) gives (3, 2).
A_PLUS_H = [[2, 1, 0, 0], [1, -2, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
A_PLUS_H_PLUS_2 = [[2, 1, 0, 0, 0], [1, -2, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 2]]


@dataclass
class Result:
    name: str
    status: str            # pass | fail | skip
    value: object = None
    tolerance: object = None

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": _fmt(self.value),
                "tolerance": _fmt(self.tolerance)}


def _fmt(v):
    if v is None:
        return None
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _fmt(x) for k, x in sorted(v.items())}
    return str(v)


def check(name, ok, value=None, tolerance=None) -> Result:
    return Result(name, "pass" if ok else "fail", value, tolerance)


# --- clifford ----------------------------------------------------------------------

def clifford_suite(dF: int = 5, split_primes=(11, 19)) -> list[Result]:
    from .clifford import (QuadLattice, beta_preserves_forms, find_theta,
                           select_beta_convention, symplectic_form)
    from .quatalg import find_b0, target_ramification, v0_gram
    D_B = int(np.prod(sorted(target_ramification(dF, split_primes))))
    A = find_b0(dF, split_primes)
    L = QuadLattice(v0_gram(A, dF))
    out = [Result("B0", "pass", f"({A.a}, {A.b})")]
    eps, C_L, C_Lam, beta = select_beta_convention(L)
    out.append(check("dim C(L)", C_L.dim == 16, C_L.dim))
    out.append(check("dim C(Lambda)", C_Lam.dim == 32, C_Lam.dim))
    theta = find_theta(C_L, D_B)
    out.append(check("theta^2 = -D_B", C_L.mul(theta, theta).is_scalar(-D_B), -D_B))
    form = symplectic_form(C_L, theta)
    out.append(check("symplectic antisymmetric", form.is_antisymmetric))
    out.append(check("symplectic nondegenerate", form.det() != 0, form.det()))
    out.append(check("beta multiplicative (256 pairs)", beta.is_multiplicative(), f"eps={eps}"))
    out.append(check("beta rank 16", beta.rank() == 16, beta.rank()))
    out.append(check("beta preserves symplectic forms", beta_preserves_forms(beta, theta)))
    return out


# --- weilrep -----------------------------------------------------------------------------

def weilrep_suite() -> list[Result]:
    from .weilrep import check_relations, discriminant_form, weil_matrices
    out = []
    for name, S, sig in (("(2,2)", A_PLUS_H, (2, 2)), ("(3,2)", A_PLUS_H_PLUS_2, (3, 2))):
        D = discriminant_form(S)
        W = weil_matrices(D, sig)
        for rel, ok in check_relations(D, W, 1e-12).items():
            out.append(check(f"{name} {rel}", ok, tolerance=1e-12))
    return out


# --- eisen -----------------------------------------------------------------------------------

def eisen_suite(n_max: int = 8) -> list[Result]:
    from .eisen import (EisensteinLattice, calibrate_normalization, modularity_defect,
                        q_expansion, rational_snap)
    L = EisensteinLattice.of(A_PLUS_H)
    co = q_expansion(L, n_max)
    snaps, n_ok = 0, True
    for n, c in co.items():
        for x in c:
            if abs(x) > 0:
                snaps += 1
                n_ok &= rational_snap(complex(x), 10 ** 6, 1e-9) is not None
    out = [check("coefficients snap to rationals", n_ok and snaps >= 10, snaps, 1e-9)]
    d = modularity_defect(L, co, 1j)
    out.append(check("modularity probe at tau = i", d < 1e-6, d, 1e-6))
    K = calibrate_normalization(L, co)
    out.append(check("calibrated unit equals frozen unit", abs(K - 1) < 1e-6, K, 1e-6))
    return out


# --- theta -----------------------------------------------------------------------------------

def theta_samples(seed: int = 0, count: int = 5):
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.6))
        z1 = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.5))
        z2 = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.5))
        pts.append((tau, z1, z2))
    return pts


def theta_suite(seed: int = 0, tol: float = 1e-10, count: int = 5) -> list[Result]:
    from .theta import DomainPoint, factorization_check
    out = []
    S = np.array(A_PLUS_H, dtype=float)
    for k, (tau, z1, z2) in enumerate(theta_samples(seed, count)):
        z = DomainPoint.on(S, z1, z2)
        coset_e = 0.5 if k % 2 else 0.0
        defect, tails = factorization_check(S, tau, z, 1e-13, coset_e=coset_e)
        out.append(check(f"factorization sample {k}", defect < tol and tails < tol,
                         {"defect": defect, "tail": tails}, tol))
    return out


# --- hypcalc ---------------------------------------------------------------------------------

def hypcalc_suite(seed: int = 0) -> list[Result]:
    from . import hypcalc as hc
    rng = random.Random(seed)
    out = []
    c = 16 * pi ** 2
    X = [np.array([rng.uniform(-1, 1)]), np.array([rng.uniform(0.5, 2)]),
         np.array([rng.uniform(-1, 1)]), np.array([rng.uniform(0.5, 2)])]
    for s in (2, 2.5, 3 + 0j):
        f = hc.function_form(hc.power_y(s, 1))
        lap = hc.laplacian(f, 1, h=1e-4)(0, *X)
        maass = hc.maass_laplacian(hc.power_y(s, 1), 1, h=1e-4)(*X)
        rel = float(abs(lap / maass / c - 1).max())
        out.append(check(f"eigenvalue ratio 16 pi^2 (s={s})", rel < 1e-6, rel, 1e-6))
    g1 = hc.Grid2(-1.5, 1.5, 0.3, 3.3, 200)
    g2 = hc.Grid2(-1.5, 1.5, 0.3, 3.3, 200)
    cx = [rng.uniform(-0.2, 0.2) for _ in range(4)]
    a = hc.product_function(hc.bump(cx[0], 1.5, 1.0), hc.wave_bump(cx[1], 1.8, 1.1))
    b = hc.product_one_form(hc.wave_bump(cx[2], 1.6, 0.9, 0.7, -0.3), hc.bump(cx[3], 1.7, 1.0), 1)
    d = hc.adjointness_check(a, b, (g1, g2), h=1e-3)
    out.append(check("adjointness defect", d < 1e-4, d, 1e-4))
    q = hc.quasi_isometry_defect(a, (g1, g2), h=1e-3)
    out.append(check("quasi-isometry defect", q < 1e-4, q, 1e-4))

    # cross terms dbar_1 dbar*_2 + dbar*_2 dbar_1 cancel on (0,1)-forms
    F1 = hc.one_form(lambda x1, y1, x2, y2: np.sin(x1 * y2) * y1 ** 2 + 1j * np.exp(-x2 ** 2) * y1,
                     lambda x1, y1, x2, y2: np.cos(x2 + y1) * y2 ** 1.5 + x1 * y2)
    tot = hc.laplacian(F1, "total", 0.05)
    parts = hc.laplacian(F1, 1, 0.05) + hc.laplacian(F1, 2, 0.05)
    e = max(float(abs(tot(m, *X) - parts(m, *X)).max()) for m in tot.components)
    out.append(check("Delta = Delta_1 + Delta_2 on (0,1)-forms", e < 1e-8, e, 1e-8))

    # total Laplacian against the exact Delta_1 + Delta_2 of a separable function
    f = lambda x1, y1, x2, y2: np.sin(x1) * np.exp(-2 * y1) * np.cos(x2) * y2 ** 2
    exact = -c / 4 * f(*X) * (3 * X[1] ** 2 + 2 - X[3] ** 2)
    errs = [float(abs(hc.laplacian(hc.function_form(f), "total", h)(0, *X) - exact).max()
                  / abs(exact).max()) for h in (0.1, 0.05)]
    order = float(np.log2(errs[0] / errs[1]))
    out.append(check("Delta = Delta_1 + Delta_2 to O(h^2)", order >= 1.9 and errs[1] < 1e-4,
                     {"order": order, "err": errs[1]}, "order >= 2"))
    return out


SUITES = {"clifford": clifford_suite, "weilrep": weilrep_suite, "eisen": eisen_suite,
          "theta": theta_suite, "hypcalc": hypcalc_suite}
