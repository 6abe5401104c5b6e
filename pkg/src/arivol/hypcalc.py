"""Dolbeault operators on H^2 for the metric |dz_j|^2 = c y_j^2 (c = 16 pi^2 by default).

Forms are sums f_J e_J over wedge monomials in (dz1, dzb1, dz2, dzb2), bit
order 0..3, with coefficient callables f(x1, y1, x2, y2) acting on numpy
arrays.  The Hodge star is the conjugate-linear operator defined by
alpha ^ *beta = <alpha, beta> vol, vol = omega1 ^ omega2, and the formal
adjoint is

    dbar*_j = (-1)^k *^{-1} dbar_j *      on (0, k)-forms.

Derivatives are central differences with one Richardson step (error O(h^4)).

Laplacian normalisation: on functions Delta_j = dbar*_j dbar_j equals
c * (-y_j^2 d/dz_j d/dzb_j), so its eigenvalue on y^s is c s(1-s)/4, and
(c/4)-times the eigenvalue of -y^2 (d_x^2 + d_y^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

DZ = (0, 2)        # bit of dz_j, j = 1, 2
DZB = (1, 3)       # bit of dzb_j
FULL = 0b1111


@dataclass(frozen=True)
class MetricSpec:
    scale: float = 16 * pi ** 2

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("metric scale must be positive")


DEFAULT_METRIC = MetricSpec()


def _zero(*X):
    return np.zeros(np.broadcast(*X).shape, dtype=complex)


@dataclass(frozen=True)
class SampledForm:
    components: dict                       # mask -> callable
    support_box: tuple | None = None       # (x1lo, x1hi, y1lo, y1hi, x2lo, x2hi, y2lo, y2hi)

    def __call__(self, mask, *X):
        f = self.components.get(mask)
        return _zero(*X) if f is None else f(*X)

    @property
    def bidegree(self) -> tuple:
        if not self.components:
            return (0, 0)
        degs = {(bin(m & 0b0101).count("1"), bin(m & 0b1010).count("1")) for m in self.components}
        if len(degs) != 1:
            raise ValueError("inhomogeneous form")
        return degs.pop()

    @property
    def type(self) -> tuple:
        return self.bidegree

    def __add__(self, other):
        comps = dict(self.components)
        for m, g in other.components.items():
            f = comps.get(m)
            comps[m] = g if f is None else (lambda *X, f=f, g=g: f(*X) + g(*X))
        return SampledForm(comps, self.support_box)

    def scaled(self, c):
        return SampledForm({m: (lambda *X, f=f: c * f(*X)) for m, f in self.components.items()},
                           self.support_box)

    def __sub__(self, other):
        return self + other.scaled(-1)


def function_form(f, box=None) -> SampledForm:
    return SampledForm({0: f}, box)


def one_form(f1=None, f2=None, box=None) -> SampledForm:
    """f1 dzb1 + f2 dzb2."""
    comps = {}
    if f1 is not None:
        comps[1 << DZB[0]] = f1
    if f2 is not None:
        comps[1 << DZB[1]] = f2
    return SampledForm(comps, box)


def two_form(g, box=None) -> SampledForm:
    """g dzb1 ^ dzb2."""
    return SampledForm({(1 << DZB[0]) | (1 << DZB[1]): g}, box)


def product_function(a1, a2, box=None) -> SampledForm:
    """(0,0)-form a1(x1, y1) a2(x2, y2), the shape ``l2_inner`` integrates exactly."""
    return SampledForm({0: lambda x1, y1, x2, y2: a1(x1, y1) * a2(x2, y2)}, box)


def product_one_form(b1, b2, j, box=None) -> SampledForm:
    """b1(z1) b2(z2) dzb_j."""
    f = lambda x1, y1, x2, y2: b1(x1, y1) * b2(x2, y2)
    return SampledForm({1 << DZB[j - 1]: f}, box)


# --- exterior algebra ------------------------------------------------------------

def wedge_sign(a: int, b: int) -> int:
    """e_a ^ e_b = sign * e_{a|b} for monomials in increasing bit order (0 if they overlap)."""
    if a & b:
        return 0
    s, bits = 1, [i for i in range(4) if b >> i & 1]
    for i in bits:
        higher = bin(a >> (i + 1)).count("1")
        if higher % 2:
            s = -s
    return s


def _factor_var(bit: int) -> int:
    return 0 if bit < 2 else 1


def monomial_norm_sq(mask: int, y1, y2, metric: MetricSpec = DEFAULT_METRIC):
    ys = (y1, y2)
    out = 1.0
    for bit in range(4):
        if mask >> bit & 1:
            out = out * metric.scale * ys[_factor_var(bit)] ** 2
    return out


def vol_coefficient(y1, y2, metric: MetricSpec = DEFAULT_METRIC):
    """vol = v dz1 ^ dzb1 ^ dz2 ^ dzb2 with omega_j = i dz_j ^ dzb_j / (c y_j^2)."""
    return -1.0 / (metric.scale ** 2 * y1 ** 2 * y2 ** 2)


def star(form: SampledForm, metric: MetricSpec = DEFAULT_METRIC) -> SampledForm:
    comps = {}
    for J, f in form.components.items():
        K = FULL ^ J
        sgn = wedge_sign(J, K)

        def g(x1, y1, x2, y2, f=f, J=J, sgn=sgn):
            return np.conj(f(x1, y1, x2, y2)) * monomial_norm_sq(J, y1, y2, metric) \
                * vol_coefficient(y1, y2, metric) / sgn
        comps[K] = g
    return SampledForm(comps, form.support_box)


def star_inv(form: SampledForm, metric: MetricSpec = DEFAULT_METRIC) -> SampledForm:
    comps = {}
    for K, gK in form.components.items():
        J = FULL ^ K
        sgn = wedge_sign(J, K)

        def f(x1, y1, x2, y2, gK=gK, J=J, sgn=sgn):
            return np.conj(gK(x1, y1, x2, y2)) * sgn \
                / (monomial_norm_sq(J, y1, y2, metric) * vol_coefficient(y1, y2, metric))
        comps[J] = f
    return SampledForm(comps, form.support_box)


def pointwise_inner(a: SampledForm, b: SampledForm, X, metric: MetricSpec = DEFAULT_METRIC):
    """<a, b> at the points X (conjugate-linear in b)."""
    x1, y1, x2, y2 = X
    tot = 0
    for m, f in a.components.items():
        if m in b.components:
            tot = tot + f(*X) * np.conj(b.components[m](*X)) * monomial_norm_sq(m, y1, y2, metric)
    return tot


# --- derivatives -------------------------------------------------------------------

def partial(f, var: int, h: float = 1e-4):
    """Richardson-extrapolated central difference in coordinate ``var`` (x1, y1, x2, y2)."""
    def d(*X):
        def D(step):
            Xp, Xm = list(X), list(X)
            Xp[var] = X[var] + step
            Xm[var] = X[var] - step
            return (f(*Xp) - f(*Xm)) / (2 * step)
        return (4 * D(h / 2) - D(h)) / 3
    return d


def d_dz(f, j: int, h: float = 1e-4):
    fx, fy = partial(f, 2 * (j - 1), h), partial(f, 2 * (j - 1) + 1, h)
    return lambda *X: 0.5 * (fx(*X) - 1j * fy(*X))


def d_dzbar(f, j: int, h: float = 1e-4):
    fx, fy = partial(f, 2 * (j - 1), h), partial(f, 2 * (j - 1) + 1, h)
    return lambda *X: 0.5 * (fx(*X) + 1j * fy(*X))


# --- operators -------------------------------------------------------------------------

def dbar(form: SampledForm, j: int, h: float = 1e-4) -> SampledForm:
    bit = 1 << DZB[j - 1]
    comps = {}
    for J, f in form.components.items():
        s = wedge_sign(bit, J)
        if s == 0:
            continue
        df = d_dzbar(f, j, h)
        term = (lambda *X, df=df, s=s: s * df(*X))
        M = J | bit
        prev = comps.get(M)
        comps[M] = term if prev is None else (lambda *X, a=prev, b=term: a(*X) + b(*X))
    return SampledForm(comps, form.support_box)


def dbar_total(form: SampledForm, h: float = 1e-4) -> SampledForm:
    return dbar(form, 1, h) + dbar(form, 2, h)


def dbar_star(form: SampledForm, j: int, h: float = 1e-4,
              metric: MetricSpec = DEFAULT_METRIC) -> SampledForm:
    p, k = form.bidegree
    if p != 0:
        raise ValueError("dbar_star is defined here on (0, k)-forms")
    if k == 0:
        return SampledForm({}, form.support_box)
    out = star_inv(dbar(star(form, metric), j, h), metric)
    return out if k % 2 == 0 else out.scaled(-1)


def dbar_star_total(form: SampledForm, h: float = 1e-4, metric: MetricSpec = DEFAULT_METRIC):
    return dbar_star(form, 1, h, metric) + dbar_star(form, 2, h, metric)


def laplacian(form: SampledForm, j="total", h: float = 1e-4,
              metric: MetricSpec = DEFAULT_METRIC) -> SampledForm:
    """Delta_j = dbar_j dbar*_j + dbar*_j dbar_j, or the full Dolbeault Laplacian for 'total'."""
    if j == "total":
        a = dbar_total(dbar_star_total(form, h, metric), h) if form.bidegree[1] > 0 else SampledForm({})
        b = dbar_star_total(dbar_total(form, h), h, metric) if form.bidegree[1] < 2 else SampledForm({})
        return a + b
    a = dbar(dbar_star(form, j, h, metric), j, h) if form.bidegree[1] > 0 else SampledForm({})
    b = dbar_star(dbar(form, j, h), j, h, metric) if form.bidegree[1] < 2 else SampledForm({})
    return a + b


def maass_laplacian(f, j: int, h: float = 1e-4):
    """-y_j^2 d/dz_j d/dzb_j, eigenvalue s(1-s)/4 on y^s."""
    g = d_dz(d_dzbar(f, j, h), j, h)
    return lambda *X: -X[2 * (j - 1) + 1] ** 2 * g(*X)


def maass_raising(F, j: int, weight: int, h: float = 1e-4):
    """K_k = (z - zbar) d/dz + k/2 = 2 i y d/dz + k/2 in the variable z_j."""
    g = d_dz(F, j, h)
    return lambda *X: 2j * X[2 * (j - 1) + 1] * g(*X) + weight / 2 * F(*X)


def maass_transform(form: SampledForm, metric: MetricSpec = DEFAULT_METRIC):
    """(0,1): f dzb_j -> sqrt(c) y_j f for each j.  (0,2): g -> c y1 y2 g."""
    p, k = form.bidegree
    r = sqrt(metric.scale)
    if (p, k) == (0, 1):
        out = {}
        for j in (1, 2):
            f = form.components.get(1 << DZB[j - 1])
            if f is not None:
                out[j] = lambda x1, y1, x2, y2, f=f, j=j: r * (y1 if j == 1 else y2) * f(x1, y1, x2, y2)
        return out
    if (p, k) == (0, 2):
        g = form.components[(1 << DZB[0]) | (1 << DZB[1])]
        return lambda x1, y1, x2, y2: metric.scale * y1 * y2 * g(x1, y1, x2, y2)
    raise ValueError("maass_transform needs a (0,1) or (0,2) form")


# --- test functions and quadrature -------------------------------------------------------

def power_y(s: complex, j: int = 1):
    return lambda x1, y1, x2, y2: (y1 if j == 1 else y2) ** s + 0j


def bump(cx: float, cy: float, r: float):
    """Smooth compactly supported exp(-1/(1 - rho^2)) centred at (cx, cy)."""
    def f(x, y):
        rho2 = ((x - cx) ** 2 + (y - cy) ** 2) / r ** 2
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        inside = rho2 < 1
        out[inside] = np.exp(-1 / (1 - rho2[inside]))
        return out
    return f


def wave_bump(cx, cy, r, kx=1.0, ky=0.5):
    b = bump(cx, cy, r)
    return lambda x, y: b(x, y) * np.exp(1j * (kx * x + ky * y))


@dataclass(frozen=True)
class Grid2:
    """Midpoint rule on a rectangle of H with hyperbolic measure dx dy / y^2."""
    x0: float
    x1: float
    y0: float
    y1: float
    n: int = 200

    def points(self):
        hx, hy = (self.x1 - self.x0) / self.n, (self.y1 - self.y0) / self.n
        xs = self.x0 + hx * (np.arange(self.n) + 0.5)
        ys = self.y0 + hy * (np.arange(self.n) + 0.5)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return X.ravel(), Y.ravel(), hx * hy / Y.ravel() ** 2


def _separable_integral(integrand, g1: Grid2, g2: Grid2) -> complex:
    """Integral over g1 x g2 of a product integrand A(z1) B(z2) given as a 4-variable callable.

    Uses I(z1, z2) = I(z1, p2) I(p1, z2) / I(p1, p2) at reference points with
    I(p1, p2) != 0; only two 2-dimensional grids are evaluated.
    """
    X1, Y1, w1 = g1.points()
    X2, Y2, w2 = g2.points()
    sub = np.linspace(0, len(X1) - 1, 625).astype(int)
    cand = np.linspace(0, len(X2) - 1, 97).astype(int)
    best, p2 = -1.0, None
    for c in cand:
        vals = integrand(X1[sub], Y1[sub], np.full(len(sub), X2[c]), np.full(len(sub), Y2[c]))
        nrm = float(np.abs(vals).max())
        if nrm > best:
            best, p2 = nrm, c
    if best == 0:
        return 0j
    row = integrand(X1, Y1, np.full_like(X1, X2[p2]), np.full_like(X1, Y2[p2]))
    p1 = int(np.argmax(np.abs(row)))
    col = integrand(np.full_like(X2, X1[p1]), np.full_like(X2, Y1[p1]), X2, Y2)
    return complex((row * w1).sum() * (col * w2).sum() / row[p1])


def l2_inner(a: SampledForm, b: SampledForm, g1: Grid2, g2: Grid2,
             metric: MetricSpec = DEFAULT_METRIC) -> complex:
    """<a, b> = int <a, b>_pt dmu over g1 x g2, componentwise separable integrands assumed."""
    tot = 0j
    for m, f in a.components.items():
        if m not in b.components:
            continue
        gb = b.components[m]
        I = lambda x1, y1, x2, y2, f=f, gb=gb, m=m: f(x1, y1, x2, y2) * np.conj(gb(x1, y1, x2, y2)) \
            * monomial_norm_sq(m, y1, y2, metric)
        tot += _separable_integral(I, g1, g2)
    return tot


def adjointness_check(alpha: SampledForm, beta: SampledForm, grids, h: float = 1e-3,
                      metric: MetricSpec = DEFAULT_METRIC) -> float:
    """|<dbar alpha, beta> - <alpha, dbar* beta>| for compactly supported alpha, beta."""
    g1, g2 = grids
    lhs = 0j
    rhs = 0j
    for j in (1, 2):
        lhs += l2_inner(dbar(alpha, j, h), beta, g1, g2, metric)
        rhs += l2_inner(alpha, dbar_star(beta, j, h, metric), g1, g2, metric)
    return abs(lhs - rhs)


def quasi_isometry_defect(alpha: SampledForm, grids, h: float = 1e-3,
                          metric: MetricSpec = DEFAULT_METRIC) -> float:
    """|<dbar alpha, dbar alpha> - <alpha, Delta alpha>| on a (0,0) bump."""
    g1, g2 = grids
    lhs = sum(l2_inner(dbar(alpha, j, h), dbar(alpha, j, h), g1, g2, metric) for j in (1, 2))
    rhs = sum(l2_inner(alpha, laplacian(alpha, j, h, metric), g1, g2, metric) for j in (1, 2))
    return abs(lhs - rhs)
