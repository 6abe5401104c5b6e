import itertools
from math import pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arivol import hypcalc as hc

C = 16 * pi ** 2
X0 = tuple(np.array([v]) for v in (0.3, 1.2, -0.4, 0.8))


def rel(a, b):
    return float(abs(a - b).max() / max(abs(b).max(), 1e-300))


# --- exterior algebra ------------------------------------------------------------------------

def _perm_sign(seq):
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def _bits(m):
    return [i for i in range(4) if m >> i & 1]


@given(st.integers(0, 15), st.integers(0, 15))
def test_wedge_sign_is_permutation_parity(a, b):
    want = 0 if a & b else _perm_sign(_bits(a) + _bits(b))
    assert hc.wedge_sign(a, b) == want


def test_norm_of_top_antiholomorphic_monomial():
    m = (1 << hc.DZB[0]) | (1 << hc.DZB[1])
    y1, y2 = 1.3, 0.7
    assert abs(hc.monomial_norm_sq(m, y1, y2) - C ** 2 * y1 ** 2 * y2 ** 2) < 1e-9 * C ** 2


def _random_form(rng, degree_masks):
    comps = {}
    for m in degree_masks:
        a, b, k = rng.normal(size=3)
        comps[m] = lambda x1, y1, x2, y2, a=a, b=b, k=k: (a + 1j * b) * np.exp(1j * k * x1) * y2 + 0 * x2
    return hc.SampledForm(comps)


@pytest.mark.parametrize("deg", [0, 1, 2])
def test_star_defining_identity(deg):
    # alpha ^ *beta = <alpha, beta> vol at a point
    rng = np.random.default_rng(deg)
    masks = [m for m in range(16) if bin(m).count("1") == deg]
    alpha, beta = _random_form(rng, masks), _random_form(rng, masks)
    sb = hc.star(beta)
    top = 0
    for J in alpha.components:
        for K in sb.components:
            if J | K == hc.FULL and not J & K:
                top = top + alpha(J, *X0) * sb(K, *X0) * _perm_sign(_bits(J) + _bits(K))
    y1, y2 = X0[1], X0[3]
    assert rel(top, hc.pointwise_inner(alpha, beta, X0) * hc.vol_coefficient(y1, y2)) < 1e-12


@pytest.mark.parametrize("deg", [1, 2, 3])
def test_star_inverse(deg):
    rng = np.random.default_rng(10 + deg)
    masks = [m for m in range(16) if bin(m).count("1") == deg]
    a = _random_form(rng, masks)
    b = hc.star_inv(hc.star(a))
    for m in masks:
        assert rel(b(m, *X0), a(m, *X0)) < 1e-12


def test_double_star_sign_on_two_forms():
    # ** is +1 on middle-degree forms in real dimension 4 (conjugations cancel)
    m = (1 << hc.DZB[0]) | (1 << hc.DZB[1])
    a = hc.two_form(lambda x1, y1, x2, y2: (1 + 2j) * y1 + 0 * x1)
    b = hc.star(hc.star(a))
    assert rel(b(m, *X0), a(m, *X0)) < 1e-12


def test_inhomogeneous_form_has_no_bidegree():
    f = hc.SampledForm({0: hc._zero, 1 << hc.DZB[0]: hc._zero})
    with pytest.raises(ValueError):
        f.bidegree


def test_metric_scale_must_be_positive():
    with pytest.raises(ValueError):
        hc.MetricSpec(0)


# --- derivatives ------------------------------------------------------------------------------

def test_partial_is_fourth_order_accurate():
    f = lambda x1, y1, x2, y2: np.sin(x1) * np.exp(y2)
    d = hc.partial(f, 0, 1e-2)(*X0)
    assert rel(d, np.cos(X0[0]) * np.exp(X0[3])) < 1e-9


def test_dbar_of_holomorphic_function_vanishes():
    f = hc.function_form(lambda x1, y1, x2, y2: (x1 + 1j * y1) ** 2 * np.exp(x2 + 1j * y2))
    g = hc.dbar_total(f, 1e-3)
    assert all(float(abs(g(m, *X0)).max()) < 1e-9 for m in g.components)


def test_laplacian_of_constant_vanishes():
    f = hc.function_form(lambda x1, y1, x2, y2: 3.0 + 0 * x1 + 0j)
    lap = hc.laplacian(f, "total", 1e-3)
    assert float(abs(lap(0, *X0)).max()) < 1e-6


@pytest.mark.parametrize("s", [2, 0.5 + 1.5j, -1.0])
def test_laplacian_eigenvalue_on_powers_of_y(s):
    # -y^2 (dx^2 + dy^2) y^s = s (1 - s) y^s, so Delta_1 y^s = c s (1 - s) / 4 y^s
    f = hc.power_y(s, 1)
    lap = hc.laplacian(hc.function_form(f), 1, 1e-3)(0, *X0)
    assert rel(lap, C * s * (1 - s) / 4 * f(*X0)) < 1e-7


def test_laplacian_scales_with_metric():
    f = hc.function_form(lambda x1, y1, x2, y2: np.sin(x1) * y1 ** 2.5 * np.cos(y2) + 0j)
    a = hc.laplacian(f, "total", 1e-3)(0, *X0)
    b = hc.laplacian(f, "total", 1e-3, hc.MetricSpec(2 * C))(0, *X0)
    assert rel(b, 2 * a) < 1e-9


def test_partial_laplacians_commute():
    f = hc.function_form(lambda x1, y1, x2, y2: np.sin(x1 + y2) * y1 ** 1.5 * np.exp(-x2 * y1))
    h = 2e-2
    a = hc.laplacian(hc.laplacian(f, 2, h), 1, h)(0, *X0)
    b = hc.laplacian(hc.laplacian(f, 1, h), 2, h)(0, *X0)
    assert rel(a, b) < 1e-6


def test_total_laplacian_order_two_exact_reference():
    f = lambda x1, y1, x2, y2: np.sin(x1) * np.exp(-2 * y1) * np.cos(x2) * y2 ** 2
    exact = -C / 4 * f(*X0) * (3 * X0[1] ** 2 + 2 - X0[3] ** 2)
    errs = [rel(hc.laplacian(hc.function_form(f), "total", h)(0, *X0), exact) for h in (0.1, 0.05)]
    assert np.log2(errs[0] / errs[1]) >= 1.9 and errs[1] < 1e-4


def test_total_laplacian_splits_on_one_forms():
    F = hc.one_form(lambda x1, y1, x2, y2: np.sin(x1 * y2) * y1 ** 2,
                    lambda x1, y1, x2, y2: np.cos(x2 + y1) * y2 ** 1.5 + 0j)
    tot = hc.laplacian(F, "total", 0.05)
    parts = hc.laplacian(F, 1, 0.05) + hc.laplacian(F, 2, 0.05)
    for m in tot.components:
        assert float(abs(tot(m, *X0) - parts(m, *X0)).max()) < 1e-8


# --- Maass operators ------------------------------------------------------------------------

def test_maass_transform_of_constant_forms():
    one = lambda x1, y1, x2, y2: 1.0 + 0 * x1
    out = hc.maass_transform(hc.one_form(one, None))
    assert set(out) == {1}
    assert rel(out[1](*X0), 4 * pi * X0[1]) < 1e-14
    g = hc.maass_transform(hc.two_form(one))
    assert rel(g(*X0), 16 * pi ** 2 * X0[1] * X0[3]) < 1e-14


def test_maass_transform_rejects_functions():
    with pytest.raises(ValueError):
        hc.maass_transform(hc.function_form(lambda *X: 1.0))


def test_maass_laplacian_on_powers_of_y():
    s = 1.7
    v = hc.maass_laplacian(hc.power_y(s, 2), 2, 1e-3)(*X0)
    assert rel(v, s * (1 - s) / 4 * X0[3] ** s) < 1e-8


def test_maass_raising_on_holomorphic_function():
    k = 3
    F = lambda x1, y1, x2, y2: (x1 + 1j * y1) ** 2 + 0 * x2
    z = X0[0] + 1j * X0[1]
    got = hc.maass_raising(F, 1, k, 1e-3)(*X0)
    assert rel(got, 2j * X0[1] * 2 * z + k / 2 * z ** 2) < 1e-9


# --- global identities ---------------------------------------------------------------------

GRIDS = (hc.Grid2(-1.5, 1.5, 0.3, 3.3, 200), hc.Grid2(-1.5, 1.5, 0.3, 3.3, 200))


def test_adjointness_on_bumps():
    a = hc.product_function(hc.wave_bump(0.1, 1.4, 1.0, 0.6, 0.2), hc.bump(-0.1, 1.6, 1.1))
    for j in (1, 2):
        b = hc.product_one_form(hc.bump(0.05, 1.5, 0.9), hc.wave_bump(0.0, 1.7, 1.0, -0.4, 0.8), j)
        d = hc.adjointness_check(a, b, GRIDS, 1e-3)
        scale = abs(hc.l2_inner(hc.dbar(a, j, 1e-3), b, *GRIDS))
        assert d < 1e-4 and scale > 1e-2


def test_quasi_isometry_on_bump():
    a = hc.product_function(hc.bump(0.0, 1.5, 1.0), hc.wave_bump(0.1, 1.8, 1.1))
    assert hc.quasi_isometry_defect(a, GRIDS, 1e-3) < 1e-4
    assert abs(hc.l2_inner(a, hc.laplacian(a, 1, 1e-3), *GRIDS)) > 1.0


def test_l2_inner_against_dense_quadrature():
    # the separable shortcut must agree with a full 4d midpoint sum on a coarse grid
    g = hc.Grid2(-1.2, 1.2, 0.4, 2.8, 24)
    a = hc.product_function(hc.wave_bump(0.0, 1.5, 1.0), hc.bump(0.1, 1.5, 1.0))
    X, Y, w = g.points()
    X1, X2 = np.meshgrid(X, X, indexing="ij")
    Y1, Y2 = np.meshgrid(Y, Y, indexing="ij")
    W = np.outer(w, w)
    dense = np.sum(np.abs(a(0, X1, Y1, X2, Y2)) ** 2 * W)
    assert abs(hc.l2_inner(a, a, g, g) - dense) < 1e-12 * max(dense, 1)
