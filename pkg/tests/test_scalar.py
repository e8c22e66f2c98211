from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralpulse.scalar import (
    ComplexJet2,
    PulseParams,
    SpacetimePoint,
    alpha_jet,
    denominator,
    hessian_scale,
    scalar_alpha,
    scalar_alpha_jet,
    wave_residual,
)

mp.mp.dps = 50


def mp_alpha(psi1, psi2, t, x, y, z):
    # Direct high-precision evaluation of the closed form, independent of the package.
    t, x, y, z = (mp.mpf(v) for v in (t, x, y, z))
    d = x**2 + y**2 + (psi1 + 1j * (z - t)) * (psi2 - 1j * (z + t))
    return 1 / d


def mp_jet(psi1, psi2, point, h=mp.mpf("1e-5")):
    f = lambda q: mp_alpha(psi1, psi2, *q)
    p = [mp.mpf(v) for v in point]
    grad = []
    hess = [[None] * 4 for _ in range(4)]
    for i in range(4):
        e = [h if k == i else 0 for k in range(4)]
        grad.append((f([a + b for a, b in zip(p, e)]) - f([a - b for a, b in zip(p, e)])) / (2 * h))
        for j in range(4):
            ej = [h if k == j else 0 for k in range(4)]
            pp = f([a + b + c for a, b, c in zip(p, e, ej)])
            pm = f([a + b - c for a, b, c in zip(p, e, ej)])
            mpp = f([a - b + c for a, b, c in zip(p, e, ej)])
            mm = f([a - b - c for a, b, c in zip(p, e, ej)])
            hess[i][j] = (pp - pm - mpp + mm) / (4 * h * h)
    to_c = lambda v: complex(v)
    return np.array([to_c(g) for g in grad]), np.array([[to_c(v) for v in row] for row in hess])


def test_origin_unit_shapes():
    assert scalar_alpha(PulseParams(psi1=1, psi2=1), SpacetimePoint(0, 0, 0, 0)) == 1 + 0j


def test_origin_is_inverse_product():
    val = scalar_alpha(PulseParams(psi1=100, psi2=1), SpacetimePoint(0, 0, 0, 0))
    assert val == pytest.approx(0.01 + 0j, abs=1e-17)


def test_reference_point_value():
    p = PulseParams(psi1=4, psi2=0.5)
    val = scalar_alpha(p, SpacetimePoint.cylindrical(0.7, 1.3, -0.4))
    exact = complex(mp_alpha(4, 0.5, 0.7, 1.3, 0, -0.4))
    assert abs(val - exact) <= 1e-14 * abs(exact)
    assert abs(val - 1 / (3.36 - 1.75j)) <= 1e-14
    # Quoted to five decimals as 0.23411 + 0.12194i; the exact quotient is 0.234112 + 0.121933i.
    assert val.real == pytest.approx(0.23411, abs=1e-5)
    assert val.imag == pytest.approx(0.12194, abs=1e-5)


def test_jet_value_consistency(rng):
    p = PulseParams(psi1=2.5, psi2=7.0)
    for q in rng.uniform(-5, 5, size=(20, 4)):
        pt = SpacetimePoint(*q)
        assert scalar_alpha_jet(p, pt).value == scalar_alpha(p, pt)


def test_on_axis_transverse_gradient_vanishes():
    jet = scalar_alpha_jet(PulseParams(psi1=1, psi2=1), SpacetimePoint(0, 0, 0, 0))
    assert jet.grad[1] == 0 and jet.grad[2] == 0


def test_jet_matches_high_precision_differences():
    point = (0.7, 1.3, 0.0, -0.4)
    jet = scalar_alpha_jet(PulseParams(psi1=4, psi2=0.5), SpacetimePoint(*point))
    grad, hess = mp_jet(4, 0.5, point)
    assert np.all(np.abs(jet.grad - grad) <= 1e-6 * np.abs(grad) + 1e-15)
    assert np.all(np.abs(jet.hess - hess) <= 1e-6 * np.abs(hess) + 1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_jet_matches_differences_random(seed):
    r = np.random.default_rng(seed)
    psi1, psi2 = np.exp(r.uniform(np.log(0.5), np.log(50), 2))
    point = r.uniform(-3, 3, 4)
    jet = scalar_alpha_jet(PulseParams(psi1=psi1, psi2=psi2), SpacetimePoint(*point))
    grad, hess = mp_jet(mp.mpf(psi1), mp.mpf(psi2), point)
    scale_g, scale_h = np.abs(grad).max(), np.abs(hess).max()
    assert np.abs(jet.grad - grad).max() <= 1e-6 * scale_g
    assert np.abs(jet.hess - hess).max() <= 1e-6 * scale_h


def test_hessian_symmetric(rng):
    pts = rng.uniform(-5, 5, size=(100, 4))
    jet = alpha_jet(PulseParams(psi1=3, psi2=0.2), *pts.T)
    assert np.array_equal(jet.hess, np.swapaxes(jet.hess, -1, -2))


def test_wave_residual_origin():
    jet = scalar_alpha_jet(PulseParams(psi1=1, psi2=1), SpacetimePoint(0, 0, 0, 0))
    assert abs(wave_residual(jet)) <= 1e-15


def test_wave_residual_sweep(rng):
    p = PulseParams(psi1=1.7, psi2=23.0)
    pts = rng.uniform(-5, 5, size=(1000, 4))
    jet = alpha_jet(p, *pts.T)
    assert np.all(np.abs(wave_residual(jet)) <= 1e-9 * hessian_scale(jet))


def test_wave_residual_detects_corrupted_hessian():
    jet = scalar_alpha_jet(PulseParams(psi1=2, psi2=3), SpacetimePoint(0.3, 0.4, -0.2, 0.1))
    hess = jet.hess.copy()
    hess[3, 3] *= 1.001
    bad = ComplexJet2(jet.value, jet.grad, hess)
    assert abs(wave_residual(bad)) > 1e-9 * hessian_scale(bad)


def test_denominator_bounded_below(rng):
    for _ in range(20):
        psi1, psi2 = np.exp(rng.uniform(-3, 5, 2))
        p = PulseParams(psi1=psi1, psi2=psi2)
        pts = rng.uniform(-50, 50, size=(2000, 4))
        assert np.all(np.abs(denominator(p, *pts.T)) >= psi1 * psi2 * (1 - 1e-12))


finite = st.floats(-20, 20, allow_nan=False)
positive = st.floats(0.05, 200, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(positive, positive, finite, finite, finite, finite)
def test_property_wave_equation(psi1, psi2, t, x, y, z):
    jet = alpha_jet(PulseParams(psi1=psi1, psi2=psi2), t, x, y, z)
    assert abs(wave_residual(jet)) <= 1e-9 * hessian_scale(jet)


@settings(max_examples=100, deadline=None)
@given(positive, positive, finite, st.floats(0, 20), finite, st.floats(0, 2 * np.pi))
def test_property_axial_symmetry(psi1, psi2, t, r, z, theta):
    p = PulseParams(psi1=psi1, psi2=psi2)
    a0 = scalar_alpha(p, SpacetimePoint.cylindrical(t, r, z, 0.0))
    a1 = scalar_alpha(p, SpacetimePoint.cylindrical(t, r, z, theta))
    assert abs(a1 - a0) <= 1e-12 * abs(a0)


@pytest.mark.parametrize("field", ["lam", "psi1", "psi2", "phi", "xi", "ell0"])
@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_params_rejects_nonpositive(field, bad):
    with pytest.raises(ValueError, match=field):
        PulseParams(**{field: bad})


def test_point_rejects_nonfinite():
    with pytest.raises(ValueError):
        SpacetimePoint(0.0, float("nan"), 0.0, 0.0)


def test_cylindrical_roundtrip():
    p = SpacetimePoint.cylindrical(1.0, 2.0, 3.0, 0.75)
    assert p.r == pytest.approx(2.0, rel=1e-15)
    assert p.theta == pytest.approx(0.75, rel=1e-15)


def test_visual_relabeling_roundtrip():
    p = PulseParams(phi=3.0, xi=0.25)
    R, Z = p.to_visual(6.0, 1.0)
    assert (R, Z) == (2.0, 4.0)
    r, z = p.from_visual(R, Z)
    assert (r, z) == (6.0, 1.0)
