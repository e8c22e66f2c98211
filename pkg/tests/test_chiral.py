from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralpulse.chiral import (
    ALL_MODES,
    ChiralMode,
    ConfigurationError,
    ConstantTwoForm,
    Family,
    Pulse,
    SuperpositionSpec,
    cylindrical_components,
    eigenphase_check,
    field_eigenphase_deviation,
    field_tensor,
    hertz_tensor,
    maxwell_residuals,
    maxwell_residuals_batch,
    potential_A,
    sample_grid,
)
from chiralpulse.scalar import PulseParams, SpacetimePoint, scalar_alpha_jet

REF = PulseParams(psi1=4, psi2=0.5)
REF_POINT = SpacetimePoint(0.7, 1.3, 0.0, -0.4)
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def eps_lower(a, b, c, d):
    idx = (a, b, c, d)
    return perm_sign(idx) if len(set(idx)) == 4 else 0


def oracle_potential(params, spec, point):
    """Loop-by-loop contraction A_d = lam d_g alpha P_mb eps^{gmb}_d."""
    jet = scalar_alpha_jet(params, point)
    P = sum(c * hertz_tensor(m).comp for m, c in spec.coeffs.items())
    A = np.zeros(4, dtype=complex)
    for d in range(4):
        for g, m, b in itertools.product(range(4), repeat=3):
            # raise the first three indices of eps with the diagonal metric
            e = ETA[g, g] * ETA[m, m] * ETA[b, b] * eps_lower(g, m, b, d)
            if e:
                A[d] += jet.grad[g] * P[m, b] * e
    return params.lam * A


def oracle_hodge(P):
    Pup = ETA @ P @ ETA
    out = np.zeros((4, 4), dtype=complex)
    for m, n, r, s in itertools.product(range(4), repeat=4):
        out[m, n] += 0.5 * eps_lower(m, n, r, s) * Pup[r, s]
    return out


# --- modes and tensors ------------------------------------------------------


def test_six_distinct_modes():
    assert len(set(ALL_MODES)) == 6
    assert {m.label for m in ALL_MODES} == {"CE,-1", "CE,0", "CE,+1", "CM,-1", "CM,0", "CM,+1"}


@pytest.mark.parametrize("label", ["CE,+1", "cm,-1", "CM, 0", "CE,1"])
def test_mode_parse(label):
    m = ChiralMode.parse(label)
    assert ChiralMode.parse(m.label) == m


@pytest.mark.parametrize("label", ["CX,0", "CE,2", "CE", ""])
def test_mode_parse_rejects(label):
    with pytest.raises(ValueError):
        ChiralMode.parse(label)


def test_ce0_is_dz_dt():
    comp = hertz_tensor(ChiralMode(Family.CE, 0)).comp
    expected = np.zeros((4, 4))
    expected[3, 0], expected[0, 3] = 1.0, -1.0
    assert np.array_equal(comp, expected)


def test_ce_plus_is_dx_plus_i_dy_wedge_dt():
    comp = hertz_tensor(ChiralMode(Family.CE, 1)).comp
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 0], expected[2, 0] = 1.0, 1j
    expected -= expected.T
    assert np.array_equal(comp, expected)


def test_cm0_is_dx_dy():
    comp = hertz_tensor(ChiralMode(Family.CM, 0)).comp
    expected = np.zeros((4, 4))
    expected[1, 2], expected[2, 1] = 1.0, -1.0
    assert np.allclose(comp, expected, atol=0)


@pytest.mark.parametrize("kappa", [-1, 0, 1])
def test_cm_is_hodge_of_ce(kappa):
    ce = hertz_tensor(ChiralMode(Family.CE, kappa)).comp
    cm = hertz_tensor(ChiralMode(Family.CM, kappa)).comp
    assert np.allclose(cm, oracle_hodge(ce), atol=1e-15)


def test_two_form_rejects_asymmetric():
    with pytest.raises(ValueError):
        ConstantTwoForm(np.eye(4))


@pytest.mark.parametrize("mode", ALL_MODES, ids=lambda m: m.label)
def test_eigenphase(mode):
    dev = eigenphase_check(mode, hertz_tensor(mode))
    assert dev <= 1e-9
    if mode.kappa == 0:
        assert dev <= 1e-15


def test_eigenphase_detects_wrong_label():
    form = hertz_tensor(ChiralMode(Family.CE, -1))
    assert eigenphase_check(ChiralMode(Family.CE, 1), form) > 1.0


# --- potential --------------------------------------------------------------


def test_potential_zero_spec():
    assert np.array_equal(potential_A(REF, SuperpositionSpec(), REF_POINT), np.zeros(4))


def test_potential_linear_in_spec():
    spec = SuperpositionSpec({"CE,+1": 0.3 - 0.2j, "CM,0": 1.1})
    a1 = potential_A(REF, spec, REF_POINT)
    a2 = potential_A(REF, spec * 2, REF_POINT)
    assert np.array_equal(a2, 2 * a1)


@pytest.mark.parametrize("mode", ALL_MODES, ids=lambda m: m.label)
def test_potential_matches_contraction_oracle(mode):
    spec = SuperpositionSpec.single(mode)
    got = potential_A(REF, spec, REF_POINT)
    want = oracle_potential(REF, spec, REF_POINT)
    assert np.abs(got - want).max() <= 1e-10 * np.abs(want).max()


# --- field tensor -----------------------------------------------------------


def test_field_scales_with_lam():
    spec = SuperpositionSpec({"CM,-1": 1.0, "CE,0": 0.5j})
    s1 = field_tensor(REF, spec, REF_POINT)
    s2 = field_tensor(PulseParams(lam=2.0, psi1=4, psi2=0.5), spec, REF_POINT)
    assert np.array_equal(s2.F, 2 * s1.F)
    assert np.array_equal(s2.e, 2 * s1.e) and np.array_equal(s2.b, 2 * s1.b)


def test_field_antisymmetric(rng):
    pulse = Pulse(REF, SuperpositionSpec({m: 1 + 1j for m in ALL_MODES}))
    F = pulse.tensor(*rng.uniform(-3, 3, size=(4, 50)))
    assert np.array_equal(F, -np.swapaxes(F, -1, -2))


def test_field_is_curl_of_potential():
    spec = SuperpositionSpec({"CE,+1": 1.0, "CM,-1": 0.4 + 0.3j})
    h = 1e-5
    p0 = REF_POINT.as_array()
    dA = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        step = np.zeros(4)
        step[mu] = h
        ap = potential_A(REF, spec, SpacetimePoint(*(p0 + step)))
        am = potential_A(REF, spec, SpacetimePoint(*(p0 - step)))
        dA[mu] = (ap - am) / (2 * h)
    F_fd = dA - dA.T
    F = field_tensor(REF, spec, REF_POINT).F
    assert np.abs(F - F_fd).max() <= 1e-6 * np.abs(F).max()


def test_e_b_index_convention():
    spec = SuperpositionSpec.single("CM,+1")
    s = field_tensor(REF, spec, REF_POINT)
    Fr = s.F.real
    assert np.array_equal(s.e, Fr[1:, 0])
    assert np.array_equal(s.b, np.array([Fr[2, 3], Fr[3, 1], Fr[1, 2]]))


def test_kappa0_field_orientation(rng):
    pts = rng.uniform(-4, 4, size=(4, 200))
    e, _ = Pulse(REF, SuperpositionSpec.single("CE,0")).fields(*pts)
    _, b = Pulse(REF, SuperpositionSpec.single("CM,0")).fields(*pts)
    assert np.all(e[:, 2] == 0)
    assert np.all(b[:, 2] == 0)


def test_ce0_cylindrical_components_invariant(rng):
    pulse = Pulse(REF, SuperpositionSpec.single("CE,0"))
    for t, r, z in rng.uniform(-3, 3, size=(20, 3)):
        r = abs(r)
        base = cylindrical_components(pulse.tensor(t, r, 0.0, z), 0.0)
        for th in rng.uniform(0, 2 * np.pi, 5):
            rot = cylindrical_components(pulse.tensor(t, r * np.cos(th), r * np.sin(th), z), th)
            assert np.abs(rot - base).max() <= 1e-12 * np.abs(base).max()


@pytest.mark.parametrize("mode", ALL_MODES, ids=lambda m: m.label)
def test_field_chirality_phase(mode, rng):
    pulse = Pulse(REF, SuperpositionSpec.single(mode))
    n = 100
    dev = field_eigenphase_deviation(pulse, mode.kappa, rng.uniform(-5, 5, n), rng.uniform(0, 5, n),
                                     rng.uniform(-5, 5, n), rng.uniform(0, 2 * np.pi, n))
    assert dev.max() <= 1e-9


def test_chirality_phase_negative_control():
    pulse = Pulse(REF, SuperpositionSpec.single("CM,+1"))
    assert field_eigenphase_deviation(pulse, -1, 0.2, 1.0, 0.3, 1.0) > 0.1


def test_superposition_is_sum_of_fields(rng):
    pts = rng.uniform(-3, 3, size=(4, 30))
    coeffs = dict(zip(ALL_MODES, rng.normal(size=6) + 1j * rng.normal(size=6)))
    total = Pulse(REF, SuperpositionSpec(coeffs)).tensor(*pts)
    parts = sum(Pulse(REF, SuperpositionSpec.single(m, c)).tensor(*pts) for m, c in coeffs.items())
    assert np.abs(total - parts).max() <= 1e-13 * np.abs(total).max()


def test_zero_spec_rejected():
    with pytest.raises(ConfigurationError):
        field_tensor(REF, SuperpositionSpec({"CE,0": 0.0}), REF_POINT)
    with pytest.raises(ConfigurationError):
        Pulse(REF, SuperpositionSpec())


def test_spec_dict_roundtrip():
    spec = SuperpositionSpec({"CM,-1": 1 - 2j, "CE,+1": 0.5})
    assert SuperpositionSpec.from_dict(spec.to_dict()) == spec
    assert spec.is_axisymmetric is False
    assert SuperpositionSpec.single("CM,0").is_axisymmetric


# --- Maxwell residuals ------------------------------------------------------


@pytest.mark.parametrize("mode", ALL_MODES, ids=lambda m: m.label)
def test_maxwell_pure_modes(mode, rng):
    pts = rng.uniform(-5, 5, size=(500, 4))
    res = maxwell_residuals_batch(Pulse(REF, SuperpositionSpec.single(mode)), pts)
    assert res.ok(1e-5), res.relative().max()


def test_maxwell_random_superposition(rng):
    coeffs = dict(zip(ALL_MODES, rng.normal(size=6) + 1j * rng.normal(size=6)))
    pts = rng.uniform(-5, 5, size=(500, 4))
    res = maxwell_residuals_batch(Pulse(PulseParams(psi1=1, psi2=100), SuperpositionSpec(coeffs)), pts)
    assert res.ok(1e-5), res.relative().max()


def test_maxwell_single_point_api():
    res = maxwell_residuals(REF, SuperpositionSpec.single("CE,-1"), REF_POINT)
    assert res.as_array().shape == (4,)
    assert res.ok()


def test_maxwell_detects_perturbed_field():
    pulse = Pulse(REF, SuperpositionSpec.single("CE,+1"))

    def skewed(t, x, y, z):
        e, b = pulse.fields(t, x, y, z)
        e = e.copy()
        e[..., 0] *= 1.01
        return e, b

    pts = np.array([[0.1, 0.8, 0.3, -0.2], [0.7, 1.3, 0.0, -0.4]])
    res = maxwell_residuals_batch(pulse, pts, field_fn=skewed)
    assert np.all(res.relative()[:, 0] > 1e-5)


def test_bianchi_identity(rng):
    # dF = 0 in vector form is div b = 0 and Faraday; check the full cyclic sum instead.
    pulse = Pulse(REF, SuperpositionSpec({"CM,+1": 1.0, "CE,-1": 0.3j}))
    h = 1e-3 * 0.5
    for p in rng.uniform(-3, 3, size=(10, 4)):
        dF = np.zeros((4, 4, 4), dtype=complex)
        for mu in range(4):
            s = np.zeros(4)
            s[mu] = h
            f = lambda q: pulse.tensor(*q)
            dF[mu] = (8 * (f(p + s) - f(p - s)) - (f(p + 2 * s) - f(p - 2 * s))) / (12 * h)
        cyc = dF + np.transpose(dF, (1, 2, 0)) + np.transpose(dF, (2, 0, 1))
        assert np.abs(cyc).max() <= 1e-5 * np.abs(dF).max()


def test_sample_grid_rows():
    pulse = Pulse(REF, SuperpositionSpec.single("CM,0"))
    rows = sample_grid(pulse, 0.5, [0.0, 1.0], [0.0], [-1.0, 0.0, 1.0])
    assert rows.shape == (6, 10)
    e, b = pulse.fields(0.5, rows[:, 1], rows[:, 2], rows[:, 3])
    assert np.array_equal(rows[:, 4:7], e) and np.array_equal(rows[:, 7:], b)


coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.floats(0.2, 50), st.floats(0.2, 50))
def test_property_maxwell_any_superposition(cs, psi1, psi2):
    spec = SuperpositionSpec(dict(zip(ALL_MODES, cs)))
    if spec.is_zero:
        return
    pts = np.random.default_rng(0).uniform(-4, 4, size=(20, 4))
    res = maxwell_residuals_batch(Pulse(PulseParams(psi1=psi1, psi2=psi2), spec), pts)
    assert res.ok(1e-5)
