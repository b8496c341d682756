import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import ETA, current, scalar
from fierzstress import bilinear as bl
from fierzstress import stress
from fierzstress.errors import AsymmetryError, ZeroCharge

finite = st.floats(-5, 5, allow_nan=False)


def _lower(v):
    return np.einsum("mn,...n->...m", ETA, v)


def _plane_wave(rng, n):
    psi = bl.random_spinors(rng, n)
    p = rng.standard_normal((n, 4))
    return bl.plane_wave_jet(psi, p), p, _lower(current(psi))


# --- spinor tensors ----------------------------------------------------------

def test_constant_jet_tensors_vanish(rng):
    jet = bl.SpinorJet.constant(bl.random_spinors(rng, 4))
    assert np.all(stress.canonical_tensor(jet) == 0)
    assert np.all(stress.belinfante_spinor(jet) == 0)


def test_canonical_plane_wave(rng):
    jet, p, j = _plane_wave(rng, 20)
    expected = -j[:, :, None] * p[:, None, :]   # T_{mu nu} = -p_nu j_mu
    np.testing.assert_allclose(stress.canonical_tensor(jet), expected, atol=1e-12)


def test_belinfante_plane_wave(rng):
    jet, p, j = _plane_wave(rng, 20)
    expected = -0.5 * (j[:, :, None] * p[:, None, :] + p[:, :, None] * j[:, None, :])
    np.testing.assert_allclose(stress.belinfante_spinor(jet), expected, atol=1e-12)
    bj = bl.bilinear_jet(jet)
    np.testing.assert_allclose(stress.belinfante_bilinear(bj), expected, atol=1e-10)


def test_belinfante_symmetric(rng):
    t = stress.belinfante_spinor(bl.random_jets(rng, 50))
    assert np.all(stress.symmetry_residual(t) == 0)


def test_route_equivalence(rng):
    jet = bl.random_jets(rng, 10_000)
    bj = bl.bilinear_jet(jet)
    keep = ~bj.value.degenerate_mask()
    jet = jet[keep]
    diff = stress.belinfante_bilinear(bl.bilinear_jet(jet)) - stress.belinfante_spinor(jet)
    assert np.max(np.abs(diff).reshape(len(jet), -1).max(axis=1) / jet.derivative_scale(2)) <= 1e-9


def test_spin_density(rng):
    psi = bl.random_spinors(rng, 1000)
    s = stress.spin_density(psi)
    assert s.shape == (1000, 4, 4, 4)
    assert np.max(np.abs(s).reshape(1000, -1).max(axis=1) / bl.spinor_scale(psi)) <= 1e-12
    assert np.all(stress.spin_density(np.zeros(4)) == 0)
    assert np.abs(stress.spin_density(np.array([1, 0, 0, 0]))).max() == 0


# --- B and interaction -------------------------------------------------------

def test_b_field_equals_a_for_real_jet(rng):
    jet = bl.SpinorJet(rng.standard_normal(4), rng.standard_normal((4, 4)))
    em = stress.EMField(rng.standard_normal(4), np.zeros((4, 4)), q=1.5)
    B = stress.b_field(bl.bilinear_jet(jet), em)
    np.testing.assert_allclose(B, em.A, atol=1e-12)


def test_b_field_zero_charge(rng):
    bj = bl.bilinear_jet(bl.random_jets(rng, 2))
    with pytest.raises(ZeroCharge):
        stress.b_field(bj, stress.EMField.zero(q=0.0, batch=(2,)))


def test_b_field_gauge_invariant(rng):
    jet = bl.random_jets(rng, 100)
    em = stress.EMField.random(rng, 100)
    theta, dtheta = rng.standard_normal(100), rng.standard_normal((100, 4))
    jet2 = bl.gauge_transform(jet, theta, dtheta)
    em2 = stress.gauge_transform_em(em, dtheta)
    np.testing.assert_allclose(stress.b_field(bl.bilinear_jet(jet2), em2),
                               stress.b_field(bl.bilinear_jet(jet), em), atol=1e-9)


def test_interaction_example():
    t = stress.interaction_tensor(np.array([1.0, 0, 0, 0]), np.array([1.0, 0, 0, 0]), 1.0)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    np.testing.assert_array_equal(t, expected)
    assert np.all(stress.interaction_tensor(np.ones(4), np.zeros(4), 2.0) == 0)


# --- Maxwell ------------------------------------------------------------------

def test_maxwell_zero_and_magnetic():
    assert np.all(stress.maxwell_tensor(np.zeros((4, 4))) == 0)
    b = 1.7
    F = np.zeros((4, 4))
    F[1, 2], F[2, 1] = b, -b
    assert np.isclose(stress.maxwell_tensor(F)[0, 0], b ** 2 / 2)


def test_maxwell_electric_energy():
    F = np.zeros((4, 4))
    F[0, 3], F[3, 0] = 2.0, -2.0
    assert np.isclose(stress.maxwell_tensor(F)[0, 0], 2.0)


@given(arrays(float, (4, 4), elements=finite))
def test_maxwell_traceless_symmetric(a):
    F = a - a.T
    t = stress.maxwell_tensor(F)
    scale = 1 + np.sum(F ** 2)
    assert abs(stress.trace(t)) <= 1e-12 * scale
    assert np.max(stress.symmetry_residual(t)) <= 1e-12 * scale


def test_maxwell_rejects_asymmetric():
    with pytest.raises(AsymmetryError):
        stress.maxwell_tensor(np.eye(4))


# --- assembled tensor and Lagrangians ----------------------------------------

def test_assemble_free_constant_is_zero(rng):
    jet = bl.SpinorJet.constant(bl.random_spinors(rng, 3))
    em = stress.EMField.zero(batch=(3,))
    for route in ("spinor", "bilinear"):
        assert np.abs(stress.assemble_md(jet, em, route)).max() == 0


def test_assemble_routes_agree(rng):
    jet = bl.random_jets(rng, 1000)
    em = stress.EMField.random(rng, 1000)
    d = stress.assemble_md(jet, em, "bilinear") - stress.assemble_md(jet, em, "spinor")
    assert np.max(np.abs(d).reshape(1000, -1).max(axis=1) / stress.stress_scale(jet, em)) <= 1e-9


def test_assemble_unknown_route(rng):
    with pytest.raises(ValueError):
        stress.assemble_md(bl.random_jets(rng, 1), stress.EMField.zero(batch=(1,)), "other")


def test_assemble_gauge_invariant(rng):
    n = 1000
    jet, em = bl.random_jets(rng, n), stress.EMField.random(rng, n)
    theta, dtheta = rng.uniform(-3, 3, n), rng.standard_normal((n, 4))
    dd = rng.standard_normal((n, 4, 4))
    jet2, em2 = bl.gauge_transform(jet, theta, dtheta), stress.gauge_transform_em(em, dtheta, dd + np.swapaxes(dd, 1, 2))
    for route in ("spinor", "bilinear"):
        d = stress.assemble_md(jet2, em2, route) - stress.assemble_md(jet, em, route)
        assert np.max(np.abs(d).reshape(n, -1).max(axis=1) / stress.stress_scale(jet, em)) <= 1e-9


def test_gauge_transform_em_keeps_field_strength(rng):
    em = stress.EMField.random(rng, 5)
    dd = rng.standard_normal((5, 4, 4))
    em2 = stress.gauge_transform_em(em, rng.standard_normal((5, 4)), dd + np.swapaxes(dd, 1, 2))
    np.testing.assert_allclose(em2.F, em.F, atol=1e-14)


def test_lagrangian_constant_jet(rng):
    jet = bl.SpinorJet.constant(bl.random_spinors(rng, 5))
    bj = bl.bilinear_jet(jet)
    p = stress.PhysParams(q=1.0, mass=0.7)
    L = stress.bilinear_lagrangian(bj, np.zeros((5, 4)), p)
    np.testing.assert_allclose(L, -0.7 * scalar(jet.psi), atol=1e-14)


def test_lagrangians_agree(rng):
    jet, em = bl.random_jets(rng, 1000), stress.EMField.random(rng, 1000)
    bj = bl.bilinear_jet(jet)
    Lb = stress.bilinear_lagrangian(bj, stress.b_field(bj, em), em.params)
    Ls = stress.spinor_lagrangian(jet, em)
    assert np.max(np.abs(Lb - Ls) / stress.stress_scale(jet, em)) <= 1e-9


def test_lagrangian_plane_wave(rng):
    jet, p, j = _plane_wave(rng, 10)
    em = stress.EMField.zero(q=1.0, mass=0.9, batch=(10,))
    expected = np.einsum("nm,mk,nk->n", p, np.linalg.inv(ETA), j) - 0.9 * scalar(jet.psi)
    np.testing.assert_allclose(stress.spinor_lagrangian(jet, em), expected, atol=1e-12)
    bj = bl.bilinear_jet(jet)
    np.testing.assert_allclose(stress.bilinear_lagrangian(bj, stress.b_field(bj, em), em.params),
                               expected, atol=1e-10)


# --- combinatorial identity and variational tensor ---------------------------

def test_combinatorial_zero_inputs():
    assert np.all(stress.combinatorial_residual(np.zeros((4, 4)), np.zeros(4), np.zeros(4)) == 0)
    lhs, rhs, _, _ = stress._combinatorial_sides(np.zeros((4, 4)), np.ones(4), np.ones(4))
    assert np.all(lhs == 0) and np.all(rhs == 0)


def test_combinatorial_random(rng):
    dj, j, k = rng.standard_normal((10_000, 4, 4)), rng.standard_normal((10_000, 4)), rng.standard_normal((10_000, 4))
    res = np.abs(stress.combinatorial_residual(dj, j, k)).reshape(10_000, -1).max(axis=1)
    assert np.max(res / stress.combinatorial_scale(dj, j, k)) <= 1e-11


@given(arrays(float, 24, elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_combinatorial_property(a):
    dj, j, k = a[:16].reshape(4, 4), a[16:20], a[20:]
    res = np.abs(stress.combinatorial_residual(dj, j, k)).max()
    assert res <= 1e-11 * stress.combinatorial_scale(dj, j, k)


def test_combinatorial_side_is_not_trivial(rng):
    lhs, _, _, _ = stress._combinatorial_sides(rng.standard_normal((4, 4)), rng.standard_normal(4),
                                               rng.standard_normal(4))
    assert np.abs(lhs).max() > 0.1


def test_variational_constant_jet(rng):
    jet = bl.SpinorJet.constant(bl.random_spinors(rng, 3))
    bj = bl.bilinear_jet(jet)
    pre = stress.variational_pre_tensor(bj, np.zeros((3, 4)), stress.PhysParams(1.0, 0.6))
    expected = ETA * (0.6 * scalar(jet.psi))[:, None, None]
    np.testing.assert_allclose(pre, expected, atol=1e-13)


def test_variational_decomposition(rng):
    jet, em = bl.random_jets(rng, 1000), stress.EMField.random(rng, 1000)
    bj = bl.bilinear_jet(jet)
    res = stress.variational_decomposition_residual(bj, stress.b_field(bj, em), em.params)
    assert np.max(np.abs(res).reshape(1000, -1).max(axis=1) / stress.stress_scale(jet, em)) <= 1e-9


def test_variational_on_shell(rng):
    jet, _ = bl.on_shell_plane_wave(bl.random_spinors(rng, 100), rng.standard_normal((100, 3)), 1.1)
    em = stress.EMField.zero(q=0.8, mass=1.1, batch=(100,))
    bj = bl.bilinear_jet(jet)
    B = stress.b_field(bj, em)
    L = stress.bilinear_lagrangian(bj, B, em.params)
    assert np.max(np.abs(L)) <= 1e-9 * np.max(stress.stress_scale(jet, em))
    pre = stress.variational_pre_tensor(bj, B, em.params)
    ref = stress.belinfante_spinor(jet)
    scale = stress.stress_scale(jet, em)[:, None, None]
    assert np.max(np.abs(pre - ref) / scale) <= 1e-9


@settings(max_examples=30)
@given(arrays(float, 40, elements=st.floats(-2, 2, allow_nan=False)))
def test_bilinear_belinfante_real_symmetric(a):
    jet = bl.SpinorJet(a[:4] + 1j * a[4:8], (a[8:24] + 1j * a[24:]).reshape(4, 4))
    bj = bl.bilinear_jet(jet)
    if bj.value.degenerate_mask() or abs(bj.value.invariant) < 1e-3:
        return
    t = stress.belinfante_bilinear(bj)
    s = jet.scale(2) * (1 + 1 / abs(bj.value.invariant))
    assert np.max(stress.imag_residual(t)) <= 1e-10 * s
    assert np.max(stress.symmetry_residual(t)) <= 1e-10 * s
