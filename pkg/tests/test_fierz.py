import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import G0, GAMMA, G5
from fierzstress import bilinear as bl
from fierzstress import fierz
from fierzstress.errors import DegenerateInvariant

E1 = np.array([1, 0, 0, 0], dtype=complex)
finite = st.floats(-3, 3, allow_nan=False)
jets = arrays(float, 40, elements=finite).map(
    lambda a: bl.SpinorJet(a[:4] + 1j * a[4:8], (a[8:24] + 1j * a[24:40]).reshape(4, 4)))


def _nondegenerate(jet):
    b = bl.compute_bilinears(jet.psi)
    return not bool(b.degenerate_mask()) and abs(b.sigma * b.omega) > 1e-6 * bl.spinor_scale(jet.psi)


# --- expansion -----------------------------------------------------------------

def test_expand_zero():
    c = fierz.fierz_expand(np.zeros(4), np.zeros(4))
    for v in (c.a_S, c.a_V, c.a_T, c.a_A, c.a_P):
        assert np.all(v == 0)


def test_expand_e1_scalar_coefficient():
    assert fierz.fierz_expand(E1, E1).a_S == 0.25


def test_reconstruction_against_outer_product(rng):
    chi, psi = bl.random_spinors(rng, 1000), bl.random_spinors(rng, 1000)
    res = fierz.fierz_reconstruction_residual(chi, psi)
    scale = np.linalg.norm(chi, axis=-1) * np.linalg.norm(psi, axis=-1)
    assert np.max(res / scale) <= 1e-12
    # independent oracle: the outer product itself
    outer = np.einsum("na,nb->nab", psi, np.conj(chi) @ G0)
    np.testing.assert_allclose(fierz.fierz_expand(chi, psi).reconstruct(), outer, atol=1e-12)


def test_expansion_coefficients_are_traces(rng):
    chi, psi = bl.random_spinors(rng, 1)[0], bl.random_spinors(rng, 1)[0]
    M = np.outer(psi, np.conj(chi) @ G0)
    c = fierz.fierz_expand(chi, psi)
    assert np.isclose(c.a_S, np.trace(M) / 4)
    assert np.isclose(c.a_P, np.trace(G5 @ M) / 4)
    g_low = np.einsum("mn,nab->mab", np.diag([1, -1, -1, -1]), GAMMA)
    np.testing.assert_allclose(c.a_V, np.einsum("mab,ba->m", g_low, M) / 4)


# --- fundamental identities --------------------------------------------------

def test_check_fundamental_zero_and_e1():
    rep = fierz.check_fundamental(bl.compute_bilinears(np.zeros(4)))
    assert all(e.max_abs == 0 for e in rep.entries)
    b = bl.compute_bilinears(E1)
    jj, _, _ = bl.fundamental_products(b)
    assert jj == 1 and b.invariant == 1


def test_check_fundamental_random(rng):
    rep = fierz.check_fundamental(bl.compute_bilinears(bl.random_spinors(rng, 10_000)), tol=1e-10)
    assert rep.passed, rep.failures
    assert "rank-2 replacement s" in rep.names()


def test_rank2_e1_exact():
    b = bl.compute_bilinears(E1)
    s, sd = fierz.rank2_replacement(b)
    np.testing.assert_allclose(s, b.s, atol=1e-15)
    np.testing.assert_allclose(sd, b.sdual, atol=1e-15)


def test_rank2_random(rng):
    b = bl.compute_bilinears(bl.random_spinors(rng, 1000))
    s, sd = fierz.rank2_replacement(b)
    scale = b.size_scale()[:, None, None]
    assert np.max(np.abs(s - b.s) / scale) <= 1e-10
    assert np.max(np.abs(sd - b.sdual) / scale) <= 1e-10


def test_rank2_chiral_raises(rng):
    b = bl.compute_bilinears(bl.chiral_spinor(bl.random_spinors(rng, 2), -1))
    with pytest.raises(DegenerateInvariant):
        fierz.rank2_replacement(b)


# --- derivative identities ---------------------------------------------------

def test_constant_jet_all_zero(rng):
    jet = bl.SpinorJet.constant(bl.random_spinors(rng, 50))
    for e in (list(fierz.antiproduct_residuals(jet)) + [fierz.belinfante_identity_residual(jet)]
              + fierz.appendix_b_suite(jet, skip_degenerate=True)):
        assert e.max_abs == 0, e.name


def test_antiproduct_random_and_plane_wave(rng):
    jet = bl.random_jets(rng, 1000)
    for e in fierz.antiproduct_residuals(jet, skip_degenerate=True):
        assert e.max_abs <= 1e-10, e.name
    pw = bl.plane_wave_jet(bl.random_spinors(rng, 100), rng.standard_normal((100, 4)))
    for e in fierz.antiproduct_residuals(pw, skip_degenerate=True):
        assert e.max_abs <= 1e-10, e.name


def test_belinfante_identity_random(rng):
    jet = bl.random_jets(rng, 10_000)
    assert fierz.belinfante_identity_residual(jet, skip_degenerate=True).max_abs <= 1e-9
    assert fierz.contracted_belinfante_residual(jet, skip_degenerate=True).max_abs <= 1e-9


def test_contracted_is_trace_of_uncontracted(rng):
    jet = bl.random_jets(rng, 200)
    full, contracted = fierz.belinfante_residual_arrays(jet)
    tr = np.einsum("nmm->n", np.asarray(full).reshape(-1, 4, 4))
    np.testing.assert_allclose(np.asarray(contracted).reshape(-1), tr, atol=1e-12)


def test_belinfante_identity_lhs_is_antisym_vector(rng):
    jet = bl.random_jets(rng, 5)
    t = fierz.TermTable(bl.bilinear_jet(jet))
    np.testing.assert_allclose(t["X"].reshape(5, 4, 4), bl.bilinear_jet(jet).antisym_vector)


def test_appendix_b_random(rng):
    jet = bl.random_jets(rng, 1000)
    for e in fierz.appendix_b_suite(jet, skip_degenerate=True):
        assert e.max_abs <= 1e-9, e.name
        assert e.samples >= 990


@settings(max_examples=40)
@given(jets)
def test_appendix_b_property(jet):
    if not _nondegenerate(jet):
        return
    for e in fierz.appendix_b_suite(jet):
        assert e.max_abs <= 1e-8, e.name


@settings(max_examples=30)
@given(jets, st.floats(0.1, 10), st.floats(0.1, 10))
def test_identities_are_bihomogeneous(jet, a, b):
    if not _nondegenerate(jet):
        return
    # normalized residuals stay at roundoff under independent rescaling
    scaled = bl.SpinorJet(a * jet.psi, b * jet.dpsi)
    for e in fierz.appendix_b_suite(scaled):
        assert e.max_abs <= 1e-8, e.name


def test_degenerate_input_raises_unless_skipped(rng):
    jet = bl.SpinorJet(bl.chiral_spinor(bl.random_spinors(rng, 3)), bl.random_spinors(rng, (3, 4)))
    with pytest.raises(DegenerateInvariant):
        fierz.belinfante_identity_residual(jet)
    e = fierz.belinfante_identity_residual(jet, skip_degenerate=True)
    assert e.samples == 0


def _mutations():
    for ident in fierz.all_identities():
        for side in ("lhs", "rhs"):
            for k in range(len(getattr(ident, side))):
                yield pytest.param(ident, side, k, id=f"{ident.name}-{side}{k}")


@pytest.fixture(scope="module")
def mutation_jets():
    return bl.random_jets(np.random.default_rng(777), 1000)


@pytest.mark.parametrize("ident, side, index", list(_mutations()))
def test_sign_flip_is_detected(mutation_jets, ident, side, index):
    mutated = ident.with_coefficient(index, factor=-1.0, side=side)
    e = fierz.evaluate_identities(mutation_jets, [mutated], skip_degenerate=True)[0]
    assert e.max_abs > 1e-3


def test_identity_names_unique():
    names = [i.name for i in fierz.all_identities()]
    assert len(names) == len(set(names))


def test_fierz_suite_report(rng):
    rep = fierz.fierz_suite(rng, 500, tol=1e-9, chunk=200)
    assert rep.passed
    assert rep["Belinfante Fierz identity"].samples == 500
