import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ETA
from fierzstress import spherical as sph
from fierzstress.errors import DegenerateInvariant, GridTooSmall, RadiusMismatch, SchemaError, ZeroCharge

P = sph.SphericalParams(1, q=1.0, mass=1.0)


def _static(**kw):
    base = dict(t=0.0, r=1.3, sigma=0.8, omega_im=0.0, j_a=1.1, j_b=0.4)
    base.update(kw)
    return sph.SphericalJet(**base)


# --- ansatz ------------------------------------------------------------------

def test_ansatz_on_axis():
    sj = _static(j_b=0.0)
    av = sph.ansatz_vectors(sj, np.array([0, 0, 1.3]))
    np.testing.assert_allclose(av.j, [1.1, 0, 0, 0])
    np.testing.assert_allclose(av.k, [0, 0, 0, 1.1])


def test_ansatz_k_follows_sign():
    sj = _static()
    x = np.array([0, 0, 1.3])
    kp = sph.ansatz_vectors(sj, x, sph.SphericalParams(1)).k
    km = sph.ansatz_vectors(sj, x, sph.SphericalParams(-1)).k
    np.testing.assert_allclose(kp, -km)


def test_ansatz_invariants(rng):
    sj = sph.SphericalJet.random(rng, 500)
    av = sph.ansatz_vectors(sj, sph.random_direction(rng, sj.r))
    jj = np.einsum("nm,mk,nk->n", av.j, ETA, av.j)
    kk = np.einsum("nm,mk,nk->n", av.k, ETA, av.k)
    jk = np.einsum("nm,mk,nk->n", av.j, ETA, av.k)
    expected = sj.j_a ** 2 - sj.r ** 2 * sj.j_b ** 2
    np.testing.assert_allclose(jj, expected, atol=1e-12 * sj.scale().max())
    np.testing.assert_allclose(kk, -expected, atol=1e-12 * sj.scale().max())
    assert np.max(np.abs(jk) / sj.scale()) <= 1e-12


def test_radius_mismatch():
    with pytest.raises(RadiusMismatch):
        sph.ansatz_vectors(_static(), np.array([0, 0, 2.0]))


# --- reduced formulas ---------------------------------------------------------

def test_static_potentials():
    sj = _static()
    p = sph.SphericalParams(1, q=2.0, mass=0.7)
    Ba, Bb = sph.potentials(sj, p)
    assert math.isclose(Ba, -0.7 * 1.1 / (2.0 * 0.8))
    assert math.isclose(Bb, -0.7 * 0.4 / (2.0 * 0.8))


def test_static_stress_functions():
    sj = _static()
    p = sph.SphericalParams(1, q=1.0, mass=0.7)
    Ta, Tb, Tc, F = sph.stress_functions(sj, p)
    assert math.isclose(Ta, -0.7 * 1.1 ** 2 / 0.8)
    # mass term of T_b enters with a plus sign (see full-tensor cross-check below)
    assert math.isclose(Tb, +0.7 * 1.1 * 1.3 * 0.4 / 0.8)


def test_monopole_values():
    for sign, r, val in ((1, 2.0, 1 / 16), (-1, 1.0, -0.5), (1, 0.5, 4.0)):
        p = sph.SphericalParams(sign, q=1.0, mass=1.0)
        assert sph.maxwell_coeffs(_static(r=r), p)[1] == val
        assert sph.monopole(p, r) == val


def test_zero_charge_and_degenerate():
    with pytest.raises(ZeroCharge):
        sph.potentials(_static(), sph.SphericalParams(1, q=0.0))
    with pytest.raises(DegenerateInvariant):
        sph.potentials(_static(sigma=0.0, omega_im=0.0), P)
    with pytest.raises(ValueError):
        sph.SphericalParams(sign=0)


def test_tc_relation(rng):
    sj = sph.SphericalJet.random(rng, 1000)
    Ta, Tb, Tc, F = sph.stress_functions(sj, P)
    res = Tc - Ta - P.mass * sj.sigma * (sj.j_a ** 2 - sj.r ** 2 * sj.j_b ** 2) / sj.invariant + 2 * F
    size = 1 + np.abs(Ta) + np.abs(Tc) + np.abs(F)
    assert np.max(np.abs(res) / size) <= 1e-12


@pytest.mark.parametrize("sign", [1, -1])
def test_real_and_complex_forms_agree(rng, sign):
    p = sph.SphericalParams(sign, q=1.3, mass=0.6)
    sj = sph.SphericalJet.random(rng, 1000)
    pairs = [(sph.potentials(sj, p), sph.potentials_complex(sj, p)),
             (sph.maxwell_coeffs(sj, p), sph.maxwell_coeffs_complex(sj, p)),
             (sph.stress_functions(sj, p), sph.stress_functions_complex(sj, p))]
    for real, cplx in pairs:
        for a, b in zip(real, cplx):
            size = 1 + np.abs(b)
            assert np.max(np.abs(np.imag(b)) / size) <= 1e-12
            assert np.max(np.abs(a - b) / size) <= 1e-12


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1))
def test_sign_flip_symmetry(seed):
    # (sign, omega) -> (-sign, -omega) leaves every reduced function except F_b unchanged
    sj = sph.SphericalJet.random(np.random.default_rng(seed))
    flipped = sph.SphericalJet(**{**sj.__dict__, "omega_im": -sj.omega_im, "omega_im_t": -sj.omega_im_t,
                                  "omega_im_r": -sj.omega_im_r, "omega_im_tt": -sj.omega_im_tt,
                                  "omega_im_rr": -sj.omega_im_rr})
    p, pm = sph.SphericalParams(1, 1.0, 0.8), sph.SphericalParams(-1, 1.0, 0.8)
    a, b = sph.evaluate_jet(sj, p), sph.evaluate_jet(flipped, pm)
    for key in a:
        expected = -a[key] if key == "F_b" else a[key]
        assert abs(b[key] - expected) <= 1e-10 * (1 + abs(a[key])), key


# --- sympy oracle for the radial electric field ------------------------------

def _sympy_fa():
    t, r = sp.symbols("t r", positive=True)
    m, q, sign = sp.symbols("m q sign")
    s, w, ja, jb = (sp.Function(n)(t, r) for n in ("s", "w", "ja", "jb"))
    D = s ** 2 + w ** 2
    Ba = (-sign / 2 * (sp.diff(s, r) * w - s * sp.diff(w, r)) - m * s * ja) / (q * D)
    Bb = (sign / (2 * r) * (sp.diff(s, t) * w - s * sp.diff(w, t)) - m * s * jb) / (q * D)
    # B_i = -x_i B_b, so F_{0i} = x_i (-d_t B_b - (1/r) d_r B_a)
    Fa = -sp.diff(Bb, t) - sp.diff(Ba, r) / r
    return (t, r, m, q, sign, s, w, ja, jb), Fa


def test_fa_matches_sympy_derivative(rng):
    (t, r, m, q, sign, s, w, ja, jb), Fa = _sympy_fa()
    for _ in range(5):
        sj = sph.SphericalJet.random(rng)
        for sg in (1, -1):
            p = sph.SphericalParams(sg, q=float(rng.uniform(0.5, 2)), mass=float(rng.uniform(0.1, 2)))
            vals = {
                sp.diff(s, t, 2): sj.sigma_tt, sp.diff(s, r, 2): sj.sigma_rr,
                sp.diff(w, t, 2): sj.omega_im_tt, sp.diff(w, r, 2): sj.omega_im_rr,
                sp.diff(s, t): sj.sigma_t, sp.diff(s, r): sj.sigma_r,
                sp.diff(w, t): sj.omega_im_t, sp.diff(w, r): sj.omega_im_r,
                sp.diff(ja, t): sj.j_a_t, sp.diff(ja, r): sj.j_a_r,
                sp.diff(jb, t): sj.j_b_t, sp.diff(jb, r): sj.j_b_r,
            }
            expr = Fa.subs(vals).subs({s: sj.sigma, w: sj.omega_im, ja: sj.j_a, jb: sj.j_b})
            expr = expr.subs({t: sj.t, r: sj.r, m: p.mass, q: p.q, sign: sg})
            expected = float(expr)
            got = sph.maxwell_coeffs(sj, p)[0]
            assert abs(got - expected) <= 1e-12 * (1 + abs(expected))


# --- tensor assembly and embedding ------------------------------------------

def test_assemble_on_axis():
    sj = _static()
    x = np.array([0, 0, 1.3])
    T = sph.assemble_spherical(sj, P, x)
    Ta, Tb, Tc, F = sph.stress_functions(sj, P)
    assert math.isclose(T[3, 3], Tc + F)
    assert math.isclose(T[1, 1], F) and math.isclose(T[2, 2], F)
    assert math.isclose(T[0, 3], Tb)
    np.testing.assert_array_equal(T, T.T)


def test_assemble_zero_tb():
    sj = _static(j_b=0.0)
    T = sph.assemble_spherical(sj, P, np.array([0.6, 0.0, np.sqrt(1.3 ** 2 - 0.36)]))
    assert np.all(T[0, 1:] == 0)


def test_trace_matches_components(rng):
    sj = sph.SphericalJet.random(rng, 200)
    T = sph.assemble_spherical(sj, P, sph.random_direction(rng, sj.r))
    Ta, Tb, Tc, F = sph.stress_functions(sj, P)
    tr = np.einsum("mn,kmn->k", ETA, T)
    size = 1 + np.abs(Ta) + np.abs(Tc) + np.abs(F)
    assert np.max(np.abs(tr - (Ta + F - (Tc + 3 * F))) / size) <= 1e-12


@pytest.mark.parametrize("sign", [1, -1])
def test_rotational_covariance(rng, sign):
    p = sph.SphericalParams(sign, q=1.0, mass=0.9)
    sj = sph.SphericalJet.random(rng, 50)
    x = sph.random_direction(rng, sj.r)
    R = sph.random_rotation(rng)
    L = np.eye(4)
    L[1:, 1:] = R
    for f in (sph.assemble_spherical, sph.full_tensor):
        T1 = f(sj, p, x @ R.T)
        T0 = f(sj, p, x)
        np.testing.assert_allclose(T1, np.einsum("ab,nbc,dc->nad", L, T0, L), atol=1e-10)


@pytest.mark.parametrize("sign", [1, -1])
def test_embed_crosscheck(rng, sign):
    p = sph.SphericalParams(sign, q=float(rng.uniform(0.5, 2)), mass=float(rng.uniform(0.1, 2)))
    sj = sph.SphericalJet.random(rng, 1000)
    rep = sph.embed_and_crosscheck(sj, p, sph.random_direction(rng, sj.r))
    assert rep.passed, rep.failures


def test_embed_crosscheck_on_axis_eps_term(rng):
    sj = sph.SphericalJet.random(rng, 100)
    x = np.zeros((100, 3))
    x[:, 2] = sj.r
    rep = sph.embed_and_crosscheck(sj, P, x)
    assert rep["Levi-Civita term under the ansatz"].max_abs <= 1e-11


def test_wrong_tb_sign_is_detected(rng, monkeypatch):
    # with the opposite mass-term sign in T_b the full tensor disagrees
    orig = sph.stress_functions

    def flipped(sj, p):
        Ta, Tb, Tc, F = orig(sj, p)
        return Ta, Tb - 2 * p.mass * sj.sigma * sj.j_a * sj.r * sj.j_b / sj.invariant, Tc, F

    monkeypatch.setattr(sph, "stress_functions", flipped)
    sj = sph.SphericalJet.random(rng, 100)
    rep = sph.embed_and_crosscheck(sj, P, sph.random_direction(rng, sj.r))
    assert rep["full vs reduced tensor"].max_abs > 1e-3


def test_crosscheck_degenerate_raises():
    with pytest.raises(DegenerateInvariant):
        sph.embed_and_crosscheck(_static(sigma=0.0), P, np.array([0, 0, 1.3]))


# --- grids ---------------------------------------------------------------------

@given(st.integers(3, 6), st.integers(0, 2), st.floats(-1, 1))
def test_fd_weights_exact_on_polynomials(n, order, x0):
    xs = np.sort(np.linspace(-1, 1, n) + 0.01 * np.arange(n))
    w = sph.fd_weights(x0, xs, order)
    for deg in range(n):
        f = xs ** deg
        exact = math.factorial(deg) / math.factorial(deg - order) * x0 ** (deg - order) if deg >= order else 0.0
        assert abs(w @ f - exact) <= 1e-8 * (1 + abs(exact))


def _grid(nt=5, nr=6):
    return sph.analytic_fixture(np.linspace(0, 1, nt), np.linspace(0.5, 1.5, nr))[0]


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        sph.grid_evaluate(_grid(2, 2), P)
    with pytest.raises(GridTooSmall):
        sph.grid_jet(_grid(3, 2))


def test_csv_round_trip_exact():
    g = _grid()
    g2 = sph.GridTable.from_csv(g.to_csv())
    for name in ("t", "r", "sigma", "omega_im", "j_a", "j_b"):
        np.testing.assert_array_equal(getattr(g2, name), getattr(g, name))
    assert g2.to_csv() == g.to_csv()


def test_csv_any_row_order(rng):
    g = _grid()
    lines = g.to_csv().splitlines()
    body = lines[1:]
    rng.shuffle(body)
    g2 = sph.GridTable.from_csv("\n".join([lines[0]] + body) + "\n")
    np.testing.assert_array_equal(g2.sigma, g.sigma)


@pytest.mark.parametrize("text", [
    "",
    "t,r,sigma\n0,1,2\n",
    "t,r,sigma,omega_im,j_a,j_b\n",
    "t,r,sigma,omega_im,j_a,j_b\n0,1,1,1,1,x\n",
    "t,r,sigma,omega_im,j_a,j_b\n0,1,1,1,1\n",
    "t,r,sigma,omega_im,j_a,j_b\n0,1,1,1,1,1\n0,2,1,1,1,1\n1,1,1,1,1,1\n",
    "t,r,sigma,omega_im,j_a,j_b\n0,-1,1,1,1,1\n",
    "t,r,sigma,omega_im,j_a,j_b\n0,1,nan,1,1,1\n",
])
def test_csv_schema_errors(text):
    with pytest.raises(SchemaError):
        sph.GridTable.from_csv(text)


def test_constant_in_t_grid_has_no_t_derivatives():
    t, r = np.linspace(0, 1, 4), np.linspace(0.5, 1.5, 5)
    f = {n: (lambda T, R, c=c: c + 0.3 * R ** 2) for c, n in zip((1.0, 0.5, 1.2, 0.2),
                                                                   ("sigma", "omega_im", "j_a", "j_b"))}
    sj = sph.grid_jet(sph.GridTable.from_functions(t, r, f))
    for name in ("sigma_t", "omega_im_t", "j_a_t", "j_b_t", "sigma_tt", "omega_im_tt"):
        assert np.abs(getattr(sj, name)).max() <= 1e-13
    np.testing.assert_allclose(sj.sigma_r, 0.6 * sj.r, atol=1e-12)


def test_degenerate_and_small_r_nodes_flagged():
    g = _grid()
    sigma, omega = g.sigma.copy(), g.omega_im.copy()
    sigma[2, 3] = omega[2, 3] = 0.0
    g = sph.GridTable(g.t, g.r, sigma, omega, g.j_a, g.j_b)
    res = sph.grid_evaluate(g, P, sph.FDConfig(r_floor=0.6))
    assert res.flags[2, 3] == sph.FLAG_DEGENERATE
    assert np.all(res.flags[:, 0] == sph.FLAG_SMALL_R)
    assert np.isnan(res.columns["T_a"][2, 3])
    assert np.count_nonzero(res.flags) == 1 + g.t.size
    d = res.to_dict()
    assert None in d["rows"][2 * g.r.size + 3]


@pytest.mark.parametrize("sign", [1, -1])
def test_grid_monopole_column(sign):
    p = sph.SphericalParams(sign, q=1.7, mass=1.0)
    res = sph.grid_evaluate(_grid(), p)
    for row in res.rows():
        assert row[5] == sign / (2 * 1.7 * row[1] ** 3)


@pytest.mark.parametrize("sign", [1, -1])
def test_grid_second_order(sign):
    ratio, errs = sph.convergence_ratio(sph.SphericalParams(sign, q=1.0, mass=1.0))
    assert ratio >= 3.5
    assert errs[1] < errs[0]


def test_grid_output_columns():
    res = sph.grid_evaluate(_grid(), P)
    header = res.to_csv().splitlines()[0].split(",")
    assert tuple(header) == sph.OUTPUT_COLUMNS
    np.testing.assert_allclose(res.columns["T00"], res.columns["T_a"] + res.columns["scriptF"])


def test_grid_zero_charge():
    with pytest.raises(ZeroCharge):
        sph.grid_evaluate(_grid(), sph.SphericalParams(1, q=0.0))
