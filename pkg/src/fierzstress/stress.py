"""Stress-energy tensors of the Maxwell-Dirac system, spinor and bilinear forms.

All tensors are returned with both indices lower, as complex arrays of
shape (..., 4, 4).  Physical outputs are real up to rounding; the imaginary
part is kept so callers can check it.

Conventions: psi -> e^{i theta} psi goes together with
A_mu -> A_mu - (1/q) d_mu theta, which leaves the Lagrangian

    L = (i/2)[psibar g^mu d_mu psi - d_mu psibar g^mu psi] - m sigma - q j.A

unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .bilinear import (
    BilinearJet,
    SpinorJet,
    bilinear_jet,
    lower,
    minkowski_dot,
    require_nondegenerate,
)
from .clifford import ETA, EPS_LOWER, EPS_UPPER, build_gamma_basis
from .errors import AsymmetryError, ZeroCharge


@dataclass(frozen=True)
class PhysParams:
    q: float = 1.0
    mass: float = 1.0


@dataclass(frozen=True)
class EMField:
    """Potential A_mu, its derivatives dA[mu, nu] = d_mu A_nu, charge and mass.

    F_{mu nu} = d_mu A_nu - d_nu A_mu is derived from ``dA``.
    """

    A: np.ndarray
    dA: np.ndarray
    q: float = 1.0
    mass: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        dA = np.asarray(self.dA, dtype=float)
        if A.shape[-1:] != (4,) or dA.shape != A.shape[:-1] + (4, 4):
            raise ValueError(f"bad field shapes A{A.shape} dA{dA.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(dA))):
            raise ValueError("field entries must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "dA", dA)

    @property
    def F(self):
        return self.dA - np.swapaxes(self.dA, -1, -2)

    @property
    def params(self):
        return PhysParams(self.q, self.mass)

    @classmethod
    def zero(cls, q=1.0, mass=0.0, batch=()):
        return cls(np.zeros(batch + (4,)), np.zeros(batch + (4, 4)), q, mass)

    @classmethod
    def random(cls, rng, size, q=None, mass=None):
        shape = (size,) if np.ndim(size) == 0 else tuple(size)
        q = rng.uniform(0.5, 2.0) * rng.choice([-1, 1]) if q is None else q
        mass = rng.uniform(0.1, 2.0) if mass is None else mass
        return cls(rng.standard_normal(shape + (4,)), rng.standard_normal(shape + (4, 4)),
                   float(q), float(mass))


def gauge_transform_em(em: EMField, dtheta, ddtheta=None) -> EMField:
    """A_mu -> A_mu - d_mu theta / q, the partner of psi -> e^{i theta} psi.

    ``ddtheta`` (symmetric second derivatives) updates dA; F is unchanged.
    """
    if em.q == 0:
        raise ZeroCharge("a gauge transformation of A needs q != 0")
    dA = em.dA if ddtheta is None else em.dA - np.asarray(ddtheta) / em.q
    return EMField(em.A - np.asarray(dtheta) / em.q, dA, em.q, em.mass)


def stress_scale(jet: SpinorJet, em: EMField | None = None):
    """Natural size of the stress-energy components for a jet and field."""
    s = jet.scale(2)
    if em is None:
        return s
    a = np.linalg.norm(em.A, axis=-1)
    f = np.linalg.norm(em.F.reshape(em.F.shape[:-2] + (16,)), axis=-1)
    return s * (1.0 + abs(em.q) * a + abs(em.mass)) + f ** 2


# --- spinor forms -----------------------------------------------------------

def _antisym_vector(jet: SpinorJet):
    """X[..., mu, nu] = psibar g_nu d_mu psi - d_mu psibar g_nu psi."""
    b = build_gamma_basis()
    mats = np.einsum("ab,mbc->mac", b.gamma[0], b.gamma_lower)
    psi_b = np.broadcast_to(jet.psi[..., None, :], jet.dpsi.shape)
    return _backend.sandwich(psi_b, mats, jet.dpsi) - _backend.sandwich(jet.dpsi, mats, psi_b)


def canonical_tensor(jet: SpinorJet):
    """T_{mu nu} = -(i/2)[psibar g_mu d_nu psi - d_nu psibar g_mu psi] (asymmetric)."""
    return -0.5j * np.swapaxes(_antisym_vector(jet), -1, -2)


def belinfante_spinor(jet: SpinorJet):
    """Symmetric part of the canonical tensor."""
    t = canonical_tensor(jet)
    return 0.5 * (t + np.swapaxes(t, -1, -2))


def spin_density(psi):
    """S^{mu sigma nu} = -(1/4)[psibar{g^mu, sigma^{sigma nu}}psi + psibar{g^nu, sigma^{sigma mu}}psi].

    Accepts a spinor array or a :class:`SpinorJet` (only its value is used).
    """
    if isinstance(psi, SpinorJet):
        psi = psi.psi
    psi = np.asarray(psi, dtype=complex)
    b = build_gamma_basis()
    anti = (np.einsum("mab,snbc->msnac", b.gamma, b.sigma)
            + np.einsum("snab,mbc->msnac", b.sigma, b.gamma))
    mats = np.einsum("ab,xbc->xac", b.gamma[0], anti.reshape(64, 4, 4))
    v = _backend.sandwich(psi, mats, psi).reshape(psi.shape[:-1] + (4, 4, 4))
    return -0.25 * (v + np.swapaxes(v, -1, -3))


def spinor_lagrangian(jet: SpinorJet, em: EMField):
    """(i/2)[psibar g^mu d_mu psi - d_mu psibar g^mu psi] - m sigma - q j.A."""
    X = _antisym_vector(jet)
    tr = np.einsum("...mm->...", np.einsum("mn,...nv->...mv", ETA, X))
    b = build_gamma_basis()
    g0 = b.gamma[0]
    mats = np.stack([g0, g0 @ b.gamma[0], g0 @ b.gamma[1], g0 @ b.gamma[2], g0 @ b.gamma[3]])
    v = _backend.sandwich(jet.psi, mats, jet.psi)
    sigma, j = v[..., 0], v[..., 1:]
    return 0.5j * tr - em.mass * sigma - em.q * np.einsum("...m,...m->...", j, em.A)


# --- bilinear forms ---------------------------------------------------------

def _sym(t):
    return t + np.swapaxes(t, -1, -2)


def eps_term(dj, j, k):
    """A[..., mu, nu] = eps_nu^{rho sigma kappa} (d_mu j_rho) j_sigma k_kappa.

    Inputs carry upper vector indices: dj[..., mu, rho] = d_mu j^rho.
    """
    return _backend.eps_contract(EPS_LOWER, dj, j, k)


def belinfante_from_fields(sigma, omega, j, k, dsigma, domega, dj):
    """Gauge-invariant part of the bilinear Belinfante tensor.

    (1/4)(sigma^2 - omega^2)^{-1} { -i[k_mu a_nu + k_nu a_mu]
        - j_sigma k_kappa [eps_nu^{rho sigma kappa} d_mu j_rho + (mu <-> nu)] }
    with a_nu = omega d_nu sigma - sigma d_nu omega.  j, k upper;
    dsigma[..., mu], dj[..., mu, rho] = d_mu j^rho.
    """
    sigma = np.asarray(sigma, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    D = sigma ** 2 - omega ** 2
    kl = lower(k)
    a = omega[..., None] * dsigma - sigma[..., None] * domega
    t1 = -1j * _sym(kl[..., :, None] * a[..., None, :])
    t2 = -_sym(eps_term(dj, j, k))
    return (t1 + t2) / (4.0 * D[..., None, None])


def _mdn(bj: BilinearJet):
    """m^sigma d_mu n_sigma."""
    return np.einsum("...s,...ms->...m", lower(bj.value.m), bj.d.n)


def belinfante_gauge_invariant(bj: BilinearJet):
    require_nondegenerate(bj.value, "belinfante_bilinear")
    v, d = bj.value, bj.d
    return belinfante_from_fields(v.sigma, v.omega, v.j, v.k, d.sigma, d.omega, d.j)


def belinfante_bilinear(bj: BilinearJet):
    """Bilinear Belinfante tensor including the gauge-dependent m.dn terms."""
    gi = belinfante_gauge_invariant(bj)
    D = bj.value.invariant
    jl = lower(bj.value.j)
    corr = _sym(jl[..., :, None] * _mdn(bj)[..., None, :])
    return gi - corr / (4.0 * D[..., None, None])


def b_field(bj: BilinearJet, em: EMField):
    """Gauge-invariant potential B_mu = A_mu - (1/2q)(sigma^2 - omega^2)^{-1} m^sigma d_mu n_sigma."""
    if em.q == 0:
        raise ZeroCharge("B_mu needs a nonzero charge")
    require_nondegenerate(bj.value, "b_field")
    D = bj.value.invariant
    return em.A - np.real(_mdn(bj) / (2.0 * em.q * D[..., None]))


def interaction_tensor(j, X, q):
    """(q/2)(j_mu X_nu + j_nu X_mu) for j^mu (upper) and X_mu (lower)."""
    jl = lower(np.asarray(j))
    X = np.asarray(X)
    return 0.5 * q * _sym(jl[..., :, None] * X[..., None, :])


def maxwell_tensor(F, atol=1e-12):
    """(1/4) eta_{mu nu} F_{s r} F^{s r} - F_{mu s} F_nu^s for lower-index F."""
    F = np.asarray(F)
    size = 1.0 + np.abs(F).max() if F.size else 1.0
    if np.abs(F + np.swapaxes(F, -1, -2)).max(initial=0.0) > atol * size:
        raise AsymmetryError("field strength is not antisymmetric")
    Fu = np.einsum("ma,...ab,bn->...mn", ETA, F, ETA)
    f2 = np.einsum("...ab,...ab->...", F, Fu)
    FF = np.einsum("...ms,st,...nt->...mn", F, ETA, F)
    return 0.25 * ETA * f2[..., None, None] - FF


def assemble_md(jet: SpinorJet, em: EMField, route="spinor", bjet=None):
    """Full Maxwell-Dirac tensor.

    ``route="spinor"``: spinor Belinfante + interaction with A + Maxwell.
    ``route="bilinear"``: gauge-invariant bilinear form + interaction with B + Maxwell.
    """
    if route == "spinor":
        v = _vector_current(jet.psi)
        return belinfante_spinor(jet) + interaction_tensor(v, em.A, em.q) + maxwell_tensor(em.F)
    if route == "bilinear":
        bj = bjet if bjet is not None else bilinear_jet(jet)
        B = b_field(bj, em)
        return (belinfante_gauge_invariant(bj) + interaction_tensor(bj.value.j, B, em.q)
                + maxwell_tensor(em.F))
    raise ValueError(f"unknown route {route!r}")


def _vector_current(psi):
    b = build_gamma_basis()
    mats = np.einsum("ab,mbc->mac", b.gamma[0], b.gamma)
    return _backend.sandwich(psi, mats, psi)


def _eps_scalar(bj: BilinearJet):
    """eps^{rho sigma kappa tau} (d_rho j_sigma) j_kappa k_tau."""
    v = bj.value
    return np.einsum("rskt,...rs,...k,...t->...", EPS_UPPER, lower(bj.d.j), lower(v.j), lower(v.k))


def bilinear_lagrangian(bj: BilinearJet, B, p: PhysParams):
    """(1/2)D^{-1}{i k^r[omega d_r sigma - sigma d_r omega] + eps^{rskt}(d_r j_s) j_k k_t} - m sigma - q j.B."""
    require_nondegenerate(bj.value, "bilinear_lagrangian")
    v, d = bj.value, bj.d
    D = v.invariant
    a = v.omega[..., None] * d.sigma - v.sigma[..., None] * d.omega
    ka = np.einsum("...r,...r->...", v.k, a)
    return (0.5 * (1j * ka + _eps_scalar(bj)) / D - p.mass * v.sigma
            - p.q * np.einsum("...r,...r->...", v.j, np.asarray(B)))


# --- variational form -------------------------------------------------------

# mixed-variance Levi-Civita tensors, built from the all-upper one
_EPS_L1 = np.einsum("am,abcd->mbcd", ETA, EPS_UPPER)  # eps_mu^{rho sigma kappa}
_EPS_L2 = np.einsum("bm,abcd->amcd", ETA, EPS_UPPER)  # eps^rho_mu^{sigma kappa}
_EPS_L3 = np.einsum("cm,abcd->abmd", ETA, EPS_UPPER)  # eps^{rho sigma}_mu^kappa
_EPS_L4 = np.einsum("dm,abcd->abcm", ETA, EPS_UPPER)  # eps^{rho sigma kappa}_mu


def _combinatorial_sides(dj, j, k):
    """Both sides of the Levi-Civita combinatorial identity.

    All inputs lower: dj[..., rho, sigma] = d_rho j_sigma, j_mu, k_mu.
    """
    lhs = -np.einsum("mrsk,...nr,...s,...k->...mn", _EPS_L1, dj, j, k)
    lhs = _sym(lhs)
    E = np.einsum("rskt,...rs,...k,...t->...", EPS_UPPER, dj, j, k)
    P = (np.einsum("rmsk,...rn,...s,...k->...mn", _EPS_L2, dj, j, k)
         + np.einsum("rsmk,...rs,...n,...k->...mn", _EPS_L3, dj, j, k)
         + np.einsum("rskm,...rs,...k,...n->...mn", _EPS_L4, dj, j, k))
    rhs = -2.0 * ETA * E[..., None, None] + _sym(P)
    return lhs, rhs, E, P


def combinatorial_residual(dj, j, k):
    """LHS - RHS of the combinatorial identity; vanishes for arbitrary tensors."""
    lhs, rhs, _, _ = _combinatorial_sides(np.asarray(dj), np.asarray(j), np.asarray(k))
    return lhs - rhs


def combinatorial_scale(dj, j, k):
    n = lambda a, ax: np.sqrt(np.sum(np.abs(a) ** 2, axis=ax))
    return (1.0 + n(dj, (-2, -1))) * (1.0 + n(j, -1)) * (1.0 + n(k, -1))


def variational_pre_tensor(bj: BilinearJet, B, p: PhysParams):
    """Flat-space metric variation of the bilinear action, before simplification.

    -eta L + (1/4)D^{-1}{-i[k_mu a_nu + k_nu a_mu] - 2 eta E + P_{mu nu} + P_{nu mu}}
    + (q/2)(j_mu B_nu + j_nu B_mu), with P the three eps^{...}_mu contractions.
    """
    require_nondegenerate(bj.value, "variational_pre_tensor")
    v, d = bj.value, bj.d
    D = v.invariant
    L = bilinear_lagrangian(bj, B, p)
    kl = lower(v.k)
    a = v.omega[..., None] * d.sigma - v.sigma[..., None] * d.omega
    _, _, E, P = _combinatorial_sides(lower(d.j), lower(v.j), kl)
    inner = -1j * _sym(kl[..., :, None] * a[..., None, :]) - 2.0 * ETA * E[..., None, None] + _sym(P)
    return (-ETA * L[..., None, None] + inner / (4.0 * D[..., None, None])
            + interaction_tensor(v.j, B, p.q))


def variational_decomposition_residual(bj: BilinearJet, B, p: PhysParams):
    """pre-tensor - [gauge-invariant Belinfante + interaction(j, B) - eta L]."""
    L = bilinear_lagrangian(bj, B, p)
    rhs = (belinfante_gauge_invariant(bj) + interaction_tensor(bj.value.j, B, p.q)
           - ETA * L[..., None, None])
    return variational_pre_tensor(bj, B, p) - rhs


def symmetry_residual(t):
    return np.abs(t - np.swapaxes(t, -1, -2))


def imag_residual(t):
    return np.abs(np.imag(t))


def trace(t):
    """eta^{mu nu} T_{mu nu}."""
    return np.einsum("mn,...mn->...", ETA, t)
