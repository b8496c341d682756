"""Spinor jets and the bilinear currents built from them.

Arrays carry an arbitrary leading batch shape.  A spinor is an array of
shape (..., 4); a :class:`SpinorJet` holds the value and the four first
partial derivatives, ``dpsi[..., mu, :]`` being d_mu psi.

Upper indices are stored for the currents (j^mu, s^{mu nu}, ...).  The
antisymmetric derivative blocks follow the index placement in which they
appear in the identities: ``antisym_vector[..., mu, nu]`` is
[psibar gamma_nu d_mu psi - d_mu psibar gamma_nu psi] with a lower nu.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import _backend
from .clifford import build_gamma_basis
from .errors import DegenerateInvariant

DEGENERACY_RTOL = 1e-8


def lower(v, axis=-1):
    """Lower one index of ``v`` with the Minkowski metric."""
    v = np.asarray(v)
    sign = np.array([1.0, -1.0, -1.0, -1.0])
    shape = [1] * v.ndim
    shape[axis] = 4
    return v * sign.reshape(shape)


def minkowski_dot(a, b):
    """a_mu b^mu for upper-index vectors on the last axis."""
    return np.einsum("...m,...m->...", lower(a), b)


@dataclass(frozen=True)
class SpinorJet:
    """Spinor value and first derivatives at a point (or a batch of points)."""

    psi: np.ndarray
    dpsi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        dpsi = np.asarray(self.dpsi, dtype=complex)
        if psi.shape[-1:] != (4,) or dpsi.shape != psi.shape[:-1] + (4, 4):
            raise ValueError(f"bad jet shapes psi{psi.shape} dpsi{dpsi.shape}")
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(dpsi))):
            raise ValueError("spinor jet entries must be finite")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "dpsi", dpsi)

    @property
    def batch_shape(self):
        return self.psi.shape[:-1]

    def __len__(self):
        return self.batch_shape[0] if self.batch_shape else 1

    def __getitem__(self, idx):
        return SpinorJet(self.psi[idx], self.dpsi[idx])

    @classmethod
    def constant(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        return cls(psi, np.zeros(psi.shape[:-1] + (4, 4), dtype=complex))

    def scale(self, degree=2):
        """(1 + |psi|^2 + mean_mu |d_mu psi|^2)^(degree/2), per sample.

        Every identity is homogeneous in (psi, d psi); ``degree`` is its
        total degree, so residual / scale is independent of field size.
        """
        n2 = (np.sum(np.abs(self.psi) ** 2, axis=-1)
              + 0.25 * np.sum(np.abs(self.dpsi) ** 2, axis=(-2, -1)))
        return (1.0 + n2) ** (degree / 2)

    def derivative_scale(self, degree):
        """|psi|^(degree-1) |d psi|, the size of a term linear in d psi.

        The first-order identities are homogeneous of degree ``degree - 1``
        in psi and 1 in d psi, so dividing by this makes their residuals
        invariant under independent rescalings of the two.  Where it
        vanishes both sides of such an identity vanish too; 1 is used.
        """
        p = np.linalg.norm(self.psi, axis=-1)
        d = np.linalg.norm(self.dpsi.reshape(self.batch_shape + (16,)), axis=-1)
        s = p ** (degree - 1) * d
        return np.where(s > 0, s, 1.0)


def spinor_scale(psi):
    """(1 + |psi|^2)^2, the natural size of a product of two bilinears."""
    return (1.0 + np.sum(np.abs(np.asarray(psi)) ** 2, axis=-1)) ** 2


def dirac_adjoint(psi):
    """psibar = psi^dagger gamma^0 (as a row spinor)."""
    g0 = build_gamma_basis().gamma[0]
    return np.einsum("...a,ab->...b", np.conj(psi), g0)


def charge_conjugate(psi):
    """psi^c = C psibar^T with C = i gamma^2 gamma^0."""
    b = build_gamma_basis()
    return np.einsum("ab,...b->...a", b.conjugation, dirac_adjoint(psi))


@dataclass(frozen=True)
class BilinearSet:
    """The sixteen gauge-invariant bilinears plus sdual and m, n.

    omega and sdual are pure imaginary; everything else is real.  Values are
    stored complex so that every formula can be transcribed as written.
    """

    sigma: np.ndarray
    j: np.ndarray
    s: np.ndarray
    k: np.ndarray
    omega: np.ndarray
    sdual: np.ndarray
    m: np.ndarray
    n: np.ndarray

    @property
    def invariant(self):
        """sigma^2 - omega^2."""
        return self.sigma ** 2 - self.omega ** 2

    def fields(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def size_scale(self):
        """(1 + |psi|^2)^2 recovered from j^0 = psi^dagger psi."""
        return (1.0 + np.abs(np.real(self.j[..., 0]))) ** 2

    def degenerate_mask(self, rtol=None):
        """True where |sigma^2 - omega^2| is too small to invert."""
        rtol = DEGENERACY_RTOL if rtol is None else rtol
        return np.abs(self.invariant) <= rtol * self.size_scale()

    def reality_residual(self):
        """Largest |Im| of the real fields and |Re| of omega and sdual, per sample."""
        parts = []
        for name in ("sigma", "j", "s", "k", "m", "n"):
            a = np.imag(getattr(self, name))
            parts.append(np.abs(a).reshape(a.shape[: np.ndim(self.sigma)] + (-1,)).max(axis=-1))
        for name in ("omega", "sdual"):
            a = np.real(getattr(self, name))
            parts.append(np.abs(a).reshape(a.shape[: np.ndim(self.sigma)] + (-1,)).max(axis=-1))
        return np.max(parts, axis=0)


@dataclass(frozen=True)
class BilinearJet:
    """Bilinears, their first derivatives and the antisymmetric derivative blocks.

    ``d`` is a :class:`BilinearSet` whose arrays carry the derivative index
    mu right after the batch axes, e.g. ``d.j[..., mu, nu]`` = d_mu j^nu.
    """

    value: BilinearSet
    d: BilinearSet
    antisym_scalar: np.ndarray
    antisym_pseudo: np.ndarray
    antisym_vector: np.ndarray
    antisym_axial: np.ndarray
    antisym_tensor: np.ndarray
    antisym_tensor5: np.ndarray


def _sandwich_stack():
    """gamma^0 Gamma for the 42 matrices I, g^mu, sigma^{mu nu}, g5 g^mu, g5, g5 sigma^{mu nu}."""
    b = build_gamma_basis()
    g0 = b.gamma[0]
    mats = np.concatenate([
        np.eye(4, dtype=complex)[None],
        b.gamma,
        b.sigma.reshape(16, 4, 4),
        b.g5gamma,
        b.gamma5[None],
        b.g5sigma.reshape(16, 4, 4),
    ])
    return np.einsum("ab,gbc->gac", g0, mats)


def _unpack(flat):
    """Split the 42 sandwich values into named bilinear arrays (upper indices)."""
    sh = flat.shape[:-1]
    return dict(
        sigma=flat[..., 0],
        j=flat[..., 1:5],
        s=flat[..., 5:21].reshape(sh + (4, 4)),
        k=flat[..., 21:25],
        omega=flat[..., 25],
        sdual=flat[..., 26:42].reshape(sh + (4, 4)),
    )


def _mn_matrices():
    b = build_gamma_basis()
    return np.einsum("ab,mbc->mac", b.gamma[0], b.gamma)


def compute_bilinears(psi) -> BilinearSet:
    """All bilinears psibar Gamma psi of a spinor (or batch of spinors)."""
    psi = np.asarray(psi, dtype=complex)
    vals = _unpack(_backend.sandwich(psi, _sandwich_stack(), psi))
    z = _backend.sandwich(charge_conjugate(psi), _mn_matrices(), psi)
    return BilinearSet(m=z.real.astype(complex), n=z.imag.astype(complex), **vals)


def bilinear_jet(jet: SpinorJet) -> BilinearJet:
    """Bilinears of a spinor jet with product-rule derivatives."""
    psi = jet.psi
    dpsi = jet.dpsi
    mats = _sandwich_stack()
    psi_b = np.broadcast_to(psi[..., None, :], dpsi.shape)
    value = _backend.sandwich(psi, mats, psi)
    right = _backend.sandwich(psi_b, mats, dpsi)  # psibar Gamma d_mu psi
    left = _backend.sandwich(dpsi, mats, psi_b)  # d_mu psibar Gamma psi
    mnm = _mn_matrices()
    psic = charge_conjugate(psi)
    z = _backend.sandwich(psic, mnm, psi)
    dz = (_backend.sandwich(charge_conjugate(dpsi), mnm, psi_b)
          + _backend.sandwich(np.broadcast_to(psic[..., None, :], dpsi.shape), mnm, dpsi))

    val = BilinearSet(m=z.real.astype(complex), n=z.imag.astype(complex), **_unpack(value))
    d = BilinearSet(m=dz.real.astype(complex), n=dz.imag.astype(complex), **_unpack(right + left))
    anti = _unpack(right - left)
    # lower the nu (and sigma) indices of gamma_nu, sigma_{nu sigma}, g5 sigma_{nu sigma}
    return BilinearJet(
        value=val,
        d=d,
        antisym_scalar=anti["sigma"],
        antisym_pseudo=anti["omega"],
        antisym_vector=lower(anti["j"]),
        antisym_axial=anti["k"],
        antisym_tensor=lower(lower(anti["s"]), axis=-2),
        antisym_tensor5=lower(lower(anti["sdual"]), axis=-2),
    )


def gauge_transform(jet: SpinorJet, theta, dtheta) -> SpinorJet:
    """Local U(1) phase: psi -> e^{i theta} psi, d_mu psi -> e^{i theta}(d_mu psi + i d_mu theta psi)."""
    theta = np.asarray(theta, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    phase = np.exp(1j * theta)[..., None]
    psi = phase * jet.psi
    dpsi = phase[..., None] * (jet.dpsi + 1j * dtheta[..., :, None] * jet.psi[..., None, :])
    return SpinorJet(psi, dpsi)


# --- random and special inputs -------------------------------------------

def random_spinors(rng: np.random.Generator, size) -> np.ndarray:
    """I.i.d. standard complex normal components (variance 1 per component)."""
    shape = (size, 4) if np.ndim(size) == 0 else tuple(size) + (4,)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_jets(rng: np.random.Generator, size, deriv_scale=1.0) -> SpinorJet:
    psi = random_spinors(rng, size)
    dpsi = deriv_scale * random_spinors(rng, psi.shape[:-1] + (4,))
    return SpinorJet(psi, dpsi)


def plane_wave_jet(psi, p_lower) -> SpinorJet:
    """Jet of psi e^{-i p.x} at x = 0: d_mu psi = -i p_mu psi."""
    psi = np.asarray(psi, dtype=complex)
    p = np.asarray(p_lower, dtype=float)
    return SpinorJet(psi, -1j * p[..., :, None] * psi[..., None, :])


def on_shell_plane_wave(chi, p_spatial, mass) -> tuple[SpinorJet, np.ndarray]:
    """Free positive-energy plane wave solving the Dirac equation with A = 0.

    Returns the jet and the lower-index momentum p_mu with p^2 = mass^2.
    psi = (gamma^mu p_mu + m) chi solves (gamma.p - m) psi = 0.
    """
    p3 = np.asarray(p_spatial, dtype=float)
    energy = np.sqrt(mass ** 2 + np.sum(p3 ** 2, axis=-1))
    p_up = np.concatenate([energy[..., None], p3], axis=-1)
    p_low = lower(p_up)
    g = build_gamma_basis().gamma
    slash = np.einsum("...m,mab->...ab", p_low, g) + mass * np.eye(4)
    psi = np.einsum("...ab,...b->...a", slash, np.asarray(chi, dtype=complex))
    return plane_wave_jet(psi, p_low), p_low


def chiral_spinor(psi, handedness=+1):
    """Project onto a gamma_5 eigenspace; such spinors have sigma = omega = 0."""
    b = build_gamma_basis()
    proj = 0.5 * (np.eye(4) + handedness * b.gamma5)
    return np.einsum("ab,...b->...a", proj, np.asarray(psi, dtype=complex))


def require_nondegenerate(b: BilinearSet, what="operation"):
    """Raise DegenerateInvariant if any sample sits on the light-like stratum."""
    bad = b.degenerate_mask()
    if np.any(bad):
        n = int(np.count_nonzero(bad))
        raise DegenerateInvariant(
            f"{what}: sigma^2 - omega^2 vanishes (to tolerance) at {n} sample(s)")


def fundamental_products(b: BilinearSet):
    """(j.j, k.k, j.k) with the Minkowski metric."""
    return minkowski_dot(b.j, b.j), minkowski_dot(b.k, b.k), minkowski_dot(b.j, b.k)

