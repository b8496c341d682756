"""Fierz expansion and the bilinear identities for spinor derivatives.

Every identity is evaluated two-sidedly: the left-hand side is built from
the spinor jet directly (the antisymmetric derivative blocks), the
right-hand side from bilinears and their derivatives only.  Identities are
stored as data, a list of (coefficient, term) pairs per side, so that tests
can perturb one coefficient and watch the residual blow up.

Index placement follows :mod:`fierzstress.bilinear`: in every rank-2 term
``T[..., mu, nu]`` the first index is the derivative index and the second
one is the free (lower) index nu.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .bilinear import (
    DEGENERACY_RTOL,
    BilinearJet,
    BilinearSet,
    SpinorJet,
    bilinear_jet,
    dirac_adjoint,
    lower,
    minkowski_dot,
    require_nondegenerate,
)
from .clifford import DELTA4, EPS_LOWER, EPS_UPPER, build_gamma_basis
from .errors import DegenerateInvariant
from .report import IdentityReport, IdentityResidual, residual_from


# --- Fierz expansion -------------------------------------------------------

@dataclass(frozen=True)
class FierzCoefficients:
    """Coefficients of psi chibar in the Clifford basis.

    psi chibar = a_S I + a_V[mu] g^mu + a_T[mu, nu] sigma^{mu nu}
                 + a_A[mu] g5 g^mu + a_P g5,

    with the sum over all (mu, nu) in the tensor term.
    """

    a_S: complex
    a_V: np.ndarray
    a_T: np.ndarray
    a_A: np.ndarray
    a_P: complex

    def reconstruct(self):
        b = build_gamma_basis()
        return (np.multiply.outer(self.a_S, np.eye(4))
                + np.einsum("...m,mab->...ab", self.a_V, b.gamma)
                + np.einsum("...mn,mnab->...ab", self.a_T, b.sigma)
                + np.einsum("...m,mab->...ab", self.a_A, b.g5gamma)
                + np.multiply.outer(self.a_P, b.gamma5))


def fierz_expand(chi, psi) -> FierzCoefficients:
    """Expand the outer product psi chibar (batched over leading axes)."""
    chi = np.asarray(chi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    b = build_gamma_basis()
    cb = dirac_adjoint(chi)

    def sand(mats):
        return np.einsum("...a,...xab,...b->...x", cb, mats, psi)

    return FierzCoefficients(
        a_S=0.25 * np.einsum("...a,...a->...", cb, psi),
        a_V=0.25 * sand(b.gamma_lower),
        a_T=0.125 * sand(b.sigma_lower.reshape(16, 4, 4)).reshape(cb.shape[:-1] + (4, 4)),
        a_A=-0.25 * sand(np.einsum("ab,mbc->mac", b.gamma5, b.gamma_lower)),
        a_P=0.25 * np.einsum("...a,ab,...b->...", cb, b.gamma5, psi),
    )


def fierz_reconstruction_residual(chi, psi):
    """max |psi chibar - sum a_R Gamma_R| per pair."""
    chi = np.asarray(chi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    outer = np.einsum("...a,...b->...ab", psi, dirac_adjoint(chi))
    diff = np.abs(outer - fierz_expand(chi, psi).reconstruct())
    return diff.reshape(diff.shape[:-2] + (16,)).max(axis=-1)


# --- rank-2 replacement and fundamental identities ------------------------

def rank2_replacement(b: BilinearSet):
    """s and sdual rebuilt from (sigma, omega, j, k).

    s^{mu nu}    = (sigma eps^{mu nu rho sigma} - omega delta^{mu nu rho sigma}) j_rho k_sigma / D
    sdual^{mu nu} = (omega eps - sigma delta) j_rho k_sigma / D,   D = sigma^2 - omega^2.
    """
    require_nondegenerate(b, "rank2_replacement")
    jl, kl = lower(b.j), lower(b.k)
    e = np.einsum("mnrs,...r,...s->...mn", EPS_UPPER, jl, kl)
    d = np.einsum("mnrs,...r,...s->...mn", DELTA4, jl, kl)
    inv = (1.0 / b.invariant)[..., None, None]
    sg = b.sigma[..., None, None]
    om = b.omega[..., None, None]
    return inv * (sg * e - om * d), inv * (om * e - sg * d)


def check_fundamental(b: BilinearSet, tol=1e-10) -> IdentityReport:
    """j.j = D, k.k = -D, j.k = 0, reality, and the rank-2 replacement where defined."""
    scale = b.size_scale()
    D = b.invariant
    jj, kk, jk = (np.atleast_1d(x) for x in _fund(b))
    sc = np.atleast_1d(scale)
    rep = IdentityReport(tol, title="fundamental Fierz identities")
    rep.add(residual_from("j.j = sigma^2 - omega^2", jj - np.atleast_1d(D), sc))
    rep.add(residual_from("k.k = -(sigma^2 - omega^2)", kk + np.atleast_1d(D), sc))
    rep.add(residual_from("j.k = 0", jk, sc))
    rep.add(residual_from("reality pattern", np.atleast_1d(b.reality_residual()), sc))
    ok = ~np.atleast_1d(b.degenerate_mask())
    if np.any(ok):
        sub = _take(b, ok)
        s_pred, sd_pred = rank2_replacement(sub)
        rep.add(residual_from("rank-2 replacement s", _flat(s_pred - sub.s, ok.sum()), sc[ok]))
        rep.add(residual_from("rank-2 replacement sdual", _flat(sd_pred - sub.sdual, ok.sum()), sc[ok]))
    return rep


def _fund(b):
    return (minkowski_dot(b.j, b.j), minkowski_dot(b.k, b.k), minkowski_dot(b.j, b.k))


def _flat(a, n):
    return np.asarray(a).reshape(n, -1)


def _take(b: BilinearSet, mask) -> BilinearSet:
    """Subset of a (flat-batched) BilinearSet; scalars are promoted to 1-batches."""
    return BilinearSet(**{k: np.asarray(v).reshape((-1,) + np.shape(v)[np.ndim(b.sigma):])[mask]
                          for k, v in b.fields().items()})


# --- term table -------------------------------------------------------------

class TermTable:
    """Lazily evaluated named terms of the derivative identities.

    Built once per batch of jets; every term is computed on first access and
    cached.  Batch is flattened to one leading axis.
    """

    def __init__(self, bj: BilinearJet):
        v, d = bj.value, bj.d
        self.n = int(np.size(v.sigma))
        n = self.n
        r = lambda a, tail: np.asarray(a).reshape((n,) + tail)
        self.s = r(v.sigma, ())
        self.o = r(v.omega, ())
        self.D = self.s ** 2 - self.o ** 2
        self.S2 = self.s ** 2 + self.o ** 2
        self.j = r(v.j, (4,))
        self.k = r(v.k, (4,))
        self.jl = lower(self.j)
        self.kl = lower(self.k)
        self.m = r(v.m, (4,))
        self.sl = lower(lower(r(v.s, (4, 4))), -2)
        self.sdl = lower(lower(r(v.sdual, (4, 4))), -2)
        self.ds = r(d.sigma, (4,))
        self.do = r(d.omega, (4,))
        self.dj = r(d.j, (4, 4))
        self.dk = r(d.k, (4, 4))
        self.dkl = lower(self.dk)
        self.dn = r(d.n, (4, 4))
        self.dsl = lower(lower(r(d.s, (4, 4, 4))), -2)
        self.dsdl = lower(lower(r(d.sdual, (4, 4, 4))), -2)
        self.XS = r(bj.antisym_scalar, (4,))
        self.XP = r(bj.antisym_pseudo, (4,))
        self.X = r(bj.antisym_vector, (4, 4))
        self.XA = r(bj.antisym_axial, (4, 4))
        self.XT = r(bj.antisym_tensor, (4, 4, 4))
        self.XT5 = r(bj.antisym_tensor5, (4, 4, 4))
        self._cache = {}

    def __getitem__(self, key):
        if key not in self._cache:
            self._cache[key] = _TERMS[key](self)
        return self._cache[key]

    # helpers shared by several terms
    def outer(self, a_nu, b_mu):
        """a_nu b_mu laid out as [mu, nu]."""
        return b_mu[:, :, None] * a_nu[:, None, :]

    def sc(self, x):
        """Per-sample scalar broadcast against [mu, nu] arrays."""
        return x[:, None, None]

    def mdn(self):
        """m^sigma d_mu n_sigma."""
        return np.einsum("ns,nms->nm", lower(self.m), self.dn)

    def jdk(self):
        """j^sigma d_mu k_sigma."""
        return np.einsum("ns,nms->nm", self.j, self.dkl)

    def eps_djjk(self):
        """eps_{nu sigma rho eps} (d_mu j^sigma) j^rho k^eps."""
        return _backend.eps_contract(EPS_LOWER, self.dj, self.j, self.k)

    def eps_jdjk(self):
        """eps_{nu sigma rho eps} j^sigma (d_mu j^rho) k^eps."""
        return _backend.eps_contract(EPS_LOWER.transpose(0, 2, 1, 3), self.dj, self.j, self.k)


def _c(A, B):
    """A_{nu sigma} B_mu^sigma -> [mu, nu]."""
    return np.einsum("nvs,nms->nmv", A, B)


def _kc(k, B):
    """k^sigma B_{mu nu sigma}."""
    return np.einsum("ns,nmvs->nmv", k, B)


def _jd(j, A):
    """j^sigma A_{mu nu sigma}."""
    return np.einsum("ns,nmvs->nmv", j, A)


def _dj(dj, A):
    """(d_mu j^sigma) A_{nu sigma}."""
    return np.einsum("nms,nvs->nmv", dj, A)


def _bracket(t):
    """D^{-1}[j^sigma(d_mu k_sigma)(sigma^2 + omega^2) + 2i m^sigma(d_mu n_sigma) sigma omega]."""
    return (t.jdk() * t.S2[:, None] + 2j * t.mdn() * (t.s * t.o)[:, None]) / t.D[:, None]


def _ds_pred(t, dual):
    """Derivative of s (or sdual) from the rank-2 replacement, all indices lower."""
    s, o, D, S2 = t.s, t.o, t.D, t.S2
    jk = np.einsum("nr,ne->nre", t.j, t.k)
    djk = np.einsum("nmr,ne->nmre", t.dj, t.k) + np.einsum("nr,nme->nmre", t.j, t.dk)
    E = np.einsum("vsre,nre->nvs", EPS_LOWER, jk)
    Dl = np.einsum("vsre,nre->nvs", DELTA4, jk)
    dE = np.einsum("vsre,nmre->nmvs", EPS_LOWER, djk)
    dD = np.einsum("vsre,nmre->nmvs", DELTA4, djk)
    so = (s * o)[:, None]
    if not dual:
        a = 2 * so * t.do - S2[:, None] * t.ds
        b = 2 * so * t.ds - S2[:, None] * t.do
        c1, c2 = s, o
    else:
        a = -2 * so * t.ds + S2[:, None] * t.do
        b = -2 * so * t.do + S2[:, None] * t.ds
        c1, c2 = o, s
    inv2 = (1.0 / D ** 2)[:, None, None, None]
    inv1 = (1.0 / D)[:, None, None, None]
    return ((a[:, :, None, None] * E[:, None] + b[:, :, None, None] * Dl[:, None]) * inv2
            + (c1[:, None, None, None] * dE - c2[:, None, None, None] * dD) * inv1)


_TERMS = {
    # antisymmetric derivative blocks
    "XS": lambda t: t.XS,
    "XP": lambda t: t.XP,
    "X": lambda t: t.X,
    "trX": lambda t: np.einsum("nmm->n", t.X * np.array([1.0, -1.0, -1.0, -1.0])[:, None]),
    "dsl": lambda t: t.dsl,
    "dsdl": lambda t: t.dsdl,
    "oXS": lambda t: t.o[:, None] * t.XS,
    "sXP": lambda t: t.s[:, None] * t.XP,
    "sX": lambda t: t.sc(t.s) * t.X,
    "oX": lambda t: t.sc(t.o) * t.X,
    "soX": lambda t: t.sc(t.s * t.o) * t.X,
    "jXS": lambda t: t.outer(t.jl, t.XS),
    "jXP": lambda t: t.outer(t.jl, t.XP),
    "j{oXS+sXP}": lambda t: t.outer(t.jl, t.o[:, None] * t.XS + t.s[:, None] * t.XP),
    "s.XA": lambda t: _c(t.sl, t.XA),
    "sd.XA": lambda t: _c(t.sdl, t.XA),
    "(ss+osd).XA": lambda t: _c(t.sc(t.s) * t.sl + t.sc(t.o) * t.sdl, t.XA),
    "k.XT": lambda t: _kc(t.k, t.XT),
    "k.XT5": lambda t: _kc(t.k, t.XT5),
    "k.{sXT+oXT5}": lambda t: _kc(t.k, t.s[:, None, None, None] * t.XT + t.o[:, None, None, None] * t.XT5),
    # bilinear side
    "kds": lambda t: t.outer(t.kl, t.ds),
    "kdo": lambda t: t.outer(t.kl, t.do),
    "k[sds+odo]": lambda t: t.outer(t.kl, t.s[:, None] * t.ds + t.o[:, None] * t.do),
    "sdk": lambda t: t.sc(t.s) * t.dkl,
    "odk": lambda t: t.sc(t.o) * t.dkl,
    "S2dk": lambda t: t.sc(t.S2) * t.dkl,
    "dj.s": lambda t: _dj(t.dj, t.sl),
    "dj.sd": lambda t: _dj(t.dj, t.sdl),
    "j.ds": lambda t: _jd(t.j, t.dsl),
    "j.dsd": lambda t: _jd(t.j, t.dsdl),
    "d(j.s)": lambda t: _dj(t.dj, t.sl) + _jd(t.j, t.dsl),
    "d(j.sd)": lambda t: _dj(t.dj, t.sdl) + _jd(t.j, t.dsdl),
    "dj.(ssd+os)": lambda t: _dj(t.dj, t.sc(t.s) * t.sdl + t.sc(t.o) * t.sl),
    "j.(sdsd+ods)": lambda t: _jd(t.j, t.s[:, None, None, None] * t.dsdl + t.o[:, None, None, None] * t.dsl),
    "bracket": _bracket,
    "j.bracket": lambda t: t.outer(t.jl, _bracket(t)),
    "ds_pred": lambda t: _ds_pred(t, False),
    "dsd_pred": lambda t: _ds_pred(t, True),
    # D^{-1}-weighted pieces of the Belinfante-type identities
    "jdk.o/D": lambda t: t.jdk() * (t.o / t.D)[:, None],
    "jdk.s/D": lambda t: t.jdk() * (t.s / t.D)[:, None],
    "mdn.s/D": lambda t: t.mdn() * (t.s / t.D)[:, None],
    "mdn.o/D": lambda t: t.mdn() * (t.o / t.D)[:, None],
    "k[ods-sdo]/D": lambda t: t.outer(t.kl, t.o[:, None] * t.ds - t.s[:, None] * t.do) / t.sc(t.D),
    "eps.djjk/D": lambda t: t.eps_djjk() / t.sc(t.D),
    "j.mdn/D": lambda t: t.outer(t.jl, t.mdn()) / t.sc(t.D),
    "tr.k[ods-sdo]/D": lambda t: np.einsum("nm,nm->n", t.k, t.o[:, None] * t.ds - t.s[:, None] * t.do) / t.D,
    "tr.eps.djjk/D": lambda t: np.einsum("msre,nms,nr,ne->n", EPS_UPPER, lower(t.dj), t.jl, t.kl) / t.D,
    "tr.j.mdn/D": lambda t: np.einsum("nm,nm->n", t.j, t.mdn()) / t.D,
    "so.k[ods-sdo]/D": lambda t: t.outer(t.kl, t.o[:, None] * t.ds - t.s[:, None] * t.do) * t.sc(t.s * t.o / t.D),
    "so.eps.jdjk/D": lambda t: t.eps_jdjk() * t.sc(t.s * t.o / t.D),
    "so.eps.djjk/D": lambda t: t.eps_djjk() * t.sc(t.s * t.o / t.D),
    "S2.j.jdk/D": lambda t: t.outer(t.jl, t.jdk()) * t.sc(t.S2 / t.D),
    "S2.k[odo-sds]/D": lambda t: t.outer(t.kl, t.o[:, None] * t.do - t.s[:, None] * t.ds) * t.sc(t.S2 / t.D),
}


# --- identities as data -----------------------------------------------------

@dataclass(frozen=True)
class FierzIdentity:
    """sum(lhs) = prefactor * sum(rhs), each side a tuple of (coefficient, term).

    ``degree`` is the total homogeneity degree in (psi, d psi), used to
    normalize the residual (every identity here is linear in d psi).  ``requires`` lists the quantities the identity
    divides by: ``"D"`` for sigma^2 - omega^2 and ``"so"`` for sigma omega.
    """

    name: str
    lhs: tuple
    rhs: tuple
    degree: int
    prefactor: str | None = None
    requires: tuple = ("D",)

    def residual(self, table: TermTable):
        left = sum(c * table[k] for c, k in self.lhs)
        right = sum(c * table[k] for c, k in self.rhs)
        if self.prefactor == "1/so":
            f = 1.0 / (table.s * table.o)
            right = f.reshape((-1,) + (1,) * (np.ndim(right) - 1)) * right
        return left - right

    def with_coefficient(self, index, factor=1.1, side="rhs") -> "FierzIdentity":
        """Copy with one coefficient multiplied by ``factor`` (mutation hook)."""
        terms = list(getattr(self, side))
        c, k = terms[index]
        terms[index] = (c * factor, k)
        return replace(self, **{side: tuple(terms)})


def _id(name, lhs, rhs, degree, **kw):
    return FierzIdentity(name, tuple(lhs), tuple(rhs), degree, **kw)


i = 1j
ANTIPRODUCT_IDENTITIES = (
    _id("antiproduct scalar", [(1, "XS")], [(-1, "jdk.o/D"), (-i, "mdn.s/D")], 2),
    _id("antiproduct pseudoscalar", [(1, "XP")], [(-1, "jdk.s/D"), (-i, "mdn.o/D")], 2),
)

BELINFANTE_IDENTITY = _id(
    "Belinfante Fierz identity", [(1, "X")],
    [(1, "k[ods-sdo]/D"), (-i, "eps.djjk/D"), (-i, "j.mdn/D")], 2)

CONTRACTED_BELINFANTE_IDENTITY = _id(
    "contracted Belinfante Fierz identity", [(1, "trX")],
    [(1, "tr.k[ods-sdo]/D"), (-i, "tr.eps.djjk/D"), (-i, "tr.j.mdn/D")], 2)

DERIVATION_IDENTITIES = (
    _id("j x scalar block", [(1, "jXS")],
        [(i / 3, "dj.s"), (-i / 3, "j.ds"), (1 / 3, "kdo"), (-1 / 3, "odk"), (1 / 3, "sX"),
         (-i / 3, "sd.XA"), (-i / 3, "k.XT5")], 4, requires=()),
    _id("j x pseudoscalar block", [(1, "jXP")],
        [(i / 3, "dj.sd"), (-i / 3, "j.dsd"), (1 / 3, "kds"), (-1 / 3, "sdk"), (1 / 3, "oX"),
         (-i / 3, "s.XA"), (-i / 3, "k.XT")], 4, requires=()),
    _id("k x d sigma", [(1, "kds")],
        [(1 / 3, "sdk"), (-i / 3, "d(j.sd)"), (1 / 3, "jXP"), (i / 3, "s.XA"), (-i / 3, "k.XT"),
         (-1 / 3, "oX")], 4, requires=()),
    _id("k x d omega", [(1, "kdo")],
        [(1 / 3, "odk"), (-i / 3, "d(j.s)"), (1 / 3, "jXS"), (i / 3, "sd.XA"), (-i / 3, "k.XT5"),
         (-1 / 3, "sX")], 4, requires=()),
    _id("vector block, sigma omega form", [(1, "X")],
        [(-i / 2, "dj.(ssd+os)"), (-1, "k[sds+odo]"), (1 / 2, "S2dk"), (1, "j{oXS+sXP}"),
         (i / 2, "(ss+osd).XA")], 2, prefactor="1/so", requires=("so",)),
    _id("s x axial block", [(1, "s.XA")],
        [(3 * i / 5, "sdk"), (-3 * i / 5, "kds"), (1 / 5, "j.dsd"), (-1 / 5, "dj.sd"),
         (3 * i / 5, "jXP"), (-1 / 5, "k.XT"), (3 * i / 5, "oX")], 4, requires=()),
    _id("sdual x axial block", [(1, "sd.XA")],
        [(3 * i / 5, "odk"), (-3 * i / 5, "kdo"), (1 / 5, "j.ds"), (-1 / 5, "dj.s"),
         (3 * i / 5, "jXS"), (-1 / 5, "k.XT5"), (3 * i / 5, "sX")], 4, requires=()),
    _id("combined axial block", [(i / 2, "(ss+osd).XA")],
        [(3 / 10, "k[sds+odo]"), (-3 / 10, "S2dk"), (-i / 10, "dj.(ssd+os)"),
         (i / 10, "j.(sdsd+ods)"), (3 / 10, "j.bracket"), (-i / 10, "k.{sXT+oXT5}"),
         (-3 / 5, "soX")], 6),
    _id("k x tensor block", [(1, "k.XT")],
        [(1 / 5, "dj.sd"), (-1 / 5, "j.dsd"), (3 * i / 5, "kds"), (-3 * i / 5, "sdk"),
         (3 * i / 5, "jXP"), (-1 / 5, "s.XA"), (3 * i / 5, "oX")], 4, requires=()),
    _id("k x dual tensor block", [(1, "k.XT5")],
        [(1 / 5, "dj.s"), (-1 / 5, "j.ds"), (3 * i / 5, "kdo"), (-3 * i / 5, "odk"),
         (3 * i / 5, "jXS"), (-1 / 5, "sd.XA"), (3 * i / 5, "sX")], 4, requires=()),
    _id("combined tensor block", [(-i / 10, "k.{sXT+oXT5}")],
        [(i / 50, "(ss+osd).XA"), (6 / 50, "soX"), (-3 / 50, "j.bracket"), (-3 / 50, "S2dk"),
         (3 / 50, "k[sds+odo]"), (i / 50, "j.(sdsd+ods)"), (-i / 50, "dj.(ssd+os)")], 6),
    _id("combined axial block, reduced", [(i / 2, "(ss+osd).XA")],
        [(-1 / 2, "soX"), (1 / 4, "j.bracket"), (-3 / 8, "S2dk"), (3 / 8, "k[sds+odo]"),
         (-i / 8, "dj.(ssd+os)"), (i / 8, "j.(sdsd+ods)")], 6),
    _id("scalar-pseudoscalar blocks", [(1, "oXS"), (1, "sXP")], [(-1, "bracket")], 4),
    _id("vector block, pure bilinear", [(1, "X")],
        [(-1 / 2, "j.bracket"), (1 / 12, "S2dk"), (-5 / 12, "k[sds+odo]"),
         (i / 12, "j.(sdsd+ods)"), (-5 * i / 12, "dj.(ssd+os)")], 2,
        prefactor="1/so", requires=("D", "so")),
    _id("d s from rank-2 replacement", [(1, "dsl")], [(1, "ds_pred")], 2),
    _id("d sdual from rank-2 replacement", [(1, "dsdl")], [(1, "dsd_pred")], 2),
    _id("j x d sdual corollary", [(i / 12, "j.(sdsd+ods)")],
        [(2 / 12, "so.k[ods-sdo]/D"), (2 * i / 12, "so.eps.jdjk/D"),
         (1 / 12, "S2.j.jdk/D"), (-1 / 12, "S2dk")], 6),
    _id("d j x s corollary", [(-5 * i / 12, "dj.(ssd+os)")],
        [(5 / 12, "S2.j.jdk/D"), (-5 * i / 6, "so.eps.djjk/D"), (-5 / 12, "S2.k[odo-sds]/D")], 6),
)
del i


def _precondition_mask(identity: FierzIdentity, table: TermTable, scale2):
    """Samples on which the identity is defined."""
    ok = np.ones(table.n, dtype=bool)
    if "D" in identity.requires:
        ok &= np.abs(table.D) > DEGENERACY_RTOL * scale2
    if "so" in identity.requires:
        ok &= np.abs(table.s * table.o) > DEGENERACY_RTOL * scale2
    return ok


def evaluate_identities(jet: SpinorJet, identities, skip_degenerate=False, bjet=None):
    """Normalized residuals of a list of :class:`FierzIdentity` over a batch of jets.

    With ``skip_degenerate`` samples outside an identity's domain are left out
    of that identity (``samples`` in the result counts the ones used);
    otherwise any such sample raises :class:`DegenerateInvariant`.
    """
    flat = SpinorJet(jet.psi.reshape(-1, 4), jet.dpsi.reshape(-1, 4, 4))
    bj = bjet if bjet is not None else bilinear_jet(flat)
    table = TermTable(bj)
    scale2 = (1.0 + np.abs(np.real(table.j[:, 0]))) ** 2
    out = []
    for ident in identities:
        ok = _precondition_mask(ident, table, scale2)
        if not skip_degenerate and not ok.all():
            raise DegenerateInvariant(
                f"{ident.name}: inverse factor vanishes at {int((~ok).sum())} sample(s)")
        with np.errstate(divide="ignore", invalid="ignore"):
            res = ident.residual(table)
        res = res.reshape(table.n, -1)[ok]
        out.append(residual_from(ident.name, res, flat.derivative_scale(ident.degree)[ok], samples=int(ok.sum())))
    return out


def antiproduct_residuals(jet: SpinorJet, skip_degenerate=False):
    """Residuals of the scalar and pseudoscalar anti-product rules."""
    a, b = evaluate_identities(jet, ANTIPRODUCT_IDENTITIES, skip_degenerate)
    return a, b


def belinfante_identity_residual(jet: SpinorJet, skip_degenerate=False):
    """Residual of the Belinfante Fierz identity (all 16 components)."""
    return evaluate_identities(jet, [BELINFANTE_IDENTITY], skip_degenerate)[0]


def contracted_belinfante_residual(jet: SpinorJet, skip_degenerate=False):
    return evaluate_identities(jet, [CONTRACTED_BELINFANTE_IDENTITY], skip_degenerate)[0]


def belinfante_residual_arrays(jet: SpinorJet):
    """Raw (uncontracted, contracted) residual arrays, for trace consistency checks."""
    flat = SpinorJet(jet.psi.reshape(-1, 4), jet.dpsi.reshape(-1, 4, 4))
    table = TermTable(bilinear_jet(flat))
    require_nondegenerate(bilinear_jet(flat).value, "Belinfante identity")
    return BELINFANTE_IDENTITY.residual(table), CONTRACTED_BELINFANTE_IDENTITY.residual(table)


def appendix_b_suite(jet: SpinorJet, skip_degenerate=False, identities=None):
    """One residual per identity used in deriving the Belinfante Fierz identity."""
    return evaluate_identities(jet, DERIVATION_IDENTITIES if identities is None else identities,
                               skip_degenerate)


def all_identities():
    """Every derivative identity, main ones first."""
    return (ANTIPRODUCT_IDENTITIES + (BELINFANTE_IDENTITY, CONTRACTED_BELINFANTE_IDENTITY)
            + DERIVATION_IDENTITIES)


def fierz_suite(rng, trials, tol=1e-9, chunk=2000) -> IdentityReport:
    """Run the fundamental and derivative identities over seeded random jets.

    Degenerate samples (probability zero for continuous inputs) are skipped
    per identity.
    """
    from .bilinear import random_jets

    rep = IdentityReport(tol, title="Fierz identities")
    acc = {}
    for start in range(0, trials, chunk):
        n = min(chunk, trials - start)
        jet = random_jets(rng, n)
        bj = bilinear_jet(jet)
        entries = list(check_fundamental(bj.value, tol).entries)
        entries += evaluate_identities(jet, all_identities(), skip_degenerate=True, bjet=bj)
        for e in entries:
            acc[e.name] = _merge(acc.get(e.name), e)
    rep.extend(acc.values())
    return rep


def _merge(a: IdentityResidual | None, b: IdentityResidual) -> IdentityResidual:
    if a is None:
        return b
    worst = a if a.max_abs >= b.max_abs else b
    return replace(worst, samples=a.samples + b.samples)
