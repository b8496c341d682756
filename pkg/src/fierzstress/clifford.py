"""Dirac-Clifford algebra in the standard (Dirac) representation.

Metric signature is (+,-,-,-).  The totally antisymmetric symbol is fixed by
epsilon^{0123} = +1, so that

    gamma_5 = -(i/4!) eps_{mu nu rho sigma} g^mu g^nu g^rho g^sigma
            = i g^0 g^1 g^2 g^3 .

All arrays are complex128 and read-only.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .report import IdentityReport, residual_from

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
ETA.flags.writeable = False


def _perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _build_epsilon():
    up = np.zeros((4, 4, 4, 4))
    for p in itertools.permutations(range(4)):
        up[p] = _perm_sign(p)
    low = np.einsum("abcd,ai,bj,ck,dl->ijkl", up, ETA, ETA, ETA, ETA)
    return up, low


EPS_UPPER, EPS_LOWER = _build_epsilon()
EPS_UPPER.flags.writeable = False
EPS_LOWER.flags.writeable = False

# delta^{mu nu rho sigma} = i (eta^{mu rho} eta^{nu sigma} - eta^{mu sigma} eta^{nu rho});
# with a diagonal +-1 metric the all-lower version has the same entries.
DELTA4 = 1j * (np.einsum("mr,ns->mnrs", ETA, ETA) - np.einsum("ms,nr->mnrs", ETA, ETA))
DELTA4.flags.writeable = False


def levi_civita(indices, variance="upper") -> int:
    """Component of the Levi-Civita symbol.

    >>> levi_civita((0, 1, 2, 3))
    1
    >>> levi_civita((0, 1, 2, 3), "lower")
    -1
    """
    idx = tuple(int(i) for i in indices)
    if len(idx) != 4 or any(not 0 <= i <= 3 for i in idx):
        raise ValueError(f"need four indices in 0..3, got {indices!r}")
    if variance == "upper":
        return int(EPS_UPPER[idx])
    if variance == "lower":
        return int(EPS_LOWER[idx])
    raise ValueError(f"variance must be 'upper' or 'lower', not {variance!r}")


def delta4(mu, nu, rho, sigma) -> complex:
    """i (eta^{mu rho} eta^{nu sigma} - eta^{mu sigma} eta^{nu rho})."""
    return complex(DELTA4[mu, nu, rho, sigma])


@dataclass(frozen=True, eq=False)
class GammaBasis:
    """Gamma matrices and the 16-element Clifford basis.

    ``gamma[mu]`` carries an upper index, ``sigma[mu, nu]`` is
    sigma^{mu nu} = (i/2)[gamma^mu, gamma^nu].  ``basis`` follows the order
    I, gamma^mu, sigma^{mu nu} (mu < nu), gamma_5 gamma^mu, gamma_5 and
    ``labels`` names each entry.  ``conjugation`` is the charge-conjugation
    matrix C = i gamma^2 gamma^0.
    """

    gamma: np.ndarray
    gamma5: np.ndarray
    sigma: np.ndarray
    basis: np.ndarray
    labels: tuple
    eta: np.ndarray
    conjugation: np.ndarray

    @property
    def identity(self):
        return np.eye(4, dtype=complex)

    @property
    def gamma_lower(self):
        return np.einsum("mn,nab->mab", self.eta, self.gamma)

    @property
    def sigma_lower(self):
        return np.einsum("ma,nb,abxy->mnxy", self.eta, self.eta, self.sigma)

    @property
    def g5gamma(self):
        """gamma_5 gamma^mu, upper index."""
        return np.einsum("ab,mbc->mac", self.gamma5, self.gamma)

    @property
    def g5sigma(self):
        """gamma_5 sigma^{mu nu}, upper indices."""
        return np.einsum("ab,mnbc->mnac", self.gamma5, self.sigma)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=complex)
    a.flags.writeable = False
    return a


def make_basis(gamma) -> GammaBasis:
    """Assemble a :class:`GammaBasis` from four gamma matrices.

    Everything else (gamma_5, sigma, C, the 16-element basis) is derived, so
    a deliberately broken ``gamma`` gives a consistently broken basis.
    """
    g = np.asarray(gamma, dtype=complex)
    g5 = 1j * g[0] @ g[1] @ g[2] @ g[3]
    sig = 0.5j * (np.einsum("mab,nbc->mnac", g, g) - np.einsum("nab,mbc->mnac", g, g))
    elems = [np.eye(4, dtype=complex)]
    labels = ["I"]
    for mu in range(4):
        elems.append(g[mu])
        labels.append(f"gamma^{mu}")
    for mu, nu in itertools.combinations(range(4), 2):
        elems.append(sig[mu, nu])
        labels.append(f"sigma^{mu}{nu}")
    for mu in range(4):
        elems.append(g5 @ g[mu])
        labels.append(f"gamma5 gamma^{mu}")
    elems.append(g5)
    labels.append("gamma5")
    return GammaBasis(
        gamma=_frozen(g),
        gamma5=_frozen(g5),
        sigma=_frozen(sig),
        basis=_frozen(np.array(elems)),
        labels=tuple(labels),
        eta=ETA,
        conjugation=_frozen(1j * g[2] @ g[0]),
    )


@functools.lru_cache(maxsize=None)
def _standard_basis() -> GammaBasis:
    i2 = np.eye(2)
    z = np.zeros((2, 2))
    pauli = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    g = [np.block([[i2, z], [z, -i2]])]
    g += [np.block([[z, s], [-s, z]]) for s in pauli]
    return make_basis(g)


_override = []


def build_gamma_basis() -> GammaBasis:
    """The Dirac-representation basis with gamma^0 = diag(1, 1, -1, -1).

    Returns a cached, immutable object.  Inside :func:`use_basis` the
    overriding basis is returned instead.
    """
    if _override:
        return _override[-1]
    return _standard_basis()


class use_basis:
    """Context manager that makes the whole library use another basis.

    Meant for mutation tests: computations inside the block see ``basis``
    wherever they would have used :func:`build_gamma_basis`.
    """

    def __init__(self, basis: GammaBasis):
        self.basis = basis

    def __enter__(self):
        _override.append(self.basis)
        return self.basis

    def __exit__(self, *exc):
        _override.pop()
        return False


def corrupted_basis(entry=(1, 0, 3), delta=0.5) -> GammaBasis:
    """A basis with one gamma matrix entry perturbed (test hook)."""
    g = np.array(_standard_basis().gamma)
    g[entry] += delta
    return make_basis(g)


def trace_gram(basis: GammaBasis | None = None) -> np.ndarray:
    """Gram matrix Tr(Gamma_R Gamma_S) over the 16 basis elements."""
    b = basis or build_gamma_basis()
    return np.einsum("rab,sba->rs", b.basis, b.basis)


def _appendix_a_residuals(b: GammaBasis):
    """Yield (name, LHS - RHS) for every Dirac identity in the catalogue."""
    g, g5, sig, eta = b.gamma, b.gamma5, b.sigma, b.eta
    I = np.eye(4, dtype=complex)
    gl = b.gamma_lower
    sigl = b.sigma_lower
    sig_ud = np.einsum("nb,mbxy->mnxy", eta, sig)  # sigma^mu_nu
    sig_du = np.einsum("ma,anxy->mnxy", eta, sig)  # sigma_nu^rho
    g5g_low = np.einsum("ab,mbc->mac", g5, gl)  # gamma_5 gamma_sigma
    eU, eL = EPS_UPPER, EPS_LOWER
    mm = lambda *ms: functools.reduce(np.matmul, ms)
    gg = np.einsum("mab,nbc->mnac", g, g)
    ggg = np.einsum("mnab,lbc->mnlac", gg, g)
    gggg = np.einsum("mnab,slbc->mnslac", gg, gg)
    eI = lambda t: np.einsum("...,ab->...ab", t, I)

    yield "anticommutator {g^mu,g^nu} = 2 eta^{mu nu}", (
        gg + np.swapaxes(gg, 0, 1) - 2 * eI(eta))
    yield "commutator [g^mu,g^nu] = -2i sigma^{mu nu}", (
        gg - np.swapaxes(gg, 0, 1) + 2j * sig)
    yield "gamma5 = -(i/4!) eps_{mnrs} g^m g^n g^r g^s", (
        -1j / 24 * np.einsum("mnrs,mnrsab->ab", eL, gggg) - g5)
    yield "gamma5 = i g^0 g^1 g^2 g^3", 1j * mm(g[0], g[1], g[2], g[3]) - g5
    yield "gamma5 = -i g_0 g_1 g_2 g_3", -1j * mm(gl[0], gl[1], gl[2], gl[3]) - g5
    yield "gamma5^2 = I", g5 @ g5 - I
    yield "{gamma5, g^mu} = 0", np.einsum("ab,mbc->mac", g5, g) + np.einsum("mab,bc->mac", g, g5)
    yield "[gamma5, sigma^{mu nu}] = 0", (
        np.einsum("ab,mnbc->mnac", g5, sig) - np.einsum("mnab,bc->mnac", sig, g5))
    yield "g^mu g^nu = eta^{mu nu} - i sigma^{mu nu}", gg - eI(eta) + 1j * sig
    yield "g^mu g_mu = 4", np.einsum("mab,mbc->ac", g, gl) - 4 * I
    yield "g^mu gamma5 g_mu = -4 gamma5", np.einsum("mab,bc,mcd->ad", g, g5, gl) + 4 * g5
    rhs = (np.einsum("mn,lab->mnlab", eta, g) + np.einsum("nl,mab->mnlab", eta, g)
           - np.einsum("ml,nab->mnlab", eta, g) - 1j * np.einsum("mnls,sab->mnlab", eU, g5g_low))
    yield "g^mu g^nu g^lambda triple-product expansion", ggg - rhs
    yield "g^nu g^mu g_nu = -2 g^mu", np.einsum("nab,mbc,ncd->mad", g, g, gl) + 2 * g
    yield "g^nu gamma5 g^mu g_nu = 2 gamma5 g^mu", (
        np.einsum("nab,bc,mcd,nde->mae", g, g5, g, gl) - 2 * np.einsum("ab,mbc->mac", g5, g))
    e4 = lambda a, c: np.einsum(a, *c)
    rhs = (eI(np.einsum("mn,se->mnse", eta, eta) + np.einsum("ns,me->mnse", eta, eta)
              - np.einsum("ms,ne->mnse", eta, eta))
           - 1j * e4("mn,seab->mnseab", (eta, sig)) - 1j * e4("ns,meab->mnseab", (eta, sig))
           + 1j * e4("ms,neab->mnseab", (eta, sig)) + 1j * e4("me,snab->mnseab", (eta, sig))
           + 1j * e4("ne,msab->mnseab", (eta, sig)) + 1j * e4("se,nmab->mnseab", (eta, sig))
           - 1j * np.einsum("mnse,ab->mnseab", eU, g5))
    yield "g^mu g^nu g^sigma g^eps quadruple-product expansion", gggg - rhs
    g_sig = np.einsum("eab,mnbc->emnac", g, sig)
    rhs = (1j * np.einsum("em,nab->emnab", eta, g) - 1j * np.einsum("en,mab->emnab", eta, g)
           + np.einsum("mnes,sab->emnab", eU, g5g_low))
    yield "g^eps sigma^{mu nu} expansion", g_sig - rhs
    sig_g = np.einsum("mnab,ebc->mneac", sig, g)
    rhs = (1j * np.einsum("ne,mab->mneab", eta, g) - 1j * np.einsum("me,nab->mneab", eta, g)
           + np.einsum("mnes,sab->mneab", eU, g5g_low))
    yield "sigma^{mu nu} g^eps expansion", sig_g - rhs
    lhs = np.einsum("mab,sebc,ncd->msenad", g, sig, g)
    rhs = (1j * eI(np.einsum("en,ms->msen", eta, eta) - np.einsum("sn,me->msen", eta, eta))
           + np.einsum("en,msab->msenab", eta, sig) - np.einsum("sn,meab->msenab", eta, sig)
           - np.einsum("senm,ab->msenab", eU, g5)
           + 1j * np.einsum("senl,ab,mlbc->msenac", eU, g5, sig_ud))
    yield "g^mu sigma^{sigma eps} g^nu expansion", lhs - rhs
    yield "g^sigma sigma^{mu nu} g_sigma = 0", np.einsum("sab,mnbc,scd->mnad", g, sig, gl)
    yield "sigma^{mu nu} g_mu = -3i g^nu", np.einsum("mnab,mbc->nac", sig, gl) + 3j * g
    yield "sigma^{mu nu} g^rho g_mu = 3i eta^{nu rho} + sigma^{nu rho}", (
        np.einsum("mnab,rbc,mcd->nrad", sig, g, gl) - 3j * eI(eta) - sig)
    lhs = np.einsum("mnab,rtbc,mcd->nrtad", sig, sig, gl)
    rhs = (np.einsum("nr,tab->nrtab", eta, g) - np.einsum("nt,rab->nrtab", eta, g)
           + 1j * np.einsum("nrts,sab->nrtab", eU, g5g_low))
    yield "sigma^{mu nu} sigma^{rho tau} g_mu expansion", lhs - rhs
    yield "g^mu sigma_{nu mu} = -3i g_nu", np.einsum("mab,nmbc->nac", g, sigl) + 3j * gl
    yield "g^mu g^rho sigma_{nu mu} = 3i delta_nu^rho - sigma_nu^rho", (
        np.einsum("mab,rbc,nmcd->nrad", g, g, sigl) - 3j * eI(np.eye(4)) + sig_du)
    lhs = np.einsum("mab,rtbc,nmcd->nrtad", g, sig, sigl)
    rhs = (np.einsum("nt,rab->nrtab", np.eye(4), g) - np.einsum("nr,tab->nrtab", np.eye(4), g)
           + 1j * np.einsum("nk,krts,sab->nrtab", eta, eU, g5g_low))
    yield "g^mu sigma^{rho tau} sigma_{nu mu} expansion", lhs - rhs
    eps_mixed = np.einsum("la,amnt->lmnt", eta, eU)  # eps_lambda^{mu nu tau}
    lhs = -np.einsum("lrse,lmnt->rsemnt", eU, eps_mixed)
    E = lambda spec: np.einsum(spec, eta, eta, eta)
    rhs = (E("rm,sn,et->rsemnt") - E("rm,en,st->rsemnt") + E("rn,st,em->rsemnt")
           - E("rn,et,sm->rsemnt") + E("rt,sm,en->rsemnt") - E("rt,em,sn->rsemnt"))
    yield "double epsilon contraction", lhs - rhs
    lhs = np.einsum("mab,snbc->msnac", g, sig) + np.einsum("snab,mbc->msnac", sig, g)
    rhs = 2 * np.einsum("snmr,rab->msnab", eU, g5g_low)
    yield "{g^mu, sigma^{sigma nu}} = 2 eps^{sigma nu mu rho} gamma5 g_rho", lhs - rhs


def verify_appendix_a(tol: float = 1e-13, basis: GammaBasis | None = None) -> IdentityReport:
    """Evaluate the catalogue of Dirac identities as matrix equalities.

    Each entry of the report is the max-abs entry of LHS - RHS over all
    index values.  Also checks trace orthogonality of the 16-element basis,
    invertibility of its Gram matrix and the antisymmetry of sigma^{mu nu}.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    b = basis or build_gamma_basis()
    report = IdentityReport(tol=tol, title="Dirac identities")
    for name, res in _appendix_a_residuals(b):
        report.add(residual_from(name, res))
    report.add(residual_from("sigma^{mu nu} = -sigma^{nu mu}", b.sigma + np.swapaxes(b.sigma, 0, 1)))
    gram = trace_gram(b)
    off = gram - np.diag(np.diag(gram))
    report.add(residual_from("trace orthogonality Tr(Gamma_R Gamma_S), R != S", off))
    smallest = float(np.linalg.svd(gram, compute_uv=False).min())
    # 4 is the modulus of every diagonal entry; a singular Gram matrix shows up as 4.
    report.add(residual_from("basis independence (4 - min singular value of Gram/4)",
                             max(0.0, 4.0 - smallest)))
    C = b.conjugation
    report.add(residual_from("C gamma^mu^T C^-1 = -gamma^mu",
                             np.einsum("ab,mcb,cd->mad", C, b.gamma, np.linalg.inv(C)) + b.gamma))
    return report
