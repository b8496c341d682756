"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def sandwich(left, mats, right):
    """out[n, g] = conj(left[n]) @ mats[g] @ right[n]."""
    return np.einsum("na,gab,nb->ng", left.conj(), mats, right, optimize=True)


def eps_contract(eps, a, b, c):
    """out[n, mu, nu] = eps[nu, rho, s, k] a[n, mu, rho] b[n, s] c[n, k]."""
    return np.einsum("vrsk,nmr,ns,nk->nmv", eps, a, b, c, optimize=True)
