"""Kernel backend selection.

The compiled Cython extension is used when it was built; otherwise, or when
``FIERZSTRESS_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy implementation is used.  Both expose the same functions and agree
to rounding.
"""
import os

import numpy as np

from . import _kernels_py

_force_pure = os.environ.get("FIERZSTRESS_PURE_PYTHON", "") not in ("", "0")

_compiled = None
if not _force_pure:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "numpy"


def available_backends():
    return ["cython", "numpy"] if _compiled is not None else ["numpy"]


def get_backend(name=None):
    """Module implementing the kernels: ``"cython"``, ``"numpy"`` or the default."""
    if name is None:
        return _impl
    if name == "numpy":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("the compiled kernel extension is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def sandwich(left, mats, right):
    """Batched spinor sandwich conj(left) . M . right for each matrix M.

    ``left`` and ``right`` have shape (..., 4), ``mats`` shape (G, 4, 4);
    the result has shape (..., G).
    """
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    shape = np.broadcast_shapes(left.shape, right.shape)[:-1]
    l2 = np.ascontiguousarray(np.broadcast_to(left, shape + (4,)).reshape(-1, 4))
    r2 = np.ascontiguousarray(np.broadcast_to(right, shape + (4,)).reshape(-1, 4))
    m = np.ascontiguousarray(mats, dtype=complex)
    out = np.asarray(_impl.sandwich(l2, m, r2))
    return out.reshape(shape + (m.shape[0],))


def eps_contract(eps, a, b, c):
    """out[..., mu, nu] = eps[nu, rho, s, k] a[..., mu, rho] b[..., s] c[..., k]."""
    a = np.asarray(a, dtype=complex)
    shape = a.shape[:-2]
    a2 = np.ascontiguousarray(a.reshape(-1, 4, 4))
    b2 = np.ascontiguousarray(np.broadcast_to(np.asarray(b, dtype=complex), shape + (4,)).reshape(-1, 4))
    c2 = np.ascontiguousarray(np.broadcast_to(np.asarray(c, dtype=complex), shape + (4,)).reshape(-1, 4))
    e = np.ascontiguousarray(eps, dtype=float)
    return np.asarray(_impl.eps_contract(e, a2, b2, c2)).reshape(shape + (4, 4))
