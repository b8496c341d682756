# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for batched spinor sandwiches and epsilon contractions."""
import numpy as np
cimport cython


def sandwich(const double complex[:, ::1] left,
             const double complex[:, :, ::1] mats,
             const double complex[:, ::1] right):
    cdef Py_ssize_t n_batch = left.shape[0], n_mats = mats.shape[0]
    cdef Py_ssize_t n, g, a, b, e
    if right.shape[0] != n_batch or left.shape[1] != 4 or right.shape[1] != 4:
        raise ValueError("left and right must both have shape (N, 4)")
    if mats.shape[1] != 4 or mats.shape[2] != 4:
        raise ValueError("mats must have shape (G, 4, 4)")
    # Clifford basis matrices have four nonzero entries; loop over those only
    # pos holds the flat index 4a + b of each nonzero entry
    cdef Py_ssize_t[:, ::1] pos = np.zeros((n_mats, 16), dtype=np.intp)
    cdef double[:, ::1] vre = np.zeros((n_mats, 16))
    cdef double[:, ::1] vim = np.zeros((n_mats, 16))
    cdef Py_ssize_t[::1] cnt = np.zeros(n_mats, dtype=np.intp)
    for g in range(n_mats):
        for a in range(4):
            for b in range(4):
                if mats[g, a, b] != 0:
                    e = cnt[g]
                    pos[g, e] = 4 * a + b
                    vre[g, e] = mats[g, a, b].real
                    vim[g, e] = mats[g, a, b].imag
                    cnt[g] = e + 1
    out = np.empty((n_batch, n_mats), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef double pr[16]
    cdef double pi[16]
    cdef double lr, li, rr, ri, vr, vi, sr, si
    with nogil:
        for n in range(n_batch):
            # p[a, b] = conj(left[a]) right[b], shared by every matrix
            for a in range(4):
                lr = left[n, a].real
                li = -left[n, a].imag
                for b in range(4):
                    rr = right[n, b].real
                    ri = right[n, b].imag
                    pr[4 * a + b] = lr * rr - li * ri
                    pi[4 * a + b] = lr * ri + li * rr
            for g in range(n_mats):
                sr = 0
                si = 0
                for e in range(cnt[g]):
                    vr = vre[g, e]
                    vi = vim[g, e]
                    b = pos[g, e]
                    sr = sr + vr * pr[b] - vi * pi[b]
                    si = si + vr * pi[b] + vi * pr[b]
                o[n, g] = sr + 1j * si
    return out


def eps_contract(const double[:, :, :, ::1] eps,
                 const double complex[:, :, ::1] a,
                 const double complex[:, ::1] b,
                 const double complex[:, ::1] c):
    cdef Py_ssize_t n_batch = a.shape[0]
    cdef Py_ssize_t n, mu, nu, rho, sg, kp
    cdef double complex acc, bc
    cdef double e
    out = np.zeros((n_batch, 4, 4), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    if b.shape[0] != n_batch or c.shape[0] != n_batch:
        raise ValueError("batch sizes differ")
    with nogil:
        for n in range(n_batch):
            for nu in range(4):
                for rho in range(4):
                    acc = 0
                    for sg in range(4):
                        for kp in range(4):
                            e = eps[nu, rho, sg, kp]
                            if e != 0:
                                acc = acc + e * b[n, sg] * c[n, kp]
                    if acc != 0:
                        for mu in range(4):
                            o[n, mu, nu] = o[n, mu, nu] + a[n, mu, rho] * acc
    return out
