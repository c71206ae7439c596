# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise spinor kernels and the O(N^6) direct-sum oracle.

Same signatures and results as :mod:`maxdirac._pykernels`.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


def fw_apply(const cplx[:, :, :, ::1] f, const double[:, :, ::1] ap, const double[:, :, ::1] c1,
             const double[:, :, ::1] c2, const double[:, :, ::1] c3, double sign):
    cdef Py_ssize_t n0 = f.shape[1], n1 = f.shape[2], n2 = f.shape[3]
    out_arr = np.empty((4, n0, n1, n2), dtype=np.complex128)
    cdef cplx[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef cplx u0, u1, l0, l1, bm, bp
    cdef double a, x3
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                u0 = f[0, i, j, k]
                u1 = f[1, i, j, k]
                l0 = f[2, i, j, k]
                l1 = f[3, i, j, k]
                a = ap[i, j, k]
                x3 = c3[i, j, k]
                bm = c1[i, j, k] - 1j * c2[i, j, k]
                bp = c1[i, j, k] + 1j * c2[i, j, k]
                out[0, i, j, k] = a * u0 + sign * (x3 * l0 + bm * l1)
                out[1, i, j, k] = a * u1 + sign * (bp * l0 - x3 * l1)
                out[2, i, j, k] = a * l0 - sign * (x3 * u0 + bm * u1)
                out[3, i, j, k] = a * l1 - sign * (bp * u0 - x3 * u1)
    return out_arr


cdef inline double re_conj_mul(cplx a, cplx b) nogil:
    # Re(conj(a) * b)
    return a.real * b.real + a.imag * b.imag


cdef inline double im_conj_mul(cplx a, cplx b) nogil:
    # Im(conj(a) * b)
    return a.real * b.imag - a.imag * b.real


def cross_bilinears(const cplx[:, :, :, ::1] psi, const cplx[:, :, :, ::1] xi):
    cdef Py_ssize_t n0 = psi.shape[1], n1 = psi.shape[2], n2 = psi.shape[3]
    out_arr = np.empty((4, n0, n1, n2), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef cplx u0, u1, l0, l1, x0, x1, y0, y1
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                u0 = psi[0, i, j, k]
                u1 = psi[1, i, j, k]
                l0 = psi[2, i, j, k]
                l1 = psi[3, i, j, k]
                x0 = xi[0, i, j, k]
                x1 = xi[1, i, j, k]
                y0 = xi[2, i, j, k]
                y1 = xi[3, i, j, k]
                out[0, i, j, k] = (re_conj_mul(u0, x0) + re_conj_mul(u1, x1)
                                   + re_conj_mul(l0, y0) + re_conj_mul(l1, y1))
                out[1, i, j, k] = (re_conj_mul(u0, y1) + re_conj_mul(u1, y0)
                                   + re_conj_mul(l0, x1) + re_conj_mul(l1, x0))
                # Re(-i z) = Im z
                out[2, i, j, k] = (im_conj_mul(u0, y1) + im_conj_mul(l0, x1)
                                   - im_conj_mul(u1, y0) - im_conj_mul(l1, x0))
                out[3, i, j, k] = (re_conj_mul(u0, y0) - re_conj_mul(u1, y1)
                                   + re_conj_mul(l0, x0) - re_conj_mul(l1, x1))
    return out_arr


def apply_potential(const cplx[:, :, :, ::1] psi, const double[:, :, ::1] scalar, vec):
    cdef Py_ssize_t n0 = psi.shape[1], n1 = psi.shape[2], n2 = psi.shape[3]
    out_arr = np.empty((4, n0, n1, n2), dtype=np.complex128)
    cdef cplx[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double s, a3
    cdef cplx am, apl, u0, u1, l0, l1
    cdef const double[:, :, :, ::1] v
    if vec is None:
        for i in range(n0):
            for j in range(n1):
                for k in range(n2):
                    s = scalar[i, j, k]
                    out[0, i, j, k] = s * psi[0, i, j, k]
                    out[1, i, j, k] = s * psi[1, i, j, k]
                    out[2, i, j, k] = s * psi[2, i, j, k]
                    out[3, i, j, k] = s * psi[3, i, j, k]
        return out_arr
    v = vec
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                s = scalar[i, j, k]
                a3 = v[2, i, j, k]
                am = v[0, i, j, k] - 1j * v[1, i, j, k]
                apl = v[0, i, j, k] + 1j * v[1, i, j, k]
                u0 = psi[0, i, j, k]
                u1 = psi[1, i, j, k]
                l0 = psi[2, i, j, k]
                l1 = psi[3, i, j, k]
                out[0, i, j, k] = s * u0 - (a3 * l0 + am * l1)
                out[1, i, j, k] = s * u1 - (apl * l0 - a3 * l1)
                out[2, i, j, k] = s * l0 - (a3 * u0 + am * u1)
                out[3, i, j, k] = s * l1 - (apl * u0 - a3 * u1)
    return out_arr


def pair_sum_direct(const double[:, :, ::1] f, const double[:, :, ::1] g, const double[:, :, ::1] kernel):
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, j, k, a, b, c, da, db
    cdef double total = 0.0, inner, fy
    for i in range(n):
        for j in range(n):
            for k in range(n):
                fy = f[i, j, k]
                if fy == 0.0:
                    continue
                inner = 0.0
                for a in range(n):
                    da = (i - a + n) % n
                    for b in range(n):
                        db = (j - b + n) % n
                        for c in range(n):
                            inner += kernel[da, db, (k - c + n) % n] * g[a, b, c]
                total += fy * inner
    return total


def inverse_dft_direct(const cplx[:, :, ::1] k_values, const double[::1] momenta_1d, const double[::1] positions_1d):
    cdef Py_ssize_t n = momenta_1d.shape[0]
    cdef Py_ssize_t x, y, z, a, b, c
    e_arr = np.exp(1j * np.outer(np.asarray(positions_1d), np.asarray(momenta_1d)))
    cdef cplx[:, ::1] e = e_arr
    out_arr = np.zeros((n, n, n), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    cdef cplx acc, exy
    for x in range(n):
        for y in range(n):
            for z in range(n):
                acc = 0.0
                for a in range(n):
                    for b in range(n):
                        exy = e[x, a] * e[y, b]
                        for c in range(n):
                            acc = acc + k_values[a, b, c] * exy * e[z, c]
                out[x, y, z] = acc
    return out_arr
