"""Pure numpy implementations of the pointwise spinor kernels and the direct-sum oracle.

Signatures match the compiled module ``maxdirac._ckernels``; see
:mod:`maxdirac.kernels` for selection.
"""

import numpy as np


def fw_apply(f, ap, c1, c2, c3, sign):
    # U = ap*I + sign * [[0, B], [-B, 0]] with B = c1 s1 + c2 s2 + c3 s3.
    u0, u1, l0, l1 = f
    bl0 = c3 * l0 + (c1 - 1j * c2) * l1
    bl1 = (c1 + 1j * c2) * l0 - c3 * l1
    bu0 = c3 * u0 + (c1 - 1j * c2) * u1
    bu1 = (c1 + 1j * c2) * u0 - c3 * u1
    out = np.empty_like(f)
    out[0] = ap * u0 + sign * bl0
    out[1] = ap * u1 + sign * bl1
    out[2] = ap * l0 - sign * bu0
    out[3] = ap * l1 - sign * bu1
    return out


def cross_bilinears(psi, xi):
    """Rows: Re(psi, xi), Re(psi, alpha_k xi) for k = 1, 2, 3."""
    u0, u1, l0, l1 = psi
    x0, x1, y0, y1 = xi
    out = np.empty((4,) + psi.shape[1:])
    out[0] = (np.conj(psi) * xi).real.sum(axis=0)
    # (psi_u, sigma xi_l) + (psi_l, sigma xi_u)
    out[1] = (np.conj(u0) * y1 + np.conj(u1) * y0 + np.conj(l0) * x1 + np.conj(l1) * x0).real
    out[2] = (-1j * (np.conj(u0) * y1 + np.conj(l0) * x1) + 1j * (np.conj(u1) * y0 + np.conj(l1) * x0)).real
    out[3] = (np.conj(u0) * y0 - np.conj(u1) * y1 + np.conj(l0) * x0 - np.conj(l1) * x1).real
    return out


def apply_potential(psi, scalar, vec):
    """``scalar * psi - sum_k vec_k alpha_k psi``; ``vec`` may be None."""
    out = scalar * psi
    if vec is None:
        return out
    a1, a2, a3 = vec
    u0, u1, l0, l1 = psi
    out[0] -= a3 * l0 + (a1 - 1j * a2) * l1
    out[1] -= (a1 + 1j * a2) * l0 - a3 * l1
    out[2] -= a3 * u0 + (a1 - 1j * a2) * u1
    out[3] -= (a1 + 1j * a2) * u0 - a3 * u1
    return out


def pair_sum_direct(f, g, kernel):
    """``sum_y sum_z f(y) K(y - z) g(z)`` with periodic index differences."""
    n = f.shape[0]
    idx = np.arange(n)
    total = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if f[i, j, k] == 0.0:
                    continue
                shifted = kernel[np.ix_((i - idx) % n, (j - idx) % n, (k - idx) % n)]
                total += f[i, j, k] * np.sum(shifted * g)
    return float(total)


def inverse_dft_direct(k_values, momenta_1d, positions_1d):
    """``sum_p k(p) exp(i p.y)`` by explicit separable sums (no FFT)."""
    e = np.exp(1j * np.outer(positions_1d, momenta_1d))
    out = np.einsum("xa,abc->xbc", e, k_values)
    out = np.einsum("yb,xbc->xyc", e, out)
    out = np.einsum("zc,xyc->xyz", e, out)
    return out
