"""Dirac matrices, the free Dirac symbol and its Foldy-Wouthuysen diagonalization.

U(p) = a_+(p) I + a_-(p) beta (alpha.p)/|p|,  a_pm(p) = sqrt((1 pm 1/lambda(p))/2),
so that U(p) (alpha.p + beta) U(p)^-1 = lambda(p) beta.  Acting on grids the
4x4 matrices are never formed; ``beta alpha.p/|p|`` is applied blockwise as
``[[0, s.p], [-s.p, 0]]/|p|`` with ``s`` the Pauli matrices.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import SpectralGrid, SpinorField, mom_inner

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class DiracMatrices:
    sigma: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray


@functools.lru_cache(maxsize=1)
def dirac_matrices() -> DiracMatrices:
    """Pauli-Dirac representation."""
    zero = np.zeros((2, 2), dtype=complex)
    eye = np.eye(2, dtype=complex)
    alpha = np.array([np.block([[zero, s], [s, zero]]) for s in SIGMA])
    beta = np.block([[eye, zero], [zero, -eye]])
    return DiracMatrices(SIGMA.copy(), alpha, beta)


def a_plus(lam):
    return np.sqrt(0.5 * (1.0 + 1.0 / lam))


def a_minus(lam):
    # (lam - 1)/(2 lam) loses digits for small |p|; use |p|^2/(lam + 1) = lam - 1.
    lam = np.asarray(lam, dtype=float)
    return np.sqrt(0.5 * ((lam * lam - 1.0) / (lam + 1.0)) / lam)


@dataclass(frozen=True)
class FwPoint:
    lam: float
    a_plus: float
    a_minus: float
    U: np.ndarray
    U_inv: np.ndarray


def free_symbol(p) -> np.ndarray:
    """The 4x4 matrix alpha.p + beta."""
    m = dirac_matrices()
    return np.tensordot(np.asarray(p, dtype=float), m.alpha, axes=1) + m.beta


def fw_symbol_at(p) -> FwPoint:
    p = np.asarray(p, dtype=float)
    pn = float(np.sqrt(p @ p))
    lam = float(np.sqrt(pn * pn + 1.0))
    ap = float(a_plus(lam))
    am = float(np.sqrt(0.5 * pn * pn / (lam + 1.0) / lam))
    m = dirac_matrices()
    eye = np.eye(4, dtype=complex)
    if pn == 0.0:
        return FwPoint(lam, ap, 0.0, eye.copy(), eye.copy())
    odd = m.beta @ np.tensordot(p / pn, m.alpha, axes=1)
    return FwPoint(lam, ap, am, ap * eye + am * odd, ap * eye - am * odd)


class FwSymbol:
    """Per-mode FW coefficients on a grid.

    Stores ``lam``, ``a_plus`` and ``c_k = a_minus * p_k/|p|`` (zero at p = 0).
    ``matrices()`` builds the dense 4x4 table, for validation only.
    """

    def __init__(self, grid: SpectralGrid):
        self.grid = grid
        self.lam = grid.lam
        self.a_plus = a_plus(self.lam)
        self.a_minus = a_minus(self.lam)
        pn = grid.pnorm
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(pn > 0, self.a_minus / np.where(pn > 0, pn, 1.0), 0.0)
        self.c = grid.momenta * scale

    def forward(self, f: np.ndarray) -> np.ndarray:
        """U(p) f(p) on momentum samples of shape (4, N, N, N)."""
        return kernels.fw_apply(f, self.a_plus, self.c[0], self.c[1], self.c[2], 1.0)

    def inverse(self, f: np.ndarray) -> np.ndarray:
        return kernels.fw_apply(f, self.a_plus, self.c[0], self.c[1], self.c[2], -1.0)

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        m = dirac_matrices()
        eye = np.eye(4, dtype=complex)
        odd = np.einsum("ab,kbc,k...->...ac", m.beta, m.alpha, self.c)
        ap = self.a_plus[..., None, None]
        return ap * eye + odd, ap * eye - odd


@functools.lru_cache(maxsize=8)
def fw_symbol(grid: SpectralGrid) -> FwSymbol:
    return FwSymbol(grid)


def apply_free_dirac(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """(alpha.p + beta) f on momentum samples."""
    p1, p2, p3 = grid.momenta
    u0, u1, l0, l1 = f
    out = np.empty_like(f)
    # alpha.p = [[0, s.p], [s.p, 0]]
    out[0] = u0 + p3 * l0 + (p1 - 1j * p2) * l1
    out[1] = u1 + (p1 + 1j * p2) * l0 - p3 * l1
    out[2] = -l0 + p3 * u0 + (p1 - 1j * p2) * u1
    out[3] = -l1 + (p1 + 1j * p2) * u0 - p3 * u1
    return out


def _require_four(field: SpinorField) -> None:
    if field.components != 4:
        raise ValueError(f"expected a 4-component field, got {field.components}")


def fw_transform(field: SpinorField, direction: str = "forward") -> SpinorField:
    """Apply U_FW (``"forward"``) or its inverse; result in momentum representation."""
    _require_four(field)
    sym = fw_symbol(field.grid)
    f = field.momentum_values()
    if direction == "forward":
        out = sym.forward(f)
    elif direction == "inverse":
        out = sym.inverse(f)
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return SpinorField(field.grid, out, "momentum")


def project(field: SpinorField, sign: int) -> SpinorField:
    """Spectral projector Lambda_+ (sign=+1) or Lambda_- (sign=-1) of the free Dirac operator."""
    _require_four(field)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    sym = fw_symbol(field.grid)
    g = sym.forward(field.momentum_values())
    if sign > 0:
        g[2:] = 0.0
    else:
        g[:2] = 0.0
    return SpinorField(field.grid, sym.inverse(g), "momentum")


def apply_sqrt_operator(field: SpinorField) -> SpinorField:
    """sqrt(-Delta + 1), i.e. multiplication by lambda(p)."""
    return SpinorField(field.grid, field.momentum_values() * field.grid.lam, "momentum")


def apply_d_fw(field: SpinorField) -> SpinorField:
    """D_FW = beta |D_0| on a 4-component field."""
    _require_four(field)
    g = field.momentum_values() * field.grid.lam
    g[2:] *= -1.0
    return SpinorField(field.grid, g, "momentum")


def form_d_fw(f: SpinorField, g: SpinorField) -> complex:
    """Sesquilinear form integral lambda(p) (f_hat, beta g_hat)."""
    return mom_inner(f.momentum_values(), apply_d_fw(g).values, f.grid)
