"""Charge/current densities, Coulomb potentials and the interaction energies.

The Coulomb kernel is the momentum multiplier ``k(p) = 4 pi / |p|^2``.  Its zero
mode is a convention of the periodic box:

* ``"neutral"``: ``k(0) = 0`` (neutralizing background), so the position-space
  kernel has zero mean and is negative far from the origin;
* ``"madelung"`` (default): ``k(0) = xi L^2`` with ``xi`` the simple-cubic
  Madelung constant, which adds ``xi / L`` to the position-space kernel.  The
  kernel then matches ``1/|y|`` near the origin up to ``O(|y|^2 / L^3)`` and is
  pointwise positive, so ``D_rho - D_J >= 0`` holds on the grid exactly.

The nucleus is the kernel itself: ``V = -Z K``, with ``K`` the convolution of
the lattice delta at the origin.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import kernels
from .constants import MADELUNG_SC
from .grid import TWO_PI_32, SpectralGrid, SpinorField, fft_workers

ORACLE_MAX_N = 16
_AXES = (-3, -2, -1)


class CoulombKernel:
    def __init__(self, grid: SpectralGrid, zero_mode: str = "madelung"):
        if zero_mode not in ("madelung", "neutral"):
            raise ValueError(f"zero_mode must be 'madelung' or 'neutral', got {zero_mode!r}")
        self.grid = grid
        self.zero_mode = zero_mode
        p2 = grid.p2
        with np.errstate(divide="ignore"):
            k = np.where(p2 > 0, 4.0 * np.pi / np.where(p2 > 0, p2, 1.0), 0.0)
        if zero_mode == "madelung":
            k[0, 0, 0] = MADELUNG_SC * grid.box_length**2
        self.k = k
        # rfftn layout: last axis keeps the non-negative frequencies 0..N/2; the
        # symbol is even so the Nyquist entry is the same either way.
        self.k_half = np.ascontiguousarray(k[:, :, : grid.n // 2 + 1])

    @property
    def offset(self) -> float:
        """Constant added to the position kernel by the zero-mode convention."""
        return self.k[0, 0, 0] / self.grid.box_length**3

    @functools.cached_property
    def position_kernel(self) -> np.ndarray:
        """K(y) with (K * f)^ = k f_hat; real and even."""
        g = self.grid
        vals = scipy.fft.ifftn(self.k, workers=fft_workers()).real
        return vals * (g.n**3 * g.momentum_cell / (2.0 * np.pi) ** 3)

    def convolve(self, f: np.ndarray) -> np.ndarray:
        """K * f for real fields; leading axes are batched."""
        n = self.grid.n
        fh = scipy.fft.rfftn(f, axes=_AXES, workers=fft_workers())
        fh *= self.k_half
        return scipy.fft.irfftn(fh, s=(n, n, n), axes=_AXES, workers=fft_workers())


@functools.lru_cache(maxsize=16)
def coulomb_kernel(grid: SpectralGrid, zero_mode: str = "madelung") -> CoulombKernel:
    return CoulombKernel(grid, zero_mode)


def nuclear_potential(kernel: CoulombKernel, Z: float) -> np.ndarray:
    """V = -Z K, the nucleus at the origin (box center)."""
    return -float(Z) * kernel.position_kernel


def _pos(psi) -> np.ndarray:
    if isinstance(psi, SpinorField):
        if psi.components != 4:
            raise ValueError("expected a 4-spinor")
        return psi.position_values()
    return np.asarray(psi)


def density(psi) -> np.ndarray:
    """rho = |psi|^2 pointwise."""
    v = _pos(psi)
    return np.sum(v.real**2 + v.imag**2, axis=0)


def current(psi) -> np.ndarray:
    """J_k = (psi, alpha_k psi), shape (3, N, N, N)."""
    v = _pos(psi)
    return kernels.cross_bilinears(v, v)[1:]


def density_current(psi) -> np.ndarray:
    """Rows rho, J_1, J_2, J_3 in one pass."""
    v = _pos(psi)
    return kernels.cross_bilinears(v, v)


def coulomb_convolve(f: np.ndarray, kernel: CoulombKernel) -> np.ndarray:
    return kernel.convolve(np.asarray(f, dtype=float))


def pair_energy(f: np.ndarray, g: np.ndarray, kernel: CoulombKernel) -> float:
    """Double integral f(y) g(z) K(y - z) via dp^3 sum k(p) Re(f_hat conj(g_hat))."""
    grid = kernel.grid
    fh = scipy.fft.fftn(f, workers=fft_workers())
    gh = fh if g is f else scipy.fft.fftn(g, workers=fft_workers())
    scale = (grid.cell_volume / TWO_PI_32) ** 2 * grid.momentum_cell
    return float(np.sum(kernel.k * (fh * np.conj(gh)).real) * scale)


def oracle_kernel(kernel: CoulombKernel) -> np.ndarray:
    """Position kernel from an explicit (non-FFT) inverse sum over the lattice."""
    g = kernel.grid
    p1 = g.signed_index * g.dp
    y1 = g.signed_index * g.h
    vals = kernels.inverse_dft_direct(kernel.k.astype(complex), p1, y1).real
    return vals * g.momentum_cell / (2.0 * np.pi) ** 3


def oracle_pair_energy(f: np.ndarray, g: np.ndarray, kernel: CoulombKernel) -> float:
    """Brute-force h^6 sum_y sum_z f(y) K(y - z) g(z); O(N^6), N <= 16 only."""
    grid = kernel.grid
    if grid.n > ORACLE_MAX_N:
        raise ValueError(f"oracle limited to N <= {ORACLE_MAX_N}, grid has N = {grid.n}")
    K = oracle_kernel(kernel)
    return kernels.pair_sum_direct(np.asarray(f, float), np.asarray(g, float), K) * grid.cell_volume**2


def external_energy(rho: np.ndarray, Z: float, kernel: CoulombKernel) -> float:
    """integral V rho with V = -Z K; never positive for rho >= 0 under the Madelung convention."""
    if Z < 0:
        raise ValueError("Z must be nonnegative")
    return float(np.sum(nuclear_potential(kernel, Z) * rho) * kernel.grid.cell_volume)


def oracle_external_energy(rho: np.ndarray, Z: float, kernel: CoulombKernel) -> float:
    return float(-Z * np.sum(oracle_kernel(kernel) * rho) * kernel.grid.cell_volume)


@dataclass(frozen=True, eq=False)
class InteractionTerms:
    rho: np.ndarray
    current: np.ndarray
    phi: np.ndarray
    vec_a: np.ndarray
    V_ext: float
    D_rho: float
    D_J: float


def interaction_terms(psi, kernel: CoulombKernel, V: np.ndarray | None) -> InteractionTerms:
    """Densities, potentials Phi = K*rho, A = K*J and the energies for a position-space 4-spinor."""
    grid = kernel.grid
    dc = density_current(psi)
    pot = kernel.convolve(dc)
    dv = grid.cell_volume
    D_rho = float(np.sum(dc[0] * pot[0]) * dv)
    D_J = float(np.sum(dc[1:] * pot[1:]) * dv)
    V_ext = 0.0 if V is None else float(np.sum(V * dc[0]) * dv)
    return InteractionTerms(dc[0], dc[1:], pot[0], pot[1:], V_ext, D_rho, D_J)


def self_interaction(psi, kernel: CoulombKernel, alpha_fs: float) -> float:
    """(alpha/2)(D_rho - D_J)."""
    t = interaction_terms(psi, kernel, None)
    return 0.5 * alpha_fs * (t.D_rho - t.D_J)
