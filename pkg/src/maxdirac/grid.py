"""Periodic box discretization of R^3 and the Fourier conventions used everywhere.

Position samples live on ``y = h * m`` with ``m`` the signed index
(``numpy.fft.fftfreq`` ordering), so the origin sits on grid index 0 and the
box covers ``[-L/2, L/2)^3``.  Momentum samples approximate the continuum
symmetric transform

    u_hat(p) = (2 pi)^(-3/2) * integral exp(-i p.y) u(y) dy

by ``h^3 / (2 pi)^(3/2) * DFT(u)``.  With this choice integrals are
``h^3 * sum`` in position space and ``dp^3 * sum`` in momentum space, and every
momentum multiplier applies to the samples verbatim.

Arrays carry the spatial axes last: a field with ``c`` components has shape
``(c, N, N, N)``.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.fft

Representation = Literal["position", "momentum"]

_AXES = (-3, -2, -1)
TWO_PI_32 = (2.0 * np.pi) ** 1.5


def fft_workers() -> int:
    """Thread count for FFTs, from ``MAXDIRAC_NUM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("MAXDIRAC_NUM_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid with ``n`` points per axis on a box of side ``box_length``."""

    n: int
    box_length: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n <= 0 or self.n % 2:
            raise ValueError(f"points_per_axis must be a positive even integer, got {self.n!r}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def h(self) -> float:
        return self.box_length / self.n

    @property
    def dp(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def momentum_cell(self) -> float:
        return self.dp**3

    @functools.cached_property
    def signed_index(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    @functools.cached_property
    def positions(self) -> np.ndarray:
        """Coordinates, shape ``(3, N, N, N)``."""
        y = self.signed_index * self.h
        return np.array(np.meshgrid(y, y, y, indexing="ij"))

    @functools.cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(np.sum(self.positions**2, axis=0))

    @functools.cached_property
    def momenta(self) -> np.ndarray:
        """Momentum lattice, shape ``(3, N, N, N)``; Nyquist row is negative."""
        p = self.signed_index * self.dp
        return np.array(np.meshgrid(p, p, p, indexing="ij"))

    @functools.cached_property
    def p2(self) -> np.ndarray:
        return np.sum(self.momenta**2, axis=0)

    @functools.cached_property
    def pnorm(self) -> np.ndarray:
        return np.sqrt(self.p2)

    @functools.cached_property
    def lam(self) -> np.ndarray:
        """The symbol sqrt(|p|^2 + 1)."""
        return np.sqrt(self.p2 + 1.0)

    def band_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """True on modes whose signed indices all satisfy ``|m| <= fraction * N/2``."""
        keep = np.abs(self.signed_index) <= fraction * (self.n // 2)
        return keep[:, None, None] & keep[None, :, None] & keep[None, None, :]


def to_momentum(values: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    out = scipy.fft.fftn(values, axes=_AXES, workers=fft_workers())
    out *= grid.cell_volume / TWO_PI_32
    return out


def to_position(values: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    out = scipy.fft.ifftn(values, axes=_AXES, workers=fft_workers())
    out *= TWO_PI_32 / grid.cell_volume
    return out


def mom_inner(a: np.ndarray, b: np.ndarray, grid: SpectralGrid, weight=None) -> complex:
    """``dp^3 * sum conj(a) * weight * b`` over all components and modes."""
    if weight is None:
        return complex(np.vdot(a, b)) * grid.momentum_cell
    return complex(np.vdot(a, weight * b)) * grid.momentum_cell


def mom_dot(a: np.ndarray, b: np.ndarray, grid: SpectralGrid, weight=None) -> float:
    """Real part of :func:`mom_inner`, the real inner product used by the optimizers."""
    if weight is None:
        return float(np.vdot(a, b).real) * grid.momentum_cell
    return float(np.vdot(a, weight * b).real) * grid.momentum_cell


def pos_inner(a: np.ndarray, b: np.ndarray, grid: SpectralGrid) -> complex:
    return complex(np.vdot(a, b)) * grid.cell_volume


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Grid samples of a map R^3 -> C^2 or C^4 in one of the two representations."""

    grid: SpectralGrid
    values: np.ndarray
    representation: Representation = "position"

    def __post_init__(self):
        if self.representation not in ("position", "momentum"):
            raise ValueError(f"unknown representation {self.representation!r}")
        v = np.asarray(self.values)
        if v.shape[-3:] != self.grid.shape or v.ndim != 4:
            raise ValueError(
                f"values must have shape (components, {self.grid.n}, {self.grid.n}, {self.grid.n}), got {v.shape}"
            )
        if v.shape[0] not in (1, 2, 3, 4):
            raise ValueError(f"unsupported component count {v.shape[0]}")
        object.__setattr__(self, "values", v.astype(complex, copy=False))

    @property
    def components(self) -> int:
        return self.values.shape[0]

    def to(self, target: Representation) -> "SpinorField":
        return transform(self, target)

    def momentum_values(self) -> np.ndarray:
        return self.values if self.representation == "momentum" else to_momentum(self.values, self.grid)

    def position_values(self) -> np.ndarray:
        return self.values if self.representation == "position" else to_position(self.values, self.grid)

    def with_values(self, values: np.ndarray, representation: Representation | None = None) -> "SpinorField":
        return SpinorField(self.grid, values, representation or self.representation)

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _check_compatible(self, other)
        return self.with_values(self.values + other.to(self.representation).values)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _check_compatible(self, other)
        return self.with_values(self.values - other.to(self.representation).values)

    def __mul__(self, scalar) -> "SpinorField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def transform(field: SpinorField, target: Representation) -> SpinorField:
    """Return ``field`` in the ``target`` representation (a copy if it changes)."""
    if target == field.representation:
        return field
    if target == "momentum":
        return SpinorField(field.grid, to_momentum(field.values, field.grid), "momentum")
    if target == "position":
        return SpinorField(field.grid, to_position(field.values, field.grid), "position")
    raise ValueError(f"unknown representation {target!r}")


def _check_compatible(f: SpinorField, g: SpinorField) -> None:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if f.components != g.components:
        raise ValueError(f"component mismatch: {f.components} vs {g.components}")


def inner_l2(f: SpinorField, g: SpinorField) -> complex:
    """L^2 inner product, conjugate-linear in ``f``."""
    _check_compatible(f, g)
    if f.representation == "position" and g.representation == "position":
        return pos_inner(f.values, g.values, f.grid)
    return mom_inner(f.momentum_values(), g.momentum_values(), f.grid)


def inner_h_half(f: SpinorField, g: SpinorField) -> complex:
    """H^{1/2} inner product with weight sqrt(|p|^2 + 1)."""
    _check_compatible(f, g)
    return mom_inner(f.momentum_values(), g.momentum_values(), f.grid, weight=f.grid.lam)


def norm_l2(f: SpinorField) -> float:
    return float(np.sqrt(inner_l2(f, f).real))


def norm_h_half(f: SpinorField) -> float:
    return float(np.sqrt(inner_h_half(f, f).real))


def plane_wave(grid: SpectralGrid, index, spinor) -> SpinorField:
    """Unit-L^2 plane wave ``exp(i p0.y) * spinor/|spinor|`` with ``p0 = dp * index``."""
    spinor = np.asarray(spinor, dtype=complex)
    spinor = spinor / np.linalg.norm(spinor)
    p0 = np.asarray(index, dtype=float) * grid.dp
    phase = np.exp(1j * np.tensordot(p0, grid.positions, axes=1))
    values = spinor[:, None, None, None] * phase / grid.box_length**1.5
    return SpinorField(grid, values, "position")


def constant_field(grid: SpectralGrid, spinor) -> SpinorField:
    """Unit-L^2 constant field along ``spinor``."""
    return plane_wave(grid, (0, 0, 0), spinor)


def random_momentum_coefficients(
    grid: SpectralGrid,
    components: int,
    rng: np.random.Generator,
    decay: float = 2.0,
    band_limit: float | None = 2.0 / 3.0,
) -> np.ndarray:
    """Complex Gaussian momentum samples with envelope ``(1 + |p|^2)^(-decay/2)``.

    ``band_limit`` zeroes modes outside the central fraction of the lattice;
    pass ``None`` for full-band samples.  Result is L^2-normalized.
    """
    shape = (components,) + grid.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    c *= (1.0 + grid.p2) ** (-decay / 2.0)
    if band_limit is not None:
        c *= grid.band_mask(band_limit)
    nrm = np.sqrt(mom_dot(c, c, grid))
    return c / nrm


def random_field(grid, components, rng, decay=2.0, band_limit=2.0 / 3.0) -> SpinorField:
    return SpinorField(grid, random_momentum_coefficients(grid, components, rng, decay, band_limit), "momentum")
