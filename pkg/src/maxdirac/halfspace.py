"""Half-space extension of boundary traces and the H^1(R^4_+) energy.

A trace ``u`` on R^3 = {x = 0} extends to the half-space by solving
``(-d_x^2 - Delta_y + 1) v = 0`` per Fourier mode, giving
``v_hat(x, p) = u_hat(p) exp(-x lambda(p))``.  The extension's H^1 energy is
``sum_p lambda(p) |u_hat(p)|^2`` (closed form) and its Dirichlet-to-Neumann map
is multiplication by ``lambda(p)``.

The solver works on traces only; this module validates that reduction with a
Gauss-Laguerre quadrature in ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre

from .dirac import apply_sqrt_operator
from .grid import SpectralGrid, SpinorField, mom_dot

DEFAULT_NODES = 64


@dataclass(frozen=True)
class XQuadrature:
    """Nodes and weights for integrals over (0, inf) of functions decaying like exp(-2x)."""

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_laguerre(cls, count: int = DEFAULT_NODES, rate: float = 2.0) -> "XQuadrature":
        if count < 1:
            raise ValueError("quadrature needs at least one node")
        t, w = roots_laguerre(count)
        # int_0^inf f(x) dx = (1/rate) sum_i w_i e^{t_i} f(t_i / rate)
        return cls(t / rate, w * np.exp(t) / rate)

    def integrate(self, samples: np.ndarray) -> float:
        return float(np.dot(self.weights, samples))


@dataclass(frozen=True, eq=False)
class HalfSpaceField:
    """Spinor field on the half-space, sampled at the x-quadrature nodes.

    ``values[i]`` and ``dx_values[i]`` are the momentum coefficients of ``v`` and
    ``d_x v`` at ``x = nodes[i]``; ``boundary`` holds the trace at ``x = 0``.
    """

    grid: SpectralGrid
    quadrature: XQuadrature
    boundary: np.ndarray
    values: np.ndarray
    dx_values: np.ndarray

    def trace(self) -> SpinorField:
        return SpinorField(self.grid, self.boundary.copy(), "momentum")

    def at(self, i: int) -> SpinorField:
        return SpinorField(self.grid, self.values[i], "momentum")

    def __add__(self, other: "HalfSpaceField") -> "HalfSpaceField":
        if other.grid != self.grid or other.quadrature is not self.quadrature:
            raise ValueError("half-space fields live on different discretizations")
        return HalfSpaceField(
            self.grid,
            self.quadrature,
            self.boundary + other.boundary,
            self.values + other.values,
            self.dx_values + other.dx_values,
        )


def extend(trace: SpinorField, quadrature: XQuadrature | None = None) -> HalfSpaceField:
    """Optimal extension: each mode decays as exp(-x lambda(p))."""
    quad = quadrature or XQuadrature.gauss_laguerre()
    u = trace.momentum_values()
    values, dx_values = _profile(u, trace.grid.lam, quad.nodes)
    return HalfSpaceField(trace.grid, quad, u.copy(), values, dx_values)


def _profile(u, lam, x):
    """v_hat and d_x v_hat at the points x for the per-mode solution."""
    decay = np.exp(-np.asarray(x, dtype=float)[:, None, None, None] * lam)
    values = decay[:, None] * u
    return values, -lam * values


def separable_perturbation(
    grid: SpectralGrid, quadrature: XQuadrature, coefficients: np.ndarray, profile=None
) -> HalfSpaceField:
    """delta(x, y) = f(x) g(y) with f(0) = 0; default f(x) = x e^{-x}.

    ``profile`` is a pair of callables (f, f').
    """
    if profile is None:
        f = lambda x: x * np.exp(-x)  # noqa: E731
        df = lambda x: (1.0 - x) * np.exp(-x)  # noqa: E731
    else:
        f, df = profile
    x = quadrature.nodes
    g = np.asarray(coefficients, dtype=complex)
    fx = f(x).reshape((-1,) + (1,) * g.ndim)
    dfx = df(x).reshape((-1,) + (1,) * g.ndim)
    return HalfSpaceField(grid, quadrature, np.zeros_like(g), fx * g, dfx * g)


def h1_norm_optimal(trace: SpinorField) -> float:
    """||extend(u)||^2_{H^1} per mode in closed form.

    int_0^inf (lambda^2 + |p|^2 + 1) e^{-2 x lambda} dx = lambda, so the energy is
    sum_p lambda(p) |u_hat(p)|^2 dp^3.
    """
    grid = trace.grid
    u = trace.momentum_values()
    lam = grid.lam
    per_mode = (lam * lam + grid.p2 + 1.0) / (2.0 * lam)
    return mom_dot(u, u, grid, weight=per_mode)


def dirichlet_to_neumann(trace: SpinorField) -> SpinorField:
    """-d_x v(0, .) for the optimal extension, from the exact x-profile."""
    _, dx = _profile(trace.momentum_values(), trace.grid.lam, [0.0])
    return SpinorField(trace.grid, -dx[0], "momentum")


def quadrature_h1_norm(v: HalfSpaceField) -> float:
    """Numerical int int (|d_x v|^2 + |grad_y v|^2 + |v|^2) dx dy."""
    grid = v.grid
    w_y = grid.p2 + 1.0
    dp3 = grid.momentum_cell
    dens = np.sum(np.abs(v.dx_values) ** 2, axis=1) + w_y * np.sum(np.abs(v.values) ** 2, axis=1)
    per_node = dens.reshape(dens.shape[0], -1).sum(axis=1) * dp3
    return v.quadrature.integrate(per_node)


__all__ = [
    "DEFAULT_NODES",
    "HalfSpaceField",
    "XQuadrature",
    "apply_sqrt_operator",
    "dirichlet_to_neumann",
    "extend",
    "h1_norm_optimal",
    "quadrature_h1_norm",
    "separable_perturbation",
]
