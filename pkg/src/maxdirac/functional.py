"""The energy functional on FW traces, its constrained restriction and their derivatives.

States are FW-represented traces ``phi = (phi_1, phi_2)`` of 2-spinors in
momentum space; the physical spinor is ``psi = U^-1 phi``.  With the potential
operator

    P chi = alpha [ (V + Phi) chi - sum_k A_k alpha_k chi ],   Phi = K * rho,  A = K * J,

(all built from ``psi``) the functional

    I(phi) = |phi_1|^2_{H^1/2} - |phi_2|^2_{H^1/2} + alpha int V rho + (alpha/2)(D_rho - D_J)

has L^2 gradient field ``g = lambda beta phi + U F(P psi)``, i.e.
``dI[k] = 2 Re <g, k>``.  ``F`` is the Fourier transform.

The constrained functional is ``J_W(u) = I(a(u) w, u)`` with
``a(u) = sqrt(1 - |u|^2)`` and ``|w| = 1``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constants import ALPHA_FS
from .coulomb import InteractionTerms, coulomb_kernel, interaction_terms, nuclear_potential
from .dirac import apply_free_dirac, fw_symbol
from .grid import SpectralGrid, SpinorField, mom_dot, mom_inner, pos_inner, to_momentum, to_position


@dataclass(frozen=True, eq=False)
class Model:
    """Physical parameters and the discretization shared by every evaluation."""

    grid: SpectralGrid
    Z: float = 1.0
    alpha_fs: float = ALPHA_FS
    self_field: bool = True
    external_potential: bool = True
    zero_mode: str = "madelung"

    def __post_init__(self):
        if self.Z < 0:
            raise ValueError("Z must be nonnegative")
        if self.alpha_fs < 0:
            raise ValueError("alpha_fs must be nonnegative")

    @functools.cached_property
    def fw(self):
        return fw_symbol(self.grid)

    @functools.cached_property
    def kernel(self):
        return coulomb_kernel(self.grid, self.zero_mode)

    @functools.cached_property
    def potential(self) -> np.ndarray | None:
        if not self.external_potential or self.Z == 0:
            return None
        return nuclear_potential(self.kernel, self.Z)

    @property
    def interacting(self) -> bool:
        return self.alpha_fs != 0.0 and (self.self_field or self.potential is not None)


def _mom(x, grid: SpectralGrid | None = None) -> np.ndarray:
    if isinstance(x, SpinorField):
        return x.momentum_values()
    return np.asarray(x, dtype=complex)


def _h_half(x: np.ndarray, grid: SpectralGrid) -> float:
    return mom_dot(x, x, grid, weight=grid.lam)


class PhiState:
    """A 4-component FW trace with cached physical spinor, potentials and gradient field."""

    def __init__(self, model: Model, phi: np.ndarray):
        phi = np.array(phi, dtype=complex)
        if phi.shape != (4,) + model.grid.shape:
            raise ValueError(f"expected FW trace of shape {(4,) + model.grid.shape}, got {phi.shape}")
        phi.setflags(write=False)
        self.model = model
        self.phi = phi

    @functools.cached_property
    def psi_hat(self) -> np.ndarray:
        return self.model.fw.inverse(self.phi)

    @functools.cached_property
    def psi(self) -> np.ndarray:
        return to_position(self.psi_hat, self.model.grid)

    @functools.cached_property
    def terms(self) -> InteractionTerms | None:
        m = self.model
        if not m.self_field or m.alpha_fs == 0.0:
            return None
        return interaction_terms(self.psi, m.kernel, m.potential)

    @functools.cached_property
    def _potentials(self):
        """(scalar, vector) multipliers of P, or None when P = 0."""
        m = self.model
        if not m.interacting:
            return None
        scalar = np.zeros(m.grid.shape)
        vec = None
        if m.potential is not None:
            scalar += m.potential
        if self.terms is not None:
            scalar += self.terms.phi
            vec = m.alpha_fs * self.terms.vec_a
        return m.alpha_fs * scalar, vec

    def apply_P(self, chi_pos: np.ndarray) -> np.ndarray | None:
        pots = self._potentials
        if pots is None:
            return None
        return kernels.apply_potential(chi_pos, pots[0], pots[1])

    @functools.cached_property
    def P_psi(self) -> np.ndarray | None:
        return self.apply_P(self.psi)

    @functools.cached_property
    def gradient_field(self) -> np.ndarray:
        """g with dI[k] = 2 Re <g, k>_{L^2}."""
        m = self.model
        g = self.phi * m.grid.lam
        g[2:] *= -1.0
        if self.P_psi is not None:
            g = g + m.fw.forward(to_momentum(self.P_psi, m.grid))
        return g

    @functools.cached_property
    def value(self) -> "FunctionalValue":
        m = self.model
        grid = m.grid
        kp = _h_half(self.phi[:2], grid)
        km = _h_half(self.phi[2:], grid)
        if m.potential is not None:
            rho = np.sum(self.psi.real**2 + self.psi.imag**2, axis=0)
            v_ext = float(np.sum(m.potential * rho) * grid.cell_volume)
        else:
            v_ext = 0.0
        t = self.terms
        d_rho, d_j = (t.D_rho, t.D_J) if t is not None else (0.0, 0.0)
        a = m.alpha_fs
        I = kp - km + a * v_ext + 0.5 * a * (d_rho - d_j)
        mu = I + 0.5 * a * (d_rho - d_j)
        return FunctionalValue(I, kp, km, v_ext, d_rho, d_j, mu=mu)

    def hessian_field(self, h: np.ndarray) -> np.ndarray:
        """Field H(h) with d^2 I[h, k] = Re <H(h), k>_{L^2}."""
        m = self.model
        grid = m.grid
        out = h * grid.lam
        out[2:] *= -1.0
        if m.interacting:
            xi = to_position(m.fw.inverse(h), grid)
            t = self.apply_P(xi)
            if self.terms is not None:
                cb = kernels.cross_bilinears(self.psi, xi)
                pot = m.kernel.convolve(cb)
                t = t + (2.0 * m.alpha_fs) * kernels.apply_potential(self.psi, pot[0], pot[1:])
            out = out + m.fw.forward(to_momentum(t, grid))
        return 2.0 * out


@dataclass(frozen=True)
class FunctionalValue:
    I: float
    kinetic_plus: float
    kinetic_minus: float
    V_ext: float
    D_rho: float
    D_J: float
    lambda_W: float | None = None
    mu: float | None = None

    def parts(self) -> dict:
        return {
            "kinetic_plus": self.kinetic_plus,
            "kinetic_minus": self.kinetic_minus,
            "V_ext": self.V_ext,
            "D_rho": self.D_rho,
            "D_J": self.D_J,
        }


class TraceState(PhiState):
    """Variables (w, u) of the constrained problem; phi = (a(u) w, u)."""

    def __init__(self, model: Model, w, u=None, norm_tol: float = 1e-8):
        grid = model.grid
        w = _mom(w).copy()
        u = np.zeros_like(w) if u is None else _mom(u).copy()
        if w.shape != (2,) + grid.shape or u.shape != (2,) + grid.shape:
            raise ValueError("w and u must be 2-component traces on the model grid")
        wn = mom_dot(w, w, grid)
        if abs(wn - 1.0) > norm_tol:
            raise ValueError(f"w must be L2-normalized, |w|^2 = {wn:.3e}")
        u2 = mom_dot(u, u, grid)
        if not u2 < 1.0:
            raise ValueError(f"|u|^2_L2 = {u2:.6g} must be < 1")
        a = float(np.sqrt(1.0 - u2))
        w.setflags(write=False)
        u.setflags(write=False)
        self.w = w
        self.u = u
        self.u_mass = u2
        self.a = a
        super().__init__(model, np.concatenate([a * w, u]))

    def with_u(self, u) -> "TraceState":
        return TraceState(self.model, self.w, u)

    def fields(self) -> tuple[SpinorField, SpinorField]:
        g = self.model.grid
        return SpinorField(g, self.w, "momentum"), SpinorField(g, self.u, "momentum")

    @functools.cached_property
    def v_plus(self) -> np.ndarray:
        """U^-1 (w, 0) in momentum space."""
        return self.model.fw.inverse(np.concatenate([self.w, np.zeros_like(self.w)]))

    @functools.cached_property
    def eta(self) -> np.ndarray:
        """U^-1 (0, u) in momentum space."""
        return self.model.fw.inverse(np.concatenate([np.zeros_like(self.u), self.u]))

    @functools.cached_property
    def _R(self) -> float:
        return mom_dot(self.gradient_field[:2], self.w, self.model.grid)


# ---- unconstrained functional --------------------------------------------------------------


def eval_I(state: PhiState) -> FunctionalValue:
    return state.value


def grad_I(state: PhiState, h) -> float:
    return 2.0 * mom_dot(state.gradient_field, _mom(h), state.model.grid)


def hessian_I(state: PhiState, h, k) -> float:
    return mom_dot(state.hessian_field(_mom(h)), _mom(k), state.model.grid)


def gamma(state: TraceState, nu) -> float:
    """Re <P(a v_+), nu>_{L^2} with P built from the potentials of psi."""
    m = state.model
    av = to_position(state.a * state.v_plus, m.grid)
    t = state.apply_P(av)
    if t is None:
        return 0.0
    return float(pos_inner(t, to_position(_mom(nu), m.grid), m.grid).real)


# ---- constrained functional J_W(u) = I(a(u) w, u) ------------------------------------------


def da(state: TraceState, h) -> float:
    return -mom_dot(state.u, _mom(h), state.model.grid) / state.a


@dataclass(frozen=True)
class RPQ:
    """r[xi] = Re<eta, xi>/(1 - |eta|^2), p = r^2, q = |xi|^2/(1 - |eta|^2) + p."""

    r: float
    p: float
    q: float


def rpq(state: TraceState, h) -> RPQ:
    grid = state.model.grid
    h = _mom(h)
    a2 = state.a**2
    # U is unitary per mode: <eta, xi> = <u, h>, |eta| = |u|, |xi| = |h|
    r = mom_dot(state.u, h, grid) / a2
    p = r * r
    return RPQ(r, p, mom_dot(h, h, grid) / a2 + p)


def d2a(state: TraceState, h, k) -> float:
    """Polarized form of d^2 a[xi; xi] = -a q[xi; xi]."""
    grid = state.model.grid
    h, k = _mom(h), _mom(k)
    a = state.a
    rh = rpq(state, h).r
    rk = rpq(state, k).r
    return -a * (mom_dot(h, k, grid) / a**2 + rh * rk)


def _lift(state: TraceState, h: np.ndarray) -> np.ndarray:
    """chi_h = (da[h] w, h), the induced variation of phi."""
    return np.concatenate([da(state, h) * state.w, h])


def eval_J(state: TraceState) -> float:
    return state.value.I


def grad_J_field(state: TraceState) -> np.ndarray:
    """L^2 gradient of J_W at u: 2 (g_2 - (Re<g_1, w>/a) u)."""
    g = state.gradient_field
    return 2.0 * (g[2:] - (state._R / state.a) * state.u)


def grad_J(state: TraceState, h) -> float:
    return mom_dot(grad_J_field(state), _mom(h), state.model.grid)


def hessian_J_field(state: TraceState, h) -> np.ndarray:
    """Field H_J(h) with d^2 J[h, k] = Re <H_J(h), k>_{L^2}."""
    grid = state.model.grid
    h = _mom(h)
    a = state.a
    H = state.hessian_field(_lift(state, h))
    out = H[2:] - (mom_dot(H[:2], state.w, grid) / a) * state.u
    # 2 R d^2a[h, .] with d^2a[h, k] = -Re<h, k>/a - Re<u, h> Re<u, k>/a^3
    uh = mom_dot(state.u, h, grid)
    return out + 2.0 * state._R * (-h / a - (uh / a**3) * state.u)


def hessian_J(state: TraceState, h, k) -> float:
    """Q_1 + Q_2: d^2 I[chi_h, chi_k] + d^2 a[h, k] dI[(w, 0)]."""
    grid = state.model.grid
    h, k = _mom(h), _mom(k)
    q12 = mom_dot(state.hessian_field(_lift(state, h)), _lift(state, k), grid)
    return q12 + 2.0 * d2a(state, h, k) * state._R


# ---- multiplier, residuals, outer functional -----------------------------------------------


def lagrange_multiplier(state: PhiState) -> float:
    """mu = I + (alpha/2)(D_rho - D_J)."""
    return state.value.mu


def euler_lagrange_residual(state: PhiState, mu: float) -> float:
    """|| (alpha.p + beta) psi + P psi - mu psi ||_{H^-1/2}, evaluated on psi directly."""
    m = state.model
    grid = m.grid
    r = apply_free_dirac(state.psi_hat, grid) - mu * state.psi_hat
    if state.P_psi is not None:
        r = r + to_momentum(state.P_psi, grid)
    return float(np.sqrt(max(mom_dot(r, r, grid, weight=1.0 / grid.lam), 0.0)))


def residual_T_field(state: TraceState, mu: float) -> np.ndarray:
    """Field t with T[h] = dI[(h, 0)] - 2 mu Re<a w, h> = Re <t, h>_{L^2}."""
    return 2.0 * (state.gradient_field[:2] - (mu * state.a) * state.w)


def residual_T(state: TraceState, mu: float, h) -> float:
    return mom_dot(residual_T_field(state, mu), _mom(h), state.model.grid)


def residual_T_dual(state: TraceState, mu: float) -> float:
    """sup_h T[h] / |h|_{H^1/2}."""
    grid = state.model.grid
    t = residual_T_field(state, mu)
    return float(np.sqrt(mom_dot(t, t, grid, weight=1.0 / grid.lam)))


def tangent_project(w: np.ndarray, h: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """h - Re<w, h> w, the derivative of w -> w/|w| at a unit w."""
    return h - mom_dot(w, h, grid) * w


def grad_F_field(state: TraceState) -> np.ndarray:
    """L^2 gradient of F(w) = I(phi(w)) on the sphere at the inner maximizer u(w)."""
    grid = state.model.grid
    g1 = state.gradient_field[:2]
    return 2.0 * state.a * tangent_project(state.w, g1, grid)


def grad_F(state: TraceState, h) -> float:
    """dF(w)[h] = a dI(phi)[(dP(w) h, 0)]."""
    return mom_dot(grad_F_field(state), _mom(h), state.model.grid)


def h_half_norm(x, grid: SpectralGrid) -> float:
    return float(np.sqrt(_h_half(_mom(x), grid)))


def dual_norm(x, grid: SpectralGrid) -> float:
    x = _mom(x)
    return float(np.sqrt(mom_dot(x, x, grid, weight=1.0 / grid.lam)))


def l2_inner(x, y, grid: SpectralGrid) -> complex:
    return mom_inner(_mom(x), _mom(y), grid)
