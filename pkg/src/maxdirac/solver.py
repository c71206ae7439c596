"""Two-level min-max ground-state solver.

Inner level: for a fixed unit upper trace ``w`` maximize the strictly concave
``J_W(u) = I(a(u) w, u)`` over the lower trace ``u`` (preconditioned gradient
ascent, then Newton with a preconditioned conjugate-gradient solve).  The value
is ``lambda_W``.

Outer level: minimize ``F(w) = lambda_W`` over the unit sphere by preconditioned
Riemannian descent with Barzilai-Borwein steps, Armijo backtracking and the
retraction ``w -> w / |w|``.  Convergence is declared on the dual norm of the
residual functional ``T``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import functional as fn
from .constants import ALPHA_FS, GAMMA_T, Z_MAX_EXISTENCE, Z_MIN_EXISTENCE
from .grid import SpectralGrid, mom_dot, random_momentum_coefficients

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid solver configuration."""


class SolverError(RuntimeError):
    """The iteration failed (limit reached, constraint breached)."""


@dataclass(frozen=True)
class SolverConfig:
    Z: int = 20
    alpha_fs: float = ALPHA_FS
    grid_points: int = 32
    box_length: float = 40.0
    tol_inner: float = 1e-9
    tol_outer: float = 1e-8
    max_iter_inner: int = 200
    max_iter_outer: int = 400
    seed: int = 0
    n_starts: int = 3
    disable_self_field: bool = False
    disable_external_potential: bool = False
    zero_mode: str = "madelung"
    # step control
    armijo: float = 1e-4
    max_backtracks: int = 40
    newton_switch: float = 1e-4
    metric_shift: float = 5e-3
    max_cg: int = 60

    def validate(self) -> "SolverConfig":
        if isinstance(self.Z, bool) or int(self.Z) != self.Z or self.Z < 1:
            raise ConfigError(f"Z must be a positive integer, got {self.Z!r}")
        if not np.isfinite(self.alpha_fs) or self.alpha_fs < 0:
            raise ConfigError(f"alpha_fs must be a finite nonnegative number, got {self.alpha_fs!r}")
        if (self.Z + 1) * self.alpha_fs * GAMMA_T > 1.0:
            raise ConfigError(
                f"(Z+1)·alpha·gamma_T exceeds 1: (Z+1)·alpha·gamma_T = "
                f"{(self.Z + 1) * self.alpha_fs * GAMMA_T:.6g} for Z = {self.Z}"
            )
        if self.grid_points < 4 or self.grid_points % 2:
            raise ConfigError(f"grid_points must be an even integer >= 4, got {self.grid_points}")
        if not self.box_length > 0:
            raise ConfigError(f"box_length must be positive, got {self.box_length}")
        for name in ("tol_inner", "tol_outer"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("max_iter_inner", "max_iter_outer", "n_starts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.zero_mode not in ("madelung", "neutral"):
            raise ConfigError("zero_mode must be 'madelung' or 'neutral'")
        if not Z_MIN_EXISTENCE <= self.Z <= Z_MAX_EXISTENCE and self.alpha_fs > 0:
            warnings.warn(
                f"Z = {self.Z} is outside the existence range {Z_MIN_EXISTENCE}..{Z_MAX_EXISTENCE}",
                stacklevel=2,
            )
        return self

    @property
    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.grid_points, float(self.box_length))

    def model(self) -> fn.Model:
        return fn.Model(
            self.grid,
            Z=float(self.Z),
            alpha_fs=float(self.alpha_fs),
            self_field=not self.disable_self_field,
            external_potential=not self.disable_external_potential,
            zero_mode=self.zero_mode,
        )


@dataclass
class InnerResult:
    state: fn.TraceState
    lambda_W: float
    grad_norm: float
    iterations: int


@dataclass
class SolveReport:
    mu: float
    lambda_W: float
    Lambda1_estimate: float
    I_parts: dict
    upper_trace_mass: float
    residual_EL: float
    residual_T_dual: float
    iterations: dict
    diagnostics: dict
    history: list = field(default_factory=list)
    state: fn.TraceState | None = field(default=None, repr=False)
    start: int = 0

    @property
    def success(self) -> bool:
        return all(self.diagnostics.values())

    def summary(self) -> dict:
        return {
            "mu": self.mu,
            "lambda_W": self.lambda_W,
            "Lambda1_estimate": self.Lambda1_estimate,
            "I_parts": dict(self.I_parts),
            "upper_trace_mass": self.upper_trace_mass,
            "residual_EL": self.residual_EL,
            "residual_T_dual": self.residual_T_dual,
            "iterations": dict(self.iterations),
            "diagnostics": dict(self.diagnostics),
        }


# ---- inner maximization ---------------------------------------------------------------------


def _inner_precond(state: fn.TraceState) -> np.ndarray:
    # -d^2 J ~ 2 (lambda + R/a): kinetic part plus the curvature of a(u).
    return 1.0 / (2.0 * (state.model.grid.lam + max(state._R / state.a, 0.0)))


def _pcg(apply_A, b, precond, grid, rtol, max_iter):
    """Preconditioned CG for A x = b, A symmetric positive definite in Re<.,.>."""
    x = np.zeros_like(b)
    r = b.copy()
    z = precond * r
    p = z.copy()
    rz = mom_dot(r, z, grid)
    b_norm = np.sqrt(abs(rz))
    for _ in range(max_iter):
        Ap = apply_A(p)
        pAp = mom_dot(p, Ap, grid)
        if pAp <= 0:
            break
        step = rz / pAp
        x += step * p
        r -= step * Ap
        z = precond * r
        rz_new = mom_dot(r, z, grid)
        if np.sqrt(abs(rz_new)) <= rtol * b_norm:
            break
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x


def inner_maximize(w, config: SolverConfig, u0=None, model: fn.Model | None = None, tol: float | None = None):
    """Maximize J_W over |u| < 1 for fixed unit w; returns (state at u*, lambda_W).

    The gradient norm is the dual (lambda^-1 weighted) norm of the L^2 gradient.
    """
    res = _inner(w, config, u0, model, tol)
    return res.state, res.lambda_W


def _inner(w, config, u0=None, model=None, tol=None) -> InnerResult:
    model = model or config.model()
    grid = model.grid
    tol = config.tol_inner if tol is None else tol
    state = fn.TraceState(model, w, u0)
    J = fn.eval_J(state)
    it = 0
    gnorm = np.inf
    while it < config.max_iter_inner:
        G = fn.grad_J_field(state)
        gnorm = fn.dual_norm(G, grid)
        if gnorm <= tol:
            break
        it += 1
        M = _inner_precond(state)
        if gnorm < config.newton_switch:
            rtol = min(0.1, gnorm)
            step_dir = _pcg(lambda h: -fn.hessian_J_field(state, h), G, M, grid, rtol, config.max_cg)
        else:
            step_dir = M * G
        slope = mom_dot(G, step_dir, grid)
        s = 1.0
        for _ in range(config.max_backtracks):
            u_new = state.u + s * step_dir
            if mom_dot(u_new, u_new, grid) < 1.0:
                trial = state.with_u(u_new)
                J_new = fn.eval_J(trial)
                if J_new >= J + config.armijo * s * slope - 1e-14 * abs(J):
                    break
            s *= 0.5
        else:
            raise SolverError("inner line search failed")
        state, J = trial, J_new
    else:
        G = fn.grad_J_field(state)
        gnorm = fn.dual_norm(G, grid)
        if gnorm > tol:
            raise SolverError(f"inner iteration limit reached (|grad J| = {gnorm:.3e})")
    if state.u_mass >= 0.5:
        raise SolverError(f"inner maximizer left the ball |u|^2 < 1/2 (|u|^2 = {state.u_mass:.6f})")
    return InnerResult(state, J, gnorm, it)


# ---- outer minimization ---------------------------------------------------------------------


def _normalize(w, grid):
    return w / np.sqrt(mom_dot(w, w, grid))


def initial_trace(grid: SpectralGrid, rng: np.random.Generator, noise: float = 0.1) -> np.ndarray:
    """Gaussian envelope of width L/8 times a random 2-spinor, plus smooth noise."""
    from .grid import to_momentum

    width = grid.box_length / 8.0
    env = np.exp(-0.5 * (grid.radius / width) ** 2)
    spin = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    w = to_momentum(spin[:, None, None, None] * env, grid)
    w = _normalize(w, grid)
    w = w + noise * random_momentum_coefficients(grid, 2, rng, decay=4.0)
    return _normalize(w, grid)


def _metric(state: fn.TraceState, mu: float, shift: float) -> np.ndarray:
    lam = state.model.grid.lam
    return 2.0 * state.a**2 * (lam - min(mu, 1.0) + shift)


def outer_minimize(w0, config: SolverConfig, model: fn.Model | None = None, start: int = 0) -> SolveReport:
    model = model or config.model()
    grid = model.grid
    w = _normalize(fn._mom(w0), grid)
    inner = _inner(w, config, None, model)
    state = inner.state
    F = inner.lambda_W
    inner_total = inner.iterations
    history = []
    prev = None
    step0 = 1.0
    for k in range(config.max_iter_outer + 1):
        mu = fn.lagrange_multiplier(state)
        t_dual = fn.residual_T_dual(state, mu)
        history.append({"iteration": k, "F": F, "mu": mu, "residual_T_dual": t_dual, "inner": inner.iterations})
        log.debug("outer %d F=%.15f mu=%.12f T=%.3e", k, F, mu, t_dual)
        if state.a**2 <= 0.5:
            raise SolverError(f"upper trace mass a^2 = {state.a ** 2:.6f} fell to 1/2")
        if t_dual <= config.tol_outer:
            break
        if k == config.max_iter_outer:
            raise SolverError(f"outer iteration limit reached (|T| = {t_dual:.3e})")
        G = fn.grad_F_field(state)
        metric = _metric(state, mu, config.metric_shift)
        d = fn.tangent_project(state.w, -G / metric, grid)
        if prev is not None:
            s_vec = state.w - prev[0]
            y_vec = G - prev[1]
            sy = mom_dot(s_vec, y_vec, grid)
            ss = mom_dot(s_vec, metric * s_vec, grid)
            step0 = float(np.clip(ss / sy, 1e-3, 1e3)) if sy > 0 else 1.0
        slope = mom_dot(G, d, grid)
        if slope >= 0:
            d = fn.tangent_project(state.w, -G, grid)
            slope = mom_dot(G, d, grid)
        s = step0
        for _ in range(config.max_backtracks):
            w_new = _normalize(state.w + s * d, grid)
            trial = _inner(w_new, config, state.u, model)
            inner_total += trial.iterations
            if trial.lambda_W <= F + config.armijo * s * slope + 1e-13 * abs(F):
                break
            s *= 0.5
        else:
            raise SolverError("outer line search failed")
        prev = (state.w, G)
        inner = trial
        state, F = trial.state, trial.lambda_W
    return _report(state, F, config, model, history, inner_total, len(history) - 1, start)


def _report(state, lambda_W, config, model, history, inner_total, outer_its, start) -> SolveReport:
    a_fs = model.alpha_fs
    value = fn.eval_I(state)
    mu = value.mu
    grid = model.grid
    Z = model.Z if model.potential is not None else 0.0
    g = GAMMA_T
    phi_norm2 = fn.h_half_norm(state.phi, grid) ** 2
    bound = (1 + a_fs * g * Z) / ((1 - a_fs * g) * (1 - a_fs * g * Z)) * lambda_W
    upper = state.a**2
    free = a_fs == 0.0 or not model.interacting
    diagnostics = {
        "mu_in_0_1": bool((0.0 < mu < 1.0) or (free and abs(mu - 1.0) <= 1e-10)),
        "mass_gt_half": bool(upper > 0.5),
        "norm_bound": bool(phi_norm2 <= bound + 1e-8),
        "gamma_nonneg": bool(fn.gamma(state, state.eta) >= -1e-8),
    }
    return SolveReport(
        mu=mu,
        lambda_W=lambda_W,
        Lambda1_estimate=lambda_W,
        I_parts=value.parts(),
        upper_trace_mass=upper,
        residual_EL=fn.euler_lagrange_residual(state, mu),
        residual_T_dual=fn.residual_T_dual(state, mu),
        iterations={"inner_total": int(inner_total), "outer": int(outer_its)},
        diagnostics=diagnostics,
        history=history,
        state=state,
        start=start,
    )


def solve(config: SolverConfig) -> SolveReport:
    """Multi-start outer minimization; returns the report with the lowest Lambda_1 estimate."""
    config.validate()
    model = config.model()
    grid = model.grid
    best = None
    errors = []
    for i in range(config.n_starts):
        rng = np.random.default_rng([config.seed, i])
        w0 = initial_trace(grid, rng)
        try:
            rep = outer_minimize(w0, config, model, start=i)
        except SolverError as exc:
            log.warning("start %d failed: %s", i, exc)
            errors.append(f"start {i}: {exc}")
            continue
        if best is None or rep.Lambda1_estimate < best.Lambda1_estimate - 1e-12:
            best = rep
    if best is None:
        raise SolverError("all starts failed; " + "; ".join(errors))
    return best


# ---- second-order probe ---------------------------------------------------------------------


@dataclass
class HessianProbe:
    quotients: list
    min_quotient: float
    directions: int


def _curve_slope(w, h, t, config, model, u0, tol):
    """d/dt F(P(w + t h)) by the envelope formula."""
    grid = model.grid
    v = w + t * h
    nv = np.sqrt(mom_dot(v, v, grid))
    wt = v / nv
    res = _inner(wt, config, u0, model, tol)
    tangent = fn.tangent_project(wt, h, grid) / nv
    return fn.grad_F(res.state, tangent)


def hessian_probe(w_star, config: SolverConfig, n_directions: int = 10, seed: int = 0,
                  directions=None, eps: float = 1e-3, inner_tol: float = 1e-12) -> HessianProbe:
    """Second derivative of F along sphere curves P(w* + t h), by central differences of dF.

    Quotient: d^2/dt^2 F(P(w* + t h)) / |h|^2_{H^1/2} with h tangent at w*.
    """
    model = config.model()
    grid = model.grid
    w = _normalize(fn._mom(w_star), grid)
    base = _inner(w, config, None, model, inner_tol)
    if directions is None:
        rng = np.random.default_rng(seed)
        directions = [random_momentum_coefficients(grid, 2, rng) for _ in range(n_directions)]
    quotients = []
    for h in directions:
        h = fn.tangent_project(w, fn._mom(h), grid)
        hn = fn.h_half_norm(h, grid)
        if hn == 0.0:
            quotients.append(0.0)
            continue
        h = h / hn
        fp = _curve_slope(w, h, eps, config, model, base.state.u, inner_tol)
        fm = _curve_slope(w, h, -eps, config, model, base.state.u, inner_tol)
        quotients.append((fp - fm) / (2.0 * eps))
    return HessianProbe(quotients, float(min(quotients)), len(quotients))


def with_overrides(config: SolverConfig, **kw) -> SolverConfig:
    return replace(config, **kw)
