import numpy as np
import pytest

from maxdirac.dirac import apply_sqrt_operator
from maxdirac.grid import SpectralGrid, SpinorField, constant_field, norm_h_half, norm_l2, plane_wave, random_field
from maxdirac.halfspace import (
    XQuadrature,
    dirichlet_to_neumann,
    extend,
    h1_norm_optimal,
    quadrature_h1_norm,
    separable_perturbation,
)

UNIT_P = SpectralGrid(8, 2 * np.pi)  # dp = 1


def test_extension_profiles(grid16):
    c = constant_field(grid16, [1, 0, 0, 0])
    v = extend(c)
    x = v.quadrature.nodes
    assert np.allclose(v.values[:, 0, 0, 0, 0], c.momentum_values()[0, 0, 0, 0] * np.exp(-x))
    pw = plane_wave(UNIT_P, (0, 0, 1), [1, 0])
    vp = extend(pw)
    amp = vp.values[:, 0, 0, 0, 1]
    assert np.allclose(amp, amp[0] * np.exp(-np.sqrt(2) * (vp.quadrature.nodes - vp.quadrature.nodes[0])), rtol=1e-12)
    zero = SpinorField(grid16, np.zeros((4,) + grid16.shape))
    assert not np.any(extend(zero).values)


def test_boundary_value_is_trace(grid16, rng):
    u = random_field(grid16, 4, rng)
    v = extend(u)
    assert np.max(np.abs(v.trace().values - u.momentum_values())) <= 1e-12


def test_h1_norm_closed_form(grid16, rng):
    c = constant_field(grid16, [0, 1, 0, 0])
    assert h1_norm_optimal(c) == pytest.approx(1.0, abs=1e-12)
    assert h1_norm_optimal(plane_wave(UNIT_P, (1, 0, 0), [1, 1])) == pytest.approx(np.sqrt(2), abs=1e-12)
    for _ in range(20):
        u = random_field(grid16, 4, rng, band_limit=None)
        assert abs(h1_norm_optimal(u) - norm_h_half(u) ** 2) <= 1e-12


def test_dirichlet_to_neumann(grid16, rng):
    c = constant_field(grid16, [1, 0, 0, 0])
    assert np.allclose(dirichlet_to_neumann(c).values, c.momentum_values(), atol=1e-15)
    pw = plane_wave(UNIT_P, (0, 1, 0), [1, 0, 0, 0])
    assert np.allclose(dirichlet_to_neumann(pw).values, np.sqrt(2) * pw.momentum_values(), atol=1e-15)
    u = random_field(grid16, 4, rng, band_limit=None)
    assert np.max(np.abs(dirichlet_to_neumann(u).values - apply_sqrt_operator(u).values)) <= 1e-12


def test_quadrature_norm(grid16, rng):
    c = constant_field(grid16, [1, 0, 0, 0])
    assert quadrature_h1_norm(extend(c)) == pytest.approx(1.0, abs=1e-8)
    u = random_field(grid16, 4, rng)
    assert quadrature_h1_norm(extend(u)) == pytest.approx(h1_norm_optimal(u), abs=1e-6)
    zero = SpinorField(grid16, np.zeros((4,) + grid16.shape))
    assert quadrature_h1_norm(extend(zero)) == 0.0


def test_quadrature_converges():
    g = SpectralGrid(8, 4.0)
    u = random_field(g, 2, np.random.default_rng(5), band_limit=None)
    exact = h1_norm_optimal(u)
    errs = [abs(quadrature_h1_norm(extend(u, XQuadrature.gauss_laguerre(n))) - exact) for n in (4, 16, 64)]
    assert errs[0] > errs[1] > errs[2]


def test_optimal_extension_is_minimal(grid16, rng):
    u = random_field(grid16, 4, rng)
    v = extend(u)
    base = quadrature_h1_norm(v)
    for scale in (1.0, 0.1, 1e-3):
        g = scale * random_field(grid16, 4, rng, band_limit=None).values
        assert quadrature_h1_norm(v + separable_perturbation(grid16, v.quadrature, g)) >= base - 1e-8


def test_trace_estimate(grid16, rng):
    for _ in range(10):
        u = random_field(grid16, 4, rng, band_limit=None)
        assert norm_l2(u) ** 2 <= quadrature_h1_norm(extend(u)) + 1e-12


def test_incompatible_fields_do_not_add(grid16, rng):
    u = random_field(grid16, 2, rng)
    with pytest.raises(ValueError):
        extend(u) + extend(u, XQuadrature.gauss_laguerre(8))
