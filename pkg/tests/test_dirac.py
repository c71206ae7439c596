import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxdirac.dirac import (
    apply_d_fw,
    apply_free_dirac,
    apply_sqrt_operator,
    dirac_matrices,
    form_d_fw,
    free_symbol,
    fw_symbol,
    fw_symbol_at,
    fw_transform,
    project,
)
from maxdirac.grid import SpectralGrid, SpinorField, constant_field, inner_l2, norm_h_half, norm_l2, random_field

momentum = st.lists(st.floats(-50, 50, allow_nan=False), min_size=3, max_size=3)


def test_clifford_relations():
    m = dirac_matrices()
    eye = np.eye(4)
    for j in range(3):
        assert np.allclose(m.alpha[j], m.alpha[j].conj().T)
        assert np.allclose(m.alpha[j] @ m.beta + m.beta @ m.alpha[j], 0)
        for k in range(3):
            anti = m.alpha[j] @ m.alpha[k] + m.alpha[k] @ m.alpha[j]
            assert np.allclose(anti, 2 * (j == k) * eye, atol=0)
    assert np.allclose(m.beta @ m.beta, eye, atol=0)
    assert np.allclose(m.sigma[1], [[0, -1j], [1j, 0]])


def test_symbol_at_zero():
    pt = fw_symbol_at([0, 0, 0])
    assert (pt.lam, pt.a_plus, pt.a_minus) == (1.0, 1.0, 0.0)
    assert np.array_equal(pt.U, np.eye(4))


def test_symbol_unit_z():
    pt = fw_symbol_at([0, 0, 1])
    assert pt.lam == pytest.approx(np.sqrt(2))
    assert pt.a_plus == pytest.approx(np.cos(np.pi / 8), abs=1e-15)
    assert pt.a_minus == pytest.approx(np.sin(np.pi / 8), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(momentum)
def test_diagonalization_property(p):
    pt = fw_symbol_at(p)
    beta = dirac_matrices().beta
    assert np.max(np.abs(pt.U @ pt.U_inv - np.eye(4))) < 1e-13
    assert np.max(np.abs(pt.U @ pt.U.conj().T - np.eye(4))) < 1e-13
    assert np.max(np.abs(pt.U @ free_symbol(p) @ pt.U_inv - pt.lam * beta)) < 1e-12 * pt.lam
    assert pt.a_plus**2 + pt.a_minus**2 == pytest.approx(1.0, abs=1e-15)


def test_spectrum_doubly_degenerate(rng):
    for p in rng.normal(scale=5, size=(1000, 3)):
        ev = np.sort(np.linalg.eigvalsh(free_symbol(p)))
        lam = np.sqrt(p @ p + 1)
        assert np.allclose(ev, [-lam, -lam, lam, lam], atol=1e-10)


def test_grid_symbol_matches_dense(rng):
    g = SpectralGrid(8, 7.0)
    sym = fw_symbol(g)
    U, Uinv = sym.matrices()
    f = rng.standard_normal((4,) + g.shape) + 1j * rng.standard_normal((4,) + g.shape)
    dense = np.einsum("xyzab,bxyz->axyz", U, f)
    assert np.max(np.abs(sym.forward(f) - dense)) < 1e-14
    D = np.einsum("kxyz,kab->xyzab", g.momenta, dirac_matrices().alpha) + dirac_matrices().beta
    diag = U @ D @ Uinv
    target = g.lam[..., None, None] * dirac_matrices().beta
    assert np.max(np.abs(diag - target)) < 1e-12


def test_fw_transform_unitary(grid16, rng):
    f = random_field(grid16, 4, rng, band_limit=None)
    F = fw_transform(f, "forward")
    assert norm_l2(F) == pytest.approx(norm_l2(f), rel=1e-12)
    assert norm_h_half(F) == pytest.approx(norm_h_half(f), rel=1e-12)
    back = fw_transform(F, "inverse")
    assert np.max(np.abs(back.values - f.momentum_values())) < 1e-12
    c = constant_field(grid16, [1, 2, 3, 4])
    assert np.allclose(fw_transform(c).values, c.momentum_values(), atol=1e-15)
    with pytest.raises(ValueError):
        fw_transform(random_field(grid16, 2, rng))
    with pytest.raises(ValueError):
        fw_transform(f, "sideways")


def test_projector_algebra(grid16, rng):
    f = random_field(grid16, 4, rng, band_limit=None)
    g = random_field(grid16, 4, rng, band_limit=None)
    P, M = project(f, 1), project(f, -1)
    assert np.max(np.abs(project(P, 1).values - P.values)) < 1e-12
    assert np.max(np.abs(project(P, -1).values)) < 1e-12
    assert np.max(np.abs((P + M).values - f.momentum_values())) < 1e-12
    assert abs(inner_l2(P, M)) < 1e-12
    assert norm_l2(P) ** 2 + norm_l2(M) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(inner_l2(project(f, 1), g) - inner_l2(f, project(g, 1))) < 1e-12
    zero = SpinorField(grid16, np.zeros((4,) + grid16.shape), "momentum")
    assert np.all(project(zero, 1).values == 0)
    with pytest.raises(ValueError):
        project(f, 0)


def test_positive_block_fixed_by_projector(grid16, rng):
    sym = fw_symbol(grid16)
    w = random_field(grid16, 2, rng).values
    f = SpinorField(grid16, sym.inverse(np.concatenate([w, 0 * w])), "momentum")
    assert np.max(np.abs(project(f, 1).values - f.values)) < 1e-12
    assert np.max(np.abs(project(f, -1).values)) < 1e-12


def test_free_dirac_on_projectors(grid16, rng):
    f = random_field(grid16, 4, rng, band_limit=None)
    for s in (1, -1):
        P = project(f, s).values
        assert np.max(np.abs(apply_free_dirac(P, grid16) - s * grid16.lam * P)) < 1e-12


def test_sqrt_operator(grid16, rng):
    g = SpectralGrid(8, 2 * np.pi)
    from maxdirac.grid import plane_wave

    pw = plane_wave(g, (1, 0, 0), [1, 0, 0, 0])
    assert np.allclose(apply_sqrt_operator(pw).values, np.sqrt(2) * pw.momentum_values(), atol=1e-14)
    f = random_field(grid16, 4, rng)
    a = apply_sqrt_operator(project(f, 1)).values
    b = project(apply_sqrt_operator(f), 1).values
    assert np.max(np.abs(a - b)) < 1e-12


def test_d_fw_form(grid16, rng):
    f = random_field(grid16, 4, rng)
    v = f.values
    q = form_d_fw(f, f)
    lam = grid16.lam
    expected = (np.sum(lam * np.abs(v[:2]) ** 2) - np.sum(lam * np.abs(v[2:]) ** 2)) * grid16.momentum_cell
    assert q.real == pytest.approx(expected, rel=1e-12)
    assert abs(q.imag) < 1e-14
    assert np.allclose(apply_d_fw(f).values[2:], -lam * v[2:])
