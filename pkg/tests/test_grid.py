import numpy as np
import pytest

from maxdirac.grid import (
    SpectralGrid,
    SpinorField,
    constant_field,
    inner_h_half,
    inner_l2,
    norm_h_half,
    norm_l2,
    plane_wave,
    random_field,
    transform,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        SpectralGrid(7, 1.0)
    with pytest.raises(ValueError):
        SpectralGrid(8, 0.0)
    with pytest.raises(ValueError):
        SpectralGrid(0, 1.0)


def test_lattice_contains_zero_once(grid16):
    assert np.count_nonzero(grid16.p2 == 0) == 1
    assert grid16.p2[0, 0, 0] == 0
    # negative Nyquist convention
    assert grid16.signed_index.min() == -8 and grid16.signed_index.max() == 7


def test_field_shape_checked(grid16):
    with pytest.raises(ValueError):
        SpinorField(grid16, np.zeros((4, 8, 8, 8)))
    with pytest.raises(ValueError):
        SpinorField(grid16, np.zeros((4,) + grid16.shape), "fourier")


def test_constant_field_is_single_mode(grid16):
    c = constant_field(grid16, [1, 2j, 0, 1])
    m = c.momentum_values()
    nz = np.argwhere(np.abs(m).max(axis=0) > 1e-12)
    assert nz.tolist() == [[0, 0, 0]]
    assert norm_l2(c) == pytest.approx(1.0, abs=1e-13)
    assert norm_h_half(c) ** 2 == pytest.approx(1.0, abs=1e-13)


def test_plane_wave_single_mode_and_h_half(grid16):
    # |p| = 1 needs dp = 1: a box of length 2 pi
    g = SpectralGrid(16, 2 * np.pi)
    f = plane_wave(g, (0, 1, 0), [1, 0])
    m = f.momentum_values()
    nz = np.argwhere(np.abs(m).max(axis=0) > 1e-12)
    assert nz.tolist() == [[0, 1, 0]]
    assert norm_h_half(f) ** 2 == pytest.approx(np.sqrt(2.0), rel=1e-13)
    other = plane_wave(g, (2, 0, -1), [1, 0])
    assert abs(inner_l2(f, other)) < 1e-13


def test_round_trip_and_parseval(grid16, rng):
    for _ in range(50):
        v = rng.standard_normal((4,) + grid16.shape) + 1j * rng.standard_normal((4,) + grid16.shape)
        f = SpinorField(grid16, v, "position")
        back = transform(transform(f, "momentum"), "position")
        assert np.max(np.abs(back.values - v)) <= 1e-12 * np.max(np.abs(v))
        pos = inner_l2(f, f).real
        mom = inner_l2(f.to("momentum"), f.to("momentum")).real
        assert abs(pos - mom) <= 1e-12 * pos


def test_inner_products(grid16, rng):
    f = random_field(grid16, 4, rng, band_limit=None)
    g = random_field(grid16, 4, rng, band_limit=None)
    assert inner_l2(f, g) == pytest.approx(np.conj(inner_l2(g, f)), abs=1e-14)
    assert inner_l2(f, f).imag == pytest.approx(0.0, abs=1e-15)
    assert norm_l2(f) == pytest.approx(1.0, abs=1e-13)
    assert inner_h_half(f, f).real >= inner_l2(f, f).real
    with pytest.raises(ValueError):
        inner_l2(f, random_field(grid16, 2, rng))
    with pytest.raises(ValueError):
        inner_l2(f, random_field(SpectralGrid(8, 10.0), 4, rng))


def test_transform_linear(grid16, rng):
    f = random_field(grid16, 2, rng).to("position")
    g = random_field(grid16, 2, rng).to("position")
    lhs = (2.5j * f + g).to("momentum").values
    rhs = 2.5j * f.to("momentum").values + g.to("momentum").values
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_band_mask(grid16):
    mask = grid16.band_mask()
    kept = np.abs(grid16.signed_index) <= 16 / 3
    assert mask.sum() == kept.sum() ** 3
