import numpy as np
import pytest
from hypothesis import given, strategies as st

from warpwalk.eigenmodes import ModeIndex, eigenmode_profile
from warpwalk.geometry import WarpGeometry
from warpwalk.lattice import (
    CoinState, SpinorField, build_grid, field_norm, localized_state, mirror_y,
    normalize, plane_wave_mode_state, z2_residual,
)


def test_grid_spacing():
    assert build_grid(1.0, 100, 0).epsilon == 0.02
    assert build_grid(1.0, 200, 0).epsilon == 0.01


def test_grid_rejects_odd_and_small():
    with pytest.raises(ValueError, match="even"):
        build_grid(1.0, 7, 0)
    with pytest.raises(ValueError):
        build_grid(1.0, 2, 0)
    with pytest.raises(ValueError):
        build_grid(1.0, 10, -1)


def test_wrap_identifies_brane_sites():
    g = build_grid(1.0, 100)
    assert g.wrap(50) == -50
    assert g.index(50) == 0


@given(st.integers(-10_000, 10_000), st.sampled_from([4, 10, 50, 100]))
def test_wrap_is_periodic(s, n_y):
    g = build_grid(1.0, n_y)
    w = g.wrap(s)
    assert g.wrap(s + n_y) == w
    assert -n_y // 2 <= w < n_y // 2


def test_coin_state_validation():
    with pytest.raises(ValueError):
        CoinState(1.0, 1.0)
    c = CoinState.normalized(1, 2j)
    assert abs(c.up) ** 2 + abs(c.down) ** 2 == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("coin", [(1, 1j), (1, 2j)])
def test_localized_state_single_site_unit_norm(coin):
    g = build_grid(1.0, 100, 3)
    f = localized_state(g, 0.5, CoinState.normalized(*coin))
    assert np.count_nonzero(np.any(f.psi != 0, axis=0)) == 1
    assert field_norm(f) == pytest.approx(1.0, abs=1e-12)
    assert f.step_index == 0
    assert np.all(f.column(0)[:, g.index(25)] != 0)


def test_localized_state_off_lattice():
    g = build_grid(1.0, 100)
    with pytest.raises(ValueError, match="snap"):
        localized_state(g, 0.013, CoinState(1, 0))


def test_localized_mirror_image_is_covariant():
    g = build_grid(1.0, 40)
    for eta in (1, -1):
        f = localized_state(g, 0.5, CoinState.normalized(1, 1j), mirror_eta=eta)
        assert z2_residual(f, eta) == 0.0
        assert field_norm(f) == pytest.approx(1.0, abs=1e-14)


def test_z2_residual_examples(rng):
    g = build_grid(1.0, 20, 2)
    assert z2_residual(localized_state(g, 0.0, CoinState(1, 0)), 1) == 0.0
    psi = rng.normal(size=(2, 5, 20)) + 1j * rng.normal(size=(2, 5, 20))
    assert z2_residual(SpinorField(g, psi, -2), 1) > 0
    assert z2_residual(SpinorField(g, psi, -2), -1) > 0


def test_mirror_is_involution(rng):
    g = build_grid(1.0, 16, 1)
    f = SpinorField(g, rng.normal(size=(2, 3, 16)) + 0j, -1)
    for eta in (1, -1):
        np.testing.assert_array_equal(mirror_y(mirror_y(f, eta), eta).psi, f.psi)


def test_norm_scaling_and_normalize():
    g = build_grid(1.0, 20, 1)
    f = localized_state(g, 0.2, CoinState(1, 0))
    f2 = f.copy()
    f2.psi *= 2
    assert field_norm(f2) == pytest.approx(4 * field_norm(f))
    assert field_norm(normalize(f2)) == pytest.approx(1.0)
    z = f.copy()
    z.psi[:] = 0
    with pytest.raises(ValueError):
        normalize(z)


@pytest.mark.parametrize("eta", [1, -1])
def test_plane_wave_mode_state(eta):
    geom = WarpGeometry.from_kL(3.0)
    g = build_grid(1.0, 100, 6)
    prof = eigenmode_profile(geom, g, ModeIndex(2, 1, eta), 10.0)
    f = plane_wave_mode_state(g, prof)
    assert f.step_index == 0
    assert field_norm(f) == pytest.approx(1.0, abs=1e-12)
    assert z2_residual(f, eta) < 1e-12
    per_r = np.sum(np.abs(f.psi) ** 2, axis=(0, 2))
    assert per_r.max() / per_r.min() == pytest.approx(1.0, abs=1e-12)


def test_plane_wave_rejects_outside_zone():
    geom = WarpGeometry.from_kL(3.0)
    g = build_grid(1.0, 20, 1)
    prof = eigenmode_profile(geom, g, ModeIndex(1, 1, 1), 200.0)
    with pytest.raises(ValueError, match="Brillouin"):
        plane_wave_mode_state(g, prof)
