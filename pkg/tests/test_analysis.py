import numpy as np
import pytest

from warpwalk.analysis import (
    FpdSlice, ObservableSeries, binary_entropy, coin_density_matrix, dft_momenta, entropy,
    expected_y, extract_fpd, fpd_from_column, marginal_with_up_share, marginal_y,
    mode_decompose, reconstruct_field, s_min,
)
from warpwalk.eigenmodes import ModeIndex, build_basis, eigenmode_profile
from warpwalk.evolution import FrontTracker, WalkEngine, run, step, step_high_kl_limit
from warpwalk.geometry import WarpGeometry
from warpwalk.lattice import (
    CoinState, SpinorField, build_grid, localized_state, plane_wave_mode_state,
)

G3 = WarpGeometry.from_kL(3.0)


def test_marginal_of_localized_state_is_a_delta():
    grid = build_grid(1.0, 20)
    p, share = marginal_with_up_share(localized_state(grid, 0.3, CoinState.normalized(1, 2j)))
    i = grid.index(grid.site_of(0.3))
    expected = np.zeros(20)
    expected[i] = 1 / grid.epsilon
    np.testing.assert_allclose(p, expected, atol=1e-12)
    assert share[i] == pytest.approx(0.2)
    assert share.sum() == pytest.approx(0.2)


def test_marginal_of_plane_wave_mode_is_profile_density():
    grid = build_grid(1.0, 100, 12)
    prof = eigenmode_profile(G3, grid, ModeIndex(2), 10.0)
    p = marginal_y(plane_wave_mode_state(grid, prof))
    np.testing.assert_allclose(p, np.sum(np.abs(prof.samples) ** 2, axis=0), atol=1e-12)


def test_marginal_column_window_and_zero_field():
    grid = build_grid(1.0, 10, 2)
    psi = np.zeros((2, 5, 10), dtype=complex)
    psi[0, 0, 1] = 1.0  # r = -2
    psi[1, 2, 4] = 1.0  # r = 0
    f = SpinorField(grid, psi, -2)
    p = marginal_y(f, columns=(-1, 1))
    assert p[4] * grid.epsilon == pytest.approx(1.0) and p[1] == 0
    with pytest.raises(ValueError):
        marginal_y(SpinorField(grid, np.zeros_like(psi), -2))


def test_fpd_weights_in_limit_map():
    grid = build_grid(1.0, 20)
    c0 = CoinState.normalized(1, 2j)
    f = localized_state(grid, 0.5, c0)
    with pytest.raises(ValueError):
        extract_fpd(f, "right")
    for _ in range(5):
        f = step_high_kl_limit(f)
    right, left = extract_fpd(f, "right"), extract_fpd(f, "left")
    assert right.weight == pytest.approx(0.2, abs=1e-14)
    assert left.weight == pytest.approx(0.8, abs=1e-14)
    assert right.t == pytest.approx(5 * grid.epsilon)
    with pytest.raises(ValueError):
        extract_fpd(f, "up")


def test_fpd_weights_bounded_in_full_walk():
    grid = build_grid(1.0, 40)
    f = run(WalkEngine(G3, grid), localized_state(grid, 0.5, CoinState.normalized(1, 1j)), 30)
    right, left = extract_fpd(f, "right"), extract_fpd(f, "left")
    assert 0 <= right.weight and 0 <= left.weight and right.weight + left.weight <= 1
    rn = right.renormalized()
    assert grid.epsilon * np.sum(np.abs(rn) ** 2) == pytest.approx(1.0, abs=1e-14)


def _slice(grid, weights):
    samples = np.zeros((2, grid.n_y), dtype=complex)
    samples[0] = np.sqrt(weights)
    return fpd_from_column(samples, "right", 3, grid)


def test_expected_y_examples():
    grid = build_grid(1.0, 20)
    w = np.zeros(20)
    w[grid.index(-4)] = 1.0
    s = _slice(grid, w)
    assert expected_y(s, folded=False) == pytest.approx(-0.4)
    assert expected_y(s) == pytest.approx(0.4)
    w = np.zeros(20)
    w[grid.index(3)] = w[grid.index(-3)] = 2.0
    s = _slice(grid, w)
    assert expected_y(s, folded=False) == pytest.approx(0.0, abs=1e-15)
    assert expected_y(s) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        expected_y(_slice(grid, np.zeros(20)))
    with pytest.raises(ValueError):
        expected_y(s, build_grid(1.0, 10))


def test_expected_y_settles_in_long_run():
    grid = build_grid(1.0, 100)
    tr = FrontTracker(WalkEngine(G3, grid), localized_state(grid, 0.5, CoinState.normalized(1, 1j)))
    ys = []
    for j in range(1, 4001):
        tr.advance()
        ys.append(expected_y(fpd_from_column(tr.front("right"), "right", j, grid)))
    ys = np.array(ys)
    third, last = ys[2000:3000], ys[3000:]
    assert np.ptp(last) < np.ptp(third)
    ext = [i for i in range(1, len(last) - 1) if (last[i] - last[i - 1]) * (last[i + 1] - last[i]) < 0]
    amps = np.abs(np.diff(last[ext]))
    assert np.all(np.diff(amps) <= 0)


def test_front_relaxation_time_grows_with_warp():
    # the right front evolves by its own tridiagonal transfer matrix; the
    # gap between its two largest eigenvalue moduli sets the relaxation time
    grid = build_grid(1.0, 100)
    taus = []
    for kL in (1.0, 3.0, 5.0, 7.0):
        engine = WalkEngine(WarpGeometry.from_kL(kL), grid)
        c = engine.coeffs
        n = grid.n_y
        t = np.diag(c["uu0"]).astype(complex)
        for i in range(n):
            t[i, (i + 1) % n] += c["uup"][i]
            t[i, (i - 1) % n] += c["uum"][i]
        f = localized_state(grid, 0.5, CoinState(1, 0))
        tr = FrontTracker(engine, f)
        v = f.column(0)[0]
        for _ in range(5):
            tr.advance()
            v = t @ v
        np.testing.assert_allclose(tr.front("right")[0], v, atol=1e-13)
        a = np.sort(np.abs(np.linalg.eigvals(t)))[::-1]
        taus.append(grid.epsilon / np.log(a[0] / a[1]))
    assert np.all(np.diff(taus) > 0)


def test_plane_wave_occupies_single_bin():
    grid = build_grid(1.0, 100, 15)
    qs = dft_momenta(31, grid.epsilon)
    q = qs[np.argmin(np.abs(qs - 10.0))]
    prof = eigenmode_profile(G3, grid, ModeIndex(2), q)
    f = plane_wave_mode_state(grid, prof)
    bases = [build_basis(G3, grid, qq) for qq in qs]
    dec = mode_decompose(f, bases)
    bn = dec.by_n()
    assert bn[2] / dec.total >= 1 - 1e-6
    occupied = [m for m, b in enumerate(dec.beta) if np.sum(np.abs(b) ** 2) > 1e-20]
    assert [dec.qs[m] for m in occupied] == [q]
    assert dec.argmax_n() == 2


def _sym_field_and_bases(n_y=20, hw=6):
    grid = build_grid(1.0, n_y, hw)
    engine = WalkEngine(G3, grid)
    f = run(engine, localized_state(grid, 0.3, CoinState.normalized(1, 1j), mirror_eta=1), 4)
    bases = [build_basis(G3, grid, q) for q in dft_momenta(f.n_x, grid.epsilon)]
    return f, bases


def test_full_field_weights_sum_to_one_and_round_trip():
    f, bases = _sym_field_and_bases()
    dec = mode_decompose(f, bases)
    assert dec.total == pytest.approx(1.0, abs=1e-12)
    back = reconstruct_field(dec, bases, f.r_values)
    assert np.abs(back - f.psi).max() < 1e-10


def test_phase_invariance_of_observables():
    f, bases = _sym_field_and_bases()
    g = SpinorField(f.grid, f.psi * np.exp(0.7j), f.r_min, f.step_index)
    np.testing.assert_allclose(marginal_y(g), marginal_y(f), atol=1e-14)
    assert abs(entropy(g) - entropy(f)) < 1e-14
    for side in ("right", "left"):
        assert abs(expected_y(extract_fpd(g, side)) - expected_y(extract_fpd(f, side))) < 1e-14
    a, b = mode_decompose(f, bases).B, mode_decompose(g, bases).B
    assert max(abs(a[k] - b[k]) for k in a) < 1e-14


def test_decompose_rejects_mismatch():
    f, bases = _sym_field_and_bases()
    with pytest.raises(ValueError):
        mode_decompose(f, bases[:-1])
    with pytest.raises(ValueError):
        mode_decompose(f, bases[1:] + bases[:1])
    with pytest.raises(TypeError):
        mode_decompose(np.zeros(3), bases)
    with pytest.raises(ValueError):
        mode_decompose(f, [])


def test_front_slice_decomposition_weights():
    grid = build_grid(1.0, 40)
    f = run(WalkEngine(G3, grid), localized_state(grid, 0.5, CoinState.normalized(1, 1j), mirror_eta=1), 20)
    right = extract_fpd(f, "right")
    bases = [build_basis(G3, grid, q) for q in dft_momenta(16, grid.epsilon)]
    dec = mode_decompose(right, bases)
    # every bin sees the whole slice up to a phase, so each carries
    # eps * weight and the momentum integral returns the slice weight
    per_bin = [np.sum(np.abs(b) ** 2) for b in dec.beta]
    np.testing.assert_allclose(per_bin, grid.epsilon * right.weight, rtol=1e-10)
    assert dec.total == pytest.approx(right.weight, rel=1e-10)


def test_entropy_examples():
    grid = build_grid(1.0, 10)
    f = localized_state(grid, 0.2, CoinState.normalized(1, 2j))
    assert entropy(f) == 0.0
    psi = np.zeros((2, 1, 10), dtype=complex)
    psi[0, 0, 1] = psi[1, 0, 6] = 1 / (np.sqrt(2) * grid.epsilon)
    mixed = SpinorField(grid, psi, 0)
    np.testing.assert_allclose(coin_density_matrix(mixed), np.eye(2) / 2, atol=1e-15)
    assert entropy(mixed) == pytest.approx(1.0, abs=1e-15)


def test_entropy_floor_in_limit_map():
    grid = build_grid(1.0, 20)
    f = localized_state(grid, 0.5, CoinState.normalized(1, 2j))
    for _ in range(3):
        f = step_high_kl_limit(f)
    assert entropy(f) == pytest.approx(0.721928, abs=1e-6)


def test_s_min_examples():
    assert s_min(CoinState(1, 0)) == 0.0
    assert s_min(CoinState.normalized(1, 1j)) == pytest.approx(1.0, abs=1e-15)
    assert s_min(CoinState.normalized(1, 2j)) == pytest.approx(0.721928, abs=1e-6)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0


def test_entropy_bounded_during_walk():
    grid = build_grid(1.0, 40)
    engine = WalkEngine(WarpGeometry.from_kL(1.0), grid)
    f = localized_state(grid, 0.5, CoinState.normalized(1, 2j))
    for _ in range(60):
        f = step(engine, f)
        assert 0.0 <= entropy(f) <= 1.0


def test_entropy_decreases_with_warp_at_fixed_time():
    grid = build_grid(1.0, 100)
    c0 = CoinState.normalized(1, 2j)
    s = []
    for kL in (1.0, 3.0, 5.0):
        f = run(WalkEngine(WarpGeometry.from_kL(kL), grid), localized_state(grid, 0.5, c0), 250)
        s.append(entropy(f))
    assert s[0] > s[1] > s[2] > s_min(c0)


def test_observable_series():
    s = ObservableSeries(("t", "a", "b"))
    s.append(0.0, [(1, 2)])
    s.append(0.5, [(3, 4), (5, 6)])
    assert len(s) == 2
    assert list(s.rows()) == [(0.0, 1, 2), (0.5, 3, 4), (0.5, 5, 6)]
    with pytest.raises(ValueError):
        s.append(0.5, [(1, 2)])
    with pytest.raises(ValueError):
        s.append(1.0, [(1,)])


def test_fpd_slice_zero_weight():
    grid = build_grid(1.0, 10)
    s = fpd_from_column(np.zeros((2, 10)), "left", 2, grid)
    assert s.weight == 0 and s.up_share == 0.0
    with pytest.raises(ValueError):
        s.renormalized()
    with pytest.raises(ValueError):
        fpd_from_column(np.zeros((2, 10)), "middle", 2, grid)
    assert isinstance(s, FpdSlice)
