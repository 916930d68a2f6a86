import numpy as np
import pytest
from numpy.testing import assert_allclose

from beamadapt import (
    ActivationMask,
    DegenerateMaskError,
    Direction,
    ElementPattern,
    PlanarArrayGeometry,
    array_factor,
    element_gain,
    receive_gain,
    steering_weights,
)
from beamadapt.array import af_power_map, af_power_points, direction_cosines


def brute_force_af(geom, mask, steer, eval_dir):
    """Independent oracle: direct complex sum over 3-D element positions."""

    def unit(d):
        t, p = np.radians(d.theta), np.radians(d.psi)
        return np.array([np.cos(t) * np.sin(p), np.sin(t), np.cos(t) * np.cos(p)])

    k0 = 2 * np.pi / geom.wavelength
    ks, ke = k0 * unit(steer), k0 * unit(eval_dir)
    total = 0j
    for pos, active in zip(geom.element_positions(), mask.grid.ravel()):
        if active:
            total += np.exp(1j * ks @ pos) * np.exp(-1j * ke @ pos)
    return total


class TestGeometry:
    def test_positions_are_centered(self, geom16):
        assert_allclose(geom16.element_positions().mean(axis=0), np.zeros(3), atol=1e-15)

    def test_lattice_mapping(self):
        geom = PlanarArrayGeometry(rows=3, cols=2, spacing=0.5, carrier_frequency=28e9)
        pitch = 0.5 * geom.wavelength
        pos = geom.element_positions().reshape(3, 2, 3)
        # element (m, n) sits at ((m - 1) pitch, (n - 0.5) pitch, 0)
        assert_allclose(pos[0, 0], [-pitch, -0.5 * pitch, 0.0])
        assert_allclose(pos[2, 1], [pitch, 0.5 * pitch, 0.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            PlanarArrayGeometry(rows=0, cols=4)
        with pytest.raises(ValueError):
            PlanarArrayGeometry(rows=4, cols=4, spacing=-0.1)

    def test_direction_validation(self):
        with pytest.raises(ValueError):
            Direction(91.0, 0.0)
        with pytest.raises(ValueError):
            Direction(0.0, 180.0)


class TestElementGain:
    def test_boresight_peak(self, pattern):
        assert element_gain(pattern, Direction(0.0, 0.0)) == pytest.approx(8.0)

    def test_half_beamwidth_is_3db(self):
        # 12 * (32.5 / 65)^2 = 3 dB of attenuation
        pat = ElementPattern(theta_3db=65.0, psi_3db=65.0, g_max=8.0)
        assert element_gain(pat, Direction(32.5, 0.0)) == pytest.approx(5.0)

    def test_attenuation_clamps_at_front_back_ratio(self):
        # 12 (90/50)^2 = 38.9 dB exceeds both limits, so the total clamps at a_m
        pat = ElementPattern(theta_3db=50.0, psi_3db=50.0, sl_v=30.0, a_m=30.0, g_max=8.0)
        assert element_gain(pat, Direction(90.0, 0.0)) == pytest.approx(-22.0)

    def test_bounds_everywhere(self, pattern):
        rng = np.random.default_rng(1)
        for _ in range(300):
            d = Direction(rng.uniform(-90, 90), rng.uniform(-180, 180))
            g = element_gain(pattern, d)
            assert pattern.g_max - pattern.a_m <= g <= pattern.g_max


class TestArrayFactor:
    def test_boresight_weights_equal(self, geom16):
        w = steering_weights(geom16, Direction(0.0, 0.0))
        assert_allclose(w, np.ones((16, 16)), atol=1e-12)
        assert_allclose(np.abs(w), 1.0)

    def test_matched_steer_peak_small(self):
        geom = PlanarArrayGeometry(rows=2, cols=1)
        af = array_factor(geom, ActivationMask.full(2, 1), Direction(0, 0), Direction(0, 0))
        assert abs(af) == pytest.approx(2.0, rel=1e-9)

    def test_matched_steer_peak_steered(self, geom16):
        steer = Direction(10.0, 20.0)
        af = array_factor(geom16, ActivationMask.full(16, 16), steer, steer)
        assert abs(af) == pytest.approx(256.0, rel=1e-9)
        assert af.real == pytest.approx(256.0, rel=1e-9)

    def test_matched_steer_peak_random_masks(self, geom16):
        rng = np.random.default_rng(7)
        for _ in range(20):
            grid = rng.random((16, 16)) < rng.uniform(0.1, 0.9)
            if not grid.any():
                continue
            mask = ActivationMask(grid)
            steer = Direction(rng.uniform(-60, 60), rng.uniform(-170, 170))
            af = array_factor(geom16, mask, steer, steer)
            assert abs(af) == pytest.approx(mask.active_count, rel=1e-9)

    def test_half_wavelength_pair_null_along_axis(self):
        geom = PlanarArrayGeometry(rows=2, cols=1, spacing=0.5)
        mask = ActivationMask.full(2, 1)
        af = array_factor(geom, mask, Direction(0, 0), Direction(0, 90.0))
        assert abs(af) < 1e-12

    def test_single_element_af_is_unity(self, geom16):
        grid = np.zeros((16, 16), dtype=bool)
        grid[3, 11] = True
        mask = ActivationMask(grid)
        rng = np.random.default_rng(3)
        for _ in range(25):
            d = Direction(rng.uniform(-90, 90), rng.uniform(-180, 180))
            assert abs(array_factor(geom16, mask, Direction(0, 0), d)) == pytest.approx(1.0)

    def test_adding_element_increases_peak(self, geom16):
        rng = np.random.default_rng(11)
        steer = Direction(5.0, -30.0)
        grid = rng.random((16, 16)) < 0.3
        grid[0, 0] = True
        mask = ActivationMask(grid)
        peak = abs(array_factor(geom16, mask, steer, steer))
        off = np.argwhere(~grid)
        m, n = off[rng.integers(len(off))]
        grid2 = grid.copy()
        grid2[m, n] = True
        peak2 = abs(array_factor(geom16, ActivationMask(grid2), steer, steer))
        assert peak2 == pytest.approx(peak + 1.0, rel=1e-9)

    def test_symmetric_mask_pattern_symmetry(self, geom16):
        # masks invariant under 180-degree rotation give |AF(t, p)| == |AF(-t, p+180)|
        rng = np.random.default_rng(5)
        grid = rng.random((16, 16)) < 0.4
        grid |= grid[::-1, ::-1]
        mask = ActivationMask(grid)
        bore = Direction(0.0, 0.0)
        for _ in range(25):
            t = rng.uniform(-89, 89)
            p = rng.uniform(-179, 0)
            a = abs(array_factor(geom16, mask, bore, Direction(t, p)))
            b = abs(array_factor(geom16, mask, bore, Direction(-t, p + 180.0)))
            assert a == pytest.approx(b, abs=1e-9)

    def test_against_brute_force_positions(self):
        geom = PlanarArrayGeometry(rows=4, cols=3, spacing=0.7, carrier_frequency=28e9)
        rng = np.random.default_rng(17)
        grid = rng.random((4, 3)) < 0.6
        grid[1, 1] = True
        mask = ActivationMask(grid)
        steer = Direction(12.0, -40.0)
        for _ in range(10):
            d = Direction(rng.uniform(-90, 90), rng.uniform(-180, 180))
            got = array_factor(geom, mask, steer, d)
            want = brute_force_af(geom, mask, steer, d)
            assert got == pytest.approx(want, abs=1e-9)

    def test_empty_mask_raises(self, geom16):
        mask = ActivationMask(np.zeros((16, 16), dtype=bool))
        with pytest.raises(DegenerateMaskError):
            array_factor(geom16, mask, Direction(0, 0), Direction(0, 0))

    def test_vectorized_paths_match_scalar(self, geom16):
        rng = np.random.default_rng(23)
        grid = rng.random((16, 16)) < 0.5
        grid[8, 8] = True
        mask = ActivationMask(grid)
        steer = Direction(3.0, 7.0)
        theta = rng.uniform(-30, 30, size=8)
        psi = rng.uniform(-30, 30, size=8)
        flat = af_power_points(geom16, mask, steer, theta, psi)
        grid_pw = af_power_map(geom16, mask, steer, theta, psi)
        for i in range(8):
            want = abs(array_factor(geom16, mask, steer, Direction(theta[i], psi[i]))) ** 2
            assert flat[i] == pytest.approx(want, rel=1e-9)
            assert grid_pw[i, i] == pytest.approx(want, rel=1e-9)


class TestReceiveGain:
    def test_full_array_boresight(self, geom16, pattern):
        bore = Direction(0.0, 0.0)
        g = receive_gain(geom16, pattern, ActivationMask.full(16, 16), bore, bore)
        assert g == pytest.approx(10 * np.log10(256) + 8.0, abs=1e-9)

    def test_single_element_boresight(self, geom16, pattern):
        grid = np.zeros((16, 16), dtype=bool)
        grid[7, 7] = True
        bore = Direction(0.0, 0.0)
        g = receive_gain(geom16, pattern, ActivationMask(grid), bore, bore)
        assert g == pytest.approx(8.0, abs=1e-9)

    def test_null_hits_floor(self, pattern):
        geom = PlanarArrayGeometry(rows=2, cols=1, spacing=0.5)
        bore = Direction(0.0, 0.0)
        null = Direction(0.0, 90.0)
        g = receive_gain(geom, pattern, ActivationMask.full(2, 1), bore, null)
        assert g == pytest.approx(-250.0 + element_gain(pattern, null), abs=1e-6)

    def test_direction_cosines_convention(self):
        vx, vy = direction_cosines(0.0, 90.0)
        assert (vx, vy) == pytest.approx((1.0, 0.0))
        vx, vy = direction_cosines(90.0, 0.0)
        assert (vx, vy) == pytest.approx((0.0, 1.0), abs=1e-15)
