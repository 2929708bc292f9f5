import mpmath
import numpy as np
import pytest

from conftest import random_unit
from multipoint.asymptotics import fit_loglog_slope
from multipoint.beam import (
    BeamDirection,
    SupportOverlapError,
    TestFunction,
    divergent_beam_transform,
    gplus_pairing,
    pairing_check_gplus,
    theorem5_check,
)
from multipoint.direct import ScattererSet

# int_0^1 exp(-1/(1 - t^2)) dt, mpmath at 40 digits
BUMP_RADIAL_INTEGRAL = 0.221996908084039718911524460585


def test_frozen_constant_against_oracle():
    mpmath.mp.dps = 40
    oracle = mpmath.quad(lambda t: mpmath.exp(-1 / (1 - t * t)), [0, 1])
    assert abs(float(oracle) - BUMP_RADIAL_INTEGRAL) < 1e-16


class TestDivergentBeam:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_centre_value(self, d, rng):
        phi = TestFunction(np.full(d, 0.3), 1.7)
        theta = random_unit(rng, d)
        assert divergent_beam_transform(phi, phi.center, theta) == pytest.approx(1.7 * BUMP_RADIAL_INTEGRAL, abs=1e-10)

    def test_centre_value_direction_free(self, rng):
        phi = TestFunction([0.0, 0.0, 0.0], 1.0)
        vals = [divergent_beam_transform(phi, phi.center, random_unit(rng, 3)) for _ in range(6)]
        assert np.ptp(vals) < 1e-12

    def test_ray_misses(self):
        phi = TestFunction([3.0, 0.0], 1.0)
        assert divergent_beam_transform(phi, [0.0, 0.0], [-1.0, 0.0]) == 0.0
        assert divergent_beam_transform(phi, [0.0, 0.0], [0.0, 1.0]) == 0.0

    def test_full_chord_is_twice_half(self):
        phi = TestFunction([3.0, 0.0], 1.0)
        assert divergent_beam_transform(phi, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(2 * BUMP_RADIAL_INTEGRAL, abs=1e-10)

    def test_direction_must_be_unit(self):
        with pytest.raises(ValueError):
            BeamDirection([1.0, 1.0])

    def test_bump_vanishes_outside(self):
        phi = TestFunction([0.0], 1.0)
        assert phi([[1.0], [1.5], [0.0]]).tolist() == [0.0, 0.0, np.exp(-1.0)]


class TestPairing:
    def test_d1_forward_support_exact(self):
        phi = TestFunction([2.0], 0.8)
        for kappa in (5.0, 50.0, 500.0):
            check = pairing_check_gplus(phi, [0.0], [kappa], kappa)
            assert check.defect <= 1e-14 * abs(check.rhs)

    @pytest.mark.parametrize("d", [2, 3])
    def test_slope_on_the_ray(self, d):
        theta = np.eye(d)[0]
        phi = TestFunction(3.0 * theta, 1.0)
        kappas = [50.0, 100.0, 200.0, 400.0]
        defects = [pairing_check_gplus(phi, np.zeros(d), kp * theta, kp).defect for kp in kappas]
        assert abs(fit_loglog_slope(kappas, defects) + 2) <= 0.3
        ratios = np.array(defects[1:]) / np.array(defects[:-1])
        assert np.all(np.abs(ratios - 0.25) <= 0.3 * 0.25)

    def test_d2_off_axis_support(self):
        # support meets the ray but is not centred on it
        theta = np.array([1.0, 0.0])
        phi = TestFunction([3.0, 0.5], 1.0)
        kappas = [50.0, 100.0, 200.0, 400.0]
        defects = [pairing_check_gplus(phi, [0.0, 0.0], kp * theta).defect for kp in kappas]
        assert abs(fit_loglog_slope(kappas, defects) + 2) <= 0.3

    def test_away_from_the_ray_both_sides_small(self):
        theta = np.array([1.0, 0.0, 0.0])
        phi = TestFunction([0.0, 3.0, 0.0], 1.0)
        for kappa in (50.0, 100.0):
            check = pairing_check_gplus(phi, np.zeros(3), kappa * theta)
            assert check.rhs == 0
            assert check.defect < 1e-3 / kappa**2

    @pytest.mark.parametrize("d", [2, 3])
    def test_halving_spacing(self, d):
        theta = random_unit(np.random.default_rng(7), d)
        phi = TestFunction(2.5 * theta + 0.3 * np.eye(d)[-1], 1.0)
        a = gplus_pairing(phi, np.zeros(d), 200.0 * theta)
        b = gplus_pairing(phi, np.zeros(d), 200.0 * theta, resolution=2.0)
        assert abs(a - b) < 1e-8

    def test_modulus_check(self):
        with pytest.raises(ValueError):
            pairing_check_gplus(TestFunction([3.0, 0.0], 1.0), [0.0, 0.0], [5.0, 0.0], kappa=6.0)


class TestScatteredWaveWeakForm:
    def test_empty(self):
        check = theorem5_check(ScattererSet.empty(2), TestFunction([3.0, 0.0], 1.0), [10.0, 0.0])
        assert check == (0j, 0j, 0.0)

    def test_overlap_rejected(self):
        s = ScattererSet(2, [[3.0, 0.2]], [1.0])
        with pytest.raises(SupportOverlapError):
            theorem5_check(s, TestFunction([3.0, 0.0], 1.0), [10.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            theorem5_check(ScattererSet(2, [[0, 0]], [1.0]), TestFunction([3.0, 0.0, 0.0], 1.0), [10.0, 0.0])

    @pytest.mark.parametrize("points,strengths", [([[0.0]], [1.0]), ([[0.0], [0.4]], [1.0, 2 - 1j])])
    def test_d1_slope(self, points, strengths):
        s = ScattererSet(1, points, strengths)
        phi = TestFunction([3.0], 1.0)
        kappas = [20.0, 40.0, 80.0, 160.0, 320.0]
        defects = [theorem5_check(s, phi, [kp]).defect for kp in kappas]
        assert abs(fit_loglog_slope(kappas, defects) + 2) <= 0.3

    def test_d2_bounded_ratio(self):
        s = ScattererSet(2, [[0.0, 0.0], [0.0, 0.5]], [1.0, 2 - 1j])
        phi = TestFunction([3.0, 0.2], 1.0)
        kappas = np.array([50.0, 100.0, 200.0, 400.0, 800.0])
        defects = np.array([theorem5_check(s, phi, [kp, 0.0]).defect for kp in kappas])
        scaled = defects * kappas * np.log(kappas) ** 3
        assert scaled.max() / scaled.min() < 5

    @pytest.mark.slow
    def test_d3_slope(self):
        s = ScattererSet(3, [[0.0, 0.0, 0.0], [0.0, 0.5, 0.0]], [1.0, 2 - 1j])
        phi = TestFunction([3.0, 0.0, 0.0], 1.0)
        kappas = [50.0, 100.0, 200.0, 400.0]
        defects = [theorem5_check(s, phi, [kp, 0.0, 0.0]).defect for kp in kappas]
        assert abs(fit_loglog_slope(kappas, defects) + 3) <= 0.4
