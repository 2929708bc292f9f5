import numpy as np
import pytest

from conftest import random_scene, random_unit
from multipoint.asymptotics import (
    Scale,
    charge_asymptotics,
    coupling_matrix,
    expansion_coefficient,
    expansion_coefficients,
    expansion_terms,
    fit_loglog_slope,
    leading_terms,
    order_probe,
    truncated_amplitude,
    truncation_errors,
)
from multipoint.direct import ScattererSet, WavePair, scattering_amplitude, solve_charges
from multipoint.inverse import second_order_cross_term


def pair_at(rng, d, kappa):
    return WavePair(kappa * random_unit(rng, d), kappa * random_unit(rng, d))


def fixed_family(rng, d):
    kh, lh = random_unit(rng, d), random_unit(rng, d)
    return lambda kappa: WavePair(kappa * kh, kappa * lh)


class TestCouplingMatrix:
    def test_d3_single(self):
        w = coupling_matrix(ScattererSet(3, [[0, 0, 0]], [0.4 + 1j]), 10.0)
        assert np.array_equal(w.entries, [[0.4 + 1j]])

    def test_d1_single(self):
        w = coupling_matrix(ScattererSet(1, [[0.3]], [1.0]), 10.0)
        assert w.entries[0, 0] == pytest.approx(0.5j)

    def test_d2_diagonal(self):
        w = coupling_matrix(ScattererSet(2, [[0, 0], [1, 0]], [0.25j, 1 + 0.25j]), 10.0)
        assert np.allclose(w.entries, np.diag([0, 1]))

    def test_d3_off_diagonal(self):
        w = coupling_matrix(ScattererSet(3, [[0, 0, 0], [0, 2, 0]], [1, 1]), 3.0)
        assert w.entries[0, 1] == pytest.approx(-np.exp(6j) / (8 * np.pi))

    def test_d1_zero_strength(self):
        with pytest.raises(ValueError):
            coupling_matrix(ScattererSet(1, [[0.0]], [0.0]), 1.0)


class TestCoefficients:
    @pytest.mark.parametrize("d", [2, 3])
    def test_m0(self, d, rng):
        s = random_scene(rng, 4, d)
        pair = pair_at(rng, d, 30.0)
        want = np.sum(np.exp(1j * s.points @ (pair.k - pair.l)))
        assert expansion_coefficient(s, 30.0, 0, pair) == pytest.approx(want, rel=1e-14)
        forward = WavePair(pair.k, pair.k)
        assert expansion_coefficient(s, 30.0, 0, forward) == pytest.approx(4)

    def test_d2_m1_forward(self, rng):
        s = random_scene(rng, 3, 2)
        k = 20.0 * random_unit(rng, 2)
        c1 = expansion_coefficient(s, 20.0, 1, WavePair(k, k))
        assert c1 == pytest.approx(np.sum(s.strengths - 0.25j), rel=1e-14)

    def test_d3_single_powers(self, rng):
        alpha, y = 0.8 - 0.3j, np.array([0.1, -0.2, 0.3])
        s = ScattererSet(3, [y], [alpha])
        pair = pair_at(rng, 3, 50.0)
        c = expansion_coefficients(s, 50.0, 6, pair).coefficients
        assert np.allclose(c, alpha ** np.arange(7) * np.exp(1j * (pair.k - pair.l) @ y), rtol=1e-13)

    def test_scale_label(self, rng):
        s = random_scene(rng, 2, 2)
        assert expansion_coefficients(s, 10.0, 1, pair_at(rng, 2, 10.0)).scale is Scale.inverse_log_kappa
        s3 = random_scene(rng, 2, 3)
        assert expansion_coefficients(s3, 10.0, 1, pair_at(rng, 3, 10.0)).scale is Scale.inverse_kappa

    def test_d2_needs_kappa_above_one(self, rng):
        s = random_scene(rng, 1, 2)
        with pytest.raises(ValueError):
            expansion_coefficients(s, 0.9, 1, pair_at(rng, 2, 0.9))

    def test_d2_coefficients_kappa_independent(self, rng):
        s = random_scene(rng, 3, 2)
        pair = pair_at(rng, 2, 10.0)
        a = expansion_coefficients(s, 10.0, 4, pair).coefficients
        b = expansion_coefficients(s, 1e5, 4, pair).coefficients
        assert np.array_equal(a, b)


class TestTruncation:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_increment_is_single_term(self, d, rng):
        s = random_scene(rng, 3, d)
        pair = pair_at(rng, d, 40.0)
        terms = expansion_terms(s, pair, 40.0, 5)
        for m in range(1, 6):
            inc = truncated_amplitude(s, pair, 40.0, m) - truncated_amplitude(s, pair, 40.0, m - 1)
            assert inc == pytest.approx(terms[m], rel=1e-12, abs=1e-15 * abs(terms[0]))

    def test_d3_m0_is_f31_over_kappa(self, rng):
        s = random_scene(rng, 3, 3)
        pair = pair_at(rng, 3, 80.0)
        assert truncated_amplitude(s, pair, 80.0, 0) == pytest.approx(leading_terms(s, pair).f31 / 80.0, rel=1e-14)

    def test_d1_m0_is_f11(self, rng):
        s = random_scene(rng, 3, 1)
        pair = pair_at(rng, 1, 80.0)
        assert truncated_amplitude(s, pair, 80.0, 0) == pytest.approx(leading_terms(s, pair).f11, rel=1e-14)

    def test_d1_single_geometric_series(self):
        alpha, kappa = 1.3 + 0.2j, 400.0
        s = ScattererSet(1, [[0.25]], [alpha])
        pair = WavePair([kappa], [-kappa])
        exact = scattering_amplitude(s, pair)
        assert abs(truncated_amplitude(s, pair, kappa, 40) - exact) < 1e-15

    @pytest.mark.parametrize("d", [1, 3])
    def test_converges_for_large_kappa(self, d, rng):
        s = random_scene(rng, 3, d, min_sep=0.2)
        w = coupling_matrix(s, 1.0).entries
        factor = np.linalg.norm(w, 2) * (1 if d == 1 else 4 * np.pi)
        kappa = 4 * factor
        pair = pair_at(rng, d, kappa)
        wk = coupling_matrix(s, kappa).entries
        bound = np.linalg.norm(wk, 2) * (1 if d == 1 else 4 * np.pi) / kappa
        assert bound < 0.5
        assert abs(truncated_amplitude(s, pair, kappa, 60) - scattering_amplitude(s, pair)) <= 1e-10


class TestLeadingTerms:
    def test_d2_forward(self, rng):
        s = random_scene(rng, 3, 2)
        k = 10.0 * random_unit(rng, 2)
        lt = leading_terms(s, WavePair(k, k))
        assert lt.f21 == pytest.approx(-3 / (2 * np.pi))
        assert lt.f22 == pytest.approx(np.sum(s.strengths - 0.25j))

    def test_d3_single_has_no_cross_term(self, rng):
        s = ScattererSet(3, [[0.1, 0.2, 0.3]], [1.0])
        assert leading_terms(s, pair_at(rng, 3, 10.0)).f322 == 0

    def test_d3_second_coefficient_identity(self, rng):
        # (-2/pi) C_1 reproduces f_32 = f_321 + f_322, not f_31 + f_32
        for _ in range(10):
            s = random_scene(rng, 4, 3)
            kappa = rng.uniform(10, 100)
            pair = pair_at(rng, 3, kappa)
            lt = leading_terms(s, pair)
            c1 = expansion_coefficient(s, kappa, 1, pair)
            assert (-2 / np.pi) * c1 == pytest.approx(lt.f32, rel=1e-12)
            assert abs((-2 / np.pi) * c1 - (lt.f31 + lt.f32)) > 1e-3 * abs(lt.f31)

    def test_cross_term_matches_inverse_module(self, rng):
        s = random_scene(rng, 3, 3)
        pair = pair_at(rng, 3, 25.0)
        assert leading_terms(s, pair).f322 == second_order_cross_term(s.points, pair)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_leading_order_weights(self, d, rng):
        s = random_scene(rng, 3, d)
        kappa = 60.0
        pair = pair_at(rng, d, kappa)
        lt = leading_terms(s, pair)
        if d == 1:
            want, order = lt.f11, 0
        elif d == 2:
            sl = 1 / np.log(kappa)
            want, order = sl * lt.f21 + sl**2 * lt.f22, 1
        else:
            want, order = lt.f31 / kappa + lt.f32 / kappa**2, 1
        assert truncated_amplitude(s, pair, kappa, order) == pytest.approx(want, rel=1e-13)


class TestCharges:
    def test_d1_m0(self, rng):
        s = random_scene(rng, 3, 1)
        k = np.array([30.0])
        assert np.allclose(charge_asymptotics(s, k, order=0), -np.exp(1j * s.points[:, 0] * 30) / s.strengths)

    def test_d2_m1(self, rng):
        s = random_scene(rng, 3, 2)
        k = 50.0 * random_unit(rng, 2)
        L = np.log(50.0)
        e = np.exp(1j * s.points @ k)
        want = -2 * np.pi / L * e + 4 * np.pi**2 / L**2 * (s.strengths - 0.25j) * e
        assert np.allclose(charge_asymptotics(s, k, order=1), want, rtol=1e-14)

    def test_d3_single_m1(self, rng):
        alpha, y = 0.6 + 0.1j, np.array([0.2, 0.0, -0.1])
        s = ScattererSet(3, [y], [alpha])
        kappa = 90.0
        k = kappa * random_unit(rng, 3)
        e = np.exp(1j * k @ y)
        want = -4j * np.pi / kappa * e - 16 * np.pi**2 / kappa**2 * alpha * e
        assert charge_asymptotics(s, k, order=1)[0] == pytest.approx(want, rel=1e-14)

    @pytest.mark.parametrize("d", [1, 3])
    def test_charges_converge(self, d, rng):
        s = random_scene(rng, 2, d, min_sep=0.3)
        k = 2000.0 * random_unit(rng, d)
        assert np.allclose(charge_asymptotics(s, k, order=40), solve_charges(s, k).values, rtol=1e-12)


class TestOrderProbe:
    def test_empty_scene_is_nan(self, rng):
        assert np.isnan(order_probe(ScattererSet.empty(3), fixed_family(rng, 3), np.geomspace(10, 100, 5), 0))

    def test_needs_five_points(self, rng):
        with pytest.raises(ValueError):
            order_probe(random_scene(rng, 1, 3), fixed_family(rng, 3), [10.0, 20.0], 0)

    def test_needs_increasing_ladder(self, rng):
        with pytest.raises(ValueError):
            order_probe(random_scene(rng, 1, 3), fixed_family(rng, 3), [10, 20, 15, 30, 40.0], 0)

    def test_d3_m0(self, rng):
        s = random_scene(rng, 3, 3)
        slope = order_probe(s, fixed_family(rng, 3), np.geomspace(1e2, 1e4, 41), 0)
        assert abs(slope + 2) <= 0.3

    def test_d1_m1(self, rng):
        s = random_scene(rng, 3, 1)
        slope = order_probe(s, fixed_family(rng, 1), np.geomspace(1e2, 1e4, 41), 1)
        assert abs(slope + 2) <= 0.3

    def test_errors_shape(self, rng):
        s = random_scene(rng, 2, 2)
        ladder = np.exp(np.arange(6, 13, 2.0))
        assert truncation_errors(s, fixed_family(rng, 2), ladder, 0).shape == (4,)

    def test_wrong_family_modulus(self, rng):
        s = random_scene(rng, 2, 3)
        with pytest.raises(ValueError):
            truncation_errors(s, lambda kappa: WavePair([1.0, 0, 0], [0, 1.0, 0]), [5.0], 0)


def test_slope_helper():
    x = np.geomspace(1, 100, 7)
    assert fit_loglog_slope(x, 3 * x**-2.5) == pytest.approx(-2.5)
