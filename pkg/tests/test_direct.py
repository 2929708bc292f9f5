import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_scene, random_unit
from multipoint.direct import (
    ProbeGeometry,
    ScattererSet,
    SingularSystem,
    WavePair,
    amplitudes,
    build_interaction_matrix,
    charges_batch,
    farfield_defects,
    gamma_convention,
    manifold_pairs,
    manifold_points,
    scattered_field,
    scattering_amplitude,
    solve_charges,
    total_field,
)
from multipoint.asymptotics import fit_loglog_slope
from multipoint.greens import SingularityError


def one(d, y, alpha):
    return ScattererSet(d, np.reshape(y, (1, d)), [alpha])


class TestScattererSet:
    def test_rejects_coincident(self):
        with pytest.raises(ValueError):
            ScattererSet(2, [[0, 0], [0, 1e-13]], [1, 1])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            ScattererSet(3, [[0, 0, 0]], [1, 2])

    def test_empty(self):
        s = ScattererSet.empty(3)
        assert s.count == 0 and s.points.shape == (0, 3)

    def test_d1_accepts_flat_points(self):
        assert ScattererSet(1, [0.0, 1.0], [1, 1]).points.shape == (2, 1)

    def test_arrays_are_frozen(self):
        s = ScattererSet(1, [0.0], [1])
        with pytest.raises(ValueError):
            s.points[0, 0] = 2.0


class TestInteractionMatrix:
    def test_d3_single(self):
        a = build_interaction_matrix(one(3, [0, 0, 0], 1.0), 4 * np.pi)
        assert a[0, 0] == pytest.approx(1 - 1j, abs=1e-15)

    def test_d1_pair(self):
        a = build_interaction_matrix(ScattererSet(1, [0.0, 1.0], [1, 1]), np.pi)
        assert np.allclose(np.diag(a), 1 - 1j / (2 * np.pi), atol=1e-15)
        assert a[0, 1] == pytest.approx(1j / (2 * np.pi), abs=1e-15)

    def test_d2_single_at_e(self):
        alpha = 0.3 - 0.7j
        a = build_interaction_matrix(one(2, [0, 0], alpha), np.e)
        assert a[0, 0] == pytest.approx(alpha - (np.pi * 1j - 2) / (4 * np.pi), abs=1e-15)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_symmetric(self, d, rng):
        a = build_interaction_matrix(random_scene(rng, 5, d), 9.0)
        assert np.array_equal(a, a.T)


class TestCharges:
    def test_empty(self):
        q = solve_charges(ScattererSet.empty(2), [1.0, 0.0])
        assert q.values.shape == (0,)

    def test_d3_scalar(self):
        alpha, kappa = 0.7 + 0.2j, 13.0
        q = solve_charges(one(3, [0, 0, 0], alpha), [0, kappa, 0])
        assert q.values[0] == pytest.approx(-1 / (alpha - 1j * kappa / (4 * np.pi)), rel=1e-15)

    def test_d1_singular(self):
        kappa = 2.5
        with pytest.raises(SingularSystem) as info:
            solve_charges(one(1, [0.0], -1 / (2j * kappa)), [kappa])
        assert info.value.kappa == pytest.approx(kappa)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_residual_bound(self, d, rng):
        s = random_scene(rng, 6, d)
        k = 11.0 * random_unit(rng, d)
        q = solve_charges(s, k)
        b = -np.exp(1j * s.points @ k)
        assert q.residual_norm <= 1e-10 * (1 + np.linalg.norm(b))
        assert np.linalg.norm(build_interaction_matrix(s, 11.0) @ q.values - b) <= 1e-10 * (1 + np.linalg.norm(b))
        assert q.condition_estimate >= 1

    def test_batch_matches_single(self, rng):
        s = random_scene(rng, 4, 3)
        ks = 8.0 * np.array([random_unit(rng, 3) for _ in range(5)])
        qb = charges_batch(s, ks)
        for row, k in zip(qb, ks):
            assert np.allclose(row, solve_charges(s, k).values, rtol=1e-13, atol=0)

    def test_batch_needs_common_modulus(self):
        with pytest.raises(ValueError):
            charges_batch(one(2, [0, 0], 1.0), [[1.0, 0], [2.0, 0]])


class TestAmplitude:
    def test_empty(self):
        pair = WavePair([3.0, 0, 0], [0, 3.0, 0])
        assert scattering_amplitude(ScattererSet.empty(3), pair) == 0

    def test_d3_closed_form(self, rng):
        alpha = 1.2 - 0.4j
        s = one(3, [0, 0, 0], alpha)
        for kappa in (1.0, 37.0, 5000.0):
            pair = WavePair(kappa * random_unit(rng, 3), kappa * random_unit(rng, 3))
            want = -(2 * np.pi) ** -3 / (alpha - 1j * kappa / (4 * np.pi))
            assert abs(scattering_amplitude(s, pair) - want) <= 1e-14 * abs(want)

    def test_d1_closed_form(self):
        alpha, y, kappa = 0.5 + 1j, 0.37, 6.0
        s = one(1, [y], alpha)
        for kk, ll in ((kappa, kappa), (kappa, -kappa), (-kappa, kappa)):
            want = -np.exp(1j * (kk - ll) * y) / (2 * np.pi * (alpha + 1 / (2j * kappa)))
            assert scattering_amplitude(s, WavePair([kk], [ll])) == pytest.approx(want, rel=1e-14)

    def test_pair_must_share_modulus(self):
        with pytest.raises(ValueError):
            WavePair([1.0, 0.0], [0.0, 1.1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            scattering_amplitude(one(3, [0, 0, 0], 1), WavePair([1.0, 0], [0, 1.0]))

    def test_batch_matches_scalar(self, rng):
        s = random_scene(rng, 3, 2)
        p = rng.uniform(-3, 3, (7, 2))
        ks, ls = manifold_pairs(p, 100.0)
        batch = amplitudes(s, ks, ls)
        for i in range(7):
            assert batch[i] == pytest.approx(scattering_amplitude(s, WavePair(ks[i], ls[i])), rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(
    d=st.sampled_from([1, 2, 3]),
    n=st.integers(1, 5),
    seed=st.integers(0, 2**31),
    kappa=st.floats(1.5, 60.0),
)
def test_reciprocity(d, n, seed, kappa):
    rng = np.random.default_rng(seed)
    s = random_scene(rng, n, d)
    pair = WavePair(kappa * random_unit(rng, d), kappa * random_unit(rng, d))
    try:
        f = scattering_amplitude(s, pair)
    except SingularSystem:
        return
    g = scattering_amplitude(s, pair.reversed())
    assert abs(f - g) <= 1e-12 * abs(f)


class TestFields:
    def test_empty_field(self):
        assert scattered_field(ScattererSet.empty(2), [[1.0, 2.0], [0, 0]], [1.0, 0]).tolist() == [0, 0]

    def test_single_d3(self):
        s = one(3, [0.1, 0.2, -0.3], 0.9)
        k = np.array([0, 0, 5.0])
        x = np.array([1.0, -1.0, 2.0])
        q = solve_charges(s, k).values[0]
        r = np.linalg.norm(x - s.points[0])
        assert scattered_field(s, x, k) == pytest.approx(q * -np.exp(5j * r) / (4 * np.pi * r), rel=1e-14)

    def test_total_is_plane_wave_plus_scattered(self):
        s = one(2, [0.0, 0.0], 1.0)
        k = np.array([2.0, 0.0])
        x = np.array([0.4, 0.9])
        assert total_field(s, x, k) == pytest.approx(np.exp(1j * k @ x) + scattered_field(s, x, k))

    @pytest.mark.parametrize("d", [2, 3])
    def test_singular_at_scatterer(self, d):
        s = one(d, np.zeros(d), 1.0)
        with pytest.raises(SingularityError):
            scattered_field(s, np.zeros(d), np.eye(d)[0])

    @pytest.mark.parametrize("d", [2, 3])
    def test_farfield_slope(self, d, rng):
        s = random_scene(rng, 3, d)
        df = farfield_defects(s, 7.0 * random_unit(rng, d), random_unit(rng, d), [1e4, 1e5, 1e6])
        assert abs(fit_loglog_slope([1e4, 1e5, 1e6], df) + 1) <= 0.2

    def test_farfield_d1_exact_beyond_support(self):
        s = ScattererSet(1, [[-0.3], [0.2]], [1.0, 2 - 1j])
        df = farfield_defects(s, [7.0], [1.0], [1e4, 1e5, 1e6])
        assert np.all(df < 1e-9)


class TestManifold:
    def test_p_zero(self):
        pair = manifold_points(ProbeGeometry([0.0, 0.0, 0.0], 9.0))
        assert np.allclose(pair.k, [0, 0, 3.0]) and np.allclose(pair.l, pair.k)

    def test_example_d2(self):
        pair = manifold_points(ProbeGeometry([2.0, 0.0], 2.0))
        assert np.allclose(pair.k, [1, 1], atol=1e-15)
        assert np.allclose(pair.l, [-1, 1], atol=1e-15)

    def test_inadmissible(self):
        with pytest.raises(ValueError):
            ProbeGeometry([4.0, 0.0], 4.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_round_trip(self, d, rng):
        for _ in range(50):
            energy = rng.uniform(1, 1e4)
            p = rng.normal(size=d)
            p *= rng.uniform(0, 1.99 * np.sqrt(energy)) / np.linalg.norm(p)
            pair = manifold_points(ProbeGeometry(p, energy))
            assert np.allclose(pair.k - pair.l, p, rtol=0, atol=1e-12 * np.sqrt(energy))
            assert abs(pair.k @ pair.k - energy) <= 1e-12 * energy
            assert abs(pair.l @ pair.l - energy) <= 1e-12 * energy


class TestGamma:
    def test_d2(self):
        assert np.allclose(gamma_convention([1.0, 0.0], 2), [0, 1])
        assert np.allclose(gamma_convention([0.0, 0.0], 2), [0, 1])

    def test_d3_along_e3(self):
        # e1 x e3 = -e2
        assert np.allclose(gamma_convention([0, 0, 5.0], 3), [0, -1, 0])

    def test_d3_zero(self):
        assert np.allclose(gamma_convention([0, 0, 0.0], 3), [0, 0, 1])

    def test_d3_tie_breaks_to_lowest_index(self):
        # |p1| = |p2| < |p3|: e1 is chosen
        g = gamma_convention([1.0, 1.0, 2.0], 3)
        assert np.allclose(g, np.cross([1, 0, 0], [1, 1, 2]) / np.linalg.norm(np.cross([1, 0, 0], [1, 1, 2])))

    @pytest.mark.parametrize("d", [2, 3])
    def test_unit_and_orthogonal(self, d, rng):
        p = rng.normal(size=(200, d))
        g = gamma_convention(p, d)
        assert np.allclose(np.linalg.norm(g, axis=1), 1, atol=1e-15)
        assert np.max(np.abs(np.sum(g * p, axis=1))) < 1e-12

    def test_deterministic(self, rng):
        p = rng.normal(size=(10, 3))
        assert np.array_equal(gamma_convention(p, 3), gamma_convention(p.copy(), 3))

    def test_rejects_d1(self):
        with pytest.raises(ValueError):
            gamma_convention([1.0], 1)
