import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmanlab import geometry as G
from bergmanlab.exceptions import DomainError, ParameterError
from bergmanlab.weights import Weight

W0 = Weight.standard(0)

disk_points = st.complex_numbers(max_magnitude=0.95).filter(
    lambda z: abs(z) < 0.95)


class TestMetrics:
    def test_pseudohyperbolic_examples(self):
        assert G.pseudohyperbolic(0.0, 0.3 + 0.4j) == pytest.approx(0.5)
        assert G.pseudohyperbolic(0.5, -0.5) == pytest.approx(0.8)
        assert G.pseudohyperbolic(0.3 + 0.1j, 0.3 + 0.1j) == 0.0

    def test_bergman_examples(self):
        assert G.bergman_distance(0.0, 0.5) == pytest.approx(
            0.5 * math.log(3.0))
        assert G.bergman_distance(0.2j, 0.2j) == 0.0

    @given(disk_points, disk_points)
    @settings(max_examples=100, deadline=None)
    def test_symmetry(self, z, w):
        assert G.bergman_distance(z, w) == pytest.approx(
            G.bergman_distance(w, z), abs=1e-12)

    @given(disk_points, disk_points, disk_points)
    @settings(max_examples=100, deadline=None)
    def test_moebius_invariance(self, a, z, w):
        phi = lambda x: (a - x) / (1.0 - np.conj(a) * x)
        assert G.pseudohyperbolic(phi(z), phi(w)) == pytest.approx(
            G.pseudohyperbolic(z, w), abs=1e-12)


class TestRegions:
    def test_square_membership(self):
        sq = G.CarlesonSquare(0.5)
        assert G.region_contains(sq, 0.75)
        assert not G.region_contains(sq, 0.75 * np.exp(0.3j))
        assert not G.region_contains(sq, 0.3)

    def test_cone_membership(self):
        assert G.region_contains(G.Cone(0.8), 0.4)
        assert G.region_contains(G.Cone(1.0), 0.0)  # boundary vertex allowed

    def test_zero_apex_rejected(self):
        with pytest.raises(DomainError):
            G.region_contains(G.CarlesonSquare(0.0), 0.5)
        with pytest.raises(DomainError):
            G.region_contains(G.Cone(0.0), 0.5)

    def test_bergman_disk(self):
        disk = G.BergmanDisk(0.0, 1.0)
        assert G.region_contains(disk, math.tanh(1.0) - 1e-6)
        assert not G.region_contains(disk, math.tanh(1.0) + 1e-6)

    def test_tent_inside_square_sampled(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = (0.2 + 0.79 * rng.random()) * np.exp(
                2j * math.pi * rng.random())
            z = np.sqrt(rng.random(10000)) * np.exp(
                2j * math.pi * rng.random(10000))
            in_tent = G.region_contains(G.Tent(u), z)
            in_square = G.region_contains(G.CarlesonSquare(u), z)
            assert not np.any(in_tent & ~in_square)


class TestSquareMeasure:
    def test_flat_example(self):
        assert G.weighted_square_measure(W0, 0.5) == pytest.approx(
            0.5 / math.pi * 0.375, rel=1e-10)

    def test_band_against_tail_mass(self):
        for w in (W0, Weight.standard(1), Weight.log_doubling(2)):
            for a in (0.3, 0.7, 0.95, 0.999):
                ratio = G.weighted_square_measure(w, a) / (
                    (1.0 - a) * w.hat(a))
                assert 1.0 / (4.0 * math.pi) <= ratio <= 1.0 / math.pi

    def test_vanishes_at_boundary(self):
        assert G.weighted_square_measure(W0, 0.99999) < 1e-9

    def test_zero_apex(self):
        with pytest.raises(DomainError):
            G.weighted_square_measure(W0, 0.0)


class TestBallReduction:
    def test_euclidean_parameters(self):
        c, R = G.euclidean_ball(0.0, 1.0)
        assert c == 0.0 and R == pytest.approx(math.tanh(1.0))

    def test_ball_measure_flat(self):
        # flat density: the measure equals the normalized euclidean area
        c, R = G.euclidean_ball(0.6, 0.8)
        got = G.ball_measure_radial(np.ones_like, 0.6, 0.8)
        assert got == pytest.approx(R * R, rel=1e-5)

    def test_ball_measure_radial_profile(self):
        # profile s^2 over a centered ball has a closed form
        t = math.tanh(0.7)
        got = G.ball_measure_radial(lambda s: s ** 2, 0.0, 0.7)
        assert got == pytest.approx(t ** 4 / 2.0, rel=1e-8)


class TestLattice:
    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_invariants(self, r):
        lat = G.make_lattice(r)
        assert lat.points(1)[0] == 0.0
        assert G.check_separation(lat, 500) >= r / 5.0
        assert G.check_covering(lat, 10000) < 5.0 * r

    def test_points_sorted_by_modulus(self):
        lat = G.make_lattice(1.0)
        pts = lat.points(200)
        mods = np.abs(pts)
        assert np.all(np.diff(mods) > -1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            G.make_lattice(0.0)
        with pytest.raises(ParameterError):
            G.make_lattice(2.5)

    def test_csv_export(self, tmp_path):
        lat = G.make_lattice(2.0)
        n = lat.to_csv(tmp_path / "lat.csv", max_points=500)
        data = np.loadtxt(tmp_path / "lat.csv", delimiter=",", skiprows=1)
        assert data.shape == (n, 4)
        assert np.allclose(np.hypot(data[:, 0], data[:, 1]), data[:, 2])
