import numpy as np
import pytest

from rhdisk.jordan import (MapConvergenceError, boundary_from_radius,
                           harmonic_measure, harmonic_measure_quadrature,
                           identity_map, natural_parameter, polynomial_map,
                           solve_jordan, theodorsen_map, transport_problem)
from rhdisk.spectral import CircleGrid, evaluate

TWO_PI = 2 * np.pi


def interior_points(count, seed, rmax=0.85):
    rng = np.random.default_rng(seed)
    return rmax * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))


class TestPolynomialMap:
    def test_zero_coefficient_is_identity(self):
        cmap = polynomial_map(0.0, CircleGrid(64))
        pts = interior_points(20, 0)
        assert np.abs(cmap.to_disk(pts) - pts).max() < 1e-12
        assert np.abs(cmap.from_disk(pts) - pts).max() == 0.0

    def test_round_trip(self):
        cmap = polynomial_map(0.3, CircleGrid(256))
        assert cmap.roundtrip_defect(cmap.from_disk(interior_points(100, 1))) <= 1e-10
        w = cmap.to_disk(cmap.from_disk(0.5j))
        assert abs(w - 0.5j) <= 1e-10

    def test_boundary_image_at_zero_angle(self):
        cmap = polynomial_map(0.3, CircleGrid(64))
        assert cmap.from_disk(1.0 + 0j) == pytest.approx(1.3)

    def test_rejects_large_coefficient(self):
        with pytest.raises(ValueError):
            polynomial_map(0.5, CircleGrid(64))

    def test_correspondence_monotone(self):
        cmap = polynomial_map(0.3 + 0.1j, CircleGrid(256))
        assert np.all(np.diff(cmap.boundary_param) > 0)


class TestTheodorsen:
    def test_disk_is_identity_correspondence(self):
        g = CircleGrid(256)
        cmap = theodorsen_map(lambda t: np.ones_like(t), g)
        assert np.abs(cmap.boundary_param - g.theta).max() <= 1e-10

    def test_scaling(self):
        g = CircleGrid(256)
        cmap = theodorsen_map(lambda t: 2.0 * np.ones_like(t), g)
        assert np.abs(cmap.boundary_param - g.theta).max() <= 1e-10
        pts = interior_points(20, 2)
        assert np.abs(cmap.from_disk(pts) - 2.0 * pts).max() <= 1e-10

    def test_perturbed_circle_round_trip(self):
        g = CircleGrid(1024)
        cmap = theodorsen_map(lambda t: 1 + 0.2 * np.cos(t), g)
        pts = interior_points(50, 3, rmax=0.8)
        domain_pts = cmap.from_disk(pts)
        assert np.abs(cmap.to_disk(domain_pts) - pts).max() <= 1e-6

    def test_sample_table_input(self):
        g = CircleGrid(256)
        tau = TWO_PI * np.arange(512) / 512
        cmap = theodorsen_map(1 + 0.2 * np.cos(tau), g)
        assert np.all(np.diff(cmap.boundary_param) > 0)

    def test_rejects_non_starlike(self):
        g = CircleGrid(256)
        with pytest.raises(ValueError, match="star-like"):
            theodorsen_map(lambda t: 1 + 0.9 * np.cos(4 * t), g)

    def test_rejects_nonpositive_radius(self):
        g = CircleGrid(256)
        with pytest.raises(ValueError):
            theodorsen_map(lambda t: np.cos(t), g)

    def test_nonconvergence_reported(self):
        g = CircleGrid(256)
        with pytest.raises(MapConvergenceError, match="did not converge"):
            theodorsen_map(lambda t: 1 + 0.2 * np.cos(t), g, max_iter=1)


class TestTransport:
    def test_identity_map_keeps_samples(self):
        g = CircleGrid(64)
        cmap = identity_map(g)
        prob = transport_problem(lambda s: np.exp(1j * np.cos(s)), np.cos,
                                 cmap, None, g)
        assert np.abs(prob.phi.values - np.cos(g.theta)).max() < 1e-12
        assert np.abs(prob.lam.values - np.exp(1j * np.cos(g.theta))).max() < 1e-12

    def test_scaled_disk_arc_length(self):
        # rho = 2: s = 2 theta, so phi(s) = cos(s/2) pulls back to cos(theta)
        g = CircleGrid(512)
        cmap = theodorsen_map(lambda t: 2.0 * np.ones_like(t), g)
        boundary = boundary_from_radius(lambda t: 2.0 * np.ones_like(t), 4096)
        prob = transport_problem(lambda s: np.ones(np.shape(s), dtype=complex),
                                 lambda s: np.cos(s / 2.0), cmap, boundary, g)
        assert np.abs(prob.phi.values - np.cos(g.theta)).max() <= 1e-5

    def test_constant_data_stays_constant(self):
        g = CircleGrid(128)
        cmap = polynomial_map(0.3, g)
        prob = transport_problem(lambda s: np.full(np.shape(s), 1j),
                                 lambda s: np.full(np.shape(s), 2.0), cmap, None, g)
        assert np.all(prob.phi.values == 2.0)
        assert np.abs(prob.lam.values - 1j).max() == 0.0

    def test_coarse_table_guard(self):
        cmap = polynomial_map(0.3, CircleGrid(64))
        with pytest.raises(ValueError, match="coarse"):
            transport_problem(lambda s: np.full(np.shape(s), 1j),
                              lambda s: np.cos(s), cmap, None, CircleGrid(128))


class TestSolveJordan:
    def test_identity_map_matches_disk_solution(self):
        g = CircleGrid(256)
        cmap = identity_map(g)
        composed, disk_sol = solve_jordan(
            lambda s: np.full(np.shape(s), 1j), np.cos, cmap, None, g)
        pts = interior_points(20, 4)
        assert np.abs(composed(pts) - evaluate(disk_sol.f, pts)).max() < 1e-12

    def test_constants_invariant_under_composition(self):
        g = CircleGrid(256)
        cmap = polynomial_map(0.3, g)
        composed, _ = solve_jordan(
            lambda s: np.ones(np.shape(s), dtype=complex),
            lambda s: np.ones(np.shape(s)), cmap, None, g)
        pts = cmap.from_disk(interior_points(20, 5, rmax=0.8))
        assert np.abs(composed(pts) - 1.0).max() <= 1e-10

    def test_rotation_pullback_closed_form(self):
        # data built so the disk-side problem is lambda = i, phi = cos theta;
        # the composed solution must be i * to_disk(z)
        g = CircleGrid(256)
        cmap = polynomial_map(0.3, g)
        phi_fn = lambda s: np.cos(cmap.theta_at(s))
        composed, disk_sol = solve_jordan(
            lambda s: np.full(np.shape(s), 1j), phi_fn, cmap, None, g)
        pts = cmap.from_disk(interior_points(100, 6, rmax=0.9))
        assert np.abs(composed(pts) - 1j * cmap.to_disk(pts)).max() <= 1e-8


class TestHarmonicMeasure:
    def test_full_boundary(self):
        assert harmonic_measure([(0.0, TWO_PI)], 0.3 + 0.1j) == 1.0

    def test_center_arc_fraction(self):
        for ell in (np.pi / 4, np.pi / 2, np.pi):
            assert harmonic_measure([(0.5, 0.5 + ell)], 0.0) == pytest.approx(
                ell / TWO_PI, abs=1e-12)

    def test_off_center_matches_quadrature(self):
        arcs = [(-np.pi / 2, np.pi / 2)]
        geom = harmonic_measure(arcs, 0.5)
        quad = harmonic_measure_quadrature(arcs, 0.5)
        assert 0.5 < geom < 1.0
        assert abs(geom - quad) <= 1e-6

    def test_additivity(self):
        z0 = 0.2 - 0.3j
        a = harmonic_measure([(0.0, 1.0)], z0)
        b = harmonic_measure([(2.0, 2.5)], z0)
        both = harmonic_measure([(0.0, 1.0), (2.0, 2.5)], z0)
        assert abs(both - (a + b)) <= 1e-10

    def test_rejects_boundary_point(self):
        with pytest.raises(ValueError):
            harmonic_measure([(0.0, 1.0)], np.exp(0.3j))

    def test_rejects_overlapping_arcs(self):
        with pytest.raises(ValueError):
            harmonic_measure([(0.0, 1.0), (0.5, 2.0)], 0.0)

    def test_full_boundary_through_map(self):
        # full-boundary arcs are measured against the map's own parameter
        # period (arc length here), not 2 pi
        g = CircleGrid(256)
        cmap = polynomial_map(0.3, g)
        z0 = cmap.from_disk(0.1 + 0.2j)
        full = [(0.0, cmap.param_period)]
        assert harmonic_measure(full, z0, cmap) == 1.0
        assert harmonic_measure_quadrature(full, z0, cmap) == pytest.approx(1.0, abs=1e-9)

    def test_conformal_invariance(self):
        g = CircleGrid(512)
        cmap = polynomial_map(0.3, g)
        # arc endpoints chosen at correspondence nodes so both routes see
        # exactly the same disk arcs
        s_arcs = [(float(cmap.param_at(0.5)), float(cmap.param_at(1.7)))]
        z0 = cmap.from_disk(0.2 + 0.3j)
        hm_domain = harmonic_measure(s_arcs, z0, cmap)
        hm_disk = harmonic_measure([(0.5, 1.7)], 0.2 + 0.3j)
        assert abs(hm_domain - hm_disk) <= 1e-8

    def test_mobius_normalization(self):
        # the normalizing automorphism sends z0 to 0: measure of a half
        # circle seen from its center of symmetry through z0 stays exact
        z0 = 0.4
        T = lambda w: (w - z0) / (1 - np.conj(z0) * w)
        assert abs(T(z0)) <= 1e-12


class TestNaturalParameter:
    def test_circle_total_length(self):
        n = 4096
        th = TWO_PI * np.arange(n) / n
        b = natural_parameter(3.0 * np.exp(1j * th), check_simple=False)
        assert abs(b.total_length - TWO_PI * 3.0) <= 1e-4 * TWO_PI * 3.0

    def test_unit_square(self):
        side = np.linspace(0.0, 1.0, 32, endpoint=False)
        pts = np.concatenate([side, 1 + 1j * side, (1 - side) + 1j, 1j * (1 - side)])
        b = natural_parameter(pts)
        assert b.total_length == pytest.approx(4.0, abs=1e-6)

    def test_reparameterized_circle_same_length(self):
        n = 4096
        t = TWO_PI * np.arange(n) / n
        warped = t + 0.3 * np.sin(t)
        b = natural_parameter(np.exp(1j * warped), check_simple=False)
        assert abs(b.total_length - TWO_PI) <= 1e-4

    def test_rejects_zero_segment(self):
        pts = np.array([0.0, 1.0, 1.0, 1j])
        with pytest.raises(ValueError, match="zero-length"):
            natural_parameter(pts)

    def test_rejects_self_intersection(self):
        pts = np.array([0.0, 1.0 + 1.0j, 1.0, 0.0 + 1.0j])  # bowtie
        with pytest.raises(ValueError, match="self-intersecting"):
            natural_parameter(pts)

    def test_arclength_at_polar(self):
        b = boundary_from_radius(lambda t: np.ones_like(t), 2048)
        tau = np.array([0.5, np.pi, 5.0])
        assert np.abs(b.arclength_at_polar(tau) - tau).max() <= 1e-4
