import json

import numpy as np
import pytest

from rhdisk.boundary import UnimodularTrace
from rhdisk.core import RHProblem, null_generators, solve
from rhdisk.spectral import (EVAL_CEILING, AnalyticDiskFunction, BoundaryTrace,
                             CircleGrid)
from rhdisk.verify import (StolzPath, boundary_residual, nt_limit,
                           path_points)


def mobius_atom(anchor=np.pi):
    zeta = np.exp(1j * anchor)
    return lambda z: (zeta + np.asarray(z)) / (zeta - np.asarray(z))


class TestStolzPath:
    def test_radial_points(self):
        p = StolzPath(vertex=0.0, aperture=0.5, side_offset=0.0,
                      gaps=(0.25, 0.125, 0.0625))
        pts = path_points(p)
        assert np.abs(pts.imag).max() == 0.0
        assert np.allclose(pts.real, [0.75, 0.875, 0.9375])

    def test_sector_invariant_on_edge(self):
        p = StolzPath(vertex=1.2, aperture=0.5, side_offset=1.0,
                      gaps=tuple(2.0 ** -k for k in range(3, 30, 3)))
        pts = path_points(p)
        zeta = np.exp(1.2j)
        angles = np.abs(np.angle(1 - np.conj(zeta) * pts))
        assert np.all(angles <= 0.5 + 1e-9)
        assert np.all(np.abs(pts) <= EVAL_CEILING + 1e-15)

    def test_cluster_at_vertex(self):
        p = StolzPath(vertex=np.pi / 2, aperture=0.3, side_offset=-0.5,
                      gaps=(2.0 ** -10, 2.0 ** -20))
        pts = path_points(p)
        assert np.abs(pts - 1j).max() < 2.0 ** -9

    def test_validation(self):
        with pytest.raises(ValueError):
            StolzPath(0.0, 2.0, 0.0, (0.1,))
        with pytest.raises(ValueError):
            StolzPath(0.0, 0.5, 1.5, (0.1,))
        with pytest.raises(ValueError):
            StolzPath(0.0, 0.5, 0.0, (0.1, 0.2))
        with pytest.raises(ValueError):
            StolzPath(0.0, 0.5, 0.0, (2.0 ** -50,))


class TestNtLimit:
    def test_identity_at_vertex_zero(self):
        f = AnalyticDiskFunction(np.array([0.0, 1.0], dtype=complex))
        rep = nt_limit(f, 0.0)
        assert rep.agreement <= 1e-9
        assert rep.agreed
        assert rep.value == pytest.approx(1.0, abs=1e-9)

    def test_kernel_atom_decays_away_from_anchor(self):
        # atom anchored at 1, probed at the opposite point
        atom = mobius_atom(0.0)
        rep = nt_limit(atom, np.pi)
        assert rep.agreed
        assert abs(rep.value) <= 1e-9
        for p in rep.paths:
            assert p.monotone

    def test_kernel_atom_diverges_at_own_anchor(self):
        atom = mobius_atom(0.0)
        rep = nt_limit(atom, 0.0)
        assert not rep.agreed
        assert rep.value is None

    def test_agreement_across_paths_for_polynomials(self):
        # bounded analytic f: agreement across all aperture/offset pairs at
        # every vertex of a coarse grid
        rng = np.random.default_rng(21)
        f = AnalyticDiskFunction(rng.standard_normal(9) + 1j * rng.standard_normal(9))
        for vertex in CircleGrid(64).theta:
            rep = nt_limit(f, vertex)
            assert rep.agreement <= 1e-8

    def test_empty_schedule_rejected(self):
        f = AnalyticDiskFunction(np.array([1.0], dtype=complex))
        with pytest.raises(ValueError):
            nt_limit(f, 0.0, apertures=[])

    def test_report_serialization(self, tmp_path):
        f = AnalyticDiskFunction(np.array([0.0, 1.0], dtype=complex))
        rep = nt_limit(f, 0.0)
        jpath = tmp_path / "report.json"
        cpath = tmp_path / "report.csv"
        rep.write_json(jpath)
        rep.write_csv(cpath)
        data = json.loads(jpath.read_text())
        assert data["agreement"] <= 1e-9
        lines = cpath.read_text().strip().splitlines()
        assert lines[0] == "series,x,y"
        assert len(lines) == 1 + len(rep.paths) * len(rep.gaps)


def make_problem(n, lam_fn, phi_fn, jumps=()):
    g = CircleGrid(n)
    return RHProblem(lam=UnimodularTrace.from_values(g, lam_fn(g.theta)),
                     phi=BoundaryTrace(g, phi_fn(g.theta)),
                     declared_jumps=jumps)


class TestBoundaryResidual:
    def test_exact_constant_solution(self):
        prob = make_problem(64, lambda th: np.ones(th.shape, dtype=complex),
                            lambda th: np.full(th.shape, 3.0))
        sol = solve(prob)
        rep = boundary_residual(sol, prob, [0.5, 0.9, 0.99])
        assert max(rep.linf) <= 1e-12

    def test_rotation_residual_formula(self):
        prob = make_problem(256, lambda th: np.full(th.shape, 1j), np.cos)
        sol = solve(prob)
        for r in (0.9, 0.97):
            rep = boundary_residual(sol, prob, [r])
            assert rep.linf[0] == pytest.approx(1 - r, rel=1e-9)

    def test_smooth_problem_residual_at_evaluation_ceiling(self):
        # the residual against fixed boundary data scales like 1 - r, so the
        # 1e-6 level is reached at the evaluation ceiling, not at 1 - 2^-12
        prob = make_problem(4096, lambda th: np.exp(1j * np.cos(th)),
                            lambda th: np.cos(th) + 0.5 * np.sin(2 * th))
        sol = solve(prob)
        rep = boundary_residual(sol, prob, [0.9, 0.99, 0.999, 1 - 2.0 ** -12,
                                            EVAL_CEILING])
        assert rep.is_monotone()["linf"]
        assert rep.linf[-1] <= 1e-6

    def test_discontinuous_problem_decreasing_l1(self):
        prob = make_problem(8192, lambda th: np.where(th < np.pi, 1.0 + 0j, 1j),
                            lambda th: np.ones_like(th), jumps=(0.0, np.pi))
        sol = solve(prob)
        rep = boundary_residual(sol, prob, [0.9, 0.99, 0.999],
                                exclusion_radius=0.1)
        assert rep.l1[0] > rep.l1[1] > rep.l1[2]
        assert rep.is_monotone()["l1"]

    def test_exclusion_counts_points(self):
        prob = make_problem(64, lambda th: np.ones(th.shape, dtype=complex),
                            lambda th: np.ones_like(th), jumps=(0.0,))
        sol = solve(prob)
        rep = boundary_residual(sol, prob, [0.5], exclusion_radius=0.1)
        assert rep.admitted < 64
        with pytest.raises(ValueError, match="admits no"):
            boundary_residual(sol, prob, [0.5], exclusion_radius=4.0)

    def test_callable_evaluation(self):
        prob = make_problem(64, lambda th: np.ones(th.shape, dtype=complex),
                            lambda th: np.zeros_like(th))
        rep = boundary_residual(mobius_atom(0.0), prob, [0.9],
                                exclusion_radius=0.0)
        # Re[(1+z)/(1-z)] is the Poisson kernel: big near the anchor only
        assert rep.linf[0] > 1.0

    def test_empty_schedule_rejected(self):
        prob = make_problem(64, lambda th: np.ones(th.shape, dtype=complex),
                            lambda th: np.zeros_like(th))
        sol = solve(prob)
        with pytest.raises(ValueError):
            boundary_residual(sol, prob, [])

    def test_report_serialization(self, tmp_path):
        prob = make_problem(64, lambda th: np.full(th.shape, 1j), np.cos)
        sol = solve(prob)
        rep = boundary_residual(sol, prob, [0.9, 0.99])
        jpath = tmp_path / "res.json"
        cpath = tmp_path / "res.csv"
        rep.write_json(jpath)
        rep.write_csv(cpath)
        data = json.loads(jpath.read_text())
        assert data["radii"] == [0.9, 0.99]
        lines = cpath.read_text().strip().splitlines()
        assert lines[0] == "series,x,y"
        assert len(lines) == 5


class TestNullFamilyLimits:
    def test_projected_family_limits_vanish_away_from_anchors(self):
        # the homogeneous mechanism: conj(lambda) A C_k has real part -> 0
        # nontangentially at vertices away from the anchor
        prob = make_problem(2048, lambda th: np.exp(1j * np.cos(th)), np.cos)
        sol = solve(prob)
        fam = null_generators(2, [0.0, np.pi], degree=1023)
        gaps = (2.0 ** -8, 2.0 ** -12, 2.0 ** -16, 2.0 ** -20)
        for k in range(2):
            for vertex in (1.2, 2.0, 4.2, 5.1):
                lam_v = np.exp(1j * np.cos(vertex))

                def proj(z, k=k, lam_v=lam_v):
                    from rhdisk.spectral import evaluate
                    return np.conj(lam_v) * evaluate(sol.A, z) * fam.exact_value(k, z)

                rep = nt_limit(proj, vertex, gaps=gaps, agreement_tol=1e-4)
                assert rep.agreed
                assert max(abs(p.estimate.real) for p in rep.paths) <= 1e-4
