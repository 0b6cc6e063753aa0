import json
import math

import numpy as np
import pytest

from robinsym import grid, robin
from robinsym.grid import constant_field, field_from_function
from robinsym.rearrange import check_weight_condition, decreasing_rearrangement
from robinsym.robin import (
    RobinProblem,
    compare_torsion,
    compare_weighted_torsion,
    exact_ball_solution,
    functional_compare,
    nonlinear_functional_eval,
    radial_functional_eval,
    radial_weighted_minimum,
    solve_robin,
    torsion_functional,
    torsion_rigidity,
    weighted_minimum,
    weighted_torsion_energy,
)
from robinsym.symmetrize import build_ustar

from conftest import cached_domain

T_DISK = 1 / (math.pi / 8 + 0.25)


@pytest.fixture(scope="module")
def disk_run():
    d = cached_domain("disk", 1 / 128)
    return d, torsion_rigidity(d, 1.0)


class TestExactBall:
    def test_values(self):
        z = exact_ball_solution(1.0, 1.0)
        assert z.at_radius(1.0) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
        assert z.at_radius(0.0) == pytest.approx(0.25 + 1 / (4 * math.pi), rel=1e-15)
        assert z.integral() == pytest.approx(math.pi / 8 + 0.25, rel=1e-15)
        assert z.torsion() == pytest.approx(1.555938, abs=1e-6)

    def test_pde_and_boundary_condition(self):
        for n in (2, 3):
            c = grid.MeasureConstants(n)
            z = exact_ball_solution(1.3, 0.7, c)
            r, eps = 0.4, 1e-4
            # radial Laplacian z'' + (n-1) z'/r
            d2 = (z.at_radius(r + eps) - 2 * z.at_radius(r) + z.at_radius(r - eps)) / eps**2
            d1 = (z.at_radius(r + eps) - z.at_radius(r - eps)) / (2 * eps)
            assert -(d2 + (n - 1) * d1 / r) == pytest.approx(1.0, rel=1e-5)
            R = z.R
            dn = (z.at_radius(R + eps) - z.at_radius(R - eps)) / (2 * eps)
            assert dn + z.beta * z.boundary_measure * z.at_radius(R) == pytest.approx(0, abs=1e-8)

    def test_dirichlet_limit(self):
        z = exact_ball_solution(1.0, 1e12)
        assert z.at_radius(0.5) == pytest.approx(0.75 / 4, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            exact_ball_solution(0, 1)
        with pytest.raises(ValueError):
            RobinProblem(cached_domain("square", 1 / 32), 0.0)


class TestSolver:
    def test_zero_source(self, square32):
        u = solve_robin(RobinProblem(square32, 1.0, constant_field(square32, 0.0)))
        assert np.all(u.values == 0)

    def test_disk_against_exact(self, disk_run):
        d, res = disk_run
        z = exact_ball_solution(1.0, 1.0)
        err = np.max(np.abs(res.field.values - z(d.centers)))
        assert err <= 0.1 * d.h
        assert res.field.values.min() > 0

    def test_dirichlet_limit(self):
        d = cached_domain("disk", 1 / 128)
        u = solve_robin(RobinProblem(d, 1e6))
        r = np.hypot(*d.centers.T)
        # cut cells whose centers fall outside the disk are compared with the solution's zero extension
        dev = np.abs(u.values - np.maximum((1 - r**2) / 4, 0.0))
        assert dev[r > 0.95].max() < 1e-3

    def test_symmetry_on_square(self):
        d = cached_domain("square", 1 / 64)
        u = solve_robin(RobinProblem(d, 1.0)).values
        img = d.scatter(u)[d.rows.min() : d.rows.max() + 1, d.cols.min() : d.cols.max() + 1]
        assert not np.isnan(img).any()
        scale = img.max()
        for t in (np.fliplr(img), np.flipud(img), img.T, np.rot90(img), np.rot90(img, 2), np.rot90(img, 3), np.rot90(img.T, 2)):
            assert np.max(np.abs(t - img)) <= robin.DEFAULT_TOL * scale

    def test_convergence(self):
        exact = T_DISK
        errs = [abs(torsion_rigidity(cached_domain("disk", h), 1.0).torsion - exact) for h in (1 / 32, 1 / 64, 1 / 128)]
        assert errs[0] / errs[1] >= 1.5 and errs[1] / errs[2] >= 1.5

    def test_iteration_cap(self, square32):
        with pytest.raises(robin.SolverError, match="residual"):
            robin._solve(RobinProblem(square32, 1.0), tol=1e-30)


class TestTorsion:
    def test_disk_value(self, disk_run):
        _, res = disk_run
        assert res.torsion == pytest.approx(T_DISK, rel=0.02)
        assert abs(res.torsion * res.integral - 1) <= 10 * robin.DEFAULT_TOL

    def test_functional_at_solution(self, disk_run):
        d, res = disk_run
        assert torsion_functional(res.field, d, 1.0) == pytest.approx(1.5559, rel=0.02)

    def test_perturbations_do_not_lower_quotient(self, square32, rng):
        problem = RobinProblem(square32, 1.0)
        u, system, _ = robin._solve(problem, robin.DEFAULT_TOL)
        w = square32.weights

        def quotient(v):
            return robin.discrete_energy(v, system) / float(w @ v) ** 2

        T = quotient(u.values)
        for _ in range(20):
            phi = rng.standard_normal(u.values.size)
            for eps in (1e-1, 1e-3):
                assert quotient(u.values + eps * np.abs(u.values).max() * phi) >= T * (1 - 1e-9)

    def test_functional_constant(self, square128):
        assert torsion_functional(constant_field(square128), square128, 1.0) == pytest.approx(16, rel=1e-12)
        assert torsion_functional(constant_field(square128, 3.3), square128, 1.0) == pytest.approx(16, rel=1e-12)

    def test_nonlinear(self, square128):
        w = constant_field(square128)
        assert nonlinear_functional_eval(w, square128, 1.0, 3) == pytest.approx(64, rel=1e-12)
        x = field_from_function(square128, lambda x, y: x)
        assert nonlinear_functional_eval(x, square128, 1.0, 2) == torsion_functional(x, square128, 1.0)
        assert functional_compare(x, 1.0, 2.0).holds

    def test_degenerate(self, square32):
        with pytest.raises(ValueError, match="normalization degenerate"):
            torsion_functional(constant_field(square32, 0.0), square32, 1.0)

    def test_radial_functional_on_cone(self):
        from robinsym.symmetrize import RadialFunction

        v = RadialFunction(grid.PLANE, np.array([0, math.pi]), np.array([1.0]), 0.0)
        # gradient energy pi, no trace, (pi/3)^2 in the denominator
        assert radial_functional_eval(v, 1.0, 2.0) == pytest.approx(9 / math.pi, rel=1e-12)

    def test_monotone_in_beta(self):
        d = cached_domain("square", 1 / 64)
        T = [torsion_rigidity(d, b).torsion for b in (0.5, 1.0, 2.0)]
        assert T[0] <= T[1] <= T[2]

    def test_square_self_convergence(self):
        T = [torsion_rigidity(cached_domain("square", h), 1.0).torsion for h in (1 / 64, 1 / 128, 1 / 256)]
        ref = T[2]
        assert abs(T[1] - ref) < abs(T[0] - ref)
        assert abs(T[1] - ref) / ref < 0.01

    def test_json(self, disk_run):
        _, res = disk_run
        data = json.loads(json.dumps(res.as_dict()))
        assert set(data) == {"beta", "area", "perimeter", "torsion", "integral", "residual", "h"}


class TestCompareTorsion:
    def test_disk_equality(self, disk_run):
        d, res = disk_run
        r = compare_torsion(d, 1.0, result=res)
        assert r.holds and abs(r.lhs - r.rhs) <= r.tolerance

    def test_square_margin(self, square128):
        r = compare_torsion(square128, 1.0)
        assert r.holds and r.rhs - r.lhs > r.tolerance


class TestWeightedEnergy:
    def test_zero(self, square32):
        f = constant_field(square32)
        assert weighted_torsion_energy(constant_field(square32, 0.0), square32, 1.0, f) == 0

    def test_minimum_identity(self, square128):
        f = constant_field(square128)
        m, u = weighted_minimum(square128, 1.0, f)
        assert m == pytest.approx(-0.5 * u.integral(), rel=1e-12)
        assert weighted_torsion_energy(u, square128, 1.0, f) == pytest.approx(m, rel=2e-3)

    def test_radial_minimum_matches_ball(self):
        d = cached_domain("disk", 1 / 128)
        z = exact_ball_solution(math.sqrt(d.area / math.pi), 1.0)
        assert radial_weighted_minimum(constant_field(d), 1.0) == pytest.approx(-0.5 * z.integral(), rel=1e-12)

    def test_radial_minimum_3d_and_steps(self):
        # two-step weight in the plane against direct quadrature of the radial ODE solution
        from scipy import integrate

        d = cached_domain("square", 1 / 32)
        f = field_from_function(d, lambda x, y: np.where(x < 0.5, 2.0, 1.5))
        fstar = decreasing_rearrangement(grid.field_to_samples(f))
        V = fstar.total_measure
        P = 2 * math.sqrt(math.pi * V)
        F = fstar.cumulative
        zR = fstar.integral() / P**2
        quad, _ = integrate.quad(lambda s: F(s) ** 2 / (4 * math.pi * s), 0, V, points=[0.5], limit=200)
        expected = -0.5 * (zR * fstar.integral() + quad)
        assert radial_weighted_minimum(f, 1.0) == pytest.approx(expected, rel=1e-10)

    def test_corollary(self, square128):
        f = field_from_function(square128, lambda x, y: 0.6 + 0.4 * (1 - x))
        assert check_weight_condition(decreasing_rearrangement(grid.field_to_samples(f)), 2).holds
        for beta in (0.1, 1.0, 10.0):
            assert compare_weighted_torsion(f, beta).holds

    def test_corollary_requires_condition(self, square32):
        f = field_from_function(square32, lambda x, y: np.where(x < 0.3, 1.0, 0.01))
        with pytest.raises(ValueError):
            compare_weighted_torsion(f, 1.0)

    def test_mismatched_domains(self, square32):
        other = cached_domain("square", 1 / 64)
        with pytest.raises(ValueError):
            weighted_torsion_energy(constant_field(square32), other, 1.0, constant_field(other))
