import numpy as np
import pytest

from semireach.implicit import (
    NoConvergence,
    SolveConfig,
    StepSizeViolation,
    residual,
    solve_implicit,
)
from semireach.problems import dahlquist, nonconvex_example

DAHL = dahlquist(5.0)
NONCONVEX = nonconvex_example()


class TestResidual:
    def test_zero_at_solution(self):
        r = residual(0.0, 5.0, 0.5, 1.0, 11.0 / 3.0, DAHL.f)
        assert np.linalg.norm(r) < 1e-14

    def test_direct_evaluation(self):
        r = residual(0.0, 5.0, 0.5, 1.0, 0.0, DAHL.f)
        assert r[0] == pytest.approx(5.5)

    def test_h_zero(self):
        assert residual(0.0, 3.0, 0.0, 7.0, 3.0, DAHL.f)[0] == 0.0


class TestSolveExamples:
    def test_dahlquist_linear(self):
        z, stats = solve_implicit(0.0, 5.0, 0.5, 1.0, DAHL.f, DAHL.jac_f, lf_tph=-1.0)
        assert z[0] == pytest.approx(11.0 / 3.0, abs=1e-12)
        assert stats.converged

    def test_h_zero_identity(self):
        z, stats = solve_implicit(0.0, 5.0, 0.0, 1.0, DAHL.f, DAHL.jac_f)
        assert z[0] == 5.0
        assert stats.final_residual == 0.0
        assert stats.newton_iters == 0

    @pytest.mark.parametrize("m,expect", [
        ((0.0, 0.0), (0.0, 0.0)),
        ((43.0 / 16.0, 0.0), (13.0 / 8.0, 0.5)),
        ((6.5, 0.0), (4.0, 1.0)),
    ])
    def test_planar_example_exact_points(self, m, expect):
        z, stats = solve_implicit(0.0, np.zeros(2), 1.0, np.array(m),
                                  NONCONVEX.f, NONCONVEX.jac_f, lf_tph=-0.5)
        assert stats.converged
        assert np.linalg.norm(z - np.array(expect)) <= 1e-9

    def test_finite_difference_jacobian(self):
        z, stats = solve_implicit(0.0, np.zeros(2), 1.0, np.array([6.5, 0.0]),
                                  NONCONVEX.f, jac_f=None, lf_tph=-0.5)
        assert np.linalg.norm(z - np.array([4.0, 1.0])) <= 1e-8

    def test_newton_one_iteration_on_linear(self):
        z, stats = solve_implicit(0.0, 2.0, 0.4, 0.3, DAHL.f, DAHL.jac_f, lf_tph=-1.0)
        assert stats.newton_iters == 1
        assert stats.damped_iters == 0


class TestErrors:
    def test_step_size_violation(self):
        f = lambda t, x: 2.0 * x  # l_f = 2
        with pytest.raises(StepSizeViolation):
            solve_implicit(0.0, 1.0, 0.5, 0.0, f, lambda t, x: 2.0, lf_tph=2.0)

    def test_no_convergence_when_caps_exhausted(self):
        cfg = SolveConfig(abs_tol=1e-14, max_newton_iters=1, max_damped_iters=1)
        with pytest.raises(NoConvergence):
            solve_implicit(0.0, np.zeros(2), 1.0, np.array([6.5, 0.0]),
                           NONCONVEX.f, NONCONVEX.jac_f, cfg=cfg, lf_tph=-0.5)

    def test_negative_h_rejected(self):
        with pytest.raises(ValueError):
            solve_implicit(0.0, 1.0, -0.1, 0.0, DAHL.f)


class TestDampedFallback:
    def test_recovers_from_a_bad_jacobian(self):
        # monotone nonsmooth field; a wildly wrong Jacobian stalls Newton and
        # the damped fixed-point phase must finish the solve
        f = lambda t, x: -np.sign(x) * np.sqrt(abs(x))
        bad_jac = lambda t, x: 1e6
        z_ref, _ = solve_implicit(0.0, 2.0, 0.5, 0.1, f, lf_tph=0.0)
        z_bad, stats = solve_implicit(0.0, 2.0, 0.5, 0.1, f, bad_jac, lf_tph=0.0)
        assert stats.damped_iters > 0
        assert stats.converged
        assert abs(z_bad[0] - z_ref[0]) <= 1e-8


def random_osl_linear_field(rng, d):
    A = rng.normal(size=(d, d))
    lf = float(np.linalg.eigvalsh(0.5 * (A + A.T)).max())
    f = lambda t, x: x @ A.T if np.ndim(x) > 1 else A @ np.atleast_1d(x)
    if d == 1:
        a = float(A[0, 0])
        f = lambda t, x: a * x
    jac = lambda t, x: A if d > 1 else float(A[0, 0])
    return f, jac, lf


class TestUniqueness:
    def test_two_starts_agree(self):
        rng = np.random.default_rng(2024)
        cfg = SolveConfig(abs_tol=1e-11)
        for _ in range(100):
            d = int(rng.integers(1, 4))
            f, jac, lf = random_osl_linear_field(rng, d)
            h = min(1.0, 0.5 / lf) if lf > 0 else 1.0
            x = rng.normal(size=d)
            m = rng.normal(size=d)
            z1, _ = solve_implicit(0.0, x, h, m, f, jac, cfg=cfg, lf_tph=lf,
                                   z0=rng.normal(scale=3.0, size=d))
            z2, _ = solve_implicit(0.0, x, h, m, f, jac, cfg=cfg, lf_tph=lf,
                                   z0=rng.normal(scale=3.0, size=d))
            assert np.linalg.norm(z1 - z2) <= 10 * cfg.abs_tol / (1 - lf * h)


class TestRepresentationLipschitz:
    @pytest.mark.parametrize("problem,t,x,h", [
        (DAHL, 0.0, np.array([5.0]), 0.5),
        (NONCONVEX, 0.0, np.zeros(2), 1.0),
    ])
    def test_parameter_lipschitz(self, problem, t, x, h):
        rng = np.random.default_rng(17)
        cfg = SolveConfig(abs_tol=1e-11)
        lf = problem.lf_at(t + h)
        M = problem.M(t, x)
        lo, hi = M.bounding_box()
        lip = h / (1 - lf * h)
        for _ in range(200):
            m1 = rng.uniform(lo, hi)
            m2 = rng.uniform(lo, hi)
            z1, _ = solve_implicit(t, x, h, m1, problem.f, problem.jac_f, cfg=cfg, lf_tph=lf)
            z2, _ = solve_implicit(t, x, h, m2, problem.f, problem.jac_f, cfg=cfg, lf_tph=lf)
            assert np.linalg.norm(z1 - z2) <= lip * np.linalg.norm(m1 - m2) + 10 * cfg.abs_tol


class TestDefectEstimate:
    def test_probe_distance_bounded_by_residual(self):
        # scalar problem: z = (x + h m)/(1 + h) in closed form
        rng = np.random.default_rng(31)
        h, x, m = 0.5, 5.0, 0.7
        z_exact = (x + h * m) / (1 + h)
        lf = -1.0
        for _ in range(100):
            y = rng.normal(scale=4.0)
            r = residual(0.0, x, h, m, y, DAHL.f)
            assert abs(y - z_exact) <= np.linalg.norm(r) / (1 - lf * h) + 1e-10
