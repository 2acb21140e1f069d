import math
from types import SimpleNamespace

import numpy as np
import pytest

from semireach.bounds import (
    ModuliSpec,
    apriori_filippov_constant,
    apriori_filippov_continuous,
    apriori_parameterized,
    apriori_parameterized_constant,
    apriori_spatial_parameterized,
    apriori_spatial_parameterized_constant,
    apriori_spatial_split,
    apriori_spatial_split_constant,
    apriori_split,
    apriori_split_constant,
    filippov_discrete_bound,
    gamma,
    gamma_tilde,
    remark_parameterized_constant,
    remark_split_constant,
)
from semireach.problems import dahlquist
from semireach.schemes import DiscretizationSchedule, TimeGrid

DAHL = dahlquist(5.0)
# constant-Lipschitz moduli matching the Dahlquist constants (L_M = 0 keeps
# Gamma = L h + L P h + L h, not the L_M = L form)
CONST = ModuliSpec.constant(l_f=-1.0, L_M=0.0, L=1.0, P=6.0, C=5.0)


def uniform(T, n):
    return TimeGrid.uniform(T, n)


class TestGamma:
    def test_zero_at_zero(self):
        assert gamma(0.0, 0.3, DAHL.moduli) == 0.0
        assert gamma_tilde(0.0, 0.3, DAHL.moduli) == 0.0

    def test_constant_lipschitz_formula(self):
        mod = ModuliSpec.constant(l_f=-0.5, L_M=0.7, L=2.0, P=3.0, C=1.0)
        h, t = 0.2, 0.0
        expect = 2.0 * h + 2.0 * (3.0 * h) + 2.0 * h + 0.7 * 3.0 * h
        assert gamma(h, t, mod) == pytest.approx(expect, rel=1e-14)

    def test_dahlquist_true_moduli(self):
        # f autonomous and M constant: only the state modulus contributes
        h = 0.3
        assert gamma(h, 1.0, DAHL.moduli) == pytest.approx(6.0 * h, rel=1e-14)

    def test_gamma_tilde_dahlquist(self):
        h = 0.1
        expect = 6.0 * h / (1 + h) + 6.0 * (1 - math.exp(-h))
        assert gamma_tilde(h, 0.0, DAHL.moduli) == pytest.approx(expect, rel=1e-12)
        # frozen independent evaluation
        assert gamma_tilde(h, 0.0, DAHL.moduli) == pytest.approx(1.1164300372387883, rel=1e-12)


class TestAprioriParameterized:
    def test_empty_sum(self):
        assert apriori_parameterized(0, uniform(1.0, 10), DAHL.moduli) == 0.0

    def test_constant_closed_form_identity(self):
        grid = uniform(1.0, 10)
        for mod in (CONST, ModuliSpec.constant(l_f=0.4, L_M=0.3, L=1.5, P=2.0, C=1.0)):
            g_val = gamma(0.1, 0.0, mod)
            loop = apriori_parameterized(10, grid, mod)
            closed = apriori_parameterized_constant(10, 0.1, mod.l_f_const,
                                                    mod.L_M_const, g_val)
            assert loop == pytest.approx(closed, rel=1e-12)

    def test_frozen_values(self):
        grid = uniform(1.0, 10)
        assert apriori_parameterized(10, grid, CONST) == pytest.approx(
            0.5019339647325824, rel=1e-12)
        assert apriori_parameterized(10, grid, DAHL.moduli) == pytest.approx(
            0.3764504735494367, rel=1e-12)

    def test_remark_form_is_reported_not_asserted(self):
        # the exponential simplification is a different number; just smoke it
        v = remark_parameterized_constant(1.0, 0.1, -1.0, 0.0, 1.0, 6.0)
        assert v > 0


class TestFilippovContinuous:
    def test_zero_at_zero(self):
        assert apriori_filippov_continuous(0, uniform(1.0, 4), DAHL.moduli) == 0.0

    def test_degenerate_rate_limit(self):
        # l_f + L_M == 0: closed form collapses to 2L(1+P) h t_n. The constant
        # form 2L(1+P)h equals Gamma exactly only when L_M = L (all moduli
        # saturate their Lipschitz bound), so test in that regime.
        mod = ModuliSpec.constant(l_f=-0.3, L_M=0.3, L=0.3, P=2.0, C=1.0)
        grid = uniform(2.0, 20)
        quad = apriori_filippov_continuous(20, grid, mod)
        closed = apriori_filippov_constant(2.0, 0.1, -0.3, 0.3, 0.3, 2.0)
        assert closed == pytest.approx(2.0 * 0.3 * 3.0 * 0.1 * 2.0, rel=1e-14)
        assert quad == pytest.approx(closed, rel=1e-6)

    def test_constant_data_quadrature_matches_closed_form(self):
        # saturating regime (L_M = L) at a nonzero net rate l_f + L_M = -1
        mod = ModuliSpec.constant(l_f=-2.0, L_M=1.0, L=1.0, P=6.0, C=5.0)
        grid = uniform(1.0, 10)
        quad = apriori_filippov_continuous(10, grid, mod)
        closed = apriori_filippov_constant(1.0, 0.1, -2.0, 1.0, 1.0, 6.0)
        assert closed == pytest.approx(1.4 * (1.0 - math.exp(-1.0)), rel=1e-12)
        assert quad == pytest.approx(closed, rel=1e-6)


class TestSpatialParameterized:
    def test_zero_widths(self):
        grid = uniform(1.0, 4)
        sched = SimpleNamespace(rho=(0.0,) * 5, eps=(0.0,) * 4)
        assert apriori_spatial_parameterized(4, grid, sched, DAHL.moduli) == 0.0

    def test_initial_term_only(self):
        grid = uniform(1.0, 4)
        sched = SimpleNamespace(rho=(0.2,) * 5, eps=(0.1,) * 4)
        for d in (1, 2, 3):
            assert apriori_spatial_parameterized(0, grid, sched, DAHL.moduli, dim=d) == \
                pytest.approx(np.sqrt(d) / 2 * 0.2, rel=1e-14)

    def test_constant_closed_form_identity(self):
        grid = uniform(1.0, 10)
        sched = DiscretizationSchedule.from_rules(grid, "h2", "h")
        loop = apriori_spatial_parameterized(10, grid, sched, CONST)
        closed = apriori_spatial_parameterized_constant(
            10, 0.1, rho0=0.01, rho=0.01, eps=0.1, l_f=-1.0, L_M=0.0, dim=1)
        assert loop == pytest.approx(closed, rel=1e-12)
        assert loop == pytest.approx(0.06644567105704684, rel=1e-12)


class TestAprioriSplit:
    def test_empty_sum(self):
        grid = uniform(1.0, 10)
        assert apriori_split(0, grid, DAHL.moduli) == 0.0
        sched = DiscretizationSchedule.from_rules(grid, "h2", "h")
        assert apriori_spatial_split(0, grid, sched, DAHL.moduli) == \
            pytest.approx(0.5 * 0.01, rel=1e-14)

    def test_constant_closed_form_identity(self):
        grid = uniform(1.0, 10)
        g_t = gamma_tilde(0.1, 0.0, DAHL.moduli)
        loop = apriori_split(10, grid, DAHL.moduli)
        closed = apriori_split_constant(10, 0.1, -1.0, 0.0, g_t)
        assert loop == pytest.approx(closed, rel=1e-12)
        assert loop == pytest.approx(0.7545977210901922, rel=1e-12)

    def test_spatial_split_n_plus_one_terms(self):
        grid = uniform(1.0, 10)
        sched = DiscretizationSchedule.from_rules(grid, "h2", "h")
        loop = apriori_spatial_split(10, grid, sched, DAHL.moduli)
        closed = apriori_spatial_split_constant(10, 0.1, rho=0.01, l_f=-1.0, L_M=0.0)
        assert loop == pytest.approx(closed, rel=1e-12)
        assert loop == pytest.approx(0.035722835528523414, rel=1e-12)
        # degenerate amplification g == 1 exposes the n+1 term count
        flat = apriori_spatial_split_constant(7, 0.1, rho=0.5, l_f=0.0, L_M=0.0)
        assert flat == pytest.approx(0.5 * (7 + 1) * 0.5, rel=1e-14)

    def test_remark_split_smoke(self):
        assert remark_split_constant(1.0, 0.1, -1.0, 0.0, 1.0, 6.0) > 0


class TestFilippovDiscrete:
    def test_exact_trajectory_has_zero_defect(self):
        # follow the split-scheme upper solution: y+ = y/(1+h) + h, a genuine
        # selection of x' = -x + [-1, 1] defects only through time discreteness;
        # instead use a true solution of x' = -x + 1: x(t) = 1 + 4 e^{-t}
        grid = uniform(1.0, 10)
        h = 0.1
        xs = [5.0]
        for k in range(10):
            # implicit Euler step of x' = -x + 1 solves the defect equation
            # (x_{k+1}-x_k)/h = -x_{k+1} + 1 exactly
            xs.append((xs[-1] + h) / (1 + h))
        out = filippov_discrete_bound(np.array(xs), grid, DAHL, DAHL.moduli)
        assert np.all(out <= 1e-9)

    def test_constant_sequence_defect(self):
        # x_n = 5: velocity 0 vs f+M = -5 + [-1,1] -> defect 4
        grid = uniform(1.0, 10)
        xs = np.full(11, 5.0)
        out = filippov_discrete_bound(xs, grid, DAHL, DAHL.moduli)
        h = 0.1
        a = -1.0 * h / (1 + h)
        assert out[1] == pytest.approx(math.exp(a) * h * 4.0, rel=1e-12)
        assert out[1] == pytest.approx(0.36524028651290497, rel=1e-12)

    def test_constant_defect_geometric_sum(self):
        # spiked sequence with constant defect delta against f == 0, M = {0}
        from semireach.convex import Box
        from semireach.problems import Problem
        mod = ModuliSpec.constant(l_f=0.0, L_M=0.0, L=0.0, P=1.0, C=10.0)
        prob = Problem(name="zero", dim=1, f=lambda t, x: 0.0 * x,
                       jac_f=lambda t, x: 0.0, M=lambda t, x: Box((0.0,), (0.0,)),
                       moduli=mod, m_state_independent=True)
        h, delta = 0.25, 0.7
        grid = uniform(1.0, 4)
        xs = np.array([0.0, 1, 2, 3, 4]) * (h * delta)
        out = filippov_discrete_bound(xs, grid, prob, mod)
        # all weights are exp(0) = 1: bound_n = n h delta
        for n in range(5):
            assert out[n] == pytest.approx(n * h * delta, rel=1e-12)

    def test_initial_gap_weighting(self):
        grid = uniform(1.0, 10)
        xs = np.array([1.0 + 4.0 * math.exp(-0.1 * k) for k in range(11)])
        base = filippov_discrete_bound(xs, grid, DAHL, DAHL.moduli)
        shifted = filippov_discrete_bound(xs, grid, DAHL, DAHL.moduli, initial_gap=1.0)
        a = -0.1 / 1.1
        assert shifted[1] - base[1] == pytest.approx(math.exp(a), rel=1e-10)


class TestBoundShape:
    def test_monotone_in_h(self):
        vals = []
        for n in (5, 10, 20, 40):
            grid = uniform(1.0, n)
            vals.append(apriori_parameterized(n, grid, DAHL.moduli))
        assert all(a > b for a, b in zip(vals, vals[1:]))
        vals = []
        for n in (5, 10, 20, 40):
            grid = uniform(1.0, n)
            vals.append(apriori_split(n, grid, DAHL.moduli))
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_monotone_in_rho_eps(self):
        grid = uniform(1.0, 10)
        prev = -1.0
        for s in (0.01, 0.02, 0.04):
            sched = SimpleNamespace(rho=(s,) * 11, eps=(s,) * 10)
            v = apriori_spatial_parameterized(10, grid, sched, DAHL.moduli)
            assert v > prev
            prev = v
        prev = -1.0
        for s in (0.01, 0.02, 0.04):
            sched = SimpleNamespace(rho=(s,) * 11, eps=(s,) * 10)
            v = apriori_spatial_split(10, grid, sched, DAHL.moduli)
            assert v > prev
            prev = v

    def test_negative_osl_keeps_bounds_bounded_in_T(self):
        h = 0.25
        sched_rho = h * h
        vals_t = []
        vals_s = []
        vals_sp = []
        for T in (5.0, 50.0, 500.0):
            n = int(T / h)
            grid = uniform(T, n)
            sched = SimpleNamespace(rho=(sched_rho,) * (n + 1), eps=(h,) * n)
            vals_t.append(apriori_parameterized(n, grid, DAHL.moduli))
            vals_s.append(apriori_split(n, grid, DAHL.moduli))
            vals_sp.append(apriori_spatial_parameterized(n, grid, sched, DAHL.moduli))
        for vals in (vals_t, vals_s, vals_sp):
            assert vals[2] <= 1.05 * vals[1] <= 1.2 * vals[0] + 1e-9
        # the continuous-stability bound saturates too
        grid = uniform(500.0, 2000)
        v500 = apriori_filippov_continuous(2000, grid, DAHL.moduli, num=2048)
        grid5 = uniform(5.0, 20)
        v5 = apriori_filippov_continuous(20, grid5, DAHL.moduli, num=2048)
        assert v500 <= 1.05 * v5 + 1e-9
