import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxtr.cauchy import cauchy_step, nu_B_margin, select_nu
from proxtr.core import Problem, RegularizerSpec

from oracles import grid_argmin


def smooth_problem(dim=1, reg=None, lower=None, upper=None, const=0.0):
    return Problem(dim=dim, f=lambda x: const, grad=lambda x: np.zeros(dim), x0=np.zeros(dim),
                   regularizer=reg or RegularizerSpec.zero(), lower=lower, upper=upper)


class TestSelectNu:
    def test_zero_hessian(self):
        assert select_nu(1.0, 0.0, 1.0) == 1.0

    def test_unit_hessian(self):
        assert select_nu(1.0, 1.0, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_huge_alpha(self):
        # exact value 1 - 2e-16; the intermediate sums round, so allow one ulp of 1
        assert select_nu(1.0, 1.0, 1e16) == pytest.approx(1.0 - 2e-16, abs=2.5e-16)

    @pytest.mark.parametrize("bad", [math.inf, math.nan])
    def test_nonfinite(self, bad):
        with pytest.raises(ValueError):
            select_nu(bad, 1.0, 1.0)
        with pytest.raises(ValueError):
            select_nu(1.0, bad, 1.0)

    @given(
        st.floats(1e-6, 1e3),
        st.floats(0, 1e4),
        st.floats(1e-3, 1e16),
    )
    def test_nu_times_B_bounded(self, delta, norm_B, alpha):
        delta_max = 1e3
        nu = select_nu(delta, norm_B, alpha)
        assert nu * norm_B <= 1.0 / (1.0 + 1.0 / (alpha * delta_max)) * (1 + 1e-15)
        margin = nu_B_margin(nu, delta, norm_B, alpha)
        assert margin > 0
        assert margin == pytest.approx(1.0 - nu * norm_B, abs=1e-14)


class TestCauchyStep:
    def test_stationary(self):
        res = cauchy_step(smooth_problem(), [0.0], [0.0], 0.7, 2.0)
        assert res.s1.tolist() == [0.0] and res.xi_cp == 0.0 and res.criticality == 0.0

    def test_smooth_inactive(self):
        g, nu = 0.4, 0.5
        res = cauchy_step(smooth_problem(), [0.0], [g], nu, 1.0)
        assert res.xi_cp == pytest.approx(nu * g**2, rel=1e-15)
        assert res.criticality == pytest.approx(abs(g), rel=1e-15)

    def test_l1_threshold_kills_step(self):
        # brute force: argmin of 0.3 s + 0.5 s^2 + |s|
        ref, _ = grid_argmin(lambda s: 0.3 * s + 0.5 * s**2 + np.abs(s), -5.0, 5.0)
        assert ref == pytest.approx(0.0, abs=1e-6)
        res = cauchy_step(smooth_problem(reg=RegularizerSpec.l1(1.0)), [0.0], [0.3], 1.0, math.inf)
        assert res.s1[0] == pytest.approx(ref, abs=1e-6)
        assert res.xi_cp == 0.0

    def test_box_active(self):
        prob = smooth_problem(lower=[-0.1], upper=[0.1])
        res = cauchy_step(prob, [0.0], [2.0], 1.0, 1.0)
        assert res.s1.tolist() == [-0.1]
        assert res.xi_cp == pytest.approx(0.2)

    def test_constant_shift_invariance(self):
        a = cauchy_step(smooth_problem(const=0.0), [0.3], [1.2], 0.4, 0.5)
        b = cauchy_step(smooth_problem(const=1e6), [0.3], [1.2], 0.4, 0.5)
        assert a.xi_cp == b.xi_cp and np.array_equal(a.s1, b.s1)


vec = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=4)


@given(vec, st.floats(1e-3, 10), st.floats(0.01, 100), st.floats(0, 50), st.booleans())
def test_sufficient_decrease(g, delta, alpha, norm_B, use_l1):
    g = np.array(g)
    reg = RegularizerSpec.l1(0.3) if use_l1 else RegularizerSpec.zero()
    prob = smooth_problem(dim=g.size, reg=reg, lower=np.full(g.size, -2.0), upper=np.full(g.size, 2.0))
    x = np.linspace(-1, 1, g.size)
    nu = select_nu(delta, norm_B, alpha)
    res = cauchy_step(prob, x, g, nu, delta)
    assert res.xi_cp >= 0.5 / nu * float(res.s1 @ res.s1) - 1e-12 * max(1.0, res.xi_cp)
    assert res.criticality**2 == pytest.approx(res.xi_cp / nu, rel=1e-15, abs=1e-300)


@given(vec, st.floats(1e-3, 1e3), st.floats(1e-2, 1e16), st.floats(0, 1e3))
def test_smooth_criticality_equals_gradient_norm(g, delta, alpha, norm_B):
    g = np.array(g)
    nu = select_nu(delta, norm_B, alpha)
    if nu * np.max(np.abs(g)) >= delta:
        return  # trust region active
    res = cauchy_step(smooth_problem(dim=g.size), np.zeros(g.size), g, nu, delta)
    assert abs(res.criticality - np.linalg.norm(g)) <= 1e-10
