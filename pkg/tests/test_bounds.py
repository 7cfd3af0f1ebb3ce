import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxtr.adversary import build_instance
from proxtr.bounds import BoundInputs, delta_min, delta_succ, successful_bound, unsuccessful_bound
from proxtr.driver import run


def inputs(**kw):
    base = dict(
        f0_plus_h0=10.0, f_low=0.0, eta1=1e-3, eta2=0.5, kappa_mdc=0.5, kappa_ubd=1.0,
        mu1=1.0, mu2=1.0, p=0.0, alpha=1.0, beta=1.0, epsilon=1e-2,
        gamma1=1 / 3, gamma2=0.5, gamma4=2.0, delta0=1.0,
    )
    base.update(kw)
    return BoundInputs(**base)


class TestDeltaSucc:
    def test_example(self):
        assert delta_succ(inputs()) == 1 / 8

    def test_eta2_limit(self):
        assert delta_succ(inputs(eta2=1 - 1e-12)) < 1e-12

    def test_beta_scaling(self):
        assert delta_succ(inputs(beta=2.0)) == delta_succ(inputs()) / 4

    def test_delta_min(self):
        assert delta_min(inputs()) == pytest.approx(1 / 24)
        assert delta_min(inputs(eta2=0.0, kappa_mdc=0.9, kappa_ubd=0.01)) == 1.0


class TestSuccessfulBound:
    def test_p_zero_collapse(self):
        inp = inputs(p=0.0, mu1=2.0, mu2=2.0)
        inv = 1 / (inp.alpha * delta_min(inp))
        expected = 2 * inp.mu2 * (1 + inv) * inp.gap / (inp.eta1 * inp.kappa_mdc * inp.epsilon**2)
        assert successful_bound(inp).growth_value == pytest.approx(expected, rel=1e-14)
        # bounded-regime value shares the eps^-2 scaling
        half = successful_bound(inp.with_(epsilon=inp.epsilon / 2))
        assert half.bounded_value / successful_bound(inp).bounded_value == pytest.approx(4.0, rel=1e-12)
        assert half.growth_value / successful_bound(inp).growth_value == pytest.approx(4.0, rel=1e-12)

    def test_third_power(self):
        inp = inputs(p=1 / 3)
        ratio = successful_bound(inp.with_(epsilon=inp.epsilon / 2)).growth_value / successful_bound(inp).growth_value
        assert ratio == pytest.approx(8.0, rel=1e-12)

    def test_regime_tag(self):
        assert successful_bound(inputs(mu1=1e12, mu2=1.0, p=0.1)).regime == "bounded"
        assert successful_bound(inputs(mu1=1.0, mu2=1.0, p=0.5)).regime == "growth"

    def test_overflow_becomes_inf(self):
        sb = successful_bound(inputs(p=0.99, epsilon=1e-8))
        assert sb.growth_value == math.inf

    def test_validation(self):
        with pytest.raises(ValueError):
            inputs(f_low=20.0)
        with pytest.raises(ValueError):
            inputs(kappa_mdc=1.0)


class TestUnsuccessfulBound:
    def test_zero(self):
        inp = inputs(eta2=0.0, kappa_mdc=0.9, kappa_ubd=0.01)
        assert delta_min(inp) == inp.delta0
        assert unsuccessful_bound(0, inp) == 0.0

    def test_ten(self):
        inp = inputs(eta2=0.0, kappa_mdc=0.9, kappa_ubd=0.01, gamma2=0.5, gamma4=2.0)
        assert unsuccessful_bound(10, inp) == pytest.approx(10.0, rel=1e-15)


@given(st.floats(1e-4, 0.5), st.floats(1.01, 10), st.floats(0, 0.9), st.floats(1e-3, 1e3))
def test_monotone(eps, factor, p, gap):
    inp = inputs(epsilon=eps, p=p, f0_plus_h0=gap)
    sb = successful_bound(inp)
    smaller_eps = successful_bound(inp.with_(epsilon=eps / factor))
    larger_gap = successful_bound(inp.with_(f0_plus_h0=gap * factor))
    for name in ("bounded_value", "growth_value"):
        assert getattr(smaller_eps, name) >= getattr(sb, name)
        assert getattr(larger_gap, name) >= getattr(sb, name)


@pytest.mark.parametrize("eps", [0.1, 0.05])
def test_observed_within_bounds(eps):
    inst = build_instance(eps, 0.1)
    params = inst.params()
    res = run(inst.problem(), params, inst.policy(), "analytic")
    mu1, mu2, p = inst.policy().growth_constants()
    inp = BoundInputs.from_run(res, params, mu1, mu2, p, f_low=inst.at("f", inst.k_eps))
    assert 0 < inp.kappa_mdc < 1
    sb = successful_bound(inp)
    assert res.n_successful == inst.k_eps <= sb.growth_value
    assert res.n_successful <= sb.bound
    assert res.n_unsuccessful == 0 <= unsuccessful_bound(res.n_successful, inp)
