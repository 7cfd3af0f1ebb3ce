"""Closed-form worst-case iteration counts for comparison with observed runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .driver import SolveResult, TRParams


@dataclass(frozen=True)
class BoundInputs:
    f0_plus_h0: float
    f_low: float
    eta1: float
    eta2: float
    kappa_mdc: float
    kappa_ubd: float
    mu1: float
    mu2: float
    p: float
    alpha: float
    beta: float
    epsilon: float
    gamma1: float
    gamma2: float
    gamma4: float
    delta0: float

    def __post_init__(self):
        if not self.f0_plus_h0 >= self.f_low:
            raise ValueError("need (f+h)(x0) >= (f+h)_low")
        if not 0 < self.kappa_mdc < 1:
            raise ValueError(f"kappa_mdc must lie in (0, 1), got {self.kappa_mdc}")
        if not (self.kappa_ubd > 0 and self.mu1 > 0 and self.mu2 > 0 and self.alpha > 0):
            raise ValueError("kappa_ubd, mu1, mu2 and alpha must be positive")
        if not 0 <= self.p < 1:
            raise ValueError("p must lie in [0, 1)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.gamma2 < 1 < self.gamma4:
            raise ValueError("need 0 < gamma2 < 1 < gamma4")

    @property
    def gap(self) -> float:
        return self.f0_plus_h0 - self.f_low

    @classmethod
    def from_run(
        cls,
        result: SolveResult,
        params: TRParams,
        mu1: float,
        mu2: float,
        p: float,
        f_low: float | None = None,
        kappa_ubd: float = 0.5,
    ) -> "BoundInputs":
        """Bound inputs derived a posteriori from a solver trace.

        ``kappa_mdc`` is the smallest ``1 - nu_k ||B_k||`` seen; ``f_low``
        defaults to the best objective value observed.
        """
        hist = result.history
        values = [r.f_val + r.h_val for r in hist]
        kappa = min(r.kappa_mdc for r in hist)
        return cls(
            f0_plus_h0=values[0],
            f_low=min(values) if f_low is None else f_low,
            eta1=params.eta1, eta2=params.eta2,
            kappa_mdc=kappa, kappa_ubd=kappa_ubd,
            mu1=mu1, mu2=mu2, p=p,
            alpha=params.alpha, beta=params.beta, epsilon=params.epsilon,
            gamma1=params.gamma1, gamma2=params.gamma2, gamma4=params.gamma4,
            delta0=params.delta0,
        )

    def with_(self, **changes) -> "BoundInputs":
        return replace(self, **changes)


class SuccessfulBound(NamedTuple):
    regime: str
    bound: float
    bounded_value: float
    growth_value: float


def delta_succ(inputs: BoundInputs) -> float:
    """Radius below which every iteration is very successful."""
    return inputs.kappa_mdc * (1.0 - inputs.eta2) / (2.0 * inputs.kappa_ubd * inputs.alpha * inputs.beta**2)


def delta_min(inputs: BoundInputs) -> float:
    return min(inputs.delta0, inputs.gamma1 * delta_succ(inputs))


def successful_bound(inputs: BoundInputs) -> SuccessfulBound:
    """Upper bounds on the number of successful iterations.

    Both closed forms are evaluated.  The regime tag comes from testing the
    bounded-regime conditions at the candidate count given by the growth
    formula; ``bound`` is the value for the tagged regime.
    """
    dmin = delta_min(inputs)
    inv = 1.0 / (inputs.alpha * dmin)
    scale = inputs.gap / (inputs.eta1 * inputs.kappa_mdc * inputs.epsilon**2)
    bounded = max(inputs.mu1 * (1.0 + inv) + inv, 2.0 * inv) * scale
    try:
        growth = (2.0 * inputs.mu2 * (1.0 + inv) * scale) ** (1.0 / (1.0 - inputs.p))
    except OverflowError:
        growth = math.inf

    grown = inputs.mu2 * growth**inputs.p
    if inputs.mu1 >= grown or inputs.mu1 < grown < 1.0 / (1.0 + inputs.alpha * dmin):
        return SuccessfulBound("bounded", bounded, bounded, growth)
    return SuccessfulBound("growth", growth, bounded, growth)


def unsuccessful_bound(n_successful: int, inputs: BoundInputs) -> float:
    """``log_{gamma2}(delta_min/delta0) + n_successful * |log_{gamma2}(gamma4)|``."""
    lg2 = math.log(inputs.gamma2)
    return math.log(delta_min(inputs) / inputs.delta0) / lg2 + n_successful * abs(math.log(inputs.gamma4) / lg2)
