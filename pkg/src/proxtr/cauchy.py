"""Step length, Cauchy step and criticality measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BoxBall, Problem, eval_h, prox_separable

# rounding slack below zero tolerated in the model decrease before it is
# treated as a broken prox
XI_NEGATIVE_TOL = 1e-10


class CauchyError(RuntimeError):
    """Raised when the Cauchy decrease is negative beyond rounding."""


@dataclass(frozen=True)
class CauchyResult:
    nu: float
    s1: np.ndarray
    xi_cp: float
    criticality: float


def select_nu(delta: float, norm_B: float, alpha: float) -> float:
    """Largest admissible step length 1 / (1/(alpha*delta) + ||B|| (1 + 1/(alpha*delta)))."""
    for name, val in (("delta", delta), ("norm_B", norm_B), ("alpha", alpha)):
        if not math.isfinite(val):
            raise ValueError(f"{name} must be finite, got {val}")
    if delta <= 0 or alpha <= 0 or norm_B < 0:
        raise ValueError("need delta > 0, alpha > 0 and norm_B >= 0")
    inv = 1.0 / (alpha * delta)
    return 1.0 / (inv + norm_B * (1.0 + inv))


def nu_B_margin(nu: float, delta: float, norm_B: float, alpha: float) -> float:
    """``1 - nu*||B||`` evaluated without cancellation.

    With ``nu`` from :func:`select_nu`, ``1 - nu*||B|| = nu (1 + ||B||) / (alpha*delta)``,
    a product of positive numbers.  For huge ``alpha`` the direct difference
    rounds to zero (or below) even though the exact value is positive.
    """
    return nu * (1.0 + norm_B) / (alpha * delta)


def cauchy_step(problem: Problem, x, grad, nu: float, delta: float) -> CauchyResult:
    """Compute the Cauchy step and the associated optimal model decrease.

    ``s1`` minimizes ``grad's + 0.5/nu ||s||^2 + h(x + s)`` over the shifted box
    intersected with the inf-ball of radius ``delta``; ``xi_cp`` is the decrease
    of the first-order model ``f + grad's + h`` at ``s1``.
    """
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    spec = problem.regularizer
    s1 = prox_separable(spec, -nu * grad, nu, x, BoxBall.around(problem, x, delta))
    xi = -float(np.dot(grad, s1)) + eval_h(spec, x) - eval_h(spec, x + s1)
    if xi < -XI_NEGATIVE_TOL:
        raise CauchyError(f"negative Cauchy decrease xi_cp = {xi:.3e}")
    xi = max(xi, 0.0)
    return CauchyResult(nu=nu, s1=s1, xi_cp=xi, criticality=math.sqrt(xi / nu))
