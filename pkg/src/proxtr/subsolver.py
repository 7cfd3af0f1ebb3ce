"""Approximate minimization of the quadratic-plus-regularizer model.

The model at ``x`` with Hessian approximation ``b*I`` is

    m(s) = f(x) + g's + 0.5*b*||s||^2 + h(x + s)

restricted to the shifted box and the inf-ball of the effective radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoxBall, RegularizerSpec, eval_h, prox_separable

MODEL_INCREASE_TOL = 1e-12
STEP_CHANGE_TOL = 1e-10


class SubproblemError(RuntimeError):
    pass


@dataclass(frozen=True)
class SubproblemSpec:
    grad: np.ndarray
    b: float
    radius_eff: float
    s1: np.ndarray
    x: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    regularizer: RegularizerSpec = RegularizerSpec()
    alpha: float = 1e16

    def region(self) -> BoxBall:
        return BoxBall(self.lower - self.x, self.upper - self.x, self.radius_eff)


def model_decrease(grad, b: float, s, spec: RegularizerSpec, x) -> float:
    """m(0) - m(s), assembled term by term (f(x) cancels)."""
    s = np.asarray(s, dtype=float)
    quad = float(np.dot(grad, s)) + 0.5 * b * float(np.dot(s, s))
    return -quad + eval_h(spec, x) - eval_h(spec, x + s)


def solve_model(spec: SubproblemSpec, max_inner: int = 50, full_output: bool = False):
    """Proximal-gradient iterations on the model, warm-started at ``s1``.

    The step length is ``1/(b + 1/(alpha*radius_eff))``.  The best iterate by
    model value is returned, so the result never does worse than ``s1``.
    With ``full_output`` the pair ``(s, n_inner)`` is returned.
    """
    grad = np.asarray(spec.grad, dtype=float)
    b = float(spec.b)
    region = spec.region()
    # 1/(b + 1/(alpha*r)) written so that a subnormal radius cannot overflow
    ar = spec.alpha * spec.radius_eff
    t = ar / (1.0 + b * ar)

    def mval(s):
        return -model_decrease(grad, b, s, spec.regularizer, spec.x)

    s = np.asarray(spec.s1, dtype=float).copy()
    best, best_val = s, mval(s)
    start_val = best_val
    n_inner = 0
    if not t > 0:  # radius below the representable step scale: keep s1
        return (best, n_inner) if full_output else best
    for _ in range(max_inner):
        s_new = prox_separable(spec.regularizer, s - t * (grad + b * s), t, spec.x, region)
        n_inner += 1
        val = mval(s_new)
        if val < best_val:
            best, best_val = s_new, val
        if np.max(np.abs(s_new - s), initial=0.0) < STEP_CHANGE_TOL:
            break
        s = s_new
    if best_val > start_val + MODEL_INCREASE_TOL:
        raise SubproblemError("model increased over the Cauchy step")
    return (best, n_inner) if full_output else best


def solve_model_analytic(grad, b: float) -> np.ndarray:
    """Global minimizer ``-grad/b`` of the smooth unconstrained model."""
    if not b > 0:
        raise ValueError(f"analytic step needs b > 0, got {b}")
    return -np.asarray(grad, dtype=float) / b
