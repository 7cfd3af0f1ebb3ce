"""Outer trust-region loop with potentially unbounded Hessian approximations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cauchy import CauchyError, cauchy_step, nu_B_margin, select_nu
from .core import BoxBall, Problem, eval_h, prox_separable
from .subsolver import (
    SubproblemError,
    SubproblemSpec,
    model_decrease,
    solve_model,
    solve_model_analytic,
)

AUDIT_TOL = 1e-10


class ModelDecreaseError(RuntimeError):
    """Nonpositive model decrease at a non-critical point."""


class OracleError(ValueError):
    """An objective or gradient oracle returned a nonfinite value."""


@dataclass(frozen=True)
class TRParams:
    eta1: float = 1e-3
    eta2: float = 0.75
    gamma1: float = 1.0 / 3.0
    gamma2: float = 0.9
    gamma3: float = 3.0
    gamma4: float = 5.0
    delta0: float = 1.0
    delta_max: float = 1e3
    alpha: float = 1e16
    beta: float = 1e16
    epsilon: float = 1e-6
    max_iter: int = 10_000

    def __post_init__(self):
        self.validate()

    def validate(self):
        problems = []
        if not 0 < self.eta1 <= self.eta2 < 1:
            problems.append("need 0 < eta1 <= eta2 < 1")
        if not 0 < 1 / self.gamma3 <= self.gamma1 <= self.gamma2 < 1 < self.gamma3 <= self.gamma4:
            problems.append("need 0 < 1/gamma3 <= gamma1 <= gamma2 < 1 < gamma3 <= gamma4")
        if not self.delta_max > self.delta0 > 0:
            problems.append("need delta_max > delta0 > 0")
        if not self.alpha > 0:
            problems.append("need alpha > 0")
        if not self.beta >= 1:
            problems.append("need beta >= 1")
        if not 0 < self.epsilon < 1:
            problems.append("need 0 < epsilon < 1")
        if not (isinstance(self.max_iter, int) and self.max_iter > 0):
            problems.append("need a positive integer max_iter")
        if problems:
            raise ValueError("invalid trust-region parameters: " + "; ".join(problems))


class PolicyKind(str, Enum):
    CONSTANT = "constant"
    POWER_GROWTH = "power_growth"
    ADVERSARIAL_POWER = "adversarial_power"


@dataclass(frozen=True)
class HessianPolicy:
    """Rule producing ``B_k = b_k * I``.

    ``constant``: ``b_k = b``.
    ``power_growth``: ``b_k = max(mu1, mu2 * sigma**p)`` with ``sigma`` the number
    of successful iterations before ``k``.
    ``adversarial_power``: ``b_0 = 1``, ``b_k = k**p``.
    """

    kind: PolicyKind
    b: float = 1.0
    mu1: float = 1.0
    mu2: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not 0 <= self.p < 1:
            raise ValueError(f"growth exponent p must lie in [0, 1), got {self.p}")
        if self.kind is PolicyKind.CONSTANT and not self.b >= 0:
            raise ValueError("constant Hessian norm must be nonnegative")
        if self.kind is PolicyKind.POWER_GROWTH and not (self.mu1 > 0 and self.mu2 > 0):
            raise ValueError("mu1 and mu2 must be positive")

    @classmethod
    def constant(cls, b: float) -> "HessianPolicy":
        return cls(PolicyKind.CONSTANT, b=b)

    @classmethod
    def power_growth(cls, mu1: float, mu2: float, p: float) -> "HessianPolicy":
        return cls(PolicyKind.POWER_GROWTH, mu1=mu1, mu2=mu2, p=p)

    @classmethod
    def adversarial_power(cls, p: float) -> "HessianPolicy":
        return cls(PolicyKind.ADVERSARIAL_POWER, p=p)

    def norm(self, k: int, sigma: int) -> float:
        if self.kind is PolicyKind.CONSTANT:
            return float(self.b)
        if self.kind is PolicyKind.POWER_GROWTH:
            return max(self.mu1, self.mu2 * sigma**self.p)
        return 1.0 if k == 0 else float(k) ** self.p

    def growth_constants(self) -> tuple[float, float, float]:
        """(mu1, mu2, p) for which the growth condition is declared to hold."""
        if self.kind is PolicyKind.CONSTANT:
            mu = self.b if self.b > 0 else 1.0
            return mu, mu, 0.0
        if self.kind is PolicyKind.POWER_GROWTH:
            return self.mu1, self.mu2, self.p
        return 1.0, 1.0, self.p


class Status(str, Enum):
    FIRST_ORDER_STATIONARY = "first_order_stationary"
    MAX_ITER = "max_iter"
    ERROR = "error"


class StepStatus(str, Enum):
    VERY_SUCCESSFUL = "very_successful"
    SUCCESSFUL = "successful"
    UNSUCCESSFUL = "unsuccessful"
    TERMINATED = "terminated"


@dataclass
class IterationRecord:
    k: int
    inner: int
    f_val: float
    h_val: float
    criticality: float
    sqrt_xi: float
    rho: float
    delta: float
    x_norm: float
    s_norm: float
    B_norm: float
    status: StepStatus
    nu: float = math.nan
    xi_cp: float = math.nan
    s1_norm: float = math.nan
    kappa_mdc: float = math.nan
    model_decrease: float = math.nan
    model_error: float = math.nan
    sigma: int = 0


@dataclass
class SolveResult:
    status: Status
    final_x: np.ndarray
    iterations: int
    n_successful: int
    n_unsuccessful: int
    history: list[IterationRecord] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    message: str = ""

    @property
    def audits_passed(self) -> bool:
        return not self.violations

    @property
    def final_criticality(self) -> float:
        return self.history[-1].criticality if self.history else math.nan


def rho(actual_decrease: float, model_decrease: float) -> float:
    """Ratio of actual to predicted decrease."""
    if not model_decrease > 0:
        raise ModelDecreaseError(f"model decrease must be positive, got {model_decrease}")
    return actual_decrease / model_decrease


def _finite_value(val, what: str) -> float:
    val = float(val)
    if not math.isfinite(val):
        raise OracleError(f"{what} oracle returned {val}")
    return val


def _finite_grad(g, dim: int) -> np.ndarray:
    g = np.asarray(g, dtype=float).reshape(-1)
    if g.shape != (dim,) or not np.all(np.isfinite(g)):
        raise OracleError(f"gradient oracle returned an invalid vector {g}")
    return g


def run(
    problem: Problem,
    params: TRParams = TRParams(),
    policy: HessianPolicy = HessianPolicy.constant(1.0),
    subsolver_mode: str = "iterative",
    max_inner: int = 50,
) -> SolveResult:
    """Minimize ``f + h`` over the box with the nonsmooth trust-region method.

    Parameters
    ----------
    problem : Problem
    params : TRParams
    policy : HessianPolicy
        Produces ``||B_k||``; the model Hessian is ``||B_k|| * I``.
    subsolver_mode : {"iterative", "analytic"}
        ``analytic`` uses ``s = -g/b`` and requires ``h = 0`` with no bounds.
    max_inner : int
        Iteration cap of the proximal-gradient subsolver.

    Returns
    -------
    SolveResult
        Final point, counts and per-iteration trace.  Runtime audits of the
        convergence assumptions are collected in ``violations``.
    """
    if subsolver_mode not in ("iterative", "analytic"):
        raise ValueError(f"unknown subsolver mode {subsolver_mode!r}")
    analytic = subsolver_mode == "analytic"
    spec = problem.regularizer
    if analytic and not (spec.lam == 0.0 and problem.unconstrained):
        raise ValueError("analytic subsolver needs h = 0 and no bound constraints")

    x = problem.x0.copy()
    if not problem.is_feasible(x):
        raise ValueError("x0 is not feasible")
    fx = _finite_value(problem.f(x), "objective")
    hx = eval_h(spec, x)
    mu1, mu2, p = policy.growth_constants()

    delta = params.delta0
    sigma = n_succ = n_unsucc = 0
    max_B = 0.0
    history: list[IterationRecord] = []
    violations: list[str] = []
    status = Status.MAX_ITER
    message = ""

    def growth_audit(k):
        if max_B > max(mu1, mu2 * sigma**p) * (1 + 1e-14):
            violations.append(f"k={k}: growth audit failed, max||B_j|| = {max_B}, sigma = {sigma}")

    try:
        for k in range(params.max_iter + 1):
            g = _finite_grad(problem.grad(x), problem.dim)
            b = policy.norm(k, sigma)
            max_B = max(max_B, b)
            nu = select_nu(delta, b, params.alpha)
            kappa = nu_B_margin(nu, delta, b, params.alpha)
            if not kappa > 0:
                violations.append(f"k={k}: nu*||B|| = {nu * b} is not below 1")
            cp = cauchy_step(problem, x, g, nu, delta)
            s1_norm2 = float(np.dot(cp.s1, cp.s1))
            if cp.xi_cp < 0.5 * s1_norm2 / nu - AUDIT_TOL * max(1.0, cp.xi_cp):
                violations.append(f"k={k}: xi_cp below 0.5/nu*||s1||^2")

            if cp.criticality <= params.epsilon or k == params.max_iter:
                if cp.criticality <= params.epsilon:
                    status = Status.FIRST_ORDER_STATIONARY
                growth_audit(k)
                history.append(IterationRecord(
                    k=k, inner=0, f_val=fx, h_val=hx, criticality=cp.criticality,
                    sqrt_xi=math.nan, rho=math.nan, delta=delta,
                    x_norm=float(np.linalg.norm(x)), s_norm=math.sqrt(s1_norm2), B_norm=b,
                    status=StepStatus.TERMINATED, nu=nu, xi_cp=cp.xi_cp,
                    s1_norm=math.sqrt(s1_norm2), kappa_mdc=kappa, sigma=sigma,
                ))
                break

            s1_inf = float(np.max(np.abs(cp.s1)))
            radius_eff = min(delta, params.beta * s1_inf)
            if analytic:
                s = solve_model_analytic(g, b)
                inner = 1
                if float(np.max(np.abs(s))) > radius_eff:
                    # scalar B, h = 0: the clamped minimizer is the exact constrained one
                    s = prox_separable(spec, s, 1.0, x, BoxBall.around(problem, x, radius_eff))
            else:
                sub = SubproblemSpec(
                    grad=g, b=b, radius_eff=radius_eff, s1=cp.s1, x=x,
                    lower=problem.lower, upper=problem.upper, regularizer=spec,
                    alpha=params.alpha,
                )
                s, inner = solve_model(sub, max_inner=max_inner, full_output=True)

            mdec = model_decrease(g, b, s, spec, x)
            if not mdec > 0:
                raise ModelDecreaseError(
                    f"k={k}: model decrease {mdec:.3e} <= 0 with criticality {cp.criticality:.3e} > epsilon"
                )
            if mdec < kappa * cp.xi_cp - AUDIT_TOL:
                violations.append(f"k={k}: sufficient model decrease failed ({mdec} < {kappa} * {cp.xi_cp})")

            x_trial = x + s
            f_trial = _finite_value(problem.f(x_trial), "objective")
            h_trial = eval_h(spec, x_trial)
            actual = (fx - f_trial) + (hx - h_trial)
            r = rho(actual, mdec)
            model_err = abs(f_trial + h_trial - (fx + hx - mdec))

            if r >= params.eta2:
                step_status = StepStatus.VERY_SUCCESSFUL
                new_delta = min(params.gamma3 * delta, params.delta_max)
            elif r >= params.eta1:
                step_status = StepStatus.SUCCESSFUL
                new_delta = min(delta, params.delta_max)
            else:
                step_status = StepStatus.UNSUCCESSFUL
                new_delta = min(params.gamma2 * delta, params.delta_max)

            history.append(IterationRecord(
                k=k, inner=inner, f_val=fx, h_val=hx, criticality=cp.criticality,
                sqrt_xi=math.sqrt(mdec), rho=r, delta=delta,
                x_norm=float(np.linalg.norm(x)), s_norm=float(np.linalg.norm(s)), B_norm=b,
                status=step_status, nu=nu, xi_cp=cp.xi_cp, s1_norm=math.sqrt(s1_norm2),
                kappa_mdc=kappa, model_decrease=mdec, model_error=model_err,
                sigma=sigma + (r >= params.eta1),
            ))

            if r >= params.eta1:
                x, fx, hx = x_trial, f_trial, h_trial
                sigma += 1
                n_succ += 1
            else:
                n_unsucc += 1
            growth_audit(k)
            delta = new_delta
    except (ModelDecreaseError, CauchyError, SubproblemError) as exc:
        status = Status.ERROR
        message = str(exc)

    return SolveResult(
        status=status,
        final_x=x,
        iterations=n_succ + n_unsucc,
        n_successful=n_succ,
        n_unsuccessful=n_unsucc,
        history=history,
        violations=violations,
        message=message,
    )
