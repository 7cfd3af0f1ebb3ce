"""Nonsmooth trust-region solver with potentially unbounded Hessian approximations."""

from .adversary import AdversarialInstance, build_instance, eval_f, eval_fprime, k_eps
from .bounds import BoundInputs, delta_min, delta_succ, successful_bound, unsuccessful_bound
from .cauchy import CauchyResult, cauchy_step, select_nu
from .core import BoxBall, Problem, RegularizerSpec, eval_h, prox_separable
from .driver import HessianPolicy, IterationRecord, SolveResult, Status, TRParams, rho, run
from .subsolver import SubproblemSpec, solve_model, solve_model_analytic

__all__ = [
    "AdversarialInstance", "BoundInputs", "BoxBall", "CauchyResult", "HessianPolicy",
    "IterationRecord", "Problem", "RegularizerSpec", "SolveResult", "Status", "SubproblemSpec",
    "TRParams", "build_instance", "cauchy_step", "delta_min", "delta_succ", "eval_f",
    "eval_fprime", "eval_h", "k_eps", "prox_separable", "rho", "run", "select_nu",
    "solve_model", "solve_model_analytic", "successful_bound", "unsuccessful_bound",
]
