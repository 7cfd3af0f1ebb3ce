"""Small builtin test problems with known solutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Problem, RegularizerSpec
from .driver import HessianPolicy


@dataclass(frozen=True)
class Builtin:
    problem: Problem
    policy: HessianPolicy
    solution: np.ndarray


def separable_quadratic(center, weights=None, x0=None, regularizer=None, lower=None, upper=None, name=""):
    """``f(x) = 0.5 * sum(w_i (x_i - c_i)^2)``."""
    c = np.asarray(center, dtype=float)
    w = np.ones_like(c) if weights is None else np.asarray(weights, dtype=float)
    return Problem(
        dim=c.size,
        f=lambda x: 0.5 * float(np.dot(w, (x - c) ** 2)),
        grad=lambda x: w * (x - c),
        x0=np.zeros_like(c) if x0 is None else x0,
        regularizer=regularizer or RegularizerSpec.zero(),
        lower=lower,
        upper=upper,
        name=name,
    )


def _quadratic():
    return Builtin(separable_quadratic([1.0], name="quadratic"), HessianPolicy.constant(1.0), np.array([1.0]))


def _lasso():
    prob = separable_quadratic([1.0], regularizer=RegularizerSpec.l1(0.5), name="lasso")
    return Builtin(prob, HessianPolicy.constant(1.0), np.array([0.5]))


def _box_quadratic():
    # unconstrained minimizer (2, -3, 0.5) lies outside [-1, 1]^3
    prob = separable_quadratic([2.0, -3.0, 0.5], lower=-np.ones(3), upper=np.ones(3), name="box_quadratic")
    return Builtin(prob, HessianPolicy.constant(1.0), np.array([1.0, -1.0, 0.5]))


def _box_lasso():
    # coordinatewise: soft-threshold c_i by lam/w_i, then clamp to [-1, 1]
    prob = separable_quadratic(
        [2.0, -3.0, 0.3], weights=[1.0, 2.0, 4.0], regularizer=RegularizerSpec.l1(0.5),
        lower=-np.ones(3), upper=np.ones(3), name="box_lasso",
    )
    return Builtin(prob, HessianPolicy.constant(4.0), np.array([1.0, -1.0, 0.175]))


BUILTINS = {
    "quadratic": _quadratic,
    "lasso": _lasso,
    "box_quadratic": _box_quadratic,
    "box_lasso": _box_lasso,
}


def builtin(name: str) -> Builtin:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin problem {name!r}; choose from {sorted(BUILTINS)}") from None
