"""Problem description, regularizers and the separable proximal kernel.

Every solver component consumes a :class:`Problem`.  The regularizer menu is
deliberately small (zero and weighted L1) so that each proximal map has a
closed form; the trust region is an infinity-norm ball, which keeps the
intersection with the bound constraints a box and the prox separable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class RegularizerKind(str, Enum):
    ZERO = "zero"
    L1 = "l1"


@dataclass(frozen=True)
class RegularizerSpec:
    kind: RegularizerKind = RegularizerKind.ZERO
    weight: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RegularizerKind(self.kind))
        if not self.weight >= 0.0:
            raise ValueError(f"regularizer weight must be nonnegative, got {self.weight}")

    @property
    def lam(self) -> float:
        """Effective L1 weight (0 for the zero regularizer)."""
        return 0.0 if self.kind is RegularizerKind.ZERO else float(self.weight)

    @classmethod
    def zero(cls) -> "RegularizerSpec":
        return cls(RegularizerKind.ZERO, 0.0)

    @classmethod
    def l1(cls, weight: float) -> "RegularizerSpec":
        return cls(RegularizerKind.L1, weight)


@dataclass(frozen=True)
class Problem:
    """min f(x) + h(x) subject to lower <= x <= upper.

    ``lower``/``upper`` may contain infinities.  ``x0`` is the starting point
    handed to the solver; it must be feasible.
    """

    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    x0: np.ndarray
    regularizer: RegularizerSpec = field(default_factory=RegularizerSpec.zero)
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        lo = np.full(self.dim, -np.inf) if self.lower is None else np.asarray(self.lower, float)
        hi = np.full(self.dim, np.inf) if self.upper is None else np.asarray(self.upper, float)
        x0 = np.asarray(self.x0, dtype=float).reshape(-1)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,) or x0.shape != (self.dim,):
            raise ValueError("lower, upper and x0 must have length dim")
        if np.any(lo > hi):
            raise ValueError("lower must not exceed upper")
        for name, arr in (("lower", lo), ("upper", hi), ("x0", x0)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def unconstrained(self) -> bool:
        return bool(np.all(np.isneginf(self.lower)) and np.all(np.isposinf(self.upper)))

    def is_feasible(self, x: np.ndarray) -> bool:
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))


@dataclass(frozen=True)
class BoxBall:
    """Box [lower_shift, upper_shift] intersected with the inf-ball of ``radius``."""

    lower_shift: np.ndarray
    upper_shift: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"trust-region radius must be positive, got {self.radius}")

    @classmethod
    def around(cls, problem: Problem, x: np.ndarray, radius: float) -> "BoxBall":
        return cls(problem.lower - x, problem.upper - x, radius)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.maximum(np.asarray(self.lower_shift, float), -self.radius)
        hi = np.minimum(np.asarray(self.upper_shift, float), self.radius)
        return lo, hi


def eval_h(spec: RegularizerSpec, x) -> float:
    """Value of the regularizer at ``x``."""
    lam = spec.lam
    if lam == 0.0:
        return 0.0
    return lam * float(np.sum(np.abs(x)))


def soft_threshold(q, thresh):
    return np.sign(q) * np.maximum(np.abs(q) - thresh, 0.0)


def prox_separable(spec: RegularizerSpec, q, nu: float, shift, region: BoxBall) -> np.ndarray:
    """Minimize ``0.5/nu*||s - q||^2 + lam*||shift + s||_1`` over the box-ball.

    The objective is separable and convex in each coordinate, so the
    constrained minimizer is the unconstrained scalar prox clamped onto
    ``[max(l - x, -radius), min(u - x, radius)]``.

    Parameters
    ----------
    spec : RegularizerSpec
    q : array_like
        Prox center (for a Cauchy step, ``-nu * grad``).
    nu : float
        Positive step length.
    shift : array_like
        Current point ``x``; the regularizer is evaluated at ``x + s``.
    region : BoxBall
        Shifted bounds and trust-region radius.

    Returns
    -------
    numpy.ndarray
        The step ``s``.
    """
    if not nu > 0:
        raise ValueError(f"prox step nu must be positive, got {nu}")
    q = np.asarray(q, dtype=float)
    x = np.asarray(shift, dtype=float)
    lo, hi = region.bounds()
    if np.any(lo > hi):
        bad = int(np.argmax(lo > hi))
        raise ValueError(f"empty feasible interval in coordinate {bad}: [{lo[bad]}, {hi[bad]}] (infeasible x?)")
    lam = spec.lam
    if lam == 0.0:
        s = q
    else:
        # substitute y = x + s: prox of nu*lam*|y| at x + q
        s = soft_threshold(x + q, nu * lam) - x
    return np.clip(s, lo, hi)
