"""One-dimensional objective on which the trust-region method is slowest.

The instance is a piecewise cubic Hermite interpolant through prescribed
iterates ``x_k``, values ``f_k`` and slopes ``g_k``.  Run with ``B_k = k**p``
and the largest admissible step length, the solver visits exactly those
iterates, accepts every step with ratio 2 and stops after
``floor(eps**(-2/(1-p)))`` iterations.

Arrays of :class:`AdversarialInstance` are indexed by ``k + 1`` for
``k = -1, ..., k_eps + 1``; use :meth:`AdversarialInstance.at` for ``k``-based
access.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cauchy import select_nu
from .core import Problem
from .driver import HessianPolicy, TRParams


def k_eps(epsilon: float, p: float) -> int:
    """``floor(epsilon**(-2/(1-p)))`` with a guard for values a few ulps from an integer."""
    if not 0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    val = epsilon ** (-2.0 / (1.0 - p))
    nearest = round(val)
    if abs(val - nearest) <= 4 * math.ulp(nearest):
        return int(nearest)
    return math.floor(val)


def hermite_coefficients(f0, g0, f1, g1, s):
    """Cubic ``c0 + c1 t + c2 t^2 + c3 t^3`` matching (f0, g0) at 0 and (f1, g1) at ``s``."""
    r1 = f1 - (f0 + g0 * s)
    r2 = g1 - g0
    # inverse of [[s^2, s^3], [2s, 3s^2]] is [[3s^2, -s^3], [-2s, s^2]] / s^4
    c2 = 3.0 * r1 / s**2 - r2 / s
    c3 = -2.0 * r1 / s**3 + r2 / s**2
    return f0, g0, c2, c3


@dataclass(frozen=True)
class AdversarialInstance:
    epsilon: float
    p: float
    alpha: float
    beta: float
    gamma3: float
    delta_max: float
    k_eps: int
    k: np.ndarray
    w: np.ndarray
    g: np.ndarray
    f: np.ndarray
    x: np.ndarray
    s: np.ndarray
    B: np.ndarray
    nu: np.ndarray
    s1: np.ndarray
    delta: np.ndarray
    coeffs: np.ndarray  # one row per piece k = -1..k_eps

    def at(self, name: str, k: int) -> float:
        return float(getattr(self, name)[k + 1])

    @property
    def f0(self) -> float:
        return self.at("f", 0)

    def problem(self) -> Problem:
        return Problem(
            dim=1,
            f=lambda x: eval_f(self, float(x[0])),
            grad=lambda x: np.array([eval_fprime(self, float(x[0]))]),
            x0=np.zeros(1),
            name=f"adversarial(eps={self.epsilon:g}, p={self.p:g})",
        )

    def params(self, max_iter: int | None = None) -> TRParams:
        return TRParams(
            epsilon=self.epsilon,
            alpha=self.alpha,
            beta=self.beta,
            gamma1=max(1.0 / 3.0, 1.0 / self.gamma3),
            gamma2=max(0.9, 1.0 / self.gamma3),
            gamma3=self.gamma3,
            gamma4=max(5.0, self.gamma3),
            delta0=1.0,
            delta_max=self.delta_max,
            max_iter=max_iter if max_iter is not None else max(10 * self.k_eps, 100),
        )

    def policy(self) -> HessianPolicy:
        return HessianPolicy.adversarial_power(self.p)

    def piece_values(self, j, tau):
        """Value and slope of piece ``j`` (row index, so ``k = j - 1``) at offset ``tau``."""
        c0, c1, c2, c3 = np.asarray(self.coeffs[j]).T
        return c0 + tau * (c1 + tau * (c2 + tau * c3)), c1 + tau * (2.0 * c2 + tau * 3.0 * c3)


def build_instance(
    epsilon: float,
    p: float,
    alpha: float = 1e16,
    beta: float = 1e16,
    gamma3: float = 3.0,
    delta_max: float = 1e3,
) -> AdversarialInstance:
    """Precompute the iterates and Hermite pieces of the slow instance.

    Parameters
    ----------
    epsilon : float
        Stopping tolerance, in (0, 1/2].
    p : float
        Growth exponent of ``B_k = k**p``, in [0, 1).
    alpha, beta : float
        Step-length and radius constants; ``beta >= 2/alpha + 1`` is required.
    gamma3, delta_max : float
        Radius expansion factor and cap, used to reproduce the radii the
        solver will hold (starting from 1) when computing ``nu_k``.
    """
    ke = k_eps(epsilon, p)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not beta >= 2.0 / alpha + 1.0:
        raise ValueError(f"beta must be at least 2/alpha + 1 = {2.0 / alpha + 1.0}, got {beta}")
    if not gamma3 > 1 or not delta_max > 1:
        raise ValueError("need gamma3 > 1 and delta_max > 1")

    n = ke + 3
    ks = np.arange(-1, ke + 2)
    w = np.full(n, np.nan)
    g = np.empty(n)
    f = np.empty(n)
    x = np.empty(n)
    s = np.empty(n)
    B = np.full(n, np.nan)
    nu = np.full(n, np.nan)
    delta = np.full(n, np.nan)

    # index i holds k = i - 1
    for k in range(ke + 1):
        w[k + 1] = (ke - k) / ke
        g[k + 1] = -epsilon * (1.0 + w[k + 1])
    g[0] = 0.0
    g[ke + 2] = g[ke + 1]

    d = 1.0
    for k in range(ke + 2):
        delta[k + 1] = d
        B[k + 1] = 1.0 if k == 0 else float(k) ** p
        nu[k + 1] = select_nu(d, B[k + 1], alpha)
        d = min(gamma3 * d, delta_max)
    s[1:] = -g[1:] / B[1:]
    s[0] = 1.0

    x[0], x[1] = -1.0, 0.0
    f[1] = 8.0 * epsilon**2 + 4.0 / (1.0 - p)
    f[0] = f[1]
    for k in range(1, ke + 2):
        x[k + 1] = x[k] + s[k]
    for k in range(1, ke + 1):
        f[k + 1] = f[k] + g[k] * s[k]
    f[ke + 2] = f[ke + 1]
    s1 = -nu * g

    coeffs = np.array([
        hermite_coefficients(f[i], g[i], f[i + 1], g[i + 1], s[i]) for i in range(ke + 2)
    ])
    for arr in (ks, w, g, f, x, s, B, nu, s1, delta, coeffs):
        arr.setflags(write=False)
    return AdversarialInstance(
        epsilon=epsilon, p=p, alpha=alpha, beta=beta, gamma3=gamma3, delta_max=delta_max,
        k_eps=ke, k=ks, w=w, g=g, f=f, x=x, s=s, B=B, nu=nu, s1=s1, delta=delta, coeffs=coeffs,
    )


def _evaluate(inst: AdversarialInstance, xs, deriv: bool):
    xs = np.asarray(xs, dtype=float)
    knots = inst.x
    flat = np.atleast_1d(xs).ravel()
    out = np.empty_like(flat)
    # searchsorted(side="left") gives knots[i-1] < x <= knots[i], i.e. piece i-1
    idx = np.searchsorted(knots, flat, side="left")
    left = flat <= knots[0]
    right = flat > knots[-1]
    inner = ~(left | right)
    out[left] = 0.0 if deriv else inst.f[0]
    out[right] = 0.0 if deriv else inst.f[-1]
    if np.any(inner):
        i = idx[inner]
        tau = flat[inner] - knots[i - 1]
        c = inst.coeffs[i - 1]
        if deriv:
            vals = c[:, 1] + tau * (2.0 * c[:, 2] + tau * 3.0 * c[:, 3])
        else:
            vals = c[:, 0] + tau * (c[:, 1] + tau * (c[:, 2] + tau * c[:, 3]))
        # exact knot hits return the interpolated data verbatim
        on_knot = flat[inner] == knots[i]
        vals = np.where(on_knot, (inst.g if deriv else inst.f)[i], vals)
        out[inner] = vals
    if xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


def eval_f(inst: AdversarialInstance, x):
    """Piecewise cubic objective; constant ``f_0`` left of ``x_{-1}`` and ``f_{k_eps}`` right of the last knot."""
    return _evaluate(inst, x, deriv=False)


def eval_fprime(inst: AdversarialInstance, x):
    """Derivative of :func:`eval_f`, zero on both plateaus."""
    return _evaluate(inst, x, deriv=True)


def _num(v) -> str:
    return repr(float(v))


def write_table(inst: AdversarialInstance, path) -> Path:
    """Write knots and piece coefficients as CSV (k, x_k, f_k, g_k, s_k, B_k, c0..c3)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "x_k", "f_k", "g_k", "s_k", "B_k", "c0", "c1", "c2", "c3"])
        for i, k in enumerate(inst.k):
            c = [_num(v) for v in inst.coeffs[i]] if i < len(inst.coeffs) else [""] * 4
            b = "" if np.isnan(inst.B[i]) else _num(inst.B[i])
            writer.writerow([int(k), _num(inst.x[i]), _num(inst.f[i]), _num(inst.g[i]), _num(inst.s[i]), b, *c])
    return path
