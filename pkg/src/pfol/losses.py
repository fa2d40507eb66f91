"""Strongly convex loss families, adversary generators, and smoothing oracles.

The only family is the isotropic quadratic f(x) = (alpha/2)||x - theta||^2
+ <linear, x>. It is alpha-strongly convex, its smoothed version and its
best fixed point have closed forms, and its value and gradient bounds over
a set of outer radius R are certified analytically:

    G = alpha (R + ||theta||) + ||linear||
    M = (alpha/2)(R + ||theta||)^2 + ||linear|| R

Adversary generation is oblivious by construction: it sees only the spec,
horizon, set, and rng, never the learner's plays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import FeasibleSet
from .rng import Rng

FIXED_CENTER = "fixed-center"
DRIFTING_CENTER = "drifting-center"
ALTERNATING_CORNERS = "alternating-corners"
IID_RANDOM_CENTER = "iid-random-center"

ADVERSARY_KINDS = (FIXED_CENTER, DRIFTING_CENTER, ALTERNATING_CORNERS, IID_RANDOM_CENTER)


@dataclass(frozen=True, eq=False)
class QuadraticLoss:
    alpha: float
    theta: np.ndarray
    linear: np.ndarray

    def value(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.theta.shape:
            raise ValueError("dimension mismatch")
        d = x - self.theta
        return 0.5 * self.alpha * float(d @ d) + float(self.linear @ x)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.theta.shape:
            raise ValueError("dimension mismatch")
        return self.alpha * (x - self.theta) + self.linear


@dataclass(frozen=True)
class LossBounds:
    M: float
    G: float
    alpha: float


@dataclass(frozen=True)
class AdversarySpec:
    kind: str
    alpha: float
    seed_offset: int = 0
    drift_step: float | None = None  # drifting-center only; default 0.05 * inner radius
    center: tuple | None = None  # fixed-center only; drawn if omitted


class LossSequence:
    """T quadratic losses stored as (T, n) center/linear arrays."""

    def __init__(self, alpha: float, thetas: np.ndarray, linears: np.ndarray, bounds: LossBounds):
        self.alpha = float(alpha)
        self.thetas = np.asarray(thetas, dtype=np.float64)
        self.linears = np.asarray(linears, dtype=np.float64)
        self.bounds = bounds
        if self.thetas.shape != self.linears.shape or self.thetas.ndim != 2:
            raise ValueError("thetas and linears must both be (T, n)")

    def __len__(self) -> int:
        return self.thetas.shape[0]

    @property
    def n(self) -> int:
        return self.thetas.shape[1]

    def __getitem__(self, t: int) -> QuadraticLoss:
        return QuadraticLoss(self.alpha, self.thetas[t], self.linears[t])

    def values_at(self, X) -> np.ndarray:
        """f_t evaluated at row t of X, for all t at once."""
        X = np.asarray(X, dtype=np.float64)
        d = X - self.thetas
        return 0.5 * self.alpha * np.einsum("ij,ij->i", d, d) + np.einsum(
            "ij,ij->i", self.linears, X
        )

    def gradients_at(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.alpha * (X - self.thetas) + self.linears

    def total_value(self, x) -> float:
        """Sum of all T losses at a single point."""
        x = np.asarray(x, dtype=np.float64)
        return float(self.values_at(np.broadcast_to(x, self.thetas.shape)).sum())


def certified_bounds(alpha: float, thetas: np.ndarray, linears: np.ndarray, R: float) -> LossBounds:
    tn = np.linalg.norm(thetas, axis=1)
    ln = np.linalg.norm(linears, axis=1)
    G = float(np.max(alpha * (R + tn) + ln))
    M = float(np.max(0.5 * alpha * (R + tn) ** 2 + ln * R))
    return LossBounds(M=M, G=G, alpha=alpha)


def generate_sequence(
    spec: AdversarySpec, T: int, n: int, set_: FeasibleSet, rng: Rng
) -> LossSequence:
    """Materialize an oblivious loss sequence with certified bounds.

    All centers lie inside the set so the analytic G and M formulas apply.
    """
    if T < 1:
        raise ValueError("horizon must be at least 1")
    R = set_.outer_radius
    r = set_.inner_radius
    if spec.kind == FIXED_CENTER:
        if spec.center is not None:
            c = np.asarray(spec.center, dtype=np.float64)
            if not set_.contains(c, tol=1e-9):
                raise ValueError("explicit fixed center lies outside the set")
        else:
            c = geometry.project(set_, R * rng.ball(n))
        thetas = np.tile(c, (T, 1))
    elif spec.kind == DRIFTING_CENTER:
        step = spec.drift_step if spec.drift_step is not None else 0.05 * r
        dirs = rng.sphere_batch(T, n)
        thetas = np.empty((T, n))
        c = np.zeros(n)
        for t in range(T):
            c = c + step * dirs[t]
            if not geometry.contains(set_, c):
                c = geometry.project(set_, c)
            thetas[t] = c
    elif spec.kind == ALTERNATING_CORNERS:
        if set_.kind == geometry.BOX:
            corner = set_.widths
        elif set_.kind == geometry.BALL:
            corner = np.full(n, R / np.sqrt(n))
        else:
            corner = np.zeros(n)
            corner[0] = R
        signs = np.where(np.arange(T) % 2 == 0, 1.0, -1.0)
        thetas = signs[:, None] * corner
    elif spec.kind == IID_RANDOM_CENTER:
        thetas = geometry.project_rows(set_, R * rng.ball_batch(T, n))
    else:
        raise ValueError(f"unknown adversary kind {spec.kind!r}")
    linears = np.zeros((T, n))
    return LossSequence(spec.alpha, thetas, linears, certified_bounds(spec.alpha, thetas, linears, R))


def smoothed_value_closed_form(loss: QuadraticLoss, x, delta: float) -> float:
    """Average of the loss over a delta-ball around x, in closed form.

    For the isotropic quadratic the cross terms vanish and the average adds
    the constant (alpha/2) delta^2 n/(n+2), since a uniform ball point has
    mean squared norm n/(n+2).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = loss.theta.shape[0]
    return loss.value(x) + 0.5 * loss.alpha * delta * delta * n / (n + 2.0)


def smoothed_gradient_closed_form(loss: QuadraticLoss, x, delta: float) -> np.ndarray:
    # smoothing only shifts the quadratic by a constant, so gradients agree
    return loss.gradient(x)


def one_point_gradient_estimate(value_fn, x, delta: float, u) -> np.ndarray:
    """Single-sample gradient estimate (n/delta) f(x + delta u) u, ||u|| = 1."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-9:
        raise ValueError("u must be a unit vector")
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = x.shape[0]
    return (n / delta) * float(value_fn(x + delta * u)) * u
