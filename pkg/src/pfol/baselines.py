"""Exact comparators: projected gradient descent, exact leader play, and the
best fixed point in hindsight."""

from __future__ import annotations

import numpy as np

from . import objective
from ._backend import kernels, set_code
from .geometry import FeasibleSet, contains, project
from .losses import LossSequence
from .ofw_full import RunTrace


def ogd_run(losses: LossSequence, set_: FeasibleSet, alpha: float, x1=None) -> RunTrace:
    """Projected online gradient descent with the strongly convex step 1/(alpha t)."""
    T, n = len(losses), losses.n
    x1 = np.zeros(n) if x1 is None else np.asarray(x1, dtype=np.float64)
    if not contains(set_, x1, tol=1e-9):
        raise ValueError("x1 lies outside the feasible set")
    kind, param = set_code(set_)
    plays = kernels.ogd_run(losses.thetas, losses.linears, alpha, x1, kind, param)
    grads = losses.gradients_at(plays)
    return RunTrace(
        algo="ogd",
        plays=plays,
        loss_values=losses.values_at(plays),
        lmo_calls=0,
        projections=T,
        grad_norms=np.linalg.norm(grads, axis=1),
    )


def ogd_regret_bound(G: float, alpha: float, T: int) -> float:
    # classical guarantee for the 1/(alpha t) step schedule
    return G * G / (2.0 * alpha) * (1.0 + np.log(T))


def rftl_exact_run(
    losses: LossSequence, set_: FeasibleSet, alpha: float, T0: float, x1=None
) -> RunTrace:
    """Play the exact constrained minimizer of the accumulated objective.

    Round 1 plays x1 (the regularizer's minimizer); each later round plays
    the projection-based exact minimizer, so the per-round leader gap is
    zero by construction. Zero LMO calls, one projection per round.
    """
    T, n = len(losses), losses.n
    x1 = np.zeros(n) if x1 is None else np.asarray(x1, dtype=np.float64)
    if not contains(set_, x1, tol=1e-9):
        raise ValueError("x1 lies outside the feasible set")
    F = objective.fresh(alpha, T0, x1)
    plays = np.empty((T, n))
    x = x1
    for t in range(T):
        plays[t] = x
        g = alpha * (x - losses.thetas[t]) + losses.linears[t]
        F = F.accumulate(g, x, 1.0)
        x = F.exact_minimizer(set_)
    grads = losses.gradients_at(plays)
    return RunTrace(
        algo="rftl",
        plays=plays,
        loss_values=losses.values_at(plays),
        lmo_calls=0,
        projections=T,
        grad_norms=np.linalg.norm(grads, axis=1),
    )


def best_in_hindsight(losses: LossSequence, set_: FeasibleSet) -> tuple[np.ndarray, float]:
    """Constrained minimizer of the summed sequence and its total loss.

    The sum of isotropic quadratics is again one, so the constrained
    minimizer is the projection of the closed-form unconstrained one.
    """
    if len(losses) == 0:
        raise ValueError("empty loss sequence")
    z = losses.thetas.mean(axis=0) - losses.linears.mean(axis=0) / losses.alpha
    x_star = project(set_, z)
    return x_star, losses.total_value(x_star)
