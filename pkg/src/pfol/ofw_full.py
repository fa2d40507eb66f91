"""Full-information online Frank-Wolfe for strongly convex losses.

Each round t plays x_t, observes the loss gradient there, folds the
linearized loss plus a proximal anchor at x_t into the accumulated
objective, and takes a single line-searched Frank-Wolfe step toward the
LMO point of that objective's gradient. One LMO call per round, no
projections. With the (b, T0) schedule below, the play of every round
stays within epsilon_t = b alpha (t + T0)^(1/3) of the accumulated
objective's constrained minimum, which is what drives the final regret
guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels, set_code
from .geometry import FeasibleSet, contains, project_rows
from .losses import LossSequence


@dataclass(frozen=True)
class OfwConfig:
    alpha: float
    T0: float
    b: float


@dataclass
class RunTrace:
    """Per-round record shared by all learners in this package."""

    algo: str
    plays: np.ndarray  # (T, n), x_t or the bandit's played point y_t
    loss_values: np.ndarray  # (T,)
    lmo_calls: int
    projections: int
    sigmas: np.ndarray | None = None
    grad_norms: np.ndarray | None = None
    subopt: np.ndarray | None = None  # optional per-round leader gap

    def __len__(self) -> int:
        return self.plays.shape[0]


def gap_schedule(G: float, R: float, alpha: float, alternate_b: bool = False) -> tuple[float, float]:
    """Schedule constants (b, T0) for the per-round gap guarantee.

    The default b is the constant the per-round gap certificate is
    calibrated to. alternate_b selects the larger constant from which
    regret_bound's additive terms are derived; both share the same T0 rule.
    """
    if G <= 0 or R <= 0 or alpha <= 0:
        raise ValueError("G, R, alpha must all be positive")
    g2 = G + 2.0 * R * alpha
    if alternate_b:
        b = max((g2 / alpha) ** 2, 8.0 * (2.0 * R) ** 2 * g2 / alpha)
    else:
        b = max(2.0 * (g2 / alpha) ** 2, (64.0 * g2 * R * R / alpha) ** (2.0 / 3.0))
    T0 = max(1.0, 2.0 * g2 * np.sqrt(b) / (alpha * R * R))
    return b, T0


def epsilon_schedule(t: int, b: float, T0: float, alpha: float) -> float:
    """Per-round gap tolerance b alpha (t + T0)^(1/3), t counted from 1."""
    if t < 1:
        raise ValueError("rounds are counted from 1")
    return b * alpha * (t + T0) ** (1.0 / 3.0)


def regret_bound(G: float, R: float, alpha: float, T: int) -> float:
    """Worst-case regret certificate for the full-information learner."""
    if T < 1:
        raise ValueError("horizon must be at least 1")
    g2 = G + 2.0 * R * alpha
    t23 = float(T) ** (2.0 / 3.0)
    return (
        4.0 * g2**2 / alpha * np.log(T)
        + 2.0 * alpha * R * R
        + 10.0 * g2**2 / alpha
        + 16.0 * g2 ** (4.0 / 3.0) * R ** (2.0 / 3.0) / alpha ** (1.0 / 3.0)
        + 4.0 * G * (g2 / alpha) * t23
        + 8.0 * np.sqrt(2.0) * g2 ** (1.0 / 3.0) * R ** (2.0 / 3.0) / alpha ** (1.0 / 3.0) * t23
    )


def run(
    losses: LossSequence,
    set_: FeasibleSet,
    config: OfwConfig,
    x1=None,
    record_subopt: bool = False,
) -> RunTrace:
    """Run the learner over a materialized loss sequence.

    Parameters
    ----------
    losses : LossSequence
        Oblivious sequence; only gradients at the played points are read.
    set_ : FeasibleSet
        Feasible region, accessed through its LMO only.
    config : OfwConfig
        alpha must match the sequence's modulus; T0 weights the proximal
        regularizer at the start point.
    x1 : array, optional
        Feasible start, defaults to the origin.
    record_subopt : bool
        Attach the per-round gap to the accumulated objective's constrained
        minimum (costs one projection per round, done vectorized after the
        run).

    Returns
    -------
    RunTrace with exactly len(losses) rows and lmo_calls == len(losses).
    """
    T, n = len(losses), losses.n
    x1 = np.zeros(n) if x1 is None else np.asarray(x1, dtype=np.float64)
    if not contains(set_, x1, tol=1e-9):
        raise ValueError("x1 lies outside the feasible set")
    if abs(losses.alpha - config.alpha) > 1e-12 * max(1.0, abs(config.alpha)):
        raise ValueError("config alpha does not match the loss sequence modulus")
    kind, param = set_code(set_)
    plays, sigmas = kernels.ofw_full_run(
        losses.thetas, losses.linears, config.alpha, config.T0, x1, kind, param
    )
    grads = losses.gradients_at(plays)
    trace = RunTrace(
        algo="ofw",
        plays=plays,
        loss_values=losses.values_at(plays),
        lmo_calls=T,
        projections=0,
        sigmas=sigmas,
        grad_norms=np.linalg.norm(grads, axis=1),
    )
    if record_subopt:
        trace.subopt, _ = reconstruct_leader(plays, losses, set_, config.alpha, config.T0, x1)
    return trace


def reconstruct_leader(plays, losses, set_, alpha, T0, x1):
    """Rebuild, for every round, the accumulated objective's gap and minimizer.

    Round t's objective folds the observed gradients and anchors of rounds
    1..t-1 plus the T0 regularizer at x1. Everything is recomputed from the
    raw plays, so this serves as an independent check of a recorded run.

    Returns (subopt, minimizers): (T,) gaps F_t(x_t) - F_t(x_t*) and the
    (T, n) minimizer path.
    """
    plays = np.asarray(plays, dtype=np.float64)
    T, n = plays.shape
    x1 = np.asarray(x1, dtype=np.float64)
    grads = losses.gradients_at(plays)
    zero = np.zeros((1, n))
    S = np.vstack([zero, np.cumsum(grads[:-1], axis=0)]) if T > 1 else zero.copy()
    A = T0 * x1 + (np.vstack([zero, np.cumsum(plays[:-1], axis=0)]) if T > 1 else zero)
    W = T0 + np.arange(T, dtype=np.float64)
    safe_W = np.where(W > 0, W, 1.0)
    z = (alpha * A - S) / (alpha * safe_W[:, None])
    stars = project_rows(set_, z)
    diff = plays - stars
    subopt = np.einsum("ij,ij->i", diff, S) + 0.5 * alpha * (
        W * (np.einsum("ij,ij->i", plays, plays) - np.einsum("ij,ij->i", stars, stars))
        - 2.0 * np.einsum("ij,ij->i", diff, A)
    )
    if np.any(W == 0):
        # weightless objective is identically zero; every point is optimal
        subopt = np.where(W == 0, 0.0, subopt)
        stars[W == 0] = plays[W == 0]
    return subopt, stars


def minimizer_drift_bound(G: float, R: float, alpha: float, t: int, T0: float) -> float:
    """Upper bound on the distance between consecutive leader minimizers."""
    return 2.0 * (G + 2.0 * R * alpha) / ((t + T0) * alpha)
