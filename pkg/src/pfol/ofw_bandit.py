"""Bandit online Frank-Wolfe with block-aggregated one-point estimation.

Rounds are grouped into blocks of K. Every round of block m plays
y_t = x_{m-1} + delta u_t with u_t uniform on the unit sphere, observes the
scalar f_t(y_t) only, and forms the one-point estimate
g_t = (n/delta) f_t(y_t) u_t. The block aggregate ghat_m = sum of the
block's g_t enters the accumulated objective with proximal anchor x_{m-1}
and weight K, and x_m is obtained by the gap-stopped solver on the shrunken
set at tolerance epsilon_m, logically in parallel with the block's plays.
The solver only ever reads a frozen objective snapshot, so running it
before, after, or on a background thread yields identical traces.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace

import numpy as np

from . import objective
from .fw_solver import SolveReport, iteration_bound, solve_with_gap
from .geometry import FeasibleSet, contains_rows, shrink
from .losses import LossBounds, LossSequence
from .ofw_full import RunTrace
from .rng import Rng


@dataclass(frozen=True)
class BanditConfig:
    n: int
    T: int
    K: int
    num_blocks: int
    delta: float
    c: float
    T0: float
    alpha: float
    R: float


@dataclass
class BlockRecord:
    m: int  # 1-based block index
    start: int  # 0-based first round of the block
    length: int
    base: np.ndarray  # x_{m-1}, the point all plays perturb
    ghat: np.ndarray
    x_next: np.ndarray  # x_m
    epsilon: float | None  # solve tolerance; None for the first block
    solve: SolveReport | None


def bandit_params(
    n: int,
    M: float,
    G: float,
    R: float,
    r: float,
    alpha: float,
    T: int,
    c: float | None = None,
) -> BanditConfig:
    """Populate the bandit schedule for a horizon T.

    delta = c T^(-1/3) must not exceed the set's inner radius r; violating
    that is rejected here. When c is omitted it is auto-tuned as
    (r (nM)^2 ln T / (G R alpha))^(1/3), which is only admissible while
    (nM)^2 ln T / (r^2 G R alpha) <= T; outside that range c must be given.
    """
    if min(n, T) < 1 or min(M, G, R, r, alpha) <= 0:
        raise ValueError("n, T must be >= 1 and M, G, R, r, alpha positive")
    if c is None:
        admissible = (n * M) ** 2 * math.log(T) / (r * r * G * R * alpha)
        if T < 2 or admissible > T:
            raise ValueError(
                "auto-tuned c is not admissible at this horizon; pass c explicitly"
            )
        c = (r * (n * M) ** 2 * math.log(T) / (G * R * alpha)) ** (1.0 / 3.0)
    delta = c * float(T) ** (-1.0 / 3.0)
    if delta > r:
        raise ValueError(
            f"exploration radius delta = c T^(-1/3) = {delta:.6g} exceeds the "
            f"inner radius r = {r:.6g}; shrink c or enlarge the horizon"
        )
    # tiny negative slack so an exact cube horizon does not round K upward
    K = int(math.ceil(float(T) ** (2.0 / 3.0) - 1e-9))
    T0 = max(4.0 * float(T) ** (2.0 / 3.0), 8.0 / alpha)
    return BanditConfig(
        n=n,
        T=T,
        K=K,
        num_blocks=(T + K - 1) // K,
        delta=delta,
        c=c,
        T0=T0,
        alpha=alpha,
        R=R,
    )


def with_overrides(config: BanditConfig, delta=None, K=None, T0=None) -> BanditConfig:
    """Manual overrides; c is kept consistent with an overridden delta."""
    out = config
    if delta is not None:
        out = replace(out, delta=float(delta), c=float(delta) * float(out.T) ** (1.0 / 3.0))
    if K is not None:
        K = int(K)
        out = replace(out, K=K, num_blocks=(out.T + K - 1) // K)
    if T0 is not None:
        out = replace(out, T0=float(T0))
    return out


def block_tolerance(config: BanditConfig, m: int) -> float:
    """Solve tolerance for block m: 16 R^2 (alpha (m K + T0))^(1/3)."""
    if m < 1:
        raise ValueError("blocks are counted from 1")
    return 16.0 * config.R**2 * (config.alpha * (m * config.K + config.T0)) ** (1.0 / 3.0)


def block_gradient_norm_bound(n: int, M: float, delta: float, K: int, G: float) -> float:
    """Bound on E||ghat||^2 for one block: K (n M / delta)^2 + K^2 G^2."""
    return K * (n * M / delta) ** 2 + K * K * G * G


def bandit_bounds(
    config: BanditConfig, bounds: LossBounds, r: float, R: float
) -> tuple[float, float]:
    """(regret_bound, lmo_bound) certified for this schedule in expectation."""
    n, c, T, alpha = config.n, config.c, config.T, config.alpha
    M, G = bounds.M, bounds.G
    t23 = float(T) ** (2.0 / 3.0)
    regret = (4.0 * c * R * G / r + 2.0 * R * R * alpha + 4.0 * G / alpha ** (1.0 / 3.0)) * t23 + (
        2.0 * n * M / (c * math.sqrt(alpha))
        + 2.0 * G / math.sqrt(alpha)
        + 4.0 * R * math.sqrt(alpha)
    ) ** 2 * t23 * (1.0 + math.log(T))
    base = n * M / (2.0 * c * R) + G / (2.0 * R) + alpha
    lmo = base * T + alpha ** (-2.0 / 3.0) * base * base * T
    return regret, lmo


def run(
    losses: LossSequence,
    set_: FeasibleSet,
    config: BanditConfig,
    rng: Rng,
    solver_thread: bool = False,
) -> tuple[RunTrace, list[BlockRecord]]:
    """Run the bandit learner; returns the trace and per-block records.

    Parameters
    ----------
    losses : LossSequence
        Fully materialized oblivious sequence. Only the scalar values at
        the played points are ever read.
    set_ : FeasibleSet
        Original feasible region; plays happen on its delta-shrunken copy
        plus a delta-sphere perturbation, so they stay feasible in it.
    config : BanditConfig
        Schedule; config.T must equal len(losses).
    rng : Rng
        Source of the exploration directions, consumed block by block.
    solver_thread : bool
        Run each block's solve on a background thread, overlapped with the
        block's plays. Bit-identical to the serial order by construction.

    Returns
    -------
    (RunTrace, [BlockRecord]); trace.lmo_calls sums the per-block solver
    iterations, and a non-converged solve raises instead of returning.
    """
    T, n = len(losses), losses.n
    if T != config.T or n != config.n:
        raise ValueError("config horizon/dimension do not match the loss sequence")
    if abs(losses.alpha - config.alpha) > 1e-12 * max(1.0, abs(config.alpha)):
        raise ValueError("config alpha does not match the loss sequence modulus")
    inner = shrink(set_, config.delta)
    alpha, delta, K = config.alpha, config.delta, config.K

    x_start = np.zeros(n)  # x_0; also x_1, which is pinned to x_0
    F = objective.fresh(alpha, config.T0, x_start)  # accumulated estimate objective
    xs = [x_start, x_start]
    plays = np.empty((T, n))
    values = np.empty(T)
    records: list[BlockRecord] = []
    lmo_total = 0

    for m in range(1, config.num_blocks + 1):
        start = (m - 1) * K
        length = min(K, T - start)
        base = xs[m - 1]
        U = rng.sphere_batch(length, n)

        # the solver sees only the frozen objective and the previous point,
        # so it may overlap the block's plays
        slot: list = [None]
        eps_m = None
        if m >= 2:
            eps_m = block_tolerance(config, m)
            h1 = max(F.suboptimality(inner, xs[m - 1]), 0.0)
            cap = iteration_bound(
                beta=0.5 * alpha * F.W, R=inner.outer_radius, h1=max(h1, 2.0 * eps_m), epsilon=eps_m
            )
            max_iter = 10 * int(math.ceil(cap)) + 10
            frozen, init = F, xs[m - 1]

            def _solve(frozen=frozen, eps=eps_m, init=init, cap_it=max_iter):
                slot[0] = solve_with_gap(frozen, inner, eps, init, cap_it)

            worker = None
            if solver_thread:
                worker = threading.Thread(target=_solve)
                worker.start()
            else:
                _solve()

        Y = base + delta * U
        d = Y - losses.thetas[start : start + length]
        fvals = 0.5 * alpha * np.einsum("ij,ij->i", d, d) + np.einsum(
            "ij,ij->i", losses.linears[start : start + length], Y
        )
        ghat = (n / delta) * (fvals[:, None] * U).sum(axis=0)

        if m >= 2:
            if solver_thread:
                worker.join()
            report: SolveReport = slot[0]
            if not report.converged:
                raise RuntimeError(
                    f"block {m} solve exceeded its iteration budget; the schedule is violated"
                )
            x_m = report.x_out
            lmo_total += report.lmo_calls
        else:
            report = None
            x_m = xs[1]

        if not bool(contains_rows(set_, Y, tol=1e-9).all()):
            raise RuntimeError(f"block {m} produced an infeasible play")
        plays[start : start + length] = Y
        values[start : start + length] = fvals
        records.append(
            BlockRecord(
                m=m,
                start=start,
                length=length,
                base=base,
                ghat=ghat,
                x_next=x_m,
                epsilon=eps_m,
                solve=report,
            )
        )
        F = F.accumulate(ghat, base, float(length))
        xs.append(x_m)

    trace = RunTrace(
        algo="ofw-bandit",
        plays=plays,
        loss_values=values,
        lmo_calls=lmo_total,
        projections=0,
    )
    return trace, records


def verify_block_certificates(
    records: list[BlockRecord], config: BanditConfig, set_: FeasibleSet
) -> list[dict]:
    """Recompute each block's certificate from its records.

    Rebuilds the accumulated objective block by block and evaluates the
    solved point's gap to the exact constrained minimum, the tolerance it
    was asked for, and the iteration cap it was subject to.
    """
    inner = shrink(set_, config.delta)
    F = objective.fresh(config.alpha, config.T0, records[0].base)
    rows = []
    for rec in records:
        if rec.m >= 2:
            gap = F.suboptimality(inner, rec.x_next)
            h1 = max(F.suboptimality(inner, rec.base), 0.0)
            cap = iteration_bound(
                beta=0.5 * config.alpha * F.W,
                R=inner.outer_radius,
                h1=max(h1, 2.0 * rec.epsilon),
                epsilon=rec.epsilon,
            )
            rows.append(
                {
                    "m": rec.m,
                    "gap": gap,
                    "epsilon": rec.epsilon,
                    "iterations": rec.solve.iterations,
                    "iteration_cap": cap,
                }
            )
        F = F.accumulate(rec.ghat, rec.base, float(rec.length))
    return rows
