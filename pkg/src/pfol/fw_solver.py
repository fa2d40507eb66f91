"""Frank-Wolfe descent with a duality-gap stopping certificate.

Each iteration evaluates the gap <grad F(z), z - v> with v the LMO output;
the first iterate whose gap drops to epsilon is returned, and by convexity
that gap certifies F(z) - min F <= epsilon. Exactly one LMO call per gap
evaluation, so lmo_calls always equals iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels, set_code
from .geometry import FeasibleSet, contains, lmo
from .objective import RftlObjective


@dataclass
class SolveReport:
    x_out: np.ndarray
    iterations: int
    final_gap: float
    lmo_calls: int
    converged: bool


def solve_with_gap(
    obj: RftlObjective,
    set_: FeasibleSet,
    epsilon: float,
    x_init,
    max_iter: int,
    record_path: bool = False,
) -> SolveReport | tuple[SolveReport, list]:
    """Run the gap-stopped descent from a feasible start.

    Parameters
    ----------
    obj : RftlObjective
        The quadratic objective to descend; only its accumulators are read.
    set_ : FeasibleSet
        Feasible region queried through its LMO.
    epsilon : float
        Positive gap threshold; termination certifies F(x) - F* <= epsilon.
    x_init : array
        Feasible starting point.
    max_iter : int
        Hard cap on iterations. Exceeding it returns a report flagged
        converged=False; callers treat that as a schedule violation, never
        as a usable answer.
    record_path : bool
        When true, also return the list of objective values visited
        (forces the reference implementation; results are identical).

    Returns
    -------
    SolveReport, or (SolveReport, values) when record_path is set.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    x_init = np.asarray(x_init, dtype=np.float64)
    if not contains(set_, x_init, tol=1e-9):
        raise ValueError("x_init lies outside the feasible set")

    if record_path:
        return _solve_reference(obj, set_, epsilon, x_init, max_iter)

    kind, param = set_code(set_)
    z, iters, gap, ok = kernels.fw_solve(
        obj.S, obj.A, obj.W, obj.alpha, kind, param, float(epsilon), x_init, int(max_iter)
    )
    return SolveReport(x_out=z, iterations=iters, final_gap=gap, lmo_calls=iters, converged=ok)


def _solve_reference(obj, set_, epsilon, x_init, max_iter):
    z = x_init.copy()
    values = [obj.value(z)]
    it = 0
    gap = np.inf
    while it < max_iter:
        it += 1
        grad = obj.gradient(z)
        v = lmo(set_, grad)
        gap = float(grad @ (z - v))
        if gap <= epsilon:
            return SolveReport(z, it, gap, it, True), values
        sigma = obj.exact_line_search(z, v)
        z = z + sigma * (v - z)
        values.append(obj.value(z))
    return SolveReport(z, it, gap, it, False), values


def iteration_bound(beta: float, R: float, h1: float, epsilon: float) -> float:
    """Worst-case iteration count for the gap-stopped descent.

    Applies to a 2 beta-smooth objective over a set of outer radius R
    started at suboptimality h1; returns 0 when the start already meets the
    threshold.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if h1 < 0:
        raise ValueError("h1 must be nonnegative")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if h1 <= epsilon:
        return 0.0
    excess = h1 - epsilon
    return max(4.0 * beta * (2.0 * R) ** 2 * excess / epsilon**2, 2.0 * excess / epsilon)
