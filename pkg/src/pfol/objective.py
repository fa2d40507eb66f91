"""Accumulated regularized leader objective in O(n) memory.

The objective after accumulating terms (g_i, anchor_i, w_i) on top of an
initial regularizer T0 (alpha/2)||x - x1||^2 is

    F(x) = <x, S> + (alpha/2) (W ||x||^2 - 2 <x, A> + C)

with S = sum g_i, A = sum w_i anchor_i + T0 x1, C = sum w_i ||anchor_i||^2
+ T0 ||x1||^2, W = sum w_i + T0. F is (alpha W)-strongly convex and
(alpha W)-smooth with Hessian (alpha W) I, which is what makes the exact
line search and the projected unconstrained minimizer valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import FeasibleSet, project


@dataclass(frozen=True, eq=False)
class RftlObjective:
    alpha: float
    S: np.ndarray
    A: np.ndarray
    C: float
    W: float

    @property
    def n(self) -> int:
        return self.S.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(
            x @ self.S + 0.5 * self.alpha * (self.W * (x @ x) - 2.0 * (x @ self.A) + self.C)
        )

    def value_diff(self, x, y) -> float:
        """F(x) - F(y); the constant C cancels, so no anchor norms needed."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return float(
            (x - y) @ self.S
            + 0.5 * self.alpha * (self.W * (x @ x - y @ y) - 2.0 * ((x - y) @ self.A))
        )

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return self.S + self.alpha * (self.W * x - self.A)

    def accumulate(self, g, anchor, w: float) -> "RftlObjective":
        """New objective with the term <x, g> + w (alpha/2)||x - anchor||^2 added."""
        if w <= 0:
            raise ValueError("term weight must be positive")
        g = np.asarray(g, dtype=np.float64)
        anchor = np.asarray(anchor, dtype=np.float64)
        if g.shape != self.S.shape or anchor.shape != self.S.shape:
            raise ValueError("dimension mismatch")
        return RftlObjective(
            alpha=self.alpha,
            S=self.S + g,
            A=self.A + w * anchor,
            C=self.C + w * float(anchor @ anchor),
            W=self.W + w,
        )

    def exact_line_search(self, x, v) -> float:
        """argmin over sigma in [0, 1] of F(x + sigma (v - x)), in closed form."""
        x = np.asarray(x, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        d = v - x
        den = self.alpha * self.W * float(d @ d)
        if den <= 0.0:
            return 0.0
        num = -float(self.gradient(x) @ d)
        if num <= 0.0:
            return 0.0
        return min(1.0, num / den)

    def exact_minimizer(self, set_: FeasibleSet) -> np.ndarray:
        """Constrained minimizer: projection of the unconstrained one.

        Valid because the Hessian is a positive multiple of the identity;
        this is a structural fact about this objective, not a general rule.
        """
        if self.W <= 0.0:
            raise ValueError("objective has no accumulated weight, minimizer undefined")
        z = (self.alpha * self.A - self.S) / (self.alpha * self.W)
        return project(set_, z)

    def suboptimality(self, set_: FeasibleSet, x) -> float:
        """F(x) - min_set F; may dip to -1e-9 from accumulated rounding."""
        return self.value_diff(x, self.exact_minimizer(set_))


def fresh(alpha: float, T0: float, x1) -> RftlObjective:
    """Objective holding only the initial regularizer T0 (alpha/2)||x - x1||^2."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if T0 < 0:
        raise ValueError("T0 must be nonnegative")
    x1 = np.asarray(x1, dtype=np.float64)
    return RftlObjective(
        alpha=float(alpha),
        S=np.zeros_like(x1),
        A=T0 * x1,
        C=T0 * float(x1 @ x1),
        W=float(T0),
    )
