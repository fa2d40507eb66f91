"""Feasible-set descriptors: linear optimization oracles, projections, shrinking.

Three closed-form set families are supported, each full dimensional and
containing the origin in its interior:

  * euclidean ball of a given radius,
  * axis-aligned box given by per-coordinate half-widths,
  * l1 ball of a given radius.

Every set carries a scale factor in [0, 1]; shrinking multiplies it. All
oracles are exact, which is what makes the learner invariants testable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .rng import Rng

BALL = "ball"
BOX = "box"
L1 = "l1"


@dataclass(frozen=True)
class FeasibleSet:
    kind: str
    n: int
    radius: float = 1.0  # ball and l1 kinds
    halfwidths: tuple = ()  # box kind
    scale: float = 1.0

    @property
    def rho(self) -> float:
        return self.radius * self.scale

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.halfwidths, dtype=np.float64) * self.scale

    @property
    def inner_radius(self) -> float:
        if self.kind == BALL:
            return self.rho
        if self.kind == BOX:
            return float(self.widths.min()) if self.n else 0.0
        return self.rho / np.sqrt(self.n)

    @property
    def outer_radius(self) -> float:
        if self.kind == BALL:
            return self.rho
        if self.kind == BOX:
            return float(np.linalg.norm(self.widths))
        return self.rho

    # conveniences delegating to the module-level oracles
    def lmo(self, direction):
        return lmo(self, direction)

    def project(self, x):
        return project(self, x)

    def contains(self, x, tol: float = 0.0) -> bool:
        return contains(self, x, tol)

    def shrink(self, delta: float) -> "FeasibleSet":
        return shrink(self, delta)


def _check_radius(n: int, radius: float) -> float:
    if n < 1:
        raise ValueError("dimension must be at least 1")
    radius = float(radius)
    if not radius > 0:
        raise ValueError("radius must be positive")
    return radius


def ball(n: int, radius: float = 1.0) -> FeasibleSet:
    return FeasibleSet(BALL, n, radius=_check_radius(n, radius))


def box(halfwidths) -> FeasibleSet:
    w = tuple(float(v) for v in halfwidths)
    if not w:
        raise ValueError("box needs at least one half-width")
    if any(v <= 0 for v in w):
        raise ValueError("box half-widths must be positive")
    return FeasibleSet(BOX, len(w), halfwidths=w)


def l1_ball(n: int, radius: float = 1.0) -> FeasibleSet:
    return FeasibleSet(L1, n, radius=_check_radius(n, radius))


def _check_dim(set_: FeasibleSet, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (set_.n,):
        raise ValueError(f"expected a vector of dimension {set_.n}, got shape {x.shape}")
    return x


def lmo(set_: FeasibleSet, direction) -> np.ndarray:
    """argmin over the set of <direction, x>, always an extreme point.

    Ties break toward the lowest coordinate index; a zero direction returns
    the extreme point minimizing the first coordinate.
    """
    d = _check_dim(set_, direction)
    if not np.all(np.isfinite(d)):
        raise ValueError("direction must be finite")
    if set_.kind == BALL:
        nrm = float(np.linalg.norm(d))
        if nrm == 0.0:
            out = np.zeros(set_.n)
            out[0] = -set_.rho
            return out
        return -(set_.rho / nrm) * d
    if set_.kind == BOX:
        w = set_.widths
        return np.where(d >= 0.0, -w, w)
    # l1: best vertex is along the largest |coordinate| of the direction
    a = np.abs(d)
    i = int(np.argmax(a))  # argmax takes the lowest index on ties
    out = np.zeros(set_.n)
    if a[i] == 0.0:
        out[0] = -set_.rho
    else:
        out[i] = -set_.rho if d[i] > 0 else set_.rho
    return out


def shrink(set_: FeasibleSet, delta: float) -> FeasibleSet:
    """The set scaled by (1 - delta / inner_radius).

    Any point of the result plus a delta-ball stays inside the original set.
    delta equal to the inner radius yields the degenerate set {0}.
    """
    r = set_.inner_radius
    if delta <= 0:
        raise ValueError("shrink amount must be positive")
    if delta > r:
        raise ValueError(f"shrink amount {delta} exceeds the inner radius {r}")
    return replace(set_, scale=set_.scale * (1.0 - delta / r))


def project(set_: FeasibleSet, x) -> np.ndarray:
    x = _check_dim(set_, x)
    return project_rows(set_, x[None, :])[0]


def project_rows(set_: FeasibleSet, X) -> np.ndarray:
    """Euclidean projection of each row of X onto the set."""
    X = np.asarray(X, dtype=np.float64)
    if set_.kind == BALL:
        rho = set_.rho
        norms = np.linalg.norm(X, axis=1)
        factor = np.ones_like(norms)
        over = norms > rho
        factor[over] = rho / norms[over] if rho > 0 else 0.0
        return X * factor[:, None]
    if set_.kind == BOX:
        w = set_.widths
        return np.clip(X, -w, w)
    return _project_rows_l1(X, set_.rho)


def _project_rows_l1(X: np.ndarray, rho: float) -> np.ndarray:
    # sorting-based simplex reduction applied to |x|, signs restored after
    out = X.copy()
    over = np.abs(X).sum(axis=1) > rho
    if not np.any(over):
        return out
    if rho <= 0.0:
        out[over] = 0.0
        return out
    A = np.abs(X[over])
    n = X.shape[1]
    u = -np.sort(-A, axis=1)
    css = np.cumsum(u, axis=1)
    ranks = np.arange(1, n + 1, dtype=np.float64)
    cond = u * ranks > (css - rho)
    k = n - 1 - np.argmax(cond[:, ::-1], axis=1)  # last index where cond holds
    theta = (css[np.arange(len(A)), k] - rho) / (k + 1.0)
    out[over] = np.sign(X[over]) * np.maximum(A - theta[:, None], 0.0)
    return out


def contains(set_: FeasibleSet, x, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    x = _check_dim(set_, x)
    return bool(contains_rows(set_, x[None, :], tol)[0])


def contains_rows(set_: FeasibleSet, X, tol: float = 0.0) -> np.ndarray:
    return excess_rows(set_, X) <= tol


def excess_rows(set_: FeasibleSet, X) -> np.ndarray:
    """Signed violation of the defining inequality per row (<= 0 inside)."""
    X = np.asarray(X, dtype=np.float64)
    if set_.kind == BALL:
        return np.linalg.norm(X, axis=1) - set_.rho
    if set_.kind == BOX:
        return (np.abs(X) - set_.widths).max(axis=1)
    return np.abs(X).sum(axis=1) - set_.rho


def sample_sphere(rng: Rng, n: int) -> np.ndarray:
    return rng.sphere(n)


def sample_ball(rng: Rng, n: int) -> np.ndarray:
    return rng.ball(n)


def to_config(set_: FeasibleSet) -> dict:
    cfg = {"kind": set_.kind, "dim": set_.n, "scale": set_.scale}
    if set_.kind == BOX:
        cfg["halfwidths"] = list(set_.halfwidths)
    else:
        cfg["radius"] = set_.radius
    return cfg


def from_config(cfg: dict) -> FeasibleSet:
    kind = cfg["kind"]
    n = int(cfg["dim"])
    scale = float(cfg.get("scale", 1.0))
    if kind == BOX:
        w = cfg.get("halfwidths") or [1.0] * n
        return replace(box(w), scale=scale)
    radius = float(cfg.get("radius", 1.0))
    if kind == BALL:
        return replace(ball(n, radius), scale=scale)
    if kind == L1:
        return replace(l1_ball(n, radius), scale=scale)
    raise ValueError(f"unknown set kind {kind!r}")
