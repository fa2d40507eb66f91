"""Pure numpy implementations of the hot sequential loops.

Same call signatures as the compiled module pfol._kernels; the backend
selector picks one at import time. Sets are passed down as a small integer
kind code plus a parameter vector (ball: [radius]; box: half-widths;
l1: [radius]), already multiplied by the set's scale.
"""

from __future__ import annotations

import numpy as np

KIND_BALL = 0
KIND_BOX = 1
KIND_L1 = 2


def _lmo(kind: int, param: np.ndarray, d: np.ndarray) -> np.ndarray:
    if kind == KIND_BALL:
        rho = param[0]
        nrm = np.linalg.norm(d)
        if nrm == 0.0:
            v = np.zeros_like(d)
            v[0] = -rho
            return v
        return (-rho / nrm) * d
    if kind == KIND_BOX:
        return np.where(d >= 0.0, -param, param)
    rho = param[0]
    a = np.abs(d)
    i = int(np.argmax(a))
    v = np.zeros_like(d)
    if a[i] == 0.0:
        v[0] = -rho
    else:
        v[i] = -rho if d[i] > 0 else rho
    return v


def _project(kind: int, param: np.ndarray, x: np.ndarray) -> np.ndarray:
    if kind == KIND_BALL:
        rho = param[0]
        nrm = np.linalg.norm(x)
        if nrm <= rho:
            return x
        return x * (rho / nrm) if rho > 0 else np.zeros_like(x)
    if kind == KIND_BOX:
        return np.clip(x, -param, param)
    rho = param[0]
    a = np.abs(x)
    if a.sum() <= rho:
        return x
    if rho <= 0:
        return np.zeros_like(x)
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    ranks = np.arange(1, x.shape[0] + 1)
    k = np.nonzero(u * ranks > css - rho)[0][-1]
    theta = (css[k] - rho) / (k + 1.0)
    return np.sign(x) * np.maximum(a - theta, 0.0)


def ofw_full_run(thetas, linears, alpha, T0, x1, kind, param):
    """Full-information online Frank-Wolfe loop; returns (plays, sigmas)."""
    T, n = thetas.shape
    plays = np.empty((T, n))
    sigmas = np.empty(T)
    S = np.zeros(n)
    A = T0 * np.asarray(x1, dtype=np.float64)
    W = float(T0)
    x = np.array(x1, dtype=np.float64)
    for t in range(T):
        plays[t] = x
        g = alpha * (x - thetas[t]) + linears[t]
        S += g
        A += x
        W += 1.0
        d = S + alpha * (W * x - A)
        v = _lmo(kind, param, d)
        step = v - x
        den = alpha * W * float(step @ step)
        num = -float(d @ step)
        sigma = 0.0 if (den <= 0.0 or num <= 0.0) else min(1.0, num / den)
        x = x + sigma * step
        sigmas[t] = sigma
    return plays, sigmas


def ogd_run(thetas, linears, alpha, x1, kind, param):
    """Projected gradient loop with step 1/(alpha t); returns plays."""
    T, n = thetas.shape
    plays = np.empty((T, n))
    x = np.array(x1, dtype=np.float64)
    for t in range(T):
        plays[t] = x
        g = alpha * (x - thetas[t]) + linears[t]
        x = _project(kind, param, x - g / (alpha * (t + 1.0)))
    return plays


def fw_solve(S, A, W, alpha, kind, param, eps, z0, max_iter):
    """Gap-certified Frank-Wolfe on F(x) = <x,S> + (alpha/2)(W||x||^2 - 2<x,A>).

    Returns (z, iterations, final_gap, converged). One LMO per iteration;
    the gap <grad, z - v> certifies F(z) - F* <= gap when it drops to eps.
    """
    z = np.array(z0, dtype=np.float64)
    gap = np.inf
    it = 0
    while it < max_iter:
        it += 1
        grad = S + alpha * (W * z - A)
        v = _lmo(kind, param, grad)
        step = v - z
        gap = -float(grad @ step)
        if gap <= eps:
            return z, it, gap, True
        den = alpha * W * float(step @ step)
        sigma = 0.0 if den <= 0.0 else min(1.0, gap / den)
        z = z + sigma * step
    return z, it, gap, False
