"""Deterministic, portable random streams.

The generator is counter-based SplitMix64: output i of a stream with key k is

    out_i = mix64((k + GAMMA * i) mod 2**64),   GAMMA = 0x9E3779B97F4A7C15

where mix64 is the published SplitMix64 finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Uniform doubles in (0, 1] are ((out >> 11) + 1) * 2**-53. Gaussians use the
Box-Muller cosine branch only, exactly one gaussian from two consecutive
uniforms, so batched and one-at-a-time sampling consume identical stream
positions. Sub-streams are keyed by mix64(key XOR fnv1a64(label)), giving
parallel-safe independent streams from (seed, label) alone.
"""

from __future__ import annotations

import math

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
_U = np.uint64


def _mix64_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _U(30))
    z = z * _U(0xBF58476D1CE4E5B9)
    z = z ^ (z >> _U(27))
    z = z * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


class Rng:
    """A single-owner random stream; split before sharing across threads."""

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, _key: int | None = None):
        self.key = _mix64_int(seed) if _key is None else _key & _MASK
        self.counter = 0

    def substream(self, label) -> "Rng":
        """Independent stream derived from this stream's key and a label.

        The label is hashed with FNV-1a over its str() bytes; deriving the
        same label twice gives the same stream regardless of how much the
        parent has been consumed.
        """
        return Rng(0, _key=_mix64_int(self.key ^ _fnv1a64(str(label).encode("utf-8"))))

    def uniforms(self, k: int) -> np.ndarray:
        """k doubles, i.i.d. uniform on (0, 1]."""
        if k < 0:
            raise ValueError("draw count must be nonnegative")
        idx = _U(self.counter) + np.arange(k, dtype=np.uint64)
        self.counter += k
        bits = _mix64_array(_U(self.key) + _U(GAMMA) * idx)
        return ((bits >> _U(11)).astype(np.float64) + 1.0) * 2.0**-53

    def gaussians(self, k: int) -> np.ndarray:
        u = self.uniforms(2 * k)
        u1 = u[0::2]
        u2 = u[1::2]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)

    def sphere(self, n: int) -> np.ndarray:
        """Uniform point on the unit sphere in R^n (2n uniforms per attempt)."""
        while True:
            g = self.gaussians(n)
            # square-sum instead of np.linalg.norm so the scalar is bitwise
            # identical to the row norms computed in the batched paths
            norm = float(np.sqrt((g * g).sum()))
            if norm > 0.0:  # all-zeros draw is measure zero; redraw
                return g / norm

    def ball(self, n: int) -> np.ndarray:
        """Uniform point in the closed unit ball (2n + 1 uniforms)."""
        while True:
            g = self.gaussians(n)
            norm = float(np.sqrt((g * g).sum()))
            if norm > 0.0:
                break
        # pow via the array ufunc, not np.float64.__pow__: the scalar path can
        # differ by one ulp and would break batch/sequential bit equality
        radius = float((self.uniforms(1) ** (1.0 / n))[0])
        return g * (radius / norm)

    def sphere_batch(self, count: int, n: int) -> np.ndarray:
        """(count, n) array, row r identical to the r-th sequential sphere(n)."""
        start = self.counter
        u = self.uniforms(2 * count * n)
        g = np.sqrt(-2.0 * np.log(u[0::2])) * np.cos(2.0 * math.pi * u[1::2])
        g = g.reshape(count, n)
        norms = np.sqrt((g * g).sum(axis=1))
        if np.any(norms == 0.0):
            self.counter = start
            return np.stack([self.sphere(n) for _ in range(count)])
        return g / norms[:, None]

    def ball_batch(self, count: int, n: int) -> np.ndarray:
        """(count, n) array, row r identical to the r-th sequential ball(n)."""
        start = self.counter
        u = self.uniforms(count * (2 * n + 1)).reshape(count, 2 * n + 1)
        g = np.sqrt(-2.0 * np.log(u[:, 0 : 2 * n : 2])) * np.cos(
            2.0 * math.pi * u[:, 1 : 2 * n : 2]
        )
        norms = np.sqrt((g * g).sum(axis=1))
        if np.any(norms == 0.0):
            self.counter = start
            return np.stack([self.ball(n) for _ in range(count)])
        radii = u[:, 2 * n] ** (1.0 / n)
        return g * (radii / norms)[:, None]
