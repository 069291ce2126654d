"""White Gaussian noise represented through its integral (a Brownian motion)."""

from __future__ import annotations

import math

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Philox-backed generator; ``seed`` may be an int or a SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


class NoiseProcess:
    """Integrated white noise with two-sided PSD N0/2.

    Each call hands out the integral of Z(t) from the last issued time to the
    requested one; increments over disjoint intervals are independent with
    variance (N0/2) * length. Exactly one standard-normal draw is consumed per
    increment, so a seed plus a call sequence pins the stream bit for bit.
    """

    def __init__(self, N0: float, seed=0, start: float = 0.0):
        if N0 < 0:
            raise ValueError(f"N0 must be nonnegative, got {N0}")
        self.N0 = float(N0)
        self.seed = seed
        self.state = float(start)
        self._rng = make_rng(seed)

    def noise_increment(self, t_next: float) -> float:
        if t_next < self.state:
            raise ValueError(f"out-of-order noise request: {t_next} < {self.state}")
        z = self._rng.standard_normal()
        inc = z * math.sqrt((self.N0 / 2.0) * (t_next - self.state))
        self.state = float(t_next)
        return inc

    def increments(self, times) -> np.ndarray:
        """Vectorized equivalent of calling noise_increment at each of ``times``."""
        times = np.asarray(times, dtype=float)
        if times.size == 0:
            return np.zeros(0)
        prev = np.concatenate(([self.state], times[:-1]))
        widths = times - prev
        if np.any(widths < 0):
            raise ValueError("noise requests must be nondecreasing in time")
        z = self._rng.standard_normal(times.size)
        self.state = float(times[-1])
        return z * np.sqrt((self.N0 / 2.0) * widths)
