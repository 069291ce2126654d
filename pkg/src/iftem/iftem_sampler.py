"""Integrate-and-fire time encoding of Y(t) = X(t) + Z(t).

The sampler walks a uniform grid. On each step it adds the exact signal area
(Gaussian-CDF differences), the exact bias area and one Brownian increment of
the noise integral. The integrator fires each time the biased integral since
the previous firing reaches kappa * delta; the surplus is carried over, so the
k-th firing is simply where the running integral first reaches k * kappa * delta.

Inside the step that crosses a level, the signal integral is modelled by the
cubic Hermite interpolant through the exact step area and the pointwise signal
values at both step ends, the bias is exact and the noise increment is spread
linearly. That makes noiseless firing times O(dt^4) accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel_noise import NoiseProcess
from .signal_model import (
    TxBlock,
    tx_signal_cumulative_grid,
    tx_signal_max_abs,
    tx_signal_value,
)

DEFAULT_DT_DIVISOR = 1024
MIN_DT_DIVISOR = 256
BIAS_FLOOR = 1.0
_NEWTON_ITERS = 40


class NonPositiveDrive(RuntimeError):
    """The integrator went silent for too long: the bias is too small for the input."""

    def __init__(self, gap: float, limit: float, at: float):
        super().__init__(f"no firing for {gap:.4g} s after t={at:.4g} (limit {limit:.4g} s)")
        self.gap = gap
        self.limit = limit
        self.at = at


@dataclass(frozen=True)
class IftemParams:
    b: float
    kappa: float
    delta: float
    dt: float
    # peak |X| the bias was designed against; None means derive from the block
    c_max: float | None = None

    def __post_init__(self):
        for name in ("b", "kappa", "delta", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def threshold(self) -> float:
        """Integral of Y + b between consecutive firings."""
        return self.kappa * self.delta

    def encoding_bounds(self, c_max: float) -> tuple[float, float]:
        lo = self.threshold / (self.b + c_max)
        hi = self.threshold / (self.b - c_max) if self.b > c_max else math.inf
        return lo, hi


@dataclass(frozen=True)
class FiringRecord:
    t0: float
    firings: np.ndarray

    def __post_init__(self):
        f = np.array(self.firings, dtype=float).ravel()
        if f.size and (f[0] <= self.t0 or np.any(np.diff(f) <= 0)):
            raise ValueError("firing instances must be strictly increasing and after t0")
        f.setflags(write=False)
        object.__setattr__(self, "firings", f)

    @property
    def encodings(self) -> np.ndarray:
        return encode(self)

    def __len__(self):
        return self.firings.size


def encode(record: FiringRecord) -> np.ndarray:
    """Time encodings T_k = t_k - t_{k-1}, with t_{-1} = t0."""
    if record.firings.size == 0:
        return np.zeros(0)
    return np.diff(record.firings, prepend=record.t0)


def decode_firings(encodings, t0: float) -> np.ndarray:
    """Rebuild firing instances from time encodings by t_k = t_{k-1} + T_k."""
    enc = np.asarray(encodings, dtype=float).ravel()
    if np.any(enc <= 0):
        raise ValueError("time encodings must be positive")
    return np.cumsum(np.concatenate(([t0], enc)))[1:]


def default_params(
    block: TxBlock,
    target_firings_per_symbol: int,
    bias_margin: float,
    dt: float | None = None,
    peak_level: float | None = None,
) -> IftemParams:
    """Bias from the worst-case block peak, threshold from the bias-only firing rate.

    The worst case is the block of the same length with every symbol at
    ``peak_level`` (default: the largest |symbol| in ``block``); its peak
    bounds |X(t)| for any block drawn from the same alphabet.
    """
    if target_firings_per_symbol < 4:
        raise ValueError("need at least 4 firings per symbol")
    if not bias_margin > 1:
        raise ValueError("bias margin must exceed 1")
    T = block.pulse.tsym
    if peak_level is None:
        peak_level = float(np.max(np.abs(block.symbols)))
    worst = TxBlock(np.full(block.L, peak_level), block.pulse)
    c_max = tx_signal_max_abs(worst)
    b = max(bias_margin * c_max, BIAS_FLOOR)
    kappa = 1.0
    delta = b * T / (kappa * target_firings_per_symbol)
    if dt is None:
        dt = T / DEFAULT_DT_DIVISOR
    return IftemParams(b=b, kappa=kappa, delta=delta, dt=dt, c_max=c_max)


def default_horizon(block: TxBlock) -> float:
    return (block.L - 0.5) * block.pulse.tsym + 3.0 * block.pulse.a


def _locate_crossings(s_prev, area, m0, m1, ramp, target, dt):
    """Solve s_prev + H(u) + ramp*u = target for u in [0, 1], vectorized.

    H is the cubic Hermite interpolant of the signal integral on a step with
    H(0) = 0, H(1) = area, slopes dt*m0 and dt*m1 at the ends. Safeguarded
    Newton: a step leaving the current bracket is replaced by bisection.
    """
    c0 = s_prev - target
    g1 = c0 + area + ramp
    u = np.clip(-c0 / (g1 - c0), 0.0, 1.0)
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    h0, h1 = dt * m0, dt * m1
    for _ in range(_NEWTON_ITERS):
        u2 = u * u
        u3 = u2 * u
        g = c0 + area * (3 * u2 - 2 * u3) + h0 * (u - 2 * u2 + u3) + h1 * (u3 - u2) + ramp * u
        dg = area * (6 * u - 6 * u2) + h0 * (1 - 4 * u + 3 * u2) + h1 * (3 * u2 - 2 * u) + ramp
        neg = g < 0
        lo = np.where(neg, u, lo)
        hi = np.where(neg, hi, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = u - g / dg
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        u_new = np.where(bad, 0.5 * (lo + hi), step)
        if np.all(np.abs(u_new - u) <= 1e-15):
            u = u_new
            break
        u = u_new
    return u


def sample(
    block: TxBlock,
    noise: NoiseProcess,
    params: IftemParams,
    horizon: float | None = None,
) -> FiringRecord:
    """Run the IF-TEM on X(t) + Z(t) from t0 = -T/2 (integrator at rest) to ``horizon``.

    Returns every firing in [t0, horizon]. On a noiseless channel, raises
    NonPositiveDrive when the sampler stays silent for more than
    4 * kappa * delta / (b - c_max). With noise, silences of that length are
    ordinary channel events and are left to the demodulator to judge.
    """
    T = block.pulse.tsym
    t0 = -0.5 * T
    if horizon is None:
        horizon = default_horizon(block)
    if horizon < (block.L - 0.5) * T:
        raise ValueError(f"horizon {horizon} ends before the last symbol interval")
    if params.dt > T / MIN_DT_DIVISOR * (1 + 1e-12):
        raise ValueError(f"dt={params.dt} coarser than T/{MIN_DT_DIVISOR}")
    if noise.state > t0:
        raise ValueError("noise process already advanced past t0")
    if noise.state < t0:
        noise.noise_increment(t0)

    dt = params.dt
    n = int(math.ceil((horizon - t0) / dt - 1e-9))
    idx = np.arange(n + 1)
    grid = t0 + idx * dt

    sig = tx_signal_cumulative_grid(block, t0, dt, n + 1)
    sig -= sig[0]
    total = sig + params.b * (idx * dt)
    w = noise.increments(grid[1:]) if noise.N0 > 0 else np.zeros(n)
    if noise.N0 > 0:
        total[1:] += np.cumsum(w)
    else:
        noise.state = float(grid[-1])

    level = params.threshold
    reached = np.floor(np.maximum.accumulate(total) / level).astype(np.int64)
    steps = np.flatnonzero(np.diff(reached) > 0) + 1
    counts = reached[steps] - reached[steps - 1]
    ev_step = np.repeat(steps, counts)
    ev_level = (np.repeat(reached[steps - 1], counts)
                + np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts) + 1)

    if ev_step.size:
        ends = np.unique(np.concatenate((ev_step - 1, ev_step)))
        xv = dict(zip(ends.tolist(), np.atleast_1d(tx_signal_value(block, grid[ends])).tolist()))
        m0 = np.array([xv[i] for i in (ev_step - 1).tolist()])
        m1 = np.array([xv[i] for i in ev_step.tolist()])
        s_prev = total[ev_step - 1]
        area = sig[ev_step] - sig[ev_step - 1]
        ramp = params.b * dt + w[ev_step - 1]
        u = _locate_crossings(s_prev, area, m0, m1, ramp, ev_level * level, dt)
        times = grid[ev_step - 1] + u * dt
        times = np.maximum.accumulate(times)
        dup = np.flatnonzero(np.diff(times) <= 0) + 1
        for k in dup:
            times[k] = np.nextafter(times[k - 1], np.inf)
        times = times[times <= horizon]
    else:
        times = np.zeros(0)

    c_max = params.c_max if params.c_max is not None else tx_signal_max_abs(block)
    if noise.N0 == 0 and params.b > c_max:
        limit = 4.0 * level / (params.b - c_max)
        gaps = np.diff(np.concatenate(([t0], times, [horizon])))
        k = int(np.argmax(gaps))
        if gaps[k] > limit:
            at = t0 if k == 0 else float(times[k - 1])
            raise NonPositiveDrive(float(gaps[k]), limit, at)
    return FiringRecord(t0=t0, firings=times)
