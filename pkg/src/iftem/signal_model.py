"""PAM constellation, Gaussian pulse shaping and the transmitted waveform X(t).

Everything here is closed form: the waveform is a sum of shifted Gaussians and
its integral over any interval is a sum of Gaussian-CDF differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .numerics import golden_section_max

# exp(-pi^2 R^2 / a^2) = 1e-15 at the default cutoff radius; the neglected
# area beyond it is Q(R / sigma) ~ 5e-17
_TRUNC_LN = math.log(1e15)
_MAX_GRID_PER_TSYM = 64


@dataclass(frozen=True)
class PamConstellation:
    M: int
    levels: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.levels[1] - self.levels[0])

    @property
    def thresholds(self) -> np.ndarray:
        """Decision boundaries: midpoints between adjacent levels."""
        return 0.5 * (self.levels[:-1] + self.levels[1:])


def make_constellation(M: int) -> PamConstellation:
    """Equidistant, zero-mean, unit-average-energy M-PAM alphabet."""
    if M < 2:
        raise ValueError(f"constellation size must be >= 2, got {M}")
    if M & (M - 1):
        raise ValueError(f"constellation size must be a power of two, got {M}")
    d = math.sqrt(3.0 / (M * M - 1))
    levels = (2.0 * np.arange(1, M + 1) - 1.0 - M) * d
    levels.setflags(write=False)
    return PamConstellation(M=M, levels=levels)


@dataclass(frozen=True)
class GaussianPulse:
    """p(t) = (sqrt(pi)/a) exp(-pi^2 t^2 / a^2), unit area.

    ``b3db_tsym`` is the 3 dB bandwidth times the symbol period; the shaping
    parameter ``a`` (seconds) follows from it.
    """

    b3db_tsym: float
    tsym: float = 1.0
    a: float = field(init=False)

    def __post_init__(self):
        if self.b3db_tsym <= 0 or self.tsym <= 0:
            raise ValueError("bandwidth-time product and symbol period must be positive")
        a = math.sqrt(math.log(2.0) / 2.0) / self.b3db_tsym * self.tsym
        object.__setattr__(self, "a", a)

    @property
    def sigma(self) -> float:
        """Standard deviation of the pulse viewed as a Gaussian density."""
        return self.a / (math.sqrt(2.0) * math.pi)

    @property
    def peak(self) -> float:
        return math.sqrt(math.pi) / self.a

    @property
    def cutoff(self) -> float:
        """Radius beyond which the pulse is below 1e-15 of its peak."""
        return self.a * math.sqrt(_TRUNC_LN) / math.pi

    @property
    def energy(self) -> float:
        """Integral of p(t)^2 over the real line."""
        return math.sqrt(math.pi / 2.0) / self.a


def pulse_value(pulse: GaussianPulse, t):
    t = np.asarray(t, dtype=float)
    return pulse.peak * np.exp(-((math.pi * t / pulse.a) ** 2))


def _cdf_diff(u_lo, u_hi):
    # Phi(u_hi) - Phi(u_lo), evaluated on whichever tail keeps both terms small
    u_lo, u_hi = np.broadcast_arrays(np.asarray(u_lo, float), np.asarray(u_hi, float))
    flip = (u_lo + u_hi) > 0
    right = ndtr(-u_lo) - ndtr(-u_hi)
    left = ndtr(u_hi) - ndtr(u_lo)
    return np.where(flip, right, left)


def pulse_integral(pulse: GaussianPulse, t_lo, t_hi, shift=0.0):
    """Integral of p(t - shift) over [t_lo, t_hi] as a Q-function difference."""
    t_lo = np.asarray(t_lo, dtype=float)
    t_hi = np.asarray(t_hi, dtype=float)
    if np.any(t_lo > t_hi):
        raise ValueError("integration bounds out of order (t_lo > t_hi)")
    s = pulse.sigma
    with np.errstate(invalid="ignore"):
        out = _cdf_diff((t_lo - shift) / s, (t_hi - shift) / s)
    # inf - inf style corner cases collapse to empty intervals
    out = np.where(t_lo == t_hi, 0.0, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class TxBlock:
    symbols: np.ndarray
    pulse: GaussianPulse

    def __post_init__(self):
        s = np.array(self.symbols, dtype=float).ravel()
        if s.size < 1:
            raise ValueError("block needs at least one symbol")
        s.setflags(write=False)
        object.__setattr__(self, "symbols", s)

    @property
    def L(self) -> int:
        return self.symbols.size

    @property
    def centers(self) -> np.ndarray:
        return np.arange(self.L) * self.pulse.tsym


def tx_signal_value(block: TxBlock, t, cutoff: float | None = None):
    """X(t), summing only pulses centred within ``cutoff`` of t."""
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    pulse, T = block.pulse, block.pulse.tsym
    R = pulse.cutoff if cutoff is None else cutoff
    out = np.zeros_like(flat)
    if math.isinf(R):
        for l, s in enumerate(block.symbols):
            if s:
                out += s * pulse_value(pulse, flat - l * T)
        return out.reshape(t.shape)[()]
    first = np.ceil((flat - R) / T).astype(np.int64)
    span = int(math.ceil(2 * R / T)) + 1
    for k in range(span):
        l = first + k
        ok = (l >= 0) & (l < block.L)
        if not ok.any():
            continue
        lk = l[ok]
        dt = flat[ok] - lk * T
        inside = np.abs(dt) <= R
        contrib = np.where(inside, block.symbols[lk] * pulse_value(pulse, dt), 0.0)
        out[ok] += contrib
    return out.reshape(t.shape)[()]


def tx_signal_integral(block: TxBlock, t_lo, t_hi):
    """Closed-form integral of X(t) over [t_lo, t_hi] (scalars or matching arrays)."""
    t_lo = np.asarray(t_lo, dtype=float)
    t_hi = np.asarray(t_hi, dtype=float)
    if np.any(t_lo > t_hi):
        raise ValueError("integration bounds out of order (t_lo > t_hi)")
    shape = np.broadcast_shapes(t_lo.shape, t_hi.shape)
    lo = np.broadcast_to(t_lo, shape).ravel()
    hi = np.broadcast_to(t_hi, shape).ravel()
    centers = block.centers
    areas = pulse_integral(block.pulse, lo[:, None], hi[:, None], centers[None, :])
    out = areas @ block.symbols
    return out.reshape(shape)[()]


def tx_signal_cumulative_grid(block: TxBlock, t0: float, dt: float, n: int) -> np.ndarray:
    """sum_l s_l * Phi((t_i - l T)/sigma) on the grid t_i = t0 + i dt, i < n.

    Differences of this array are exact per-step signal areas. Each pulse only
    touches the grid points within its cutoff; beyond it the CDF is taken as 0 or 1.
    """
    pulse, T = block.pulse, block.pulse.tsym
    R = pulse.cutoff
    sig = pulse.sigma
    out = np.zeros(n)
    grid_end = t0 + (n - 1) * dt
    for l, s in enumerate(block.symbols):
        if s == 0.0:
            continue
        c = l * T
        i_lo = max(0, int(math.floor((c - R - t0) / dt)))
        i_hi = min(n, int(math.ceil((c + R - t0) / dt)) + 1)
        if c + R < t0:
            out += s
            continue
        if c - R > grid_end:
            continue
        if i_lo < i_hi:
            tt = t0 + np.arange(i_lo, i_hi) * dt
            out[i_lo:i_hi] += s * ndtr((tt - c) / sig)
        if i_hi < n:
            out[i_hi:] += s
    return out


def tx_signal_max_abs(block: TxBlock, points_per_tsym: int = _MAX_GRID_PER_TSYM) -> float:
    """max |X(t)| over [-T/2, (L - 1/2) T]: coarse grid, then golden-section refinement."""
    if not np.any(block.symbols):
        return 0.0
    T = block.pulse.tsym
    lo, hi = -0.5 * T, (block.L - 0.5) * T
    n = block.L * points_per_tsym + 1
    t = np.linspace(lo, hi, n)
    vals = np.abs(tx_signal_value(block, t))
    i = int(np.argmax(vals))
    h = t[1] - t[0]
    a, b = max(lo, t[i] - h), min(hi, t[i] + h)

    def f(x):
        return abs(float(tx_signal_value(block, x)))

    _, fmax = golden_section_max(f, a, b)
    return max(float(vals[i]), fmax)
