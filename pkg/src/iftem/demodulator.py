"""Symbol recovery straight from firing statistics, with no waveform reconstruction.

Per symbol interval [(l - 1/2) T, (l + 1/2) T) the firings between the first
and last one span N_l - 1 complete inter-firing gaps, each carrying exactly
kappa * delta of integrated Y + b. Dividing by the span gives the
observation y_l, whose bias-free part is a linear mix of the symbols plus
time-averaged noise: y - b = P s + z. Zero forcing inverts P, a slicer
maps to the alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .iftem_sampler import FiringRecord, IftemParams
from .numerics import IllConditioned, LeastSquaresSolution, solve_ls
from .signal_model import GaussianPulse, PamConstellation, pulse_integral

DEFAULT_COND_CAP = 1e8

__all__ = [
    "BlockObservation",
    "FiringDeficit",
    "IllConditioned",
    "bin_firings",
    "build_observation",
    "build_P",
    "zf_detect",
    "hard_decision",
    "demodulate_block",
]


class FiringDeficit(RuntimeError):
    """A symbol interval holds fewer than two firings, so its span is undefined."""

    def __init__(self, interval: int, count: int):
        super().__init__(f"symbol interval {interval} has {count} firing(s), need >= 2")
        self.interval = interval
        self.count = count


@dataclass(frozen=True)
class BlockObservation:
    counts: np.ndarray
    t_min: np.ndarray
    t_max: np.ndarray
    y: np.ndarray
    P: np.ndarray | None = None

    @property
    def spans(self) -> np.ndarray:
        return self.t_max - self.t_min


def bin_firings(record: FiringRecord, L: int, tsym: float) -> list[np.ndarray]:
    """Split firings over the L half-open symbol intervals; a boundary firing goes up."""
    edges = (np.arange(L + 1) - 0.5) * tsym
    f = record.firings
    f = f[(f >= edges[0]) & (f < edges[-1])]
    which = np.searchsorted(edges, f, side="right") - 1
    bins = np.split(f, np.searchsorted(which, np.arange(1, L)))
    for l, b in enumerate(bins):
        if b.size < 2:
            raise FiringDeficit(l, int(b.size))
    return bins


def build_observation(bins: list[np.ndarray], params: IftemParams) -> BlockObservation:
    """Observation vector y (bias still included) and per-interval extreme firings."""
    for l, b in enumerate(bins):
        if len(b) < 2:
            raise FiringDeficit(l, len(b))
    counts = np.array([len(b) for b in bins], dtype=np.int64)
    t_min = np.array([b[0] for b in bins])
    t_max = np.array([b[-1] for b in bins])
    y = (counts - 1) * params.threshold / (t_max - t_min)
    return BlockObservation(counts=counts, t_min=t_min, t_max=t_max, y=y)


def build_P(t_min, t_max, pulse: GaussianPulse, L: int) -> np.ndarray:
    """P[l, j] = average of p(t - j T) over [t_min_l, t_max_l].

    Row l is observation interval l, column j is symbol j.
    """
    t_min = np.asarray(t_min, dtype=float)
    t_max = np.asarray(t_max, dtype=float)
    span = t_max - t_min
    if np.any(span <= 0):
        raise ValueError("observation intervals must have positive length")
    shifts = np.arange(L) * pulse.tsym
    area = pulse_integral(pulse, t_min[:, None], t_max[:, None], shifts[None, :])
    return area / span[:, None]


def zf_detect(y, P, cond_cap: float = DEFAULT_COND_CAP) -> LeastSquaresSolution:
    """Zero-forcing estimate argmin ||P s - y||; ``y`` must already be bias-free."""
    return solve_ls(P, y, cond_cap)


def hard_decision(soft, constellation: PamConstellation) -> np.ndarray:
    """Nearest-level indices; a value exactly on a midpoint takes the lower level."""
    return np.searchsorted(constellation.thresholds, np.asarray(soft, dtype=float), side="left")


@dataclass(frozen=True)
class Demodulation:
    observation: BlockObservation
    soft: np.ndarray
    indices: np.ndarray
    symbols: np.ndarray
    condition: float


def demodulate_block(
    record: FiringRecord,
    params: IftemParams,
    pulse: GaussianPulse,
    L: int,
    constellation: PamConstellation,
    cond_cap: float = DEFAULT_COND_CAP,
) -> Demodulation:
    bins = bin_firings(record, L, pulse.tsym)
    obs = build_observation(bins, params)
    P = build_P(obs.t_min, obs.t_max, pulse, L)
    obs = BlockObservation(obs.counts, obs.t_min, obs.t_max, obs.y, P)
    ls = zf_detect(obs.y - params.b, P, cond_cap)
    idx = hard_decision(ls.x, constellation)
    return Demodulation(
        observation=obs,
        soft=ls.x,
        indices=idx,
        symbols=constellation.levels[idx],
        condition=ls.condition,
    )
