"""Monte Carlo symbol-error-probability harness.

Every trial owns its random streams: the symbol draw and the noise path are
seeded from (master seed, bandwidth index, Eb/N0 index, trial index), so a
table does not depend on how trials are scheduled over workers.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np

from .channel_noise import NoiseProcess, make_rng
from .demodulator import FiringDeficit, IllConditioned, demodulate_block
from .iftem_sampler import IftemParams, NonPositiveDrive, default_params, sample
from .signal_model import GaussianPulse, TxBlock, make_constellation

CSV_COLUMNS = (
    "b3db_tsym", "ebn0_db", "trials", "symbols", "errors",
    "sep", "ci95_lo", "ci95_hi", "deficit_count", "illcond_count",
)
Z95 = 1.959963984540054
SNR_CONVENTIONS = ("symbol", "pulse")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 2
    L: int = 32
    b3db_tsym: tuple[float, ...] = (1.0,)
    ebn0_db: tuple[float, ...] = (10.0,)
    trials: int = 100
    target_firings_per_symbol: int = 16
    bias_margin: float = 3.0
    dt_divisor: int = 1024
    seed: int = 0
    tsym: float = 1.0
    snr_convention: str = "symbol"

    def __post_init__(self):
        object.__setattr__(self, "b3db_tsym", tuple(float(v) for v in self.b3db_tsym))
        object.__setattr__(self, "ebn0_db", tuple(float(v) for v in self.ebn0_db))
        self.validate()

    def validate(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ConfigError(f"M must be a power of two >= 2, got {self.M}")
        if self.L < 1:
            raise ConfigError(f"L must be >= 1, got {self.L}")
        if not self.b3db_tsym or not self.ebn0_db:
            raise ConfigError("bandwidth and Eb/N0 grids must be nonempty")
        if any(not b > 0 for b in self.b3db_tsym):
            raise ConfigError("bandwidth-time products must be positive")
        if any(math.isnan(e) for e in self.ebn0_db):
            raise ConfigError("Eb/N0 values must be numbers")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.target_firings_per_symbol < 4:
            raise ConfigError("target_firings_per_symbol must be >= 4")
        if not self.bias_margin > 1:
            raise ConfigError("bias_margin must exceed 1")
        if self.dt_divisor < 256:
            raise ConfigError("dt_divisor must be >= 256")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if not self.tsym > 0:
            raise ConfigError("tsym must be positive")
        if self.snr_convention not in SNR_CONVENTIONS:
            raise ConfigError(f"snr_convention must be one of {SNR_CONVENTIONS}")

    @property
    def dt(self) -> float:
        return self.tsym / self.dt_divisor

    def grid(self):
        for ib, b in enumerate(self.b3db_tsym):
            for ie, e in enumerate(self.ebn0_db):
                yield ib, ie, b, e


@dataclass(frozen=True)
class SepResult:
    b3db_tsym: float
    ebn0_db: float
    trials: int
    symbols: int
    errors: int
    deficit_count: int = 0
    illcond_count: int = 0
    sep: float = field(init=False)
    ci95_lo: float = field(init=False)
    ci95_hi: float = field(init=False)

    def __post_init__(self):
        sep = self.errors / self.symbols if self.symbols else math.nan
        lo, hi = wilson_interval(self.errors, self.symbols)
        object.__setattr__(self, "sep", sep)
        object.__setattr__(self, "ci95_lo", lo)
        object.__setattr__(self, "ci95_hi", hi)

    @property
    def ci95(self) -> float:
        """Half-width of the Wilson interval."""
        return 0.5 * (self.ci95_hi - self.ci95_lo)


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def symbol_energy(pulse: GaussianPulse, convention: str = "symbol") -> float:
    """Average energy per symbol under the chosen SNR convention.

    ``symbol``: unit-energy symbols carried by a unit-area pulse count as one
    unit of energy per symbol period, independent of the pulse shape, so N0
    does not move when the bandwidth does.
    ``pulse``: the energy of the transmitted pulse itself, integral of p^2.
    """
    if convention == "symbol":
        return 1.0 / pulse.tsym
    if convention == "pulse":
        return pulse.energy
    raise ValueError(f"unknown SNR convention {convention!r}")


def snr_to_N0(ebn0_db: float, pulse: GaussianPulse, M: int, convention: str = "symbol") -> float:
    if M < 2:
        raise ValueError("M must be >= 2")
    eb = symbol_energy(pulse, convention) / math.log2(M)
    return eb * 10.0 ** (-ebn0_db / 10.0)


def trial_seed(master: int, ib: int, ie: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=(ib, ie, trial))


@lru_cache(maxsize=64)
def _params_for(M, L, b3db_tsym, tsym, target, margin, dt) -> IftemParams:
    pulse = GaussianPulse(b3db_tsym, tsym)
    peak = make_constellation(M).levels[-1]
    return default_params(TxBlock(np.full(L, peak), pulse), target, margin, dt=dt)


def trial_params(cfg: ExperimentConfig, b3db_tsym: float) -> IftemParams:
    return _params_for(cfg.M, cfg.L, b3db_tsym, cfg.tsym,
                       cfg.target_firings_per_symbol, cfg.bias_margin, cfg.dt)


@dataclass(frozen=True)
class TrialSetup:
    block: TxBlock
    indices: np.ndarray
    params: IftemParams
    noise: NoiseProcess


def setup_trial(cfg: ExperimentConfig, ib: int, ie: int, trial: int) -> TrialSetup:
    b3db, ebn0 = cfg.b3db_tsym[ib], cfg.ebn0_db[ie]
    pulse = GaussianPulse(b3db, cfg.tsym)
    const = make_constellation(cfg.M)
    sym_seed, noise_seed = trial_seed(cfg.seed, ib, ie, trial).spawn(2)
    indices = make_rng(sym_seed).integers(0, cfg.M, cfg.L)
    block = TxBlock(const.levels[indices], pulse)
    N0 = snr_to_N0(ebn0, pulse, cfg.M, cfg.snr_convention)
    noise = NoiseProcess(N0, seed=noise_seed, start=-0.5 * cfg.tsym)
    return TrialSetup(block, indices, trial_params(cfg, b3db), noise)


def run_trial(cfg: ExperimentConfig, ib: int, ie: int, trial: int) -> tuple[int, str]:
    """Symbol errors for one block and an outcome tag: 'ok', 'deficit' or 'illcond'."""
    ts = setup_trial(cfg, ib, ie, trial)
    const = make_constellation(cfg.M)
    try:
        rec = sample(ts.block, ts.noise, ts.params)
        dem = demodulate_block(rec, ts.params, ts.block.pulse, cfg.L, const)
    except (FiringDeficit, NonPositiveDrive):
        return 0, "deficit"
    except IllConditioned:
        return 0, "illcond"
    return int(np.count_nonzero(dem.indices != ts.indices)), "ok"


def _run_chunk(args):
    cfg, ib, ie, lo, hi = args
    errors = symbols = deficit = illcond = 0
    for t in range(lo, hi):
        e, status = run_trial(cfg, ib, ie, t)
        if status == "ok":
            errors += e
            symbols += cfg.L
        elif status == "deficit":
            deficit += 1
        else:
            illcond += 1
    return ib, ie, errors, symbols, deficit, illcond


def _chunks(cfg: ExperimentConfig, chunk: int):
    for ib, ie, _, _ in cfg.grid():
        for lo in range(0, cfg.trials, chunk):
            yield cfg, ib, ie, lo, min(cfg.trials, lo + chunk)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, chunk: int = 64) -> list[SepResult]:
    """SEP for every grid point, bandwidth-major order. Integer tallies make the
    reduction exact, so the output is identical for any worker count."""
    tally = {(ib, ie): [0, 0, 0, 0] for ib, ie, _, _ in cfg.grid()}
    jobs = list(_chunks(cfg, chunk))
    if workers <= 1:
        parts = map(_run_chunk, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        parts = pool.map(_run_chunk, jobs)
    try:
        for ib, ie, *counts in parts:
            acc = tally[(ib, ie)]
            for i, c in enumerate(counts):
                acc[i] += c
    finally:
        if workers > 1:
            pool.shutdown()
    out = []
    for ib, ie, b, e in cfg.grid():
        errors, symbols, deficit, illcond = tally[(ib, ie)]
        out.append(SepResult(b, e, cfg.trials, symbols, errors, deficit, illcond))
    return out


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def results_to_csv(results: list[SepResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        row = asdict(r)
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def write_atomic(path: str, data: str | bytes):
    """Write to a sibling temp file, then rename over ``path``."""
    tmp = f"{path}.tmp{os.getpid()}"
    mode = "wb" if isinstance(data, bytes) else "w"
    kw = {} if isinstance(data, bytes) else {"newline": "", "encoding": "utf-8"}
    try:
        with open(tmp, mode, **kw) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def plot_sep_svg(results: list[SepResult], title: str = "") -> bytes:
    """SEP versus Eb/N0 on a log axis, one curve per bandwidth-time product."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "iftem"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for b in sorted({r.b3db_tsym for r in results}):
        pts = sorted((r.ebn0_db, r.sep) for r in results if r.b3db_tsym == b)
        x = [e for e, s in pts if s > 0]
        y = [s for e, s in pts if s > 0]
        ax.semilogy(x, y, "o-", label=f"$B_{{3dB}}T$ = {b:g}")
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("symbol error probability")
    ax.grid(True, which="both", linestyle="--", linewidth=0.5)
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def config_fields() -> dict[str, type]:
    return {f.name: f.type for f in fields(ExperimentConfig)}
