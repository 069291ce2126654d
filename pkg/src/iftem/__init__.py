"""PAM receiver that detects symbols straight from integrate-and-fire time encodings."""

from .channel_noise import NoiseProcess
from .demodulator import (
    BlockObservation,
    FiringDeficit,
    bin_firings,
    build_observation,
    build_P,
    demodulate_block,
    hard_decision,
    zf_detect,
)
from .iftem_sampler import (
    FiringRecord,
    IftemParams,
    NonPositiveDrive,
    decode_firings,
    default_params,
    encode,
    sample,
)
from .numerics import IllConditioned, q_function, solve_ls
from .signal_model import (
    GaussianPulse,
    PamConstellation,
    TxBlock,
    make_constellation,
    pulse_integral,
    pulse_value,
    tx_signal_integral,
    tx_signal_max_abs,
    tx_signal_value,
)

__version__ = "0.1.0"
