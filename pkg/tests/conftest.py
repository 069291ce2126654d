import numpy as np
import pytest

from iftem.channel_noise import NoiseProcess
from iftem.signal_model import GaussianPulse, TxBlock, make_constellation

ACCEPTANCE_LINES: list[str] = []


def random_block(rng, M=2, L=32, b3db_tsym=1.0):
    const = make_constellation(M)
    return TxBlock(rng.choice(const.levels, L), GaussianPulse(b3db_tsym))


def quiet(seed=0):
    """Noiseless channel positioned at t0 = -T/2."""
    return NoiseProcess(0.0, seed=seed, start=-0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
