import numpy as np
import pytest

from iftem.channel_noise import NoiseProcess


def test_zero_length_increment_is_zero():
    proc = NoiseProcess(2.0, seed=1, start=0.3)
    assert proc.noise_increment(0.3) == 0.0
    assert proc.state == 0.3


def test_noiseless_channel():
    proc = NoiseProcess(0.0, seed=1)
    assert all(proc.noise_increment(t) == 0.0 for t in (0.1, 0.5, 3.0))


def test_rejects_out_of_order():
    proc = NoiseProcess(1.0, seed=0)
    proc.noise_increment(1.0)
    with pytest.raises(ValueError):
        proc.noise_increment(0.5)
    with pytest.raises(ValueError):
        proc.increments([1.5, 1.2])


def test_rejects_negative_psd():
    with pytest.raises(ValueError):
        NoiseProcess(-1.0)


def test_unit_variance_increments():
    # N0 = 2, width 1: variance (N0 / 2) * 1 = 1
    proc = NoiseProcess(2.0, seed=11)
    x = proc.increments(np.arange(1, 1_000_001, dtype=float))
    assert 0.99 <= x.var() <= 1.01
    assert abs(x.mean()) < 4e-3


def test_variance_additivity():
    n = 100_000
    d1, d2 = 0.3, 0.9
    base = 2.0 * np.arange(n)
    # per trial: [0, d1], [d1, d1 + d2], then a discarded gap up to the next trial
    times = np.stack([base + d1, base + d1 + d2, base + 2.0], axis=1).ravel()
    x = NoiseProcess(1.0, seed=5).increments(times).reshape(n, 3)
    whole = NoiseProcess(1.0, seed=6).increments(np.stack([base + d1 + d2, base + 2.0], 1).ravel())
    whole = whole.reshape(n, 2)[:, 0]
    target = 0.5 * (d1 + d2)
    # sample variance of n normals has relative std sqrt(2 / n)
    tol = 4 * np.sqrt(2 / n) * target
    assert abs(whole.var() - target) < tol
    assert abs((x[:, 0] + x[:, 1]).var() - target) < tol
    assert abs(x[:, 0].var() + x[:, 1].var() - whole.var()) < 2 * tol
    assert abs(np.corrcoef(x[:, 0], x[:, 1])[0, 1]) < 4 / np.sqrt(n)


def test_reproducible_stream():
    times = np.cumsum(np.full(50, 0.01))
    a = NoiseProcess(0.7, seed=42)
    b = NoiseProcess(0.7, seed=42)
    xa = [a.noise_increment(t) for t in times]
    xb = [b.noise_increment(t) for t in times]
    assert xa == xb


def test_bulk_matches_sequential_calls():
    times = np.cumsum(np.random.default_rng(0).uniform(0, 0.1, 200))
    seq = NoiseProcess(0.3, seed=9)
    bulk = NoiseProcess(0.3, seed=9)
    a = np.array([seq.noise_increment(t) for t in times])
    b = bulk.increments(times)
    np.testing.assert_array_equal(a, b)
    assert seq.state == bulk.state


def test_exact_scaling_with_psd():
    times = np.cumsum(np.full(100, 1 / 1024))
    small = NoiseProcess(0.25, seed=3).increments(times)
    big = NoiseProcess(1.0, seed=3).increments(times)
    np.testing.assert_array_equal(big, 2 * small)


def test_distinct_seeds_differ():
    a = NoiseProcess(1.0, seed=1).noise_increment(1.0)
    b = NoiseProcess(1.0, seed=2).noise_increment(1.0)
    assert a != b
