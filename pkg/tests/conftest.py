import numpy as np
import pytest

from dkaczmarz.channel import generate_stationary
from dkaczmarz.numerics import rng_stream, sample_complex_gaussian

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return rng_stream(12345)


def random_instance(seed, M=None, K=None, sigma2=0.1):
    """Stationary channel, Gaussian data and noisy observation."""
    r = rng_stream(seed)
    M = M or int(r.integers(1, 33))
    K = K or int(r.integers(1, 9))
    H = generate_stationary(M, K, r).H
    x = sample_complex_gaussian(K, 1.0, r)
    y = H @ x + sample_complex_gaussian(M, sigma2, r)
    return H, x, y


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
