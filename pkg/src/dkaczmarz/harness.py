"""Monte Carlo BER experiments.

Trial ``i`` of an experiment with master seed ``s`` draws everything from
``rng_stream(s, i)`` in this order: channel (masks, then gains), ``4K`` data
bits, ``M`` noise samples, and the chain root when root randomization is on.
Trials are processed in fixed-size chunks; chunk results are reduced in
ascending trial order, so the outcome does not depend on ``workers``.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analysis import CostReport, cost_report
from .channel import generate_channel
from .modem import BITS_PER_SYMBOL, demap_symbols, map_bits
from .numerics import InvalidArgumentError, rng_stream, sample_complex_gaussian
from .receivers import bdk_run, centralized_rzf, centralized_zf, sdk_run, src_run
from .relaxation import LambdaStrategy
from .topology import make_schedule, parse_topology, select_random_root

log = logging.getLogger(__name__)

RECEIVERS = ("zf", "rzf", "sdk", "bdk", "src")
CSV_HEADER = ("receiver", "lambda", "topology", "M", "K", "D", "snr_db", "T", "trials",
              "ber_mean", "ber_ci95", "flops_per_node", "exchange_per_link", "seed")
AXES = {"snr": "snr_db", "snr_db": "snr_db", "cycles": "T", "T": "T", "D": "D"}
#: transmit power; the noise power follows from the SNR
TX_POWER = 1.0


@dataclass(frozen=True)
class SimConfig:
    receiver: str = "sdk"
    M: int = 128
    K: int = 16
    D: int | None = None
    snr_db: float = 0.0
    T: int = 1
    lam: str = "proposed"
    topology: str = "chain"
    trials: int = 1000
    random_root: bool = False
    seed: int = 0
    noiseless: bool = False
    lam_star: float = 1.0
    chunk_size: int = 1024

    def __post_init__(self):
        if self.receiver not in RECEIVERS:
            raise InvalidArgumentError(f"unknown receiver {self.receiver!r}")
        if self.M < 1 or self.K < 1:
            raise InvalidArgumentError("M and K must be >= 1")
        if self.D is not None and not 1 <= self.D <= self.K:
            raise InvalidArgumentError(f"D must lie in [1, K={self.K}]")
        if self.T < 1:
            raise InvalidArgumentError("T must be >= 1")
        if self.trials < 1:
            raise InvalidArgumentError("trials must be >= 1")
        if self.seed < 0 or self.chunk_size < 1:
            raise InvalidArgumentError("seed must be >= 0 and chunk_size >= 1")
        strategy = LambdaStrategy.parse(self.lam)
        if self.noiseless and self.receiver in ("rzf", "bdk"):
            raise InvalidArgumentError(f"{self.receiver} needs xi > 0, i.e. a finite SNR")
        if self.noiseless and self.receiver == "sdk" and strategy.kind == "sanchez":
            raise InvalidArgumentError("sanchez lambda is undefined without noise")
        topo = parse_topology(self.topology, self.M)
        if self.random_root and topo.kind != "chain":
            raise InvalidArgumentError("root randomization needs a chain topology")

    @property
    def effective_D(self) -> int:
        return self.K if self.D is None else self.D

    @property
    def snr(self) -> float:
        return math.inf if self.noiseless else 10.0 ** (self.snr_db / 10.0)

    @property
    def sigma2(self) -> float:
        return 0.0 if self.noiseless else TX_POWER / self.snr

    @property
    def xi(self) -> float:
        return self.sigma2 / TX_POWER

    @property
    def lambda_label(self) -> str:
        if self.receiver == "sdk":
            return str(LambdaStrategy.parse(self.lam))
        if self.receiver == "bdk":
            return f"star:{self.lam_star:g}"
        return "none"


@dataclass(frozen=True)
class BerResult:
    ber_mean: float
    ber_ci95: float
    trials: int
    bit_errors: int
    bits: int
    cost: CostReport
    config: SimConfig

    def row(self) -> dict:
        c = self.config
        return {
            "receiver": c.receiver, "lambda": c.lambda_label,
            "topology": parse_topology(c.topology, c.M).describe(),
            "M": c.M, "K": c.K, "D": c.effective_D,
            "snr_db": "inf" if c.noiseless else f"{c.snr_db:g}",
            "T": c.T, "trials": self.trials,
            "ber_mean": f"{self.ber_mean:.8g}", "ber_ci95": f"{self.ber_ci95:.8g}",
            "flops_per_node": self.cost.flops_per_node,
            "exchange_per_link": self.cost.exchange_per_link, "seed": c.seed,
        }


def _draw_trial(config: SimConfig, index: int):
    rng = rng_stream(config.seed, index)
    channel = generate_channel(config.M, config.K, config.D, rng)
    bits = rng.integers(0, 2, size=BITS_PER_SYMBOL * config.K, dtype=np.int8)
    x = np.sqrt(TX_POWER) * map_bits(bits)
    n = sample_complex_gaussian(config.M, config.sigma2, rng)
    H = channel.H
    y = H @ x + n
    if config.random_root:
        root = select_random_root(H, rng)
        # rotating the rows turns the rotated chain into the identity order
        H = np.roll(H, -root, axis=0)
        y = np.roll(y, -root)
    return H, y, bits


def detect(config: SimConfig, H: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Run the configured receiver on a batch ``H (n, M, K)``, ``y (n, M)``."""
    schedule = make_schedule(parse_topology(config.topology, config.M))
    r = config.receiver
    if r == "zf":
        return centralized_zf(H, y)
    if r == "rzf":
        return centralized_rzf(H, y, config.xi)
    if r == "sdk":
        x, _ = sdk_run(H, y, LambdaStrategy.parse(config.lam), config.T, schedule,
                       snr=config.snr)
        return x
    if r == "bdk":
        x, _, _ = bdk_run(H, y, config.xi, config.lam_star, config.T, schedule)
        return x
    return src_run(H, y, config.T, schedule)


def detect_cycles(config: SimConfig, H: np.ndarray, y: np.ndarray) -> list[np.ndarray]:
    """Pooled estimates after each of ``config.T`` cycles (SDK and BDK)."""
    schedule = make_schedule(parse_topology(config.topology, config.M))
    if config.receiver == "sdk":
        _, rec = sdk_run(H, y, LambdaStrategy.parse(config.lam), config.T, schedule,
                         snr=config.snr, trace="cycles")
    elif config.receiver == "bdk":
        _, _, rec = bdk_run(H, y, config.xi, config.lam_star, config.T, schedule,
                            trace="cycles")
    else:
        raise InvalidArgumentError(f"no per-cycle profile for {config.receiver}")
    return rec.cycle_estimates


def _draw_chunk(config: SimConfig, start: int, stop: int):
    draws = [_draw_trial(config, i) for i in range(start, stop)]
    return tuple(np.stack([d[j] for d in draws]) for j in range(3))


def _chunk_errors(config: SimConfig, start: int, stop: int) -> np.ndarray:
    H, y, bits = _draw_chunk(config, start, stop)
    x_hat = detect(config, H, y)
    return np.count_nonzero(demap_symbols(x_hat) != bits, axis=-1)


def _chunk_cycle_errors(config: SimConfig, start: int, stop: int) -> np.ndarray:
    H, y, bits = _draw_chunk(config, start, stop)
    return np.stack([np.count_nonzero(demap_symbols(x) != bits, axis=-1)
                     for x in detect_cycles(config, H, y)])


def run_trial(config: SimConfig, index: int) -> tuple[int, int]:
    """Bit errors and bit count of trial ``index``."""
    errors = _chunk_errors(config, index, index + 1)
    return int(errors[0]), BITS_PER_SYMBOL * config.K


def _map_chunks(fn, config: SimConfig, workers: int) -> list[np.ndarray]:
    bounds = [(s, min(s + config.chunk_size, config.trials))
              for s in range(0, config.trials, config.chunk_size)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, [config] * len(bounds),
                                 [b[0] for b in bounds], [b[1] for b in bounds]))
    return [fn(config, a, b) for a, b in bounds]


def _summarize(config: SimConfig, errors: np.ndarray) -> BerResult:
    nbits = BITS_PER_SYMBOL * config.K
    ber = errors / nbits
    mean = float(ber.mean())
    ci = 0.0 if len(ber) < 2 else float(1.96 * ber.std(ddof=1) / np.sqrt(len(ber)))
    log.debug("%s: ber=%.3g +- %.2g", config.receiver, mean, ci)
    return BerResult(ber_mean=mean, ber_ci95=ci, trials=config.trials,
                     bit_errors=int(errors.sum()), bits=nbits * config.trials,
                     cost=cost_report(config.receiver, config.K, config.T), config=config)


def run_experiment(config: SimConfig, workers: int = 1) -> BerResult:
    """Average per-trial BER with a normal-approximation 95% interval."""
    return _summarize(config, np.concatenate(_map_chunks(_chunk_errors, config, workers)))


def cycle_profile(config: SimConfig, cycles: Sequence[int], workers: int = 1) -> list[BerResult]:
    """BER after each requested cycle count from a single run to ``max(cycles)``.

    Identical to separate :func:`run_experiment` calls per cycle count, since
    the first ``T`` cycles of a longer run are the ``T``-cycle run.
    """
    cycles = [int(c) for c in cycles]
    if not cycles or min(cycles) < 1:
        raise InvalidArgumentError("cycle counts must be >= 1")
    longest = dataclasses.replace(config, T=max(cycles))
    errors = np.concatenate(_map_chunks(_chunk_cycle_errors, longest, workers), axis=1)
    return [_summarize(dataclasses.replace(config, T=c), errors[c - 1]) for c in cycles]


def sweep(template: SimConfig, axis: str, values: Sequence, workers: int = 1) -> list[BerResult]:
    """One :func:`run_experiment` per value of ``axis`` (``snr``, ``cycles`` or ``D``)."""
    if axis not in AXES:
        raise InvalidArgumentError(f"unknown sweep axis {axis!r}")
    if len(values) == 0:
        raise InvalidArgumentError("sweep needs at least one value")
    name = AXES[axis]
    if name == "T" and template.receiver in ("sdk", "bdk"):
        return cycle_profile(template, values, workers)
    cast = float if name == "snr_db" else int
    return [run_experiment(dataclasses.replace(template, **{name: cast(v)}), workers)
            for v in values]


def write_csv(results: Iterable[BerResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        for res in results:
            writer.writerow(res.row())
