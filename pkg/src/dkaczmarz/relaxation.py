"""Relaxation parameters for the distributed Kaczmarz updates.

Three SDK strategies are supported:

``constant:<lam>``
    the same relaxation ``lam`` at every node.
``sanchez``
    ``0.5 * (K / M) * ln(4 * M * snr)`` with the natural logarithm.
``proposed``
    ``min(sqrt(K * snr / (t * m)), 1)`` which shrinks with the node position
    ``m`` (1-based, in dispersion order) and the cycle ``t``.

Each relaxation is divided by ``||h_m||^2`` to give the per-node gain. A
zero gain is returned for an all-zero channel row, which makes the update a
no-op (the node is skipped).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import InvalidArgumentError

KINDS = ("constant", "sanchez", "proposed")


@dataclass(frozen=True)
class LambdaStrategy:
    kind: str
    value: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown lambda strategy {self.kind!r}")
        if self.kind == "constant" and not (self.value is not None and self.value > 0):
            raise InvalidArgumentError("constant lambda needs a positive value")

    @classmethod
    def parse(cls, spec: str) -> "LambdaStrategy":
        """Parse ``constant:<value>``, ``sanchez`` or ``proposed``."""
        kind, _, arg = spec.partition(":")
        if kind == "constant":
            try:
                return cls("constant", float(arg))
            except ValueError:
                raise InvalidArgumentError(f"bad constant lambda {spec!r}") from None
        if arg:
            raise InvalidArgumentError(f"strategy {kind!r} takes no argument")
        return cls(kind)

    def __str__(self) -> str:
        return f"constant:{self.value:g}" if self.kind == "constant" else self.kind

    def relaxation(self, m: int, t: int, K: int, M: int, snr: float) -> float:
        """Relaxation before row normalization at 1-based position ``m``, cycle ``t``."""
        if m < 1 or t < 1:
            raise InvalidArgumentError("m and t are 1-based")
        if self.kind == "constant":
            return self.value
        if self.kind == "sanchez":
            return sanchez_lambda(K, M, snr)
        return min(math.sqrt(K * snr / (t * m)), 1.0)


def sanchez_lambda(K: int, M: int, snr: float) -> float:
    arg = 4.0 * M * snr
    if not arg > 1.0:
        raise InvalidArgumentError(f"4*M*snr = {arg} <= 1 gives a non-positive lambda")
    return 0.5 * (K / M) * math.log(arg)


def _normalize(lam: float, h_norm_sq):
    h = np.asarray(h_norm_sq, dtype=float)
    safe = np.where(h > 0, h, 1.0)
    gain = np.where(h > 0, lam / safe, 0.0)
    return float(gain) if gain.ndim == 0 else gain


def lambda_sdk(strategy: LambdaStrategy, m: int, t: int, h_norm_sq,
               K: int, M: int, snr: float):
    """Per-node SDK gain ``lambda_m`` (0 for a zero channel row)."""
    return _normalize(strategy.relaxation(m, t, K, M, snr), h_norm_sq)


def lambda_bdk(h_norm_sq, xi: float, lam_star: float = 1.0):
    """Per-node BDK gain ``lam_star / (||h_m||^2 + xi)``."""
    if not xi > 0:
        raise InvalidArgumentError(f"xi must be > 0, got {xi}")
    gain = lam_star / (np.asarray(h_norm_sq, dtype=float) + xi)
    return float(gain) if gain.ndim == 0 else gain
