"""Decentralized iterative uplink receivers for massive and extra-large MIMO."""

from .numerics import InvalidArgumentError, rng_stream

__all__ = ["InvalidArgumentError", "rng_stream"]
__version__ = "0.1.0"
