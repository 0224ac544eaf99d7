"""16-QAM with natural binary level ordering and bit-error counting."""

from __future__ import annotations

import numpy as np

from .numerics import InvalidArgumentError

BITS_PER_SYMBOL = 4
#: amplitude levels indexed by the 2-bit natural binary value
LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(10.0)


def constellation() -> np.ndarray:
    """All 16 points, indexed by the 4-bit word ``b3 b2 b1 b0``."""
    idx = np.arange(16)
    return LEVELS[idx >> 2] + 1j * LEVELS[idx & 3]


def map_bits(bits) -> np.ndarray:
    """Map a bit array to unit-energy 16-QAM symbols.

    Each group of four bits ``b3 b2 b1 b0`` selects the in-phase level from
    ``b3 b2`` and the quadrature level from ``b1 b0`` with
    ``00 -> -3, 01 -> -1, 10 -> +1, 11 -> +3`` (before scaling by
    ``1/sqrt(10)``). Leading axes are preserved.
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % BITS_PER_SYMBOL:
        raise InvalidArgumentError(
            f"bit count {bits.shape[-1]} is not a multiple of {BITS_PER_SYMBOL}")
    b = bits.reshape(bits.shape[:-1] + (-1, BITS_PER_SYMBOL)).astype(np.intp)
    i_idx = 2 * b[..., 0] + b[..., 1]
    q_idx = 2 * b[..., 2] + b[..., 3]
    return LEVELS[i_idx] + 1j * LEVELS[q_idx]


def _slice(v: np.ndarray) -> np.ndarray:
    # nearest level index; a value on a decision boundary goes to the upper level
    edges = np.array([-2.0, 0.0, 2.0]) / np.sqrt(10.0)
    return np.searchsorted(edges, v, side="right")


def demap_symbols(soft) -> np.ndarray:
    """Hard-decide soft estimates to bits of the nearest constellation point.

    The grid is separable, so nearest-point search reduces to per-axis
    slicing. Ties resolve towards the larger level, e.g. ``0`` demaps to
    ``1010``.
    """
    soft = np.atleast_1d(np.asarray(soft, dtype=complex))
    i_idx = _slice(soft.real)
    q_idx = _slice(soft.imag)
    bits = np.stack([i_idx >> 1, i_idx & 1, q_idx >> 1, q_idx & 1], axis=-1)
    return bits.reshape(soft.shape[:-1] + (-1,)).astype(np.int8)


def bit_error_rate(tx, rx) -> float:
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    if tx.shape != rx.shape:
        raise InvalidArgumentError(f"length mismatch: {tx.shape} vs {rx.shape}")
    if tx.size == 0:
        raise InvalidArgumentError("empty bit sequences")
    return float(np.count_nonzero(tx != rx)) / tx.size
