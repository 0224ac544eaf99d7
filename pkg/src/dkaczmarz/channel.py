"""Block-fading channel realizations, stationary and spatially non-stationary.

Row ``m`` of ``H`` is the channel of antenna ``m`` towards the ``K`` users.
A visibility mask zeroes the users an antenna does not see; every antenna
sees exactly ``D`` users.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .numerics import InvalidArgumentError, sample_complex_gaussian


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw.

    Attributes
    ----------
    H : ndarray, shape (M, K), complex
        Channel matrix, exactly zero where ``masks`` is zero.
    masks : ndarray, shape (M, K), int8
        Per-antenna visibility bits (the diagonal of each D_m).
    D : int
        Number of users visible from each antenna.
    """

    H: np.ndarray
    masks: np.ndarray
    D: int

    @property
    def M(self) -> int:
        return self.H.shape[0]

    @property
    def K(self) -> int:
        return self.H.shape[1]

    @property
    def row_norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.H) ** 2, axis=-1)

    def to_csv(self, path) -> None:
        """Dump as CSV with columns ``m, k, re, im, visible``."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "k", "re", "im", "visible"])
            for m in range(self.M):
                for k in range(self.K):
                    h = self.H[m, k]
                    writer.writerow([m, k, repr(float(h.real)), repr(float(h.imag)),
                                     int(self.masks[m, k])])


def _check_dims(M: int, K: int) -> None:
    if M < 1 or K < 1:
        raise InvalidArgumentError(f"M and K must be >= 1, got M={M}, K={K}")


def _check_D(K: int, D: int) -> None:
    if not 1 <= D <= K:
        raise InvalidArgumentError(f"D must lie in [1, K={K}], got {D}")


def _rejection_masks(count: int, K: int, D: int, rng: np.random.Generator) -> np.ndarray:
    # Bernoulli(1/2) rows, keep those summing to D, in draw order. Drawing
    # candidates in blocks is equivalent to drawing them one row at a time.
    if D == K:
        return np.ones((count, K), dtype=np.int8)
    p_accept = math.comb(K, D) / 2.0 ** K
    out = np.empty((count, K), dtype=np.int8)
    filled = 0
    while filled < count:
        need = count - filled
        block = min(int(need / p_accept * 1.2) + 8, 1 << 20)
        cand = rng.integers(0, 2, size=(block, K), dtype=np.int8)
        good = cand[cand.sum(axis=1) == D][:need]
        out[filled:filled + len(good)] = good
        filled += len(good)
    return out


def generate_visibility_mask(K: int, D: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one length-``K`` mask with exactly ``D`` ones.

    Rejection sampling of fair Bernoulli sequences; the result is uniform
    over the ``C(K, D)`` admissible masks. ``D == K`` consumes no randomness.
    """
    _check_dims(1, K)
    _check_D(K, D)
    return _rejection_masks(1, K, D, rng)[0]


def generate_stationary(M: int, K: int, rng: np.random.Generator) -> ChannelRealization:
    """I.i.d. CN(0, 1) channel with every antenna seeing every user."""
    _check_dims(M, K)
    H = sample_complex_gaussian((M, K), 1.0, rng)
    return ChannelRealization(H=H, masks=np.ones((M, K), dtype=np.int8), D=K)


def generate_nonstationary(M: int, K: int, D: int, rng: np.random.Generator) -> ChannelRealization:
    """Channel whose antennas each see ``D`` users drawn independently.

    Masks are drawn first, then a full ``M x K`` CN(0, 1) block that is
    zeroed outside the masks. With ``D == K`` the draws coincide bit for bit
    with :func:`generate_stationary`.
    """
    _check_dims(M, K)
    _check_D(K, D)
    masks = _rejection_masks(M, K, D, rng)
    gains = sample_complex_gaussian((M, K), 1.0, rng)
    H = np.where(masks.astype(bool), gains, 0.0 + 0.0j)
    return ChannelRealization(H=H, masks=masks, D=D)


def generate_channel(M: int, K: int, D: int | None, rng: np.random.Generator) -> ChannelRealization:
    if D is None or D == K:
        return generate_stationary(M, K, rng)
    return generate_nonstationary(M, K, D, rng)
