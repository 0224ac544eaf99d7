"""Complex linear-algebra kernel, least-squares oracles and random streams.

Random stream rule
------------------
Every random draw in the package comes from a :class:`numpy.random.Generator`
built as ``Generator(PCG64(SeedSequence(seed, spawn_key=(stream_id,))))``.
The same ``(seed, stream_id)`` pair reproduces the same draws on any machine
with the same numpy bit generator; distinct ``stream_id`` values give
independent streams. The Monte Carlo harness uses ``stream_id = trial index``.
"""

from __future__ import annotations

import numpy as np

#: relative singular-value cutoff used for Moore-Penrose solutions
PINV_RCOND = 1e-12


class InvalidArgumentError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return the generator for ``(seed, stream_id)``.

    Parameters
    ----------
    seed : int
        Non-negative 64-bit master seed.
    stream_id : int
        Non-negative stream index, e.g. a Monte Carlo trial number.
    """
    if seed < 0 or stream_id < 0:
        raise InvalidArgumentError("seed and stream_id must be non-negative")
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.PCG64(seq))


def sample_complex_gaussian(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. CN(0, variance) entries.

    Real and imaginary parts are independent with variance ``variance / 2``
    each. The real parts are drawn first, then the imaginary parts.
    """
    if variance < 0:
        raise InvalidArgumentError(f"variance must be >= 0, got {variance}")
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


def _check_system(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim < 2:
        raise InvalidArgumentError("A must be at least 2-D")
    if b.shape[-1] != A.shape[-2] or b.shape[:-1] != A.shape[:-2]:
        raise InvalidArgumentError(
            f"dimension mismatch: A is {A.shape}, b is {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise InvalidArgumentError("non-finite entries")
    return A, b


def ls_solve(A, b) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A x = b``.

    Uses an SVD pseudoinverse with singular values below
    ``PINV_RCOND * s_max`` discarded, so rank-deficient systems return the
    Moore-Penrose solution. Leading axes of ``A`` and ``b`` are batch axes.
    """
    A, b = _check_system(A, b)
    pinv = np.linalg.pinv(A, rcond=PINV_RCOND)
    return np.einsum("...km,...m->...k", pinv, b)


def regularized_solve(A, b, xi: float) -> np.ndarray:
    """Tikhonov-regularized solution ``A^H (A A^H + xi I)^{-1} b``.

    This is the x-part of the minimum-norm solution of the consistent
    augmented system ``[A, sqrt(xi) I] z = b`` and equals
    ``(A^H A + xi I)^{-1} A^H b``.
    """
    A, b = _check_system(A, b)
    if not xi > 0:
        raise InvalidArgumentError(f"xi must be > 0, got {xi}")
    rows = A.shape[-2]
    gram = A @ np.conj(np.swapaxes(A, -1, -2)) + xi * np.eye(rows)
    w = np.linalg.solve(gram, b[..., None])[..., 0]
    return np.einsum("...mk,...m->...k", np.conj(A), w)
