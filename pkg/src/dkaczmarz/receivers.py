"""Decentralized iterative receivers and their centralized references.

All routines accept a channel matrix ``H`` of shape ``(..., M, K)`` (or a
:class:`~dkaczmarz.channel.ChannelRealization`) and received samples ``y`` of
shape ``(..., M)``; leading axes are independent problem instances that are
processed in lockstep. Node ``m`` only ever touches ``H[..., m, :]`` and
``y[..., m]``, plus the running estimate handed over by its predecessor.

Forward model: ``y_m = h_m^T x + n_m`` (no conjugate); updates use ``h_m^*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import InvalidArgumentError, ls_solve, regularized_solve
from .relaxation import LambdaStrategy, lambda_bdk, lambda_sdk
from .topology import Schedule, build_chain, make_schedule


@dataclass
class RunTrace:
    """Per-step record of a run.

    ``steps`` holds ``(cycle, node, residual, x_hat)`` after each node
    update (left empty when only cycles are recorded); ``payloads`` the number of complex values handed to the next
    node; ``u_hat`` (BDK only) the noise-estimate slots after each step.
    """

    steps: list = field(default_factory=list)
    payloads: list = field(default_factory=list)
    u_hat: list = field(default_factory=list)
    cycle_estimates: list = field(default_factory=list)


def _as_H(channel) -> np.ndarray:
    return np.asarray(getattr(channel, "H", channel), dtype=complex)


def _prepare(channel, y, schedule, x0):
    H = _as_H(channel)
    y = np.asarray(y, dtype=complex)
    if H.ndim < 2 or y.shape != H.shape[:-1]:
        raise InvalidArgumentError(f"y shape {y.shape} does not match H shape {H.shape}")
    M, K = H.shape[-2:]
    if schedule is None:
        schedule = make_schedule(build_chain(M))
    if sorted(schedule.dispersion_order) != list(range(M)):
        raise InvalidArgumentError("schedule must visit every node exactly once")
    if x0 is None:
        x0 = np.zeros(H.shape[:-2] + (K,), dtype=complex)
    else:
        x0 = np.broadcast_to(np.asarray(x0, dtype=complex), H.shape[:-2] + (K,)).copy()
    return H, y, schedule, x0


def _check_cycles(T: int) -> None:
    if T < 1:
        raise InvalidArgumentError(f"T must be >= 1, got {T}")


def sdk_step(x_hat, h_m, y_m, lam_m):
    """One Kaczmarz update at a node.

    Returns the new estimate ``x_hat + lam_m * conj(h_m) * r`` and the
    residual ``r = y_m - h_m^T x_hat``.
    """
    x_hat = np.asarray(x_hat, dtype=complex)
    h_m = np.asarray(h_m, dtype=complex)
    r = y_m - np.sum(h_m * x_hat, axis=-1)
    lam_m = np.asarray(lam_m, dtype=float)
    return x_hat + (lam_m * r)[..., None] * np.conj(h_m), r


def bdk_step(x_hat, u_hat, h_m, y_m, m: int, xi: float, lam_m):
    """One Bayesian Kaczmarz update at node ``m``.

    The node owns slot ``u_hat[..., m]``, its running estimate of the scaled
    noise sample. Returns ``(x_new, u_new, r)``; no other slot changes.
    """
    if not xi > 0:
        raise InvalidArgumentError(f"xi must be > 0, got {xi}")
    x_hat = np.asarray(x_hat, dtype=complex)
    h_m = np.asarray(h_m, dtype=complex)
    sq = np.sqrt(xi)
    lam_m = np.asarray(lam_m, dtype=float)
    r = y_m - np.sum(h_m * x_hat, axis=-1) - sq * u_hat[..., m]
    x_new = x_hat + (lam_m * r)[..., None] * np.conj(h_m)
    u_new = np.array(u_hat, dtype=complex, copy=True)
    u_new[..., m] = u_hat[..., m] + lam_m * sq * r
    return x_new, u_new, r


def sdk_run(channel, y, strategy, T: int = 1, schedule: Schedule | None = None,
            x0=None, snr: float | None = None, trace: bool = False):
    """Standard distributed Kaczmarz receiver over ``T`` cycles.

    Parameters
    ----------
    strategy : LambdaStrategy or float
        Relaxation rule; a bare float means ``constant:<value>``.
    snr : float, optional
        Linear ``p / sigma^2``; required by ``sanchez`` and ``proposed``.
    trace : bool or "cycles"
        ``True`` records every step, ``"cycles"`` only the pooled estimate
        of each cycle.

    Returns
    -------
    x_hat : ndarray
    trace : RunTrace or None
    """
    _check_cycles(T)
    if not isinstance(strategy, LambdaStrategy):
        strategy = LambdaStrategy("constant", float(strategy))
    if strategy.kind != "constant" and snr is None:
        raise InvalidArgumentError(f"lambda strategy {strategy} needs snr")
    H, y, schedule, x = _prepare(channel, y, schedule, x0)
    M, K = H.shape[-2:]
    norms = np.sum(np.abs(H) ** 2, axis=-1)
    rec = RunTrace() if trace else None
    steps = trace is True
    for t in range(1, T + 1):
        outputs = []
        for order, _ in schedule.groups:
            xg = x
            for pos, m in enumerate(order, start=1):
                lam = lambda_sdk(strategy, pos, t, norms[..., m], K, M, snr)
                xg, r = sdk_step(xg, H[..., m, :], y[..., m], lam)
                if steps:
                    rec.steps.append((t, m, r, xg.copy()))
                    rec.payloads.append(xg.shape[-1])
            outputs.append(xg)
        x = schedule.pool(outputs)
        if rec is not None:
            rec.cycle_estimates.append(x.copy())
    return x, rec


def bdk_run(channel, y, xi: float, lam_star: float = 1.0, T: int = 1,
            schedule: Schedule | None = None, x0=None, u0=None, trace: bool = False):
    """Bayesian distributed Kaczmarz receiver over ``T`` cycles.

    Solves the consistent system ``[H, sqrt(xi) I] [x; u] = y``. Only
    ``x_hat`` travels between nodes; ``u_hat[m]`` stays at node ``m`` and
    persists across cycles.

    Returns
    -------
    x_hat, u_hat : ndarray
    trace : RunTrace or None
    """
    _check_cycles(T)
    if not xi > 0:
        raise InvalidArgumentError(f"xi must be > 0, got {xi}")
    H, y, schedule, x = _prepare(channel, y, schedule, x0)
    if u0 is None:
        u = np.zeros(y.shape, dtype=complex)
    else:
        u = np.broadcast_to(np.asarray(u0, dtype=complex), y.shape).copy()
    lam = lambda_bdk(np.sum(np.abs(H) ** 2, axis=-1), xi, lam_star)
    rec = RunTrace() if trace else None
    steps = trace is True
    for t in range(1, T + 1):
        outputs = []
        for order, _ in schedule.groups:
            xg = x
            for m in order:
                xg, u, r = bdk_step(xg, u, H[..., m, :], y[..., m], m, xi, lam[..., m])
                if steps:
                    rec.steps.append((t, m, r, xg.copy()))
                    rec.payloads.append(xg.shape[-1])
                    rec.u_hat.append(u.copy())
            outputs.append(xg)
        x = schedule.pool(outputs)
        if rec is not None:
            rec.cycle_estimates.append(x.copy())
    return x, u, rec


def normalized_matched_filter(channel) -> np.ndarray:
    """Combiners ``w_m = h_m / ||h_m||^2`` (zero for an all-zero row)."""
    H = _as_H(channel)
    n = np.sum(np.abs(H) ** 2, axis=-1, keepdims=True)
    return np.where(n > 0, H / np.where(n > 0, n, 1.0), 0.0)


def src_run(channel, y, T: int = 1, schedule: Schedule | None = None, combiners=None):
    """Successive residual cancellation receiver.

    Each node forms a local estimate ``conj(w_m) * y_m^(m)`` from its
    residual sample, adds it to the running estimate, and cancels that
    estimate's contribution from the residual received signal. Nodes with a
    zero combiner are skipped.
    """
    _check_cycles(T)
    H, y, schedule, x = _prepare(channel, y, schedule, None)
    W = normalized_matched_filter(H) if combiners is None else np.asarray(combiners, dtype=complex)
    if W.shape != H.shape:
        raise InvalidArgumentError("combiners must have the shape of H")
    for _ in range(T):
        outputs = []
        for order, _ in schedule.groups:
            xg = x
            resid = y - np.einsum("...mk,...k->...m", H, xg)
            for m in order:
                local = np.conj(W[..., m, :]) * resid[..., m, None]
                xg = xg + local
                resid = resid - np.einsum("...mk,...k->...m", H, local)
            outputs.append(xg)
        x = schedule.pool(outputs)
    return x


def _projector_chain(H, lams, signal, x0, order):
    # backward accumulation of prod_{i>m} (I - lam_i h_i^* h_i^T)
    K = H.shape[-1]
    eye = np.broadcast_to(np.eye(K, dtype=complex), H.shape[:-2] + (K, K))
    phi = eye.copy()
    x = np.zeros(H.shape[:-2] + (K,), dtype=complex)
    V = np.zeros(H.shape, dtype=complex)
    for m in reversed(order):
        g = lams[..., m, None] * np.conj(H[..., m, :])
        col = np.einsum("...ij,...j->...i", phi, g)
        x = x + col * signal[..., m, None]
        V[..., m, :] = np.conj(col)
        proj = eye - g[..., :, None] * H[..., m, None, :]
        phi = phi @ proj
    return x + np.einsum("...ij,...j->...i", phi, x0), V


def closed_form_sdk(channel, y, lams, x0=None, order=None):
    """Unrolled single-cycle SDK estimate.

    Evaluates ``prod_m P_m x0 + sum_m prod_{i>m} P_i lam_m h_m^* y_m`` with
    ``P_i = I - lam_i h_i^* h_i^T``, and the combining matrix ``V`` whose
    row ``m`` is ``v_m = conj(prod_{i>m} P_i) lam_m h_m``, so that
    ``V^H y`` is the estimate for ``x0 = 0``.

    Returns
    -------
    x_hat : ndarray
    V : ndarray, same shape as ``H``
    """
    H = _as_H(channel)
    y = np.asarray(y, dtype=complex)
    M, K = H.shape[-2:]
    lams = np.broadcast_to(np.asarray(lams, dtype=float), H.shape[:-1])
    if y.shape != H.shape[:-1]:
        raise InvalidArgumentError("y does not match H")
    x0 = np.zeros(K, dtype=complex) if x0 is None else np.asarray(x0, dtype=complex)
    x0 = np.broadcast_to(x0, H.shape[:-2] + (K,))
    order = list(range(M)) if order is None else list(order)
    return _projector_chain(H, lams, y, x0, order)


def closed_form_bdk(channel, y, xi: float, lam_star: float = 1.0, x0=None, u0=None):
    """Unrolled single-cycle BDK estimates ``(x_hat, u_hat)``.

    ``x_hat`` is the SDK expression driven by the effective signals
    ``y_m - sqrt(xi) u0[m]``; each noise slot evolves as
    ``(1 - lam_m xi) u0[m] + lam_m sqrt(xi) (y_m - h_m^T x_{m-1})``, with the
    intermediate estimates ``x_{m-1}`` obtained from the running affine map
    ``x_m = A_m x0 + C_m y_eff``.
    """
    H = _as_H(channel)
    y = np.asarray(y, dtype=complex)
    if y.shape != H.shape[:-1]:
        raise InvalidArgumentError("y does not match H")
    M, K = H.shape[-2:]
    lams = lambda_bdk(np.sum(np.abs(H) ** 2, axis=-1), xi, lam_star)
    lams = np.broadcast_to(lams, H.shape[:-1])
    x0 = np.broadcast_to(np.zeros(K, complex) if x0 is None else np.asarray(x0, complex),
                         H.shape[:-2] + (K,))
    u0 = np.broadcast_to(np.zeros(M, complex) if u0 is None else np.asarray(u0, complex),
                         y.shape)
    sq = np.sqrt(xi)
    y_eff = y - sq * u0
    x_hat, _ = _projector_chain(H, lams, y_eff, x0, list(range(M)))

    eye = np.eye(K, dtype=complex)
    A = np.broadcast_to(eye, H.shape[:-2] + (K, K)).copy()
    C = np.zeros(H.shape[:-2] + (K, M), dtype=complex)
    u_hat = (1.0 - lams * xi) * u0
    for m in range(M):
        h = H[..., m, :]
        x_prev = (np.einsum("...ij,...j->...i", A, x0)
                  + np.einsum("...im,...m->...i", C, y_eff))
        u_hat[..., m] += lams[..., m] * sq * (y[..., m] - np.sum(h * x_prev, axis=-1))
        g = lams[..., m, None] * np.conj(h)
        proj = eye - g[..., :, None] * h[..., None, :]
        A = proj @ A
        C = proj @ C
        C[..., :, m] += g
    return x_hat, u_hat


def centralized_zf(channel, y) -> np.ndarray:
    """Zero-forcing: minimum-norm least-squares solution."""
    return ls_solve(_as_H(channel), y)


def centralized_rzf(channel, y, xi: float) -> np.ndarray:
    """Regularized zero-forcing with Tikhonov weight ``xi``."""
    return regularized_solve(_as_H(channel), y, xi)
