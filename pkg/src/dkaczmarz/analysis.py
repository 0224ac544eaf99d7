"""Convergence-bound audits and complexity accounting."""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence

import numpy as np

from .numerics import InvalidArgumentError, rng_stream, sample_complex_gaussian
from .receivers import sdk_step


@dataclass(frozen=True)
class BoundParams:
    """Lower bounds ``E||x||^2 >= B_sq`` and ``E||rho_m||^2 >= rho_sq``."""

    B_sq: float
    rho_sq: float

    def __post_init__(self):
        if not (self.B_sq > 0 and self.rho_sq > 0):
            raise InvalidArgumentError("B_sq and rho_sq must be positive")

    @classmethod
    def loose(cls, K: int, p: float, sigma2: float) -> "BoundParams":
        return cls(B_sq=K * p, rho_sq=sigma2)


@dataclass(frozen=True)
class CostReport:
    receiver: str
    K: int
    T: int
    flops_per_node: int
    exchange_per_link: int


@dataclass(frozen=True)
class BoundCheck:
    lhs_mean: float
    rhs: float
    stderr: float
    min_realization_slack: float

    @property
    def slack(self) -> float:
        return self.lhs_mean - self.rhs

    @property
    def holds(self) -> bool:
        return self.lhs_mean >= self.rhs - 3.0 * self.stderr


def _check_KT(K: int, T: int) -> None:
    if K < 1 or T < 1:
        raise InvalidArgumentError(f"K and T must be >= 1, got K={K}, T={T}")


def flops_sdk(K: int, T: int) -> int:
    """Real floating-point operations per node for ``T`` SDK cycles."""
    _check_KT(K, T)
    return (12 * K + 2) * T


def flops_bdk(K: int, T: int) -> int:
    _check_KT(K, T)
    return (12 * K + 6) * T


def exchange_count(K: int, T: int) -> int:
    """Real values exchanged over one link during ``T`` cycles of dispersion and pooling."""
    _check_KT(K, T)
    return 4 * K * T


def cost_report(receiver: str, K: int, T: int) -> CostReport:
    """Per-node cost of a receiver; centralized receivers report zeros."""
    if receiver in ("sdk", "src"):
        flops, exch = flops_sdk(K, T), exchange_count(K, T)
    elif receiver == "bdk":
        flops, exch = flops_bdk(K, T), exchange_count(K, T)
    else:
        _check_KT(K, T)
        flops, exch = 0, 0
    return CostReport(receiver, K, T, flops, exch)


def per_step_identity_residual(x_true, x_prev, x_next, rho, lam: float) -> float:
    """``|LHS - RHS|`` of the per-step energy identity.

    ``Re<x_prev - x, rho> = (||x_next - x||^2 - ||x_prev - x||^2) / (2 lam)
    - lam ||rho||^2 / 2`` holds whenever ``x_next = x_prev + lam * rho``.
    """
    if not lam > 0:
        raise InvalidArgumentError("lam must be positive")
    e_prev = np.asarray(x_prev) - np.asarray(x_true)
    e_next = np.asarray(x_next) - np.asarray(x_true)
    rho = np.asarray(rho)
    lhs = np.real(np.vdot(rho, e_prev))
    rhs = ((np.vdot(e_next, e_next).real - np.vdot(e_prev, e_prev).real) / (2 * lam)
           - lam / 2 * np.vdot(rho, rho).real)
    return float(abs(lhs - rhs))


def theorem_bound_check(channel, trials: int, lam: float, snr: float | None = None,
                        rng: np.random.Generator | None = None, p: float = 1.0,
                        sigma2: float | None = None) -> BoundCheck:
    """Monte Carlo audit of the first-cycle error-sum lower bound.

    For a fixed channel with unit-norm rows (so every node uses the same
    gain ``lam``) draws ``x ~ CN(0, p I)`` and ``n ~ CN(0, sigma2 I)``, runs
    one SDK cycle from zero and compares the mean of
    ``sum_m Re<x_{m-1} - x, rho_m>`` with
    ``-E||x||^2 / (2 lam) - sum_m lam E||rho_m||^2 / 2``, expectations being
    sample means over the same draws.
    """
    H = np.asarray(getattr(channel, "H", channel), dtype=complex)
    norms = np.sum(np.abs(H) ** 2, axis=-1)
    if not np.allclose(norms, 1.0, rtol=0, atol=1e-12):
        raise InvalidArgumentError("rows must be unit-norm so the node gain is constant")
    if np.ndim(lam) != 0 or not lam > 0:
        raise InvalidArgumentError("a single positive constant lambda is required")
    if trials < 2:
        raise InvalidArgumentError("need at least 2 trials")
    if sigma2 is None:
        if snr is None:
            raise InvalidArgumentError("give snr or sigma2")
        sigma2 = p / snr
    rng = rng_stream(0) if rng is None else rng
    M, K = H.shape
    x = sample_complex_gaussian((trials, K), p, rng)
    n = sample_complex_gaussian((trials, M), sigma2, rng)
    y = x @ H.T + n
    xh = np.zeros((trials, K), dtype=complex)
    inner = np.zeros(trials)
    rho_sq = np.zeros((trials, M))
    for m in range(M):
        prev = xh
        xh, r = sdk_step(prev, H[m], y[:, m], lam)
        rho = np.conj(H[m]) * r[:, None]
        inner += np.real(np.sum(np.conj(rho) * (prev - x), axis=-1))
        rho_sq[:, m] = np.sum(np.abs(rho) ** 2, axis=-1)
    x_sq = np.sum(np.abs(x) ** 2, axis=-1)
    rhs_each = -x_sq / (2 * lam) - lam / 2 * rho_sq.sum(axis=1)
    return BoundCheck(
        lhs_mean=float(inner.mean()),
        rhs=float(rhs_each.mean()),
        stderr=float(inner.std(ddof=1) / np.sqrt(trials)),
        min_realization_slack=float(np.min(inner - rhs_each)),
    )


def proposed_bound_rhs(channel, params: BoundParams) -> float:
    """Right-hand side reached with ``lambda_m = sqrt(B^2 / (rho^2 m)) / ||h_m||^2``."""
    H = np.asarray(getattr(channel, "H", channel))
    norms = np.sum(np.abs(H) ** 2, axis=-1)
    B_rho = np.sqrt(params.B_sq * params.rho_sq)
    m = np.arange(1, len(norms) + 1)
    return float(-norms[0] * B_rho / 2 - B_rho / 2 * np.sum(1.0 / (norms * np.sqrt(m))))


def semi_convergence_profile(points: Sequence[Sequence[float]]) -> int | None:
    """Locate the best cycle count of a BER-versus-T profile.

    ``points`` are ``(T, ber)`` or ``(T, ber, ci95)`` tuples sorted by ``T``.
    Returns the minimizing ``T`` when some earlier and some later point both
    lie above the minimum by more than their joint confidence margin, i.e.
    the profile falls then rises; ``None`` otherwise.
    """
    if len(points) < 3:
        raise InvalidArgumentError("need at least 3 points")
    Ts = [p[0] for p in points]
    if Ts != sorted(Ts):
        raise InvalidArgumentError("points must be sorted by T")
    ber = np.array([p[1] for p in points], dtype=float)
    ci = np.array([p[2] if len(p) > 2 else 0.0 for p in points], dtype=float)
    best = int(np.argmin(ber))
    floor = ber[best] + ci[best]
    fell = np.any(ber[:best] - ci[:best] > floor)
    rose = np.any(ber[best + 1:] - ci[best + 1:] > floor)
    return Ts[best] if fell and rose else None


@dataclass(frozen=True)
class Finding:
    name: str
    passed: bool
    measured: str


def verify_identity(steps: int = 1000, seed: int = 0) -> list[Finding]:
    """Fuzz the per-step identity over random SDK transitions."""
    worst = 0.0
    for i in range(steps):
        rng = rng_stream(seed, i)
        K = int(rng.integers(1, 9))
        x = sample_complex_gaussian(K, 1.0, rng)
        x_prev = sample_complex_gaussian(K, 1.0, rng)
        h = sample_complex_gaussian(K, 1.0, rng)
        y_m = complex(np.sum(h * x) + sample_complex_gaussian(1, 0.5, rng)[0])
        lam = float(rng.uniform(0.05, 1.5)) / float(np.sum(np.abs(h) ** 2))
        x_next, r = sdk_step(x_prev, h, y_m, lam)
        res = per_step_identity_residual(x, x_prev, x_next, np.conj(h) * r, lam)
        lhs = abs(np.real(np.vdot(np.conj(h) * r, x_prev - x)))
        worst = max(worst, res / (1.0 + lhs))
    return [Finding("per-step identity", worst <= 1e-9, f"max scaled residual {worst:.3e}")]


def verify_theorem1(channels: int = 10, draws: int = 10_000, M: int = 32, K: int = 8,
                    snr: float = 1.0, lams: Sequence[float] = (0.25, 0.5, 1.0),
                    seed: int = 0) -> list[Finding]:
    """Check the first-cycle bound on unit-norm channels for each constant lambda."""
    out = []
    for lam in lams:
        worst = math.inf
        ok = True
        for c in range(channels):
            rng = rng_stream(seed, c)
            H = sample_complex_gaussian((M, K), 1.0, rng)
            H /= np.linalg.norm(H, axis=1, keepdims=True)
            chk = theorem_bound_check(H, draws, lam, snr=snr, rng=rng)
            ok &= chk.holds
            worst = min(worst, chk.slack / max(chk.stderr, 1e-300))
        out.append(Finding(f"theorem bound lambda={lam:g}", ok,
                           f"min slack {worst:.1f} standard errors"))
    return out


def verify_costs() -> list[Finding]:
    checks = [("flops_sdk(16,1)", flops_sdk(16, 1), 194),
              ("flops_bdk(16,1)", flops_bdk(16, 1), 198),
              ("exchange_count(16,1)", exchange_count(16, 1), 64)]
    return [Finding(name, got == want, f"{got} (expected {want})") for name, got, want in checks]
