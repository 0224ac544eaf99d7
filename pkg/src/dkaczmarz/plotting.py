"""BER figures for sweep reports."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

AXIS_LABELS = {"snr_db": "SNR [dB]", "T": "cycles $T$", "D": "effective UEs $D$"}


def series_label(res) -> str:
    c = res.config
    if c.receiver == "sdk":
        return f"SDK ({c.lambda_label})"
    return c.receiver.upper()


def plot_ber(results, axis: str, path, title: str | None = None):
    """Semilog BER curves with 95% error bars, one curve per receiver setting.

    ``axis`` is the config attribute on the abscissa (``snr_db``, ``T`` or
    ``D``). Zero BER points are dropped from the log scale.
    """
    curves = defaultdict(list)
    for res in results:
        x = getattr(res.config, axis) if axis != "D" else res.config.effective_D
        curves[series_label(res)].append((x, res.ber_mean, res.ber_ci95))

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, pts in curves.items():
        pts = sorted(p for p in pts if p[1] > 0)
        if not pts:
            continue
        xs, ys, es = zip(*pts)
        lower = [min(e, y * 0.999) for y, e in zip(ys, es)]
        ax.errorbar(xs, ys, yerr=[lower, es], marker="o", ms=3, capsize=2, label=label)
    ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS.get(axis, axis))
    ax.set_ylabel("average BER per UE")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
