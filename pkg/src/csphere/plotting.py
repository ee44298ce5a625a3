"""Figure rendering for benchmark results (headless, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import reduction_table

_MARKERS = ("o", "s", "^", "v", "D", "x", "*", "P")


def _series_by_detector(rows):
    series = {}
    for row in rows:
        series.setdefault(row.detector, []).append(row)
    for name in series:
        series[name].sort(key=lambda r: r.snr_db)
    return series


def save_complexity_figure(rows, path) -> None:
    """Mean modeled FLOPs vs SNR, one curve per detector, log scale."""
    series = _series_by_detector(rows)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for i, name in enumerate(sorted(series)):
        pts = series[name]
        snr = [r.snr_db for r in pts]
        mean = [r.mean_flops for r in pts]
        err = [r.stderr_flops for r in pts]
        ax.errorbar(snr, mean, yerr=err, marker=_MARKERS[i % len(_MARKERS)], label=name)
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("average modeled FLOPs")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_reduction_figure(rows, baseline, path) -> None:
    """Percent FLOP reduction vs the baseline detector across SNR."""
    table = reduction_table(rows, baseline)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    i = 0
    for name in sorted(table):
        if name == baseline:
            continue
        pairs = table[name]
        ax.plot(
            [snr for snr, _ in pairs],
            [red for _, red in pairs],
            marker=_MARKERS[i % len(_MARKERS)],
            label=name,
        )
        i += 1
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel(f"FLOP reduction vs {baseline} (%)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_ser_figure(rows, path) -> None:
    """Symbol error rate vs SNR per detector (log scale, zeros dropped)."""
    series = _series_by_detector(rows)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for i, name in enumerate(sorted(series)):
        pts = [(r.snr_db, r.ser) for r in series[name] if r.ser > 0]
        if not pts:
            continue
        ax.semilogy(
            [s for s, _ in pts],
            [e for _, e in pts],
            marker=_MARKERS[i % len(_MARKERS)],
            label=name,
        )
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("symbol error rate")
    ax.grid(True, which="both", alpha=0.3)
    if ax.has_data():
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
