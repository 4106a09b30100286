"""Figures written next to the CSV output (Agg backend, no display)."""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def plot_sweep(curves, xlabel, path, title=None):
    """``curves`` maps a legend label to (x, probability) arrays."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for label, (x, p) in curves.items():
        ax.plot(x, p, marker=".", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"$P(\mu \leq 0)$")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_probability_profiles(x, profiles, path, title=None):
    """``profiles`` maps a time to the per-cell probability."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for t, p in profiles.items():
        ax.plot(x, p, label=f"t = {t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$P_{t,x}(\mu \leq 0)$")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_band(x, mean, lower, upper, path, label="density", extra=None, title=None):
    """Mean with a shaded confidence band; ``extra`` maps labels to more curves."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.fill_between(x, lower, upper, alpha=0.3, label="band")
    ax.plot(x, mean, color="k", label="mean")
    for name, y in (extra or {}).items():
        ax.plot(x, y, linestyle="--", label=name)
    ax.set_xlabel("x")
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
