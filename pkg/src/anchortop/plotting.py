"""Static figures for simulation sweeps (Agg backend, file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Blank the Software tag so identical data gives identical PNG bytes.
PNG_METADATA = {"Software": None}


def trend_figure(rows, param: str, metric: str, path, group_by=(), ylabel=None):
    """Line plot of aggregate ``metric`` against ``param``.

    ``rows`` are aggregate records (dicts). One line is drawn per distinct
    combination of the ``group_by`` fields.
    """
    lines = {}
    for row in rows:
        key = tuple(row[g] for g in group_by)
        lines.setdefault(key, []).append((row[param], row[metric]))

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for key in sorted(lines):
        pts = sorted(lines[key])
        label = ", ".join(f"{g}={v}" for g, v in zip(group_by, key)) or None
        ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=label)
    ax.set_xlabel(param)
    ax.set_ylabel(ylabel or metric)
    ax.grid(True, alpha=0.3)
    if group_by and len(lines) > 1:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="png", dpi=100, metadata=PNG_METADATA)
    plt.close(fig)
    return path
