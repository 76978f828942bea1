"""Static figures for the CLI reports (Agg backend, no timestamps in the files)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {"figure.figsize": (6.0, 4.0), "figure.dpi": 100, "axes.grid": True, "grid.alpha": 0.3,
          "font.size": 9, "legend.fontsize": 7, "svg.hashsalt": "carleman-lab"}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return Path(path)


def line_figure(path: Path, series: dict[str, tuple], xlabel: str, ylabel: str, title: str = "",
                logx: bool = False, logy: bool = False, hline: float | None = None) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, (xs, ys) in series.items():
            ax.plot(xs, ys, marker="o", ms=3, lw=1, label=label)
        if hline is not None:
            ax.axhline(hline, color="k", ls="--", lw=0.8)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(ncol=2)
        return _save(fig, path)


def ratio_figure(path: Path, ratios: np.ndarray, title: str = "") -> Path:
    """Sorted per-sample ratios with a histogram alongside."""
    r = np.sort(np.asarray(ratios, dtype=float)[np.isfinite(ratios)])
    with plt.rc_context(_STYLE):
        fig, (a, b) = plt.subplots(1, 2, figsize=(8.0, 3.5))
        a.plot(np.arange(r.size), r, lw=1)
        a.set_xlabel("sample (sorted)")
        a.set_ylabel("stability ratio")
        b.hist(r, bins=max(5, min(30, r.size // 3 or 1)), color="0.4")
        b.set_xlabel("stability ratio")
        b.set_ylabel("count")
        if title:
            fig.suptitle(title)
        return _save(fig, path)
