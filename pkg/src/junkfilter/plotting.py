"""Minimal SVG renderings of sweep CSVs: line plots and fidelity-gain heat maps."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fileio import NOISE_COLUMNS, parse_float, read_csv  # noqa: E402

KINDS = ("depth_lines", "rate_lines", "heatmap")
NA_COLOR = "#b0b0b0"


def _varying_noise_column(rows) -> str:
    for col in NOISE_COLUMNS:
        if len({r[col] for r in rows}) > 1:
            return col
    return "gamma_identity"


def _series(rows, x_col: str):
    by_method: dict[str, list[tuple[float, float, float]]] = {}
    for r in rows:
        by_method.setdefault(r["method"], []).append(
            (parse_float(r[x_col]), parse_float(r["mean_infidelity"]), parse_float(r["std_infidelity"]))
        )
    return {m: np.array(sorted(v)) for m, v in by_method.items()}


def _lines(rows, x_col: str, ax) -> None:
    for method, arr in _series(rows, x_col).items():
        x, mean, std = arr.T
        (line,) = ax.plot(x, mean, marker="o", ms=3, label=method)
        lo = np.clip(mean - std, 1e-12, None)
        ax.fill_between(x, lo, mean + std, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_yscale("log")
    ax.set_ylabel("infidelity 1-F")
    ax.legend()


def heatmap_grid(rows) -> tuple[list[float], list[float], np.ndarray]:
    """Return ``(depths, rates, gain)`` with ``gain[i, j] = F_MS - F_MP`` at rate i, depth j."""
    rate_col = _varying_noise_column(rows)
    depths = sorted({parse_float(r["N"]) for r in rows})
    rates = sorted({parse_float(r[rate_col]) for r in rows})
    inf = {}
    for r in rows:
        inf[(parse_float(r[rate_col]), parse_float(r["N"]), r["method"])] = parse_float(r["mean_infidelity"])
    gain = np.full((len(rates), len(depths)), np.nan)
    for i, g in enumerate(rates):
        for j, n in enumerate(depths):
            mp, ms = inf.get((g, n, "MP"), np.nan), inf.get((g, n, "MS"), np.nan)
            gain[i, j] = mp - ms
    return depths, rates, gain


def render(csv_path: Union[str, Path], kind: str, out: Union[str, Path]) -> plt.Figure:
    """Render ``csv_path`` as ``kind`` into the SVG file ``out`` and return the figure."""
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {', '.join(KINDS)}")
    rows = read_csv(csv_path)
    if not rows:
        raise ValueError("CSV has no data rows; nothing to plot")
    fig, ax = plt.subplots(figsize=(6, 4))
    if kind == "depth_lines":
        _lines(rows, "N", ax)
        ax.set_xlabel("circuit depth N")
    elif kind == "rate_lines":
        col = _varying_noise_column(rows)
        _lines(rows, col, ax)
        ax.set_xscale("log")
        ax.set_xlabel(col)
    else:
        depths, rates, gain = heatmap_grid(rows)
        cmap = plt.get_cmap("viridis").copy()
        cmap.set_bad(NA_COLOR)
        mesh = ax.pcolormesh(np.arange(len(depths) + 1), np.arange(len(rates) + 1),
                             np.ma.masked_invalid(gain), cmap=cmap, shading="flat")
        ax.set_xticks(np.arange(len(depths)) + 0.5, [f"{d:g}" for d in depths])
        ax.set_yticks(np.arange(len(rates)) + 0.5, [f"{g:.2g}" for g in rates])
        ax.set_xlabel("circuit depth N")
        ax.set_ylabel(_varying_noise_column(rows))
        fig.colorbar(mesh, ax=ax, label="F_MS - F_MP (grey: NA)")
    fig.tight_layout()
    fig.savefig(out, format="svg")
    plt.close(fig)
    return fig
