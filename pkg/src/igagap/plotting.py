"""Static SVG line and bar plots.

Figures are built with the object-oriented matplotlib API (no pyplot state)
and written through the SVG backend with a fixed hash salt and no date stamp,
so identical data gives byte-identical files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

__all__ = ("Series", "line_plot", "bar_plot")

_RC = {"svg.hashsalt": "igagap", "svg.fonttype": "path", "path.simplify": False}


class Series:
    """One polyline: x, y, legend label and an optional marker."""

    def __init__(self, x, y, label: str = "", marker: Optional[str] = None, step: bool = False):
        self.x = list(x)
        self.y = list(y)
        self.label = label
        self.marker = marker
        self.step = step


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_RC):
        FigureCanvasSVG(fig)
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def line_plot(
    path,
    series: Iterable[Series],
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
    hlines: Sequence[float] = (),
) -> Path:
    """Write an SVG with one polyline per series."""
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot()
    labelled = False
    for s in series:
        if s.step:
            ax.step(s.x, s.y, where="post", label=s.label or None, linewidth=1.0)
        else:
            ax.plot(s.x, s.y, label=s.label or None, marker=s.marker, markersize=3, linewidth=1.0)
        labelled = labelled or bool(s.label)
    for h in hlines:
        ax.axhline(h, color="0.5", linestyle="--", linewidth=0.8)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, linewidth=0.3)
    if labelled:
        ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, path)


def bar_plot(path, left, width, heights, title: str, xlabel: str, ylabel: str,
             logy: bool = False) -> Path:
    """Write an SVG histogram-style bar chart (bars start at `left`)."""
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot()
    ax.bar(list(left), list(heights), width=list(width), align="edge", edgecolor="black", linewidth=0.5)
    if logy:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    return _save(fig, path)
