# -*- coding: utf-8 -*-
"""Standalone SVG line plots built as text."""
from __future__ import annotations

import os
from typing import Dict, List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from ..constants import _SVG_HEIGHT, _SVG_WIDTH

_NS_SVG = "http://www.w3.org/2000/svg"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")

_MARGIN = {"left": 80, "right": 120, "top": 40, "bottom": 60}


def _attrs(**attr: object) -> str:
    """Render keyword arguments as SVG attributes, `font_size` becoming
    `font-size`."""
    parts = []
    for key, value in attr.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        parts.append(f'{key.replace("_", "-")}="{value}"')
    return " ".join(parts)


def _element(tag: str, text: Optional[str] = None, **attr: object) -> str:
    if text is None:
        return f"<{tag} {_attrs(**attr)}/>"
    return f"<{tag} {_attrs(**attr)}>{escape(text)}</{tag}>"


def _nice_ticks(lower: float, upper: float, count: int = 6) -> np.ndarray:
    """Round tick positions covering `[lower, upper]`."""
    if upper <= lower:
        upper = lower + 1.0
    raw = (upper - lower) / count
    magnitude = 10 ** np.floor(np.log10(raw))
    step = min(
        (m * magnitude for m in (1, 2, 2.5, 5, 10) if m * magnitude >= raw),
    )
    first = np.ceil(lower / step) * step
    return np.arange(first, upper + 0.5 * step, step)


def line_plot(
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    title: str = "",
    x_label: str = "t",
    width: int = _SVG_WIDTH,
    height: int = _SVG_HEIGHT,
    max_points: int = 2000,
) -> str:
    """Plot several series against a shared abscissa.

    Args:
        x (`Sequence[float]`):
            The abscissa.
        series (`Dict[str, Sequence[float]]`):
            The curves by legend label.
        title (`str`, defaults to `""`):
            The plot title.
        x_label (`str`, defaults to `"t"`):
            The abscissa label.
        width (`int`, defaults to `1000`):
            The viewport width.
        height (`int`, defaults to `600`):
            The viewport height.
        max_points (`int`, defaults to `2000`):
            Curves with more points are thinned to about this many.

    Returns:
        `str`: The SVG document.
    """
    x = np.asarray(x, dtype=float)
    stride = max(1, len(x) // max_points)
    picked = np.arange(0, len(x), stride)
    if picked[-1] != len(x) - 1:
        picked = np.append(picked, len(x) - 1)

    values = {
        label: np.asarray(curve, dtype=float)[picked]
        for label, curve in series.items()
    }
    x = x[picked]
    y_low = min(0.0, min(float(v.min()) for v in values.values()))
    y_high = max(float(v.max()) for v in values.values())
    x_ticks = _nice_ticks(float(x[0]), float(x[-1]))
    y_ticks = _nice_ticks(y_low, y_high)
    x_low, x_high = min(x[0], x_ticks[0]), max(x[-1], x_ticks[-1])
    y_low, y_high = min(y_low, y_ticks[0]), max(y_high, y_ticks[-1])

    left, top = _MARGIN["left"], _MARGIN["top"]
    plot_w = width - _MARGIN["left"] - _MARGIN["right"]
    plot_h = height - _MARGIN["top"] - _MARGIN["bottom"]

    def px(value: np.ndarray) -> np.ndarray:
        return left + (value - x_low) / (x_high - x_low) * plot_w

    def py(value: np.ndarray) -> np.ndarray:
        return top + plot_h - (value - y_low) / (y_high - y_low) * plot_h

    parts: List[str] = [
        _element("rect", width=width, height=height, fill="white"),
        _element(
            "rect",
            x=left,
            y=top,
            width=plot_w,
            height=plot_h,
            fill="none",
            stroke="black",
        ),
    ]
    for tick in x_ticks:
        pos = float(px(tick))
        parts.append(
            _element(
                "line",
                x1=pos,
                y1=top + plot_h,
                x2=pos,
                y2=top + plot_h + 6,
                stroke="black",
            ),
        )
        parts.append(
            _element(
                "text",
                f"{tick:g}",
                x=pos,
                y=top + plot_h + 22,
                font_size=12,
                text_anchor="middle",
            ),
        )
    for tick in y_ticks:
        pos = float(py(tick))
        parts.append(
            _element(
                "line",
                x1=left - 6,
                y1=pos,
                x2=left,
                y2=pos,
                stroke="black",
            ),
        )
        parts.append(
            _element(
                "text",
                f"{tick:g}",
                x=left - 10,
                y=pos + 4,
                font_size=12,
                text_anchor="end",
            ),
        )

    for i, (label, curve) in enumerate(values.items()):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(
            f"{a:.2f},{b:.2f}" for a, b in zip(px(x), py(curve))
        )
        parts.append(
            _element(
                "polyline",
                points=points,
                fill="none",
                stroke=color,
                stroke_width=1.5,
            ),
        )
        legend_y = top + 20 * (i + 1)
        parts.append(
            _element(
                "line",
                x1=left + plot_w + 15,
                y1=legend_y,
                x2=left + plot_w + 45,
                y2=legend_y,
                stroke=color,
                stroke_width=2,
            ),
        )
        parts.append(
            _element(
                "text",
                label,
                x=left + plot_w + 52,
                y=legend_y + 4,
                font_size=13,
            ),
        )

    parts.append(
        _element(
            "text",
            x_label,
            x=left + plot_w / 2,
            y=height - 15,
            font_size=14,
            text_anchor="middle",
        ),
    )
    if title:
        parts.append(
            _element(
                "text",
                title,
                x=left + plot_w / 2,
                y=top - 15,
                font_size=16,
                text_anchor="middle",
            ),
        )

    header = _attrs(
        xmlns=_NS_SVG,
        width=width,
        height=height,
        viewBox=f"0 0 {width} {height}",
    )
    return f"<svg {header}>\n" + "\n".join(parts) + "\n</svg>\n"


def save_line_plot(path: str, *args: object, **kwargs: object) -> None:
    """Write `line_plot(*args, **kwargs)` to `path`."""
    dirname = os.path.dirname(path)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(line_plot(*args, **kwargs))
