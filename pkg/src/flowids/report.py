"""Figure renderers: confusion heatmap, ROC plot, importance bars, and the
correlation heatmap, each as a standalone SVG plus a JSON payload sidecar.

Renderers are pure functions of (payload, spec); rendering the same input
twice gives byte-identical documents.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .metrics import ConfusionMatrix, CorrelationMatrix, RocCurve
from .svg import (
    Canvas,
    DIVERGING_9,
    SEQUENTIAL_9,
    UNDEFINED_COLOR,
    colormap,
    text_width,
)


class FigureKind(enum.Enum):
    CONFUSION_HEATMAP = "confusion_heatmap"
    ROC_PLOT = "roc_plot"
    IMPORTANCE_BARS = "importance_bars"
    CORRELATION_HEATMAP = "correlation_heatmap"


@dataclass
class FigureSpec:
    kind: FigureKind
    title: str
    output_path: str
    width: int = 640
    height: int = 480

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("figure dimensions must be positive")


def _require(spec: FigureSpec, kind: FigureKind) -> None:
    if spec.kind is not kind:
        raise ValueError(f"figure spec kind {spec.kind.value} != {kind.value}")


_MARGIN = {"left": 90.0, "right": 30.0, "top": 50.0, "bottom": 70.0}


def _plot_box(spec: FigureSpec):
    x0 = _MARGIN["left"]
    y0 = _MARGIN["top"]
    w = spec.width - _MARGIN["left"] - _MARGIN["right"]
    h = spec.height - _MARGIN["top"] - _MARGIN["bottom"]
    return x0, y0, w, h


def render_confusion(cm: ConfusionMatrix, spec: FigureSpec) -> str:
    """2x2 annotated heatmap; cell shade is monotone in count."""
    _require(spec, FigureKind.CONFUSION_HEATMAP)
    canvas = Canvas(spec.width, spec.height)
    x0, y0, w, h = _plot_box(spec)
    counts = cm.counts
    peak = int(counts.max())
    cw, ch = w / 2.0, h / 2.0
    for i in range(2):        # true class -> row
        for j in range(2):    # predicted class -> column
            frac = counts[i, j] / peak if peak > 0 else 0.0
            canvas.rect(
                x0 + j * cw, y0 + i * ch, cw, ch,
                fill=colormap(SEQUENTIAL_9, frac),
                stroke="#ffffff", stroke_width=1.0,
            )
            canvas.text(
                x0 + (j + 0.5) * cw, y0 + (i + 0.5) * ch + 5.0,
                str(int(counts[i, j])), size=16.0, anchor="middle",
                fill="#ffffff" if frac > 0.5 else "#000000",
                cls="cell-count",
            )
    for k in range(2):
        canvas.text(x0 + (k + 0.5) * cw, y0 + h + 20.0, str(k),
                    size=12.0, anchor="middle")
        canvas.text(x0 - 10.0, y0 + (k + 0.5) * ch + 4.0, str(k),
                    size=12.0, anchor="end")
    canvas.text(x0 + w / 2.0, y0 + h + 45.0, "Predicted Labels",
                size=13.0, anchor="middle")
    canvas.text(x0 - 45.0, y0 + h / 2.0, "True Labels",
                size=13.0, anchor="middle", rotate=-90.0)
    canvas.text(spec.width / 2.0, 28.0, spec.title, size=15.0, anchor="middle")
    return canvas.render()


_AXIS_TICKS = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


def render_roc(curve: RocCurve, spec: FigureSpec) -> str:
    """ROC polyline over the unit square with dashed diagonal and AUC legend."""
    _require(spec, FigureKind.ROC_PLOT)
    canvas = Canvas(spec.width, spec.height)
    x0, y0, w, h = _plot_box(spec)

    canvas.rect(x0, y0, w, h, fill="none", stroke="#000000", stroke_width=1.0)
    for t in _AXIS_TICKS:
        px = x0 + t * w
        py = y0 + (1.0 - t) * h
        canvas.line(px, y0 + h, px, y0 + h + 5.0)
        canvas.text(px, y0 + h + 20.0, f"{t:.1f}", size=11.0, anchor="middle")
        canvas.line(x0 - 5.0, py, x0, py)
        canvas.text(x0 - 9.0, py + 4.0, f"{t:.1f}", size=11.0, anchor="end")

    canvas.line(x0, y0 + h, x0 + w, y0, stroke="#888888",
                stroke_width=2.0, dashed=True)
    points = [
        (x0 + f * w, y0 + (1.0 - t) * h)
        for f, t in zip(curve.fpr, curve.tpr)
    ]
    canvas.polyline(points, stroke="#1f4e9c", stroke_width=2.0)

    legend = f"ROC curve (area = {curve.auc:.2f})"
    box_w = text_width(legend, 12.0) + 40.0
    lx = x0 + w - box_w - 10.0
    ly = y0 + h - 36.0
    canvas.rect(lx, ly, box_w, 26.0, fill="#ffffff",
                stroke="#000000", stroke_width=1.0)
    canvas.line(lx + 8.0, ly + 13.0, lx + 28.0, ly + 13.0,
                stroke="#1f4e9c", stroke_width=2.0)
    canvas.text(lx + 34.0, ly + 17.0, legend, size=12.0, cls="legend")

    canvas.text(x0 + w / 2.0, y0 + h + 45.0, "False Positive Rate",
                size=13.0, anchor="middle")
    canvas.text(x0 - 45.0, y0 + h / 2.0, "True Positive Rate",
                size=13.0, anchor="middle", rotate=-90.0)
    canvas.text(spec.width / 2.0, 28.0, spec.title, size=15.0, anchor="middle")
    return canvas.render()


def render_importances(top: list[tuple[str, float]], spec: FigureSpec) -> str:
    """Horizontal bars, largest value at the top, lengths proportional to value."""
    _require(spec, FigureKind.IMPORTANCE_BARS)
    if not top:
        raise ValueError("importance list is empty")
    canvas = Canvas(spec.width, spec.height)
    x0, y0, w, h = _plot_box(spec)
    peak = max(v for _, v in top)
    scale = w / peak if peak > 0 else 0.0
    slot = h / len(top)
    bar_h = slot * 0.7
    for i, (name, value) in enumerate(top):
        by = y0 + i * slot + (slot - bar_h) / 2.0
        canvas.rect(x0, by, value * scale, bar_h, fill="#1f4e9c")
        canvas.text(x0 - 8.0, by + bar_h / 2.0 + 4.0, name,
                    size=11.0, anchor="end", cls="bar-label")
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        px = x0 + t * w
        canvas.line(px, y0 + h, px, y0 + h + 5.0)
        canvas.text(px, y0 + h + 20.0, f"{t * peak:.3f}", size=10.0,
                    anchor="middle")
    canvas.text(x0 + w / 2.0, y0 + h + 45.0, "Relative Importance",
                size=13.0, anchor="middle")
    canvas.text(spec.width / 2.0, 28.0, spec.title, size=15.0, anchor="middle")
    return canvas.render()


def render_correlation(corr: CorrelationMatrix, spec: FigureSpec) -> str:
    """Unannotated heatmap on a diverging scale pinned to [-1, 1]."""
    _require(spec, FigureKind.CORRELATION_HEATMAP)
    canvas = Canvas(spec.width, spec.height)
    x0, y0, w, h = _plot_box(spec)
    n = len(corr.names)
    if n == 0:
        raise ValueError("correlation matrix is empty")
    cw, ch = w / n, h / n
    for i in range(n):
        for j in range(n):
            v = corr.matrix[i, j]
            if np.isfinite(v):
                fill = colormap(DIVERGING_9, (float(v) + 1.0) / 2.0)
            else:
                fill = UNDEFINED_COLOR
            canvas.rect(x0 + j * cw, y0 + i * ch, cw, ch, fill=fill)
    label_size = min(10.0, max(5.0, 220.0 / n))
    for i, name in enumerate(corr.names):
        canvas.text(x0 - 6.0, y0 + (i + 0.5) * ch + label_size / 3.0,
                    name, size=label_size, anchor="end")
        canvas.text(x0 + (i + 0.5) * cw, y0 + h + 8.0, name,
                    size=label_size, anchor="end", rotate=-60.0)
    canvas.text(spec.width / 2.0, 28.0, spec.title, size=15.0, anchor="middle")
    return canvas.render()


def _payload(kind: FigureKind, data) -> dict:
    if kind is FigureKind.CONFUSION_HEATMAP:
        return data.to_dict()
    if kind is FigureKind.ROC_PLOT:
        return data.to_dict()
    if kind is FigureKind.IMPORTANCE_BARS:
        return {"importances": [{"name": n, "value": v} for n, v in data]}
    return data.to_dict()


_RENDERERS = {
    FigureKind.CONFUSION_HEATMAP: render_confusion,
    FigureKind.ROC_PLOT: render_roc,
    FigureKind.IMPORTANCE_BARS: render_importances,
    FigureKind.CORRELATION_HEATMAP: render_correlation,
}


def write_figure(data, spec: FigureSpec) -> None:
    """Render to spec.output_path and write the JSON payload sidecar next to it."""
    document = _RENDERERS[spec.kind](data, spec)
    with open(spec.output_path, "w") as fh:
        fh.write(document)
    sidecar = spec.output_path.rsplit(".", 1)[0] + ".json"
    with open(sidecar, "w") as fh:
        json.dump(
            {"kind": spec.kind.value, "title": spec.title,
             "payload": _payload(spec.kind, data)},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
