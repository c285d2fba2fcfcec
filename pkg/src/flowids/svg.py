"""Minimal deterministic SVG builder used by the figure renderers.

Everything is assembled from formatted strings with fixed precision, so a
given sequence of drawing calls always produces identical bytes. Text
layout uses the embedded advance-width table below instead of asking a
font engine, keeping geometry independent of the host system.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

# Advance widths as a fraction of font size, for a generic sans face.
# Characters missing from the table fall back to DEFAULT_ADVANCE.
_ADVANCE = {
    " ": 0.28, "!": 0.28, '"': 0.36, "#": 0.56, "$": 0.56, "%": 0.89,
    "&": 0.67, "'": 0.19, "(": 0.33, ")": 0.33, "*": 0.39, "+": 0.58,
    ",": 0.28, "-": 0.33, ".": 0.28, "/": 0.28, "0": 0.56, "1": 0.56,
    "2": 0.56, "3": 0.56, "4": 0.56, "5": 0.56, "6": 0.56, "7": 0.56,
    "8": 0.56, "9": 0.56, ":": 0.28, ";": 0.28, "<": 0.58, "=": 0.58,
    ">": 0.58, "?": 0.56, "@": 1.01, "A": 0.67, "B": 0.67, "C": 0.72,
    "D": 0.72, "E": 0.67, "F": 0.61, "G": 0.78, "H": 0.72, "I": 0.28,
    "J": 0.50, "K": 0.67, "L": 0.56, "M": 0.83, "N": 0.72, "O": 0.78,
    "P": 0.67, "Q": 0.78, "R": 0.72, "S": 0.67, "T": 0.61, "U": 0.72,
    "V": 0.67, "W": 0.94, "X": 0.67, "Y": 0.67, "Z": 0.61, "[": 0.28,
    "\\": 0.28, "]": 0.28, "^": 0.47, "_": 0.56, "`": 0.33, "a": 0.56,
    "b": 0.56, "c": 0.50, "d": 0.56, "e": 0.56, "f": 0.28, "g": 0.56,
    "h": 0.56, "i": 0.22, "j": 0.22, "k": 0.50, "l": 0.22, "m": 0.83,
    "n": 0.56, "o": 0.56, "p": 0.56, "q": 0.56, "r": 0.33, "s": 0.50,
    "t": 0.28, "u": 0.56, "v": 0.50, "w": 0.72, "x": 0.50, "y": 0.50,
    "z": 0.50, "{": 0.33, "|": 0.26, "}": 0.33, "~": 0.58,
}
DEFAULT_ADVANCE = 0.6


def text_width(s: str, size: float) -> float:
    return size * sum(_ADVANCE.get(ch, DEFAULT_ADVANCE) for ch in s)


def _fmt(v: float) -> str:
    out = f"{v:.2f}"
    return "0.00" if out == "-0.00" else out


# 9-stop sequential map (light to dark blue) for count heatmaps.
SEQUENTIAL_9 = [
    (247, 251, 255), (222, 235, 247), (198, 219, 239), (158, 202, 225),
    (107, 174, 214), (66, 146, 198), (33, 113, 181), (8, 81, 156),
    (8, 48, 107),
]

# 9-stop diverging map (blue through white to red) for correlations in [-1, 1].
DIVERGING_9 = [
    (5, 48, 97), (67, 147, 195), (146, 197, 222), (209, 229, 240),
    (247, 247, 247), (253, 219, 199), (244, 165, 130), (214, 96, 77),
    (103, 0, 31),
]

UNDEFINED_COLOR = "#b3b3b3"  # neutral cell for Undefined correlations


def colormap(stops: list[tuple[int, int, int]], t: float) -> str:
    """Linear interpolation over evenly spaced stops; t clipped to [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(stops) - 1)
    lo = min(int(pos), len(stops) - 2)
    frac = pos - lo
    rgb = tuple(
        round(stops[lo][c] + frac * (stops[lo + 1][c] - stops[lo][c]))
        for c in range(3)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


class Canvas:
    """Accumulates SVG elements and renders a standalone document."""

    def __init__(self, width: int, height: int):
        if width <= 0 or height <= 0:
            raise ValueError("canvas dimensions must be positive")
        self.width = width
        self.height = height
        self.elements: list[str] = []

    def rect(self, x, y, w, h, fill, stroke="none", stroke_width=1.0):
        self.elements.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}"/>'
        )

    def line(self, x1, y1, x2, y2, stroke="#000000", stroke_width=1.0, dashed=False):
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
            f'y2="{_fmt(y2)}" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}"{dash}/>'
        )

    def polyline(self, points, stroke="#0000ff", stroke_width=2.0):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}"/>'
        )

    def text(self, x, y, content, size=12.0, anchor="start", fill="#000000",
             rotate=None, cls=None):
        transform = (
            f' transform="rotate({_fmt(rotate)} {_fmt(x)} {_fmt(y)})"'
            if rotate is not None
            else ""
        )
        class_attr = f' class="{cls}"' if cls else ""
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
            f'font-size="{_fmt(size)}" text-anchor="{anchor}" '
            f'fill="{fill}"{transform}{class_attr}>{escape(content)}</text>'
        )

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" '
            'fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.elements) + "\n</svg>\n"
