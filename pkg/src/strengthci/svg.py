"""Minimal SVG charts: histograms, curves, vertical markers and interval bars.

Output depends only on the data passed in, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

from html import escape

import numpy as np


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(first, hi + 0.5 * step, step) if lo - 1e-12 <= t <= hi + 1e-12]


def _fmt(v: float) -> str:
    return f"{v:.4g}"


class Chart:
    """A single x/y panel with a fixed data window."""

    def __init__(self, xlim, ylim, width=640, height=400, title="", xlabel="", ylabel=""):
        self.x0, self.x1 = map(float, xlim)
        self.y0, self.y1 = map(float, ylim)
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.width, self.height = width, height
        self.margin = (60, 20, 40, 50)  # left, right, top, bottom
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.items: list[str] = []

    def px(self, x: float) -> float:
        left, right, _, _ = self.margin
        return left + (x - self.x0) / (self.x1 - self.x0) * (self.width - left - right)

    def py(self, y: float) -> float:
        _, _, top, bottom = self.margin
        return self.height - bottom - (y - self.y0) / (self.y1 - self.y0) * (self.height - top - bottom)

    def histogram(self, counts, edges, density=True, fill="#c8d6e5"):
        counts = np.asarray(counts, dtype=np.float64)
        edges = np.asarray(edges, dtype=np.float64)
        heights = counts / (counts.sum() * np.diff(edges)) if density and counts.sum() > 0 else counts
        for h, a, b in zip(heights, edges[:-1], edges[1:]):
            top = min(h, self.y1)
            self.items.append(
                f'<rect x="{self.px(a):.2f}" y="{self.py(top):.2f}" width="{self.px(b) - self.px(a):.2f}" '
                f'height="{self.py(self.y0) - self.py(top):.2f}" fill="{fill}" stroke="#8395a7" stroke-width="0.5"/>'
            )

    def curve(self, x, y, stroke="#c0392b", width=1.5):
        pts = " ".join(f"{self.px(a):.2f},{self.py(min(max(b, self.y0), self.y1)):.2f}" for a, b in zip(x, y))
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def vline(self, x, label="", stroke="#2c3e50", dash="4,3"):
        if not self.x0 <= x <= self.x1:
            return
        px = self.px(x)
        self.items.append(
            f'<line x1="{px:.2f}" y1="{self.py(self.y0):.2f}" x2="{px:.2f}" y2="{self.py(self.y1):.2f}" '
            f'stroke="{stroke}" stroke-dasharray="{dash}"/>'
        )
        if label:
            self.items.append(f'<text x="{px + 3:.2f}" y="{self.py(self.y1) + 12:.2f}" font-size="11">{escape(label)}</text>')

    def whisker(self, lo, hi, y, center=None, stroke="#27ae60"):
        """Horizontal interval bar at height y."""
        a, b, py = self.px(max(lo, self.x0)), self.px(min(hi, self.x1)), self.py(y)
        self.items.append(f'<line x1="{a:.2f}" y1="{py:.2f}" x2="{b:.2f}" y2="{py:.2f}" stroke="{stroke}" stroke-width="2"/>')
        for end in (a, b):
            self.items.append(f'<line x1="{end:.2f}" y1="{py - 4:.2f}" x2="{end:.2f}" y2="{py + 4:.2f}" stroke="{stroke}" stroke-width="2"/>')
        if center is not None and self.x0 <= center <= self.x1:
            self.items.append(f'<circle cx="{self.px(center):.2f}" cy="{py:.2f}" r="3" fill="{stroke}"/>')

    def _axes(self) -> list[str]:
        out = []
        bx, by = self.py(self.y0), self.px(self.x0)
        out.append(f'<line x1="{by:.2f}" y1="{bx:.2f}" x2="{self.px(self.x1):.2f}" y2="{bx:.2f}" stroke="black"/>')
        out.append(f'<line x1="{by:.2f}" y1="{bx:.2f}" x2="{by:.2f}" y2="{self.py(self.y1):.2f}" stroke="black"/>')
        for t in _nice_ticks(self.x0, self.x1):
            p = self.px(t)
            out.append(f'<line x1="{p:.2f}" y1="{bx:.2f}" x2="{p:.2f}" y2="{bx + 4:.2f}" stroke="black"/>')
            out.append(f'<text x="{p:.2f}" y="{bx + 16:.2f}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
        for t in _nice_ticks(self.y0, self.y1):
            p = self.py(t)
            out.append(f'<line x1="{by - 4:.2f}" y1="{p:.2f}" x2="{by:.2f}" y2="{p:.2f}" stroke="black"/>')
            out.append(f'<text x="{by - 6:.2f}" y="{p + 4:.2f}" font-size="11" text-anchor="end">{_fmt(t)}</text>')
        if self.title:
            out.append(f'<text x="{self.width / 2:.1f}" y="20" font-size="14" text-anchor="middle">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{self.width / 2:.1f}" y="{self.height - 10}" font-size="12" text-anchor="middle">{escape(self.xlabel)}</text>')
        if self.ylabel:
            out.append(
                f'<text x="14" y="{self.height / 2:.1f}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 14 {self.height / 2:.1f})">{escape(self.ylabel)}</text>'
            )
        return out

    def render(self) -> str:
        body = "\n".join(self._axes() + self.items)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())
