"""Minimal SVG emission for bifurcation diagrams and loops.

Hand-built elements only; output is a standalone XML document.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

import numpy as np

WIDTH, HEIGHT, MARGIN = 480, 480, 40

# marker colour per Williamson tag
COLORS = {
    "EllipticElliptic": "#1f77b4",
    "EllipticHyperbolic": "#2ca02c",
    "HyperbolicHyperbolic": "#9467bd",
    "FocusFocus": "#d62728",
    "Degenerate": "#7f7f7f",
    "rank-1": "#444444",
}


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _el(tag: str, text: str | None = None, **attrs) -> str:
    parts = " ".join(f"{k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
    head = f"<{tag} {parts}" if parts else f"<{tag}"
    if text is None:
        return head + "/>"
    return f"{head}>{escape(text)}</{tag}>"


class _Frame:
    """Affine map from value coordinates to pixels, y pointing up."""

    def __init__(self, points: np.ndarray):
        lo, hi = points.min(axis=0), points.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        pad = 0.08 * span
        self.lo, self.hi = lo - pad, hi + pad

    def __call__(self, p) -> tuple[float, float]:
        u = (np.asarray(p, dtype=float) - self.lo) / (self.hi - self.lo)
        return (MARGIN + u[0] * (WIDTH - 2 * MARGIN), HEIGHT - MARGIN - u[1] * (HEIGHT - 2 * MARGIN))


def _axes(frame: _Frame, title: str) -> list[str]:
    out = [
        _el("rect", x=0, y=0, width=WIDTH, height=HEIGHT, fill="white"),
        _el("rect", x=MARGIN, y=MARGIN, width=WIDTH - 2 * MARGIN, height=HEIGHT - 2 * MARGIN,
            fill="none", stroke="#999999"),
        _el("text", title, x=WIDTH / 2, y=MARGIN / 2 + 5, text_anchor="middle", font_size=14),
        _el("text", "c1", x=WIDTH - MARGIN, y=HEIGHT - 10, text_anchor="end", font_size=12),
        _el("text", "c2", x=10, y=MARGIN, font_size=12),
    ]
    for i, (lo, hi) in enumerate(zip(frame.lo, frame.hi)):
        for v in (lo, hi):
            x, y = frame((v, frame.lo[1])) if i == 0 else frame((frame.lo[0], v))
            if i == 0:
                out.append(_el("text", _fmt(v), x=_fmt(x), y=_fmt(HEIGHT - MARGIN + 14), text_anchor="middle",
                               font_size=10))
            else:
                out.append(_el("text", _fmt(v), x=_fmt(MARGIN - 4), y=_fmt(y + 3), text_anchor="end",
                               font_size=10))
    return out


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join(['<?xml version="1.0" encoding="UTF-8"?>', head, *body, "</svg>", ""])


def diagram_svg(critical_values, loop=None, title: str = "critical values") -> str:
    """Scatter of ``(value, tag)`` pairs with type-coded markers, optional loop polyline."""
    pts = [np.asarray(v, dtype=float) for v, _ in critical_values]
    if loop is not None:
        pts.extend(np.asarray(loop, dtype=float))
    frame = _Frame(np.array(pts) if pts else np.zeros((1, 2)))
    body = _axes(frame, title)
    if loop is not None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(frame, loop))
        body.append(_el("polyline", points=coords, fill="none", stroke="#ff7f0e", stroke_width=1.5))
    legend = []
    for value, tag in critical_values:
        x, y = frame(value)
        color = COLORS.get(tag, "#000000")
        if tag == "rank-1":
            body.append(_el("circle", cx=_fmt(x), cy=_fmt(y), r=1.5, fill=color))
        else:
            body.append(_el("rect", x=_fmt(x - 4), y=_fmt(y - 4), width=8, height=8, fill=color))
        if tag not in legend:
            legend.append(tag)
    for i, tag in enumerate(legend):
        y = MARGIN + 14 + 14 * i
        body.append(_el("rect", x=WIDTH - MARGIN - 130, y=y - 8, width=8, height=8, fill=COLORS.get(tag, "#000000")))
        body.append(_el("text", tag, x=WIDTH - MARGIN - 118, y=y, font_size=10))
    return _document(body)


def write_svg(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
