"""Minimal self-contained SVG chart emission.

Plots are views over data that is always also written as CSV/JSON; the
writer is deliberately small and deterministic (fixed float formatting)
so artifacts are byte-stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UsageError

WIDTH, HEIGHT = 760, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 30, 40, 50

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class Series:
    """One plottable series; ``std`` adds a one-sigma band around ``y``."""

    name: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    std: tuple[float, ...] | None = None
    kind: str = "line"

    def __post_init__(self):
        if len(self.x) == 0:
            raise UsageError(f"series {self.name!r} is empty")
        if len(self.x) != len(self.y):
            raise UsageError(f"series {self.name!r}: x/y length mismatch")
        if self.std is not None and len(self.std) != len(self.y):
            raise UsageError(f"series {self.name!r}: std length mismatch")
        if self.kind not in ("line", "bar"):
            raise UsageError(f"series {self.name!r}: unknown kind {self.kind!r}")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def emit_plot(
    series: Sequence[Series],
    title: str,
    xlabel: str,
    ylabel: str,
    hlines: Sequence[tuple[str, float]] = (),
    legend: bool = True,
) -> str:
    """Render series as a self-contained SVG document string."""
    if not series:
        raise UsageError("emit_plot requires at least one series")

    xs = [v for s in series for v in s.x]
    ys = []
    for s in series:
        if s.std is not None:
            ys.extend(y - sd for y, sd in zip(s.y, s.std))
            ys.extend(y + sd for y, sd in zip(s.y, s.std))
        else:
            ys.extend(s.y)
    ys.extend(v for _, v in hlines)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v: float) -> float:
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * px_w

    def sy(v: float) -> float:
        return MARGIN_T + (y_hi - v) / (y_hi - y_lo) * px_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-size="16" font-family="sans-serif">{title}</text>',
    ]

    # Axes.
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    out.append(
        f'<line x1="{x0}" y1="{y0}" x2="{WIDTH - MARGIN_R}" y2="{y0}" '
        'stroke="black"/>'
    )
    out.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN_T}" stroke="black"/>'
    )
    for i in range(5):
        fx = x_lo + (x_hi - x_lo) * i / 4
        fy = y_lo + (y_hi - y_lo) * i / 4
        out.append(
            f'<text x="{_fmt(sx(fx))}" y="{y0 + 18}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{fx:.3g}</text>'
        )
        out.append(
            f'<text x="{x0 - 8}" y="{_fmt(sy(fy) + 4)}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{fy:.3g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + px_w // 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-size="13" font-family="sans-serif">'
        f"{xlabel}</text>"
    )
    out.append(
        f'<text x="18" y="{MARGIN_T + px_h // 2}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif" '
        f'transform="rotate(-90 18 {MARGIN_T + px_h // 2})">{ylabel}</text>'
    )

    bar_series = [s for s in series if s.kind == "bar"]
    for si, s in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        if s.kind == "bar":
            group = bar_series.index(s)
            slot = px_w / (len(s.x) or 1)
            bw = 0.8 * slot / max(1, len(bar_series))
            for j, (vx, vy) in enumerate(zip(s.x, s.y)):
                cx = sx(vx) + (group - (len(bar_series) - 1) / 2) * bw
                top = sy(max(vy, 0.0))
                base = sy(max(y_lo, 0.0))
                out.append(
                    f'<rect x="{_fmt(cx - bw / 2)}" y="{_fmt(top)}" '
                    f'width="{_fmt(bw)}" height="{_fmt(abs(base - top))}" '
                    f'fill="{color}" fill-opacity="0.85"/>'
                )
            continue
        if s.std is not None:
            upper = [(vx, vy + sd) for vx, vy, sd in zip(s.x, s.y, s.std)]
            lower = [(vx, vy - sd) for vx, vy, sd in zip(s.x, s.y, s.std)]
            pts = " ".join(
                f"{_fmt(sx(vx))},{_fmt(sy(vy))}" for vx, vy in upper + lower[::-1]
            )
            out.append(
                f'<polygon points="{pts}" fill="{color}" fill-opacity="0.2"/>'
            )
        pts = " ".join(
            f"{_fmt(sx(vx))},{_fmt(sy(vy))}" for vx, vy in zip(s.x, s.y)
        )
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )

    for label, value in hlines:
        y = _fmt(sy(value))
        out.append(
            f'<line x1="{x0}" y1="{y}" x2="{WIDTH - MARGIN_R}" y2="{y}" '
            'stroke="#d62728" stroke-dasharray="6 4"/>'
        )
        out.append(
            f'<text x="{WIDTH - MARGIN_R - 4}" y="{_fmt(float(y) - 6)}" '
            f'text-anchor="end" font-size="11" font-family="sans-serif" '
            f'fill="#d62728">{label}</text>'
        )

    if legend:
        ly = MARGIN_T + 6
        for si, s in enumerate(series[:10]):
            color = PALETTE[si % len(PALETTE)]
            out.append(
                f'<line x1="{WIDTH - MARGIN_R - 150}" y1="{ly}" '
                f'x2="{WIDTH - MARGIN_R - 126}" y2="{ly}" stroke="{color}" '
                'stroke-width="3"/>'
            )
            out.append(
                f'<text x="{WIDTH - MARGIN_R - 120}" y="{ly + 4}" '
                f'font-size="11" font-family="sans-serif">{s.name}</text>'
            )
            ly += 16

    out.append("</svg>")
    return "\n".join(out) + "\n"
