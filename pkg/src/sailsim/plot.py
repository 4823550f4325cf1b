"""Deterministic SVG rendering of 2-D mission trajectories.

Hand-rolled SVG (no plotting library) so the output is byte-stable: the
same logs always produce the same file, which makes plots diffable and
testable.  Axes: east to the right, north up.
"""

from __future__ import annotations

from .episode import EpisodeLog

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT, MARGIN = 800, 800, 60


def _fmt(x):
    return f"{x:.2f}"


def render_trajectories(logs, waypoints):
    """SVG document (str) overlaying every log's track plus labeled waypoints."""
    if not logs:
        raise ValueError("no logs to plot")
    xs, ys = [], []  # east, north
    tracks = []
    for log in logs:
        n = log.column("north")
        e = log.column("east")
        tracks.append((e, n))
        xs.extend(e)
        ys.extend(n)
    for wx, wy in waypoints.values():
        xs.append(wy)
        ys.append(wx)
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    span = max(xmax - xmin, ymax - ymin, 1.0)
    pad = 0.05 * span
    xmin, ymin, span = xmin - pad, ymin - pad, span + 2 * pad
    scale = (WIDTH - 2 * MARGIN) / span

    def to_px(e, n):
        return MARGIN + (e - xmin) * scale, HEIGHT - MARGIN - (n - ymin) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    for i, (e, n) in enumerate(tracks):
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (to_px(a, b) for a, b in zip(e, n)))
        color = PALETTE[i % len(PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2" opacity="0.8"/>')
    for label in sorted(waypoints):
        wn, we = waypoints[label]
        px, py = to_px(we, wn)
        parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="5" fill="black"/>')
        parts.append(
            f'<text x="{_fmt(px + 8)}" y="{_fmt(py - 8)}" font-family="sans-serif" '
            f'font-size="18" fill="black">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_logs_to_svg(csv_texts, waypoints):
    """Parse CSV log texts and render them; raises ValueError on bad input."""
    logs = [EpisodeLog.from_csv(text) for text in csv_texts]
    return render_trajectories(logs, waypoints)
