"""Minimal self-contained SVG figures: polylines, rectangles and axis labels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=130, top=40, bottom=55)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
REGION_COLOURS = {"A1": "#9ecae1", "A2": "#a1d99b", "A3": "#fdae6b", "NotApplicable": "#d9d9d9"}


@dataclass
class Series:
    label: str
    x: list
    y: list
    dashed: bool = False
    colour: str | None = None


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)
    rects: list = field(default_factory=list)  # (x0, y0, x1, y1, colour)
    legend: list = field(default_factory=list)  # (label, colour)

    def bounds(self):
        xs = [v for s in self.series for v in s.x if v is not None and math.isfinite(v)]
        ys = [v for s in self.series for v in s.y if v is not None and math.isfinite(v)]
        for x0, y0, x1, y1, _ in self.rects:
            xs += [x0, x1]
            ys += [y0, y1]
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
        if x_hi == x_lo:
            x_hi = x_lo + 1.0
        if y_hi == y_lo:
            y_hi = y_lo + 1.0
        return x_lo, x_hi, y_lo, y_hi

    def render(self) -> str:
        x_lo, x_hi, y_lo, y_hi = self.bounds()
        pw = WIDTH - MARGIN["left"] - MARGIN["right"]
        ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

        def px(x):
            return MARGIN["left"] + (x - x_lo) / (x_hi - x_lo) * pw

        def py(y):
            return MARGIN["top"] + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'font-family="sans-serif" font-size="12">',
               f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
        for x0, y0, x1, y1, colour in self.rects:
            out.append(f'<rect x="{px(x0):.2f}" y="{py(y1):.2f}" width="{px(x1) - px(x0):.2f}" '
                       f'height="{py(y0) - py(y1):.2f}" fill="{colour}" stroke="none"/>')
        out.append(f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
                   f'fill="none" stroke="black"/>')
        for i in range(5):
            fx = x_lo + (x_hi - x_lo) * i / 4
            fy = y_lo + (y_hi - y_lo) * i / 4
            out.append(f'<text x="{px(fx):.2f}" y="{MARGIN["top"] + ph + 18}" '
                       f'text-anchor="middle">{fx:.4g}</text>')
            out.append(f'<text x="{MARGIN["left"] - 6}" y="{py(fy) + 4:.2f}" '
                       f'text-anchor="end">{fy:.4g}</text>')
        for k, s in enumerate(self.series):
            colour = s.colour or PALETTE[k % len(PALETTE)]
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            for run in _runs(s.x, s.y):
                pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in run)
                out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" '
                           f'stroke-width="1.6"{dash}/>')
        entries = list(self.legend) or [(s.label, s.colour or PALETTE[k % len(PALETTE)])
                                        for k, s in enumerate(self.series)]
        for k, (label, colour) in enumerate(entries):
            y = MARGIN["top"] + 14 + 18 * k
            x = WIDTH - MARGIN["right"] + 10
            out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="10" fill="{colour}"/>')
            out.append(f'<text x="{x + 18}" y="{y}">{escape(label)}</text>')
        out.append(f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" '
                   f'font-size="14">{escape(self.title)}</text>')
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.0f}" y="{HEIGHT - 12}" '
                   f'text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.0f})">{escape(self.ylabel)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())


def _runs(xs, ys):
    """Split a series at missing values into contiguous polylines."""
    run = []
    for x, y in zip(xs, ys):
        if x is None or y is None or not (math.isfinite(x) and math.isfinite(y)):
            if len(run) > 1:
                yield run
            run = []
        else:
            run.append((x, y))
    if len(run) > 1:
        yield run


def branch_diagram(rows) -> Figure:
    """Equilibrium I against r0; stable branches solid, unstable dashed."""
    fig = Figure("Equilibrium branches", "r0", "I")
    branches = (("DFE", "I_dfe", "class_dfe", PALETTE[0]),
                ("E1", "I_e1", "class_e1", PALETTE[1]),
                ("E2", "I_e2", "class_e2", PALETTE[2]))
    for name, key, cls_key, colour in branches:
        for stable in (True, False):
            ys = [getattr(r, key) if (getattr(r, cls_key) == "Stable") == stable else None
                  for r in rows]
            if any(y is not None for y in ys):
                label = f"{name} {'stable' if stable else 'unstable'}"
                fig.series.append(Series(label, [r.r0 for r in rows], ys, not stable, colour))
    return fig


def region_figure(cells) -> Figure:
    fig = Figure("Treatment parameter regions", "beta2", "alpha2")
    a_vals = sorted({c.alpha2 for c in cells})
    b_vals = sorted({c.beta2 for c in cells})
    da = (a_vals[-1] - a_vals[0]) / max(len(a_vals) - 1, 1)
    db = (b_vals[-1] - b_vals[0]) / max(len(b_vals) - 1, 1)
    for c in cells:
        fig.rects.append((c.beta2 - db / 2, c.alpha2 - da / 2, c.beta2 + db / 2, c.alpha2 + da / 2,
                          REGION_COLOURS.get(c.region, "#ffffff")))
    present = sorted({c.region for c in cells})
    fig.legend = [(r, REGION_COLOURS.get(r, "#ffffff")) for r in present]
    return fig


def trajectory_figure(traj) -> Figure:
    fig = Figure("Trajectory", "t", "fraction")
    t = list(map(float, traj.t))
    fig.series.append(Series("S", t, list(map(float, traj.S))))
    fig.series.append(Series("I", t, list(map(float, traj.I))))
    fig.series.append(Series("R", t, list(map(float, traj.R))))
    return fig


def phase_figure(traj) -> Figure:
    fig = Figure("Phase portrait", "S", "I")
    fig.series.append(Series("orbit", list(map(float, traj.S)), list(map(float, traj.I))))
    return fig
