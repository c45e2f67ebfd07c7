"""Static SVG drawings of an instance, its solution, and the dual cutting."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from sepcover.instance import CoverageInstance, Solution

PANEL = 480.0
MARGIN = 20.0
MARKER = 5.0

STYLE = """
.axis{stroke:#444;stroke-width:1.2}
.disk{fill:#4a90d9;fill-opacity:0.08;stroke:#4a90d9;stroke-width:1}
.disk.chosen{fill:#e8743b;fill-opacity:0.25;stroke:#c4461b;stroke-width:2}
.point{fill:#222}
.dual-disk{fill:none;stroke:#7a7a7a;stroke-width:0.8}
.dual-point{fill:#4a90d9}
.cell{fill:none;stroke:#2a9d55;stroke-width:0.6;stroke-opacity:0.7}
text{font-family:sans-serif;font-size:11px;fill:#333}
"""


class _Frame:
    """Maps data coordinates into a panel, y pointing up."""

    def __init__(self, xmin, xmax, ymin, ymax, x0: float, y0: float):
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        self.s = (PANEL - 2 * MARGIN) / span
        self.xmin, self.ymax = xmin, ymax
        self.x0, self.y0 = x0 + MARGIN, y0 + MARGIN
        self.bounds = (xmin, xmax, ymin, ymax)

    def x(self, v: float) -> float:
        return self.x0 + (v - self.xmin) * self.s

    def y(self, v: float) -> float:
        return self.y0 + (self.ymax - v) * self.s


def _bounds(xy: np.ndarray, radius: float):
    xmin = float(xy[:, 0].min()) - radius
    xmax = float(xy[:, 0].max()) + radius
    ymin = min(float(xy[:, 1].min()) - radius, -radius)
    ymax = max(float(xy[:, 1].max()) + radius, radius)
    return xmin, xmax, ymin, ymax


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _primal(inst: CoverageInstance, chosen: set[int], fr: _Frame) -> list[str]:
    out = ['<g class="primal">']
    out.append(
        f'<line class="axis" x1="{_fmt(fr.x(fr.bounds[0]))}" y1="{_fmt(fr.y(0))}" '
        f'x2="{_fmt(fr.x(fr.bounds[1]))}" y2="{_fmt(fr.y(0))}"/>'
    )
    for j, (cx, cy) in enumerate(inst.centers):
        cls = "disk chosen" if j in chosen else "disk"
        out.append(
            f'<circle class="{cls}" data-index="{j}" cx="{_fmt(fr.x(cx))}" cy="{_fmt(fr.y(cy))}" '
            f'r="{_fmt(inst.radius * fr.s)}"><title>disk {j}, weight {inst.weights[j]:g}</title></circle>'
        )
    for i, (px, py) in enumerate(inst.points):
        out.append(
            f'<rect class="point" data-index="{i}" x="{_fmt(fr.x(px) - MARKER / 2)}" '
            f'y="{_fmt(fr.y(py) - MARKER / 2)}" width="{MARKER}" height="{MARKER}"/>'
        )
    out.append("</g>")
    return out


def _dual(inst: CoverageInstance, fr: _Frame) -> list[str]:
    # dual disks are drawn as ellipses so that primal circles stay countable
    out = ['<g class="dual">']
    out.append(
        f'<line class="axis" x1="{_fmt(fr.x(fr.bounds[0]))}" y1="{_fmt(fr.y(0))}" '
        f'x2="{_fmt(fr.x(fr.bounds[1]))}" y2="{_fmt(fr.y(0))}"/>'
    )
    r = inst.radius * fr.s
    for px, py in inst.points:
        out.append(f'<ellipse class="dual-disk" cx="{_fmt(fr.x(px))}" cy="{_fmt(fr.y(py))}" rx="{_fmt(r)}" ry="{_fmt(r)}"/>')
    for cx, cy in inst.centers:
        x, y = fr.x(cx), fr.y(cy)
        out.append(f'<path class="dual-point" d="M{_fmt(x)},{_fmt(y - 4)} L{_fmt(x + 4)},{_fmt(y)} L{_fmt(x)},{_fmt(y + 4)} L{_fmt(x - 4)},{_fmt(y)} Z"/>')
    out.append("</g>")
    return out


def _cell_path(cut, cid: int, fr: _Frame, samples: int = 24) -> str:
    c = cut.cells[cid]
    xmin, xmax, ymin, ymax = fr.bounds
    xl = max(c.xl, xmin)
    xr = min(c.xr, xmax)
    if not xl < xr:
        xl = xr = min(max(c.xl, xmin), xmax)
    xs = np.linspace(xl, xr, samples)
    fam = cut.family
    yb = np.clip(fam.y_at(np.full(samples, c.bottom), xs), ymin, ymax)
    yt = np.clip(fam.y_at(np.full(samples, c.top), xs), ymin, ymax)
    pts = [(x, y) for x, y in zip(xs, yb)] + [(x, y) for x, y in zip(xs[::-1], yt[::-1])]
    d = " ".join(("M" if k == 0 else "L") + f"{_fmt(fr.x(x))},{_fmt(fr.y(y))}" for k, (x, y) in enumerate(pts))
    return f'<path class="cell" data-id="{cid}" data-level="{c.level}" d="{d} Z"/>'


def render_svg(
    inst: CoverageInstance,
    solution: Solution | None = None,
    dual: bool = False,
    cutting=None,
) -> str:
    """SVG text: the primal panel, plus a dual panel when asked or when a cutting is given."""
    chosen = set(solution.chosen) if solution is not None and solution.feasible else set()
    xy = np.vstack([inst.point_array().reshape(-1, 2), inst.center_array().reshape(-1, 2)])
    if len(xy) == 0:
        xy = np.zeros((1, 2))
    b = _bounds(xy, inst.radius)
    panels = 2 if (dual or cutting is not None) else 1
    width = PANEL * panels
    body = _primal(inst, chosen, _Frame(*b, 0.0, 0.0))
    if panels == 2:
        fr = _Frame(*b, PANEL, 0.0)
        body += _dual(inst, fr)
        if cutting is not None:
            body.append('<g class="cutting">')
            body += [_cell_path(cutting, cid, fr) for cid in range(len(cutting.cells))]
            body.append("</g>")
    title = "coverage instance"
    if solution is not None:
        title += f", total weight {'inf' if math.isinf(float(solution.total_weight)) else f'{float(solution.total_weight):g}'}"
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{PANEL:.0f}" '
        f'viewBox="0 0 {width:.0f} {PANEL:.0f}">'
    )
    return "\n".join([head, f"<title>{escape(title)}</title>", f"<style>{STYLE}</style>", *body, "</svg>"]) + "\n"
