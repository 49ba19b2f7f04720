"""Deterministic SVG rendering of diagrams and phase portraits.

Output is assembled as plain text with fixed number formatting, so equal
inputs give byte-identical documents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .classifier import Stability
from .curves import CurveKind
from .diagram import DiagramSpec, PhasePortraitSpec

__all__ = ["RenderOptions", "render_svg", "render_orbit_svg", "DEFAULT_REGION_COLORS", "DEFAULT_CURVE_DASH"]

DEFAULT_REGION_COLORS = {
    1: "#e41a1c",
    2: "#fdb462",
    3: "#4daf4a",
    4: "#80b1d3",
    5: "#984ea3",
    6: "#ffff33",
    7: "#a65628",
    8: "#f781bf",
}

# B1 solid, B2 dashed, C dotted
DEFAULT_CURVE_DASH = {CurveKind.B1: "", CurveKind.B2: "8 4", CurveKind.C: "2 3"}


@dataclass(frozen=True)
class RenderOptions:
    width: int = 640
    height: int = 640
    margin: int = 60
    region_colors: dict = field(default_factory=lambda: dict(DEFAULT_REGION_COLORS))
    curve_dash: dict = field(default_factory=lambda: dict(DEFAULT_CURVE_DASH))
    curve_color: str = "#000000"
    curve_width: float = 1.5
    orbit_points: int = 600
    orbit_dot: float = 1.2
    orbit_colors: tuple[str, ...] = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
    title: str | None = None


def _color(opt: RenderOptions, region: int) -> str:
    return opt.region_colors.get(region, DEFAULT_REGION_COLORS.get(region, "#cccccc"))


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Affine map from data coordinates to the plot rectangle."""

    def __init__(self, xlo, xhi, ylo, yhi, opt: RenderOptions):
        if xhi == xlo:
            xlo, xhi = xlo - 1e-12, xhi + 1e-12
        if yhi == ylo:
            ylo, yhi = ylo - 1e-12, yhi + 1e-12
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.left = opt.margin
        self.top = opt.margin
        self.w = opt.width - 2 * opt.margin
        self.h = opt.height - 2 * opt.margin

    def x(self, v: float) -> float:
        return self.left + (v - self.xlo) / (self.xhi - self.xlo) * self.w

    def y(self, v: float) -> float:
        return self.top + (self.yhi - v) / (self.yhi - self.ylo) * self.h


def _header(opt: RenderOptions, frame: _Frame) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{opt.width}" height="{opt.height}" '
        f'viewBox="0 0 {opt.width} {opt.height}">',
        "<defs>",
        f'<clipPath id="plot"><rect x="{_f(frame.left)}" y="{_f(frame.top)}" '
        f'width="{_f(frame.w)}" height="{_f(frame.h)}"/></clipPath>',
        "</defs>",
        f'<rect class="background" x="0" y="0" width="{opt.width}" height="{opt.height}" fill="#ffffff"/>',
    ]


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    out = ['<g class="axes" stroke="#444444" stroke-width="1">']
    if frame.ylo <= 0.0 <= frame.yhi:
        y0 = frame.y(0.0)
        out.append(f'<line x1="{_f(frame.left)}" y1="{_f(y0)}" x2="{_f(frame.left + frame.w)}" y2="{_f(y0)}"/>')
    if frame.xlo <= 0.0 <= frame.xhi:
        x0 = frame.x(0.0)
        out.append(f'<line x1="{_f(x0)}" y1="{_f(frame.top)}" x2="{_f(x0)}" y2="{_f(frame.top + frame.h)}"/>')
    out.append(
        f'<rect class="frame" x="{_f(frame.left)}" y="{_f(frame.top)}" width="{_f(frame.w)}" '
        f'height="{_f(frame.h)}" fill="none"/>'
    )
    out.append("</g>")
    bottom = frame.top + frame.h
    out.append('<g class="ticks" font-family="sans-serif" font-size="11" fill="#000000">')
    out.append(f'<text x="{_f(frame.left)}" y="{_f(bottom + 16)}" text-anchor="start">{frame.xlo:.4g}</text>')
    out.append(f'<text x="{_f(frame.left + frame.w)}" y="{_f(bottom + 16)}" text-anchor="end">{frame.xhi:.4g}</text>')
    out.append(f'<text x="{_f(frame.left - 6)}" y="{_f(bottom)}" text-anchor="end">{frame.ylo:.4g}</text>')
    out.append(f'<text x="{_f(frame.left - 6)}" y="{_f(frame.top + 10)}" text-anchor="end">{frame.yhi:.4g}</text>')
    out.append(f'<text x="{_f(frame.left + frame.w / 2)}" y="{_f(bottom + 34)}" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="{_f(frame.left - 40)}" y="{_f(frame.top + frame.h / 2)}" text-anchor="middle">{ylabel}</text>'
    )
    out.append("</g>")
    return out


def _render_diagram(spec: DiagramSpec, opt: RenderOptions) -> str:
    a1lo, a1hi, a2lo, a2hi = spec.window
    frame = _Frame(a1lo, a1hi, a2lo, a2hi, opt)
    out = _header(opt, frame)
    if opt.title:
        out.append(f'<text x="{opt.width // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="14">{escape(opt.title)}</text>')

    n1, n2 = len(spec.alpha1), len(spec.alpha2)
    cw, ch = frame.w / n1, frame.h / n2
    out.append('<g class="regions" stroke="none">')
    for j in range(n2):
        for i in range(n1):
            region = spec.grid[j][i]
            if region is None:
                continue
            x = frame.left + i * cw
            y = frame.top + (n2 - 1 - j) * ch
            out.append(
                f'<rect class="region r{region}" x="{_f(x)}" y="{_f(y)}" width="{_f(cw)}" height="{_f(ch)}" '
                f'fill="{_color(opt, region)}"/>'
            )
    out.append("</g>")

    out.append('<g class="curves" clip-path="url(#plot)" fill="none">')
    for kind in CurveKind:
        trace = spec.curves.get(kind)
        pts = " ".join(f"{_f(frame.x(p.alpha1))},{_f(frame.y(p.alpha2))}" for p in (trace.points if trace else []))
        dash = opt.curve_dash.get(kind, "")
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline class="curve {kind.value}" points="{pts}" stroke="{opt.curve_color}" '
            f'stroke-width="{_f(opt.curve_width)}"{dash_attr}/>'
        )
    out.append("</g>")

    out.append('<g class="probes" stroke="#000000" stroke-width="0.5">')
    for z in spec.zone_probes:
        if z.region is None or z.region in spec.grid_regions:
            continue
        out.append(
            f'<circle class="probe r{z.region}" cx="{_f(frame.x(z.alpha1))}" cy="{_f(frame.y(z.alpha2))}" '
            f'r="2" fill="{_color(opt, z.region)}"/>'
        )
    out.append("</g>")

    out.extend(_axes(frame, "alpha1", "alpha2"))
    out.extend(_diagram_legend(spec, opt))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _diagram_legend(spec: DiagramSpec, opt: RenderOptions) -> list[str]:
    x = opt.width - opt.margin + 6
    y = opt.margin
    out = ['<g class="legend" font-family="sans-serif" font-size="11">']
    for region in sorted(spec.regions):
        out.append(
            f'<rect class="legend-swatch" x="{x}" y="{y}" width="10" height="10" fill="{_color(opt, region)}"/>'
        )
        out.append(f'<text x="{x + 14}" y="{y + 9}">{region}</text>')
        y += 16
    for kind in CurveKind:
        dash = opt.curve_dash.get(kind, "")
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{x}" y1="{y + 5}" x2="{x + 12}" y2="{y + 5}" stroke="{opt.curve_color}"{dash_attr}/>'
        )
        out.append(f'<text x="{x + 16}" y="{y + 9}">{kind.value}</text>')
        y += 16
    if spec.case is not None and spec.case.label:
        out.append(f'<text x="{opt.margin}" y="{opt.height - 8}">{escape(spec.case.label)}</text>')
    out.append("</g>")
    return out


_CIRCLE_DASH = {
    Stability.STABLE: "",
    Stability.UNSTABLE: "6 4",
    Stability.SEMISTABLE_OUTER_STABLE: "6 3 1 3",
    Stability.SEMISTABLE_INNER_STABLE: "6 3 1 3",
}


def _downsample(n: int, keep: int) -> np.ndarray:
    if n <= keep:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, keep).round().astype(int))


def _render_portrait(spec: PhasePortraitSpec, opt: RenderOptions) -> str:
    extent = max([c.radius for c in spec.circles] + [0.0])
    escape_r = spec.config.escape_radius
    for o in spec.orbits:
        if len(o.rho):
            extent = max(extent, min(float(np.max(o.rho)), escape_r))
    extent = 1.2 * extent if extent > 0 else 0.1
    frame = _Frame(-extent, extent, -extent, extent, opt)
    out = _header(opt, frame)
    title = opt.title if opt.title else f"region {spec.region}"
    out.append(f'<text x="{opt.width // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14">{escape(title)}</text>')
    out.extend(_axes(frame, "x", "y"))

    out.append('<g class="orbits" clip-path="url(#plot)" stroke="none">')
    for k, o in enumerate(spec.orbits):
        color = opt.orbit_colors[k % len(opt.orbit_colors)]
        xs, ys = o.cartesian
        idx = _downsample(len(xs), opt.orbit_points)
        dots = [
            f'<circle class="orbit-point" cx="{_f(frame.x(xs[i]))}" cy="{_f(frame.y(ys[i]))}" '
            f'r="{_f(opt.orbit_dot)}" fill="{color}"/>'
            for i in idx
            if math.isfinite(xs[i]) and math.isfinite(ys[i])
        ]
        out.append(f'<g class="orbit o{k}">')
        out.extend(dots)
        out.append("</g>")
    out.append("</g>")

    out.append('<g class="circles" fill="none" stroke="#000000" stroke-width="1.5">')
    cx, cy = frame.x(0.0), frame.y(0.0)
    scale = frame.w / (2 * extent)
    for c in spec.circles:
        dash = _CIRCLE_DASH[c.stability]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<circle class="invariant-circle {c.stability.value}" cx="{_f(cx)}" cy="{_f(cy)}" '
            f'r="{_f(c.radius * scale)}"{dash_attr}/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(spec: DiagramSpec | PhasePortraitSpec, style: RenderOptions | None = None) -> str:
    style = style or RenderOptions()
    if isinstance(spec, DiagramSpec):
        return _render_diagram(spec, style)
    if isinstance(spec, PhasePortraitSpec):
        return _render_portrait(spec, style)
    raise TypeError(f"cannot render {type(spec).__name__}")


def render_orbit_svg(orbit, circles=(), region: int | None = None, escape_radius: float = 1.0,
                     style: RenderOptions | None = None) -> str:
    """Cartesian scatter of a single orbit (used by the simulate command)."""
    from .simulator import SimulationConfig

    cfg = SimulationConfig(escape_radius=escape_radius)
    spec = PhasePortraitSpec(
        region=region if region is not None else 0,
        point=None,
        inventory=None,
        circles=list(circles),
        orbits=[orbit],
        starts=[float(orbit.rho[0])],
        fates=[],
        config=cfg,
    )
    style = style or RenderOptions(title="orbit" if region is None else f"orbit, region {region}")
    return _render_portrait(spec, style)
