"""SVG rendering of packings, tessellations and verification results.

Output is SVG 1.1 with one group per requested layer (stable ids
`layer-circles`, `layer-voronoi`, ...). The y axis is flipped by a
top-level transform so the picture uses the mathematical orientation with
the origin at the bottom left. Element order inside a layer follows the
canonical structure order, so output bytes are deterministic for a fixed
input.
"""

from dataclasses import dataclass, field

__all__ = ["RenderSpec", "LAYERS", "render_svg"]

LAYERS = (
    "circles",
    "centers",
    "voronoi",
    "delaunay",
    "ltriangles",
    "circumcircles",
    "violations",
)

#: default stroke colors per layer
_COLORS = {
    "circles": "#1f77b4",
    "centers": "#000000",
    "voronoi": "#2ca02c",
    "delaunay": "#999999",
    "ltriangles": "#ff7f0e",
    "circumcircles": "#d62728",
    "violations": "#e31a1c",
}


@dataclass(frozen=True)
class RenderSpec:
    """What to draw and how.

    layers: any subset of LAYERS, drawn in LAYERS order.
    scale: pixels per plane unit (default 40).
    stroke: line width in pixels (default 1.0); violation markers use 2x.
    colors: per-layer stroke color overrides (defaults above)."""

    layers: tuple
    scale: float = 40.0
    stroke: float = 1.0
    colors: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("at least one render layer is required")
        unknown = set(self.layers) - set(LAYERS)
        if unknown:
            raise ValueError(f"unknown layers: {sorted(unknown)}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def color(self, layer: str) -> str:
        return self.colors.get(layer, _COLORS[layer])


def _f(v: float) -> str:
    return f"{v:.4f}"


def render_svg(config, spec: RenderSpec, diagram=None, report=None) -> str:
    """Render a configuration (plus optional diagram/report data) to SVG.

    The diagram is required for the voronoi/delaunay/ltriangles/
    circumcircles layers; the report (a parsed report JSON dict) feeds the
    violations layer."""
    s = spec.scale
    w = config.domain.width * s
    h = config.domain.height * s
    need_diagram = {"voronoi", "delaunay", "ltriangles", "circumcircles"}
    if diagram is None and need_diagram & set(spec.layers):
        from thuelab.tessellation import build_diagram

        diagram = build_diagram(config)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(w)}" height="{_f(h)}" viewBox="0 0 {_f(w)} {_f(h)}">'
    )
    out.append(f'<g transform="translate(0,{_f(h)}) scale(1,-1)">')
    out.append(
        f'<rect x="0" y="0" width="{_f(w)}" height="{_f(h)}" '
        f'fill="#ffffff" stroke="none"/>'
    )

    for layer in LAYERS:
        if layer not in spec.layers:
            continue
        color = spec.color(layer)
        sw = _f(spec.stroke)
        out.append(f'<g id="layer-{layer}">')
        if layer == "circles":
            for p in config.centers:
                out.append(
                    f'<circle cx="{_f(p[0] * s)}" cy="{_f(p[1] * s)}" r="{_f(s)}" '
                    f'fill="none" stroke="{color}" stroke-width="{sw}"/>'
                )
        elif layer == "centers":
            for p in config.centers:
                out.append(
                    f'<circle cx="{_f(p[0] * s)}" cy="{_f(p[1] * s)}" '
                    f'r="{_f(0.05 * s)}" fill="{color}" stroke="none"/>'
                )
        elif layer == "voronoi":
            for e in diagram.edges:
                (ax, ay), (bx, by) = e.endpoints
                dash = "" if e.pitteway == "pitteway" else ' stroke-dasharray="4 2"'
                out.append(
                    f'<line x1="{_f(ax * s)}" y1="{_f(ay * s)}" '
                    f'x2="{_f(bx * s)}" y2="{_f(by * s)}" '
                    f'stroke="{color}" stroke-width="{sw}"{dash}/>'
                )
        elif layer == "delaunay":
            for pts in diagram.triangulation.points:
                coords = " ".join(f"{_f(p[0] * s)},{_f(p[1] * s)}" for p in pts)
                out.append(
                    f'<polygon points="{coords}" fill="none" '
                    f'stroke="{color}" stroke-width="{sw}"/>'
                )
        elif layer == "ltriangles":
            from thuelab.verifier import build_l_triangles

            for lt in build_l_triangles(diagram):
                pts = [lt.apex_point, *lt.base_points]
                coords = " ".join(f"{_f(p[0] * s)},{_f(p[1] * s)}" for p in pts)
                out.append(
                    f'<polygon points="{coords}" fill="{color}" fill-opacity="0.15" '
                    f'stroke="{color}" stroke-width="{sw}"/>'
                )
        elif layer == "circumcircles":
            for v in diagram.vertices:
                out.append(
                    f'<circle cx="{_f(v.position[0] * s)}" cy="{_f(v.position[1] * s)}" '
                    f'r="{_f(v.circumradius * s)}" fill="none" stroke="{color}" '
                    f'stroke-width="{sw}" stroke-dasharray="3 3"/>'
                )
        elif layer == "violations":
            for mark in _violation_marks(report):
                x, y, r = mark
                out.append(
                    f'<circle cx="{_f(x * s)}" cy="{_f(y * s)}" r="{_f(r * s)}" '
                    f'fill="none" stroke="{color}" stroke-width="{_f(2 * spec.stroke)}"/>'
                )
        out.append("</g>")

    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _violation_marks(report):
    """(x, y, radius) markers for every located violation in a report dict."""
    if not report:
        return []
    marks = []
    for check in report.get("checks", []):
        for v in check.get("violations", []):
            pos = v.get("pos")
            if pos:
                marks.append((float(pos[0]), float(pos[1]), 0.35))
    witness = report.get("saturation_witness")
    if witness and witness.get("pos"):
        x, y = witness["pos"]
        marks.append((float(x), float(y), float(witness.get("radius", 0.35))))
    return sorted(set(marks))
