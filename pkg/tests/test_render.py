import xml.etree.ElementTree as ET

import pytest

from thuelab.render import RenderSpec, render_svg
from thuelab.tessellation import build_diagram

SVG_NS = "{http://www.w3.org/2000/svg}"


def _parse(svg_text):
    return ET.fromstring(svg_text)


def _layer(root, name):
    for g in root.iter(f"{SVG_NS}g"):
        if g.get("id") == f"layer-{name}":
            return g
    return None


class TestRenderSpec:
    def test_empty_layers_rejected(self):
        with pytest.raises(ValueError):
            RenderSpec(layers=())

    def test_unknown_layer_rejected(self):
        with pytest.raises(ValueError):
            RenderSpec(layers=("bogus",))

    def test_bad_scale_rejected(self):
        with pytest.raises(ValueError):
            RenderSpec(layers=("circles",), scale=0)


class TestSvgOutput:
    def test_hex_circle_count(self, hex_torus):
        svg = render_svg(hex_torus, RenderSpec(layers=("circles", "voronoi")))
        root = _parse(svg)
        layer = _layer(root, "circles")
        assert layer is not None
        assert len(layer.findall(f"{SVG_NS}circle")) == 36

    def test_square_ltriangle_count(self, square_torus, square_diagram):
        svg = render_svg(
            square_torus,
            RenderSpec(layers=("delaunay", "ltriangles")),
            diagram=square_diagram,
        )
        root = _parse(svg)
        lts = _layer(root, "ltriangles").findall(f"{SVG_NS}polygon")
        assert len(lts) == 72
        tris = _layer(root, "delaunay").findall(f"{SVG_NS}polygon")
        assert len(tris) == 72

    def test_y_axis_flip(self, hex_torus):
        svg = render_svg(hex_torus, RenderSpec(layers=("centers",)))
        assert "scale(1,-1)" in svg

    def test_layer_order_and_ids(self, hex_torus, hex_diagram):
        spec = RenderSpec(layers=("voronoi", "circles", "circumcircles"))
        svg = render_svg(hex_torus, spec, diagram=hex_diagram)
        # layers render in canonical order regardless of request order
        a = svg.index('id="layer-circles"')
        b = svg.index('id="layer-voronoi"')
        c = svg.index('id="layer-circumcircles"')
        assert a < b < c

    def test_deterministic(self, hex_torus, hex_diagram):
        spec = RenderSpec(layers=("circles", "voronoi", "delaunay"))
        one = render_svg(hex_torus, spec, diagram=hex_diagram)
        two = render_svg(hex_torus, spec, diagram=hex_diagram)
        assert one == two

    def test_violations_layer_from_report(self, hex_minus_one):
        from thuelab.io import report_to_json
        from thuelab.verifier import check_thue
        import json

        rep = json.loads(report_to_json(check_thue(hex_minus_one)))
        svg = render_svg(
            hex_minus_one,
            RenderSpec(layers=("circles", "violations")),
            report=rep,
        )
        layer = _layer(_parse(svg), "violations")
        assert len(layer.findall(f"{SVG_NS}circle")) >= 1

    def test_valid_xml_all_layers(self, hex_torus, hex_diagram):
        spec = RenderSpec(
            layers=("circles", "centers", "voronoi", "delaunay", "ltriangles",
                    "circumcircles", "violations")
        )
        svg = render_svg(hex_torus, spec, diagram=hex_diagram, report=None)
        root = _parse(svg)  # raises on malformed XML
        assert root.tag == f"{SVG_NS}svg"
        assert root.get("version") == "1.1"
