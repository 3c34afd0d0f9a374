"""Tests for :mod:`metaphorical_maps.render`"""

import pytest
from lxml import etree
from matplotlib import colormaps
from matplotlib.colors import to_hex

from metaphorical_maps.config import RENDERING
from metaphorical_maps.initmap import dual_transform
from metaphorical_maps.render import RenderStyle, render_svg, write_svg

NS = {'svg': 'http://www.w3.org/2000/svg'}


def _parse(svg: str):
    return etree.fromstring(svg.encode('utf-8'))


def _paths(root):
    return {p.get('id'): p for p in root.findall("svg:g[@id='regions']/svg:path", NS)}


def test_one_path_per_region(two_rectangles):
    root = _parse(render_svg(two_rectangles))
    assert root.tag == '{http://www.w3.org/2000/svg}svg'
    paths = _paths(root)
    assert sorted(paths) == ['region-0', 'region-1']
    assert all(p.get('class') == 'internal' for p in paths.values())
    assert all(p.get('fill') == RENDERING['FILL'] for p in paths.values())


def test_path_coordinates_flip_y_axis(two_rectangles):
    root = _parse(render_svg(two_rectangles))
    # a 4 x 1 map on an 800 x 800 canvas with margin 20 is scaled by 190
    assert _paths(root)['region-0'].get('d') == (
        "M 20.000 780.000 L 210.000 780.000 L 210.000 590.000 L 20.000 590.000 Z")


def test_output_is_deterministic(framed_hole_map):
    style = RenderStyle(heatmap=True, labels=True, show_points=True)
    assert render_svg(framed_hole_map, style) == render_svg(framed_hole_map, style)


def test_holes_are_hatched(framed_hole_map):
    root = _parse(render_svg(framed_hole_map))
    hole = _paths(root)['region-4']
    assert hole.get('class') == 'hole'
    assert hole.get('fill') == 'url(#hole-hatch)'
    assert root.find("svg:defs/svg:pattern[@id='hole-hatch']", NS) is not None


def test_heatmap_colors_by_signed_error(two_rectangles):
    root = _parse(render_svg(two_rectangles, RenderStyle(heatmap=True)))
    cmap = colormaps[RENDERING['COLORMAP']]
    paths = _paths(root)
    # errors of -0.5 and +1/3 lie beyond the palette range and clip to its ends
    assert paths['region-0'].get('fill') == to_hex(cmap(0.0))
    assert paths['region-1'].get('fill') == to_hex(cmap(1.0))
    legend = root.find("svg:g[@id='legend']", NS)
    assert len(legend.findall('svg:rect', NS)) == RENDERING['LEGEND_STEPS']


def test_heatmap_of_exact_map_is_neutral(matched_rectangles):
    root = _parse(render_svg(matched_rectangles, RenderStyle(heatmap=True)))
    neutral = to_hex(colormaps[RENDERING['COLORMAP']](0.5))
    assert {p.get('fill') for p in _paths(root).values()} == {neutral}


def test_labels_skip_holes(framed_hole_map):
    root = _parse(render_svg(framed_hole_map, RenderStyle(labels=True)))
    texts = root.findall("svg:g[@id='labels']/svg:text", NS)
    assert sorted(t.text for t in texts) == ['0', '1', '2', '3']


def test_points_layer(framed_hole_map):
    root = _parse(render_svg(framed_hole_map, RenderStyle(show_points=True)))
    assert len(root.findall("svg:g[@id='points']/svg:circle", NS)) == 8
    assert root.find("svg:g[@id='legend']", NS) is None


def test_canvas_size(two_rectangles):
    root = _parse(render_svg(two_rectangles, RenderStyle(width=300, height=200)))
    assert root.get('width') == '300'
    assert root.get('viewBox') == '0 0 300 200'


def test_write_svg(tmp_path, two_rectangles):
    path = write_svg(two_rectangles, tmp_path / 'out' / 'map.svg')
    assert path.exists()
    assert path.read_text(encoding='utf-8').startswith("<?xml")


@pytest.mark.parametrize('style', [RenderStyle(), RenderStyle(heatmap=True, labels=True, show_points=True)])
def test_render_generated_map(small_benchmark, style):
    root = _parse(render_svg(dual_transform(small_benchmark), style))
    assert len(_paths(root)) == small_benchmark.n
