#!/usr/bin/env python3
"""
SVG rendering of metaphorical maps

One closed path per region; with the heat-map style the regions are
filled by signed cartographic error on a diverging palette anchored at
zero (oversized regions at one end, undersized at the other) and a
legend is added. Holes are drawn hatched and never filled.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
from lxml import etree
from matplotlib import colormaps
from matplotlib.colors import Normalize, to_hex

from .config import RENDERING
from .initmap import MetaphoricalMap, region_centroids
from .metrics import evaluate

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class RenderStyle:
    width: int = RENDERING['WIDTH']
    height: int = RENDERING['HEIGHT']
    margin: int = RENDERING['MARGIN']
    heatmap: bool = False
    labels: bool = False
    show_points: bool = False
    colormap: str = RENDERING['COLORMAP']
    error_range: float = RENDERING['ERROR_RANGE']
    stroke: str = RENDERING['STROKE']
    stroke_width: float = RENDERING['STROKE_WIDTH']
    fill: str = RENDERING['FILL']


def _fmt(value: float) -> str:
    return f"{value:.3f}"


class _Viewport:
    """Maps map coordinates onto the canvas, y axis pointing up"""

    def __init__(self, points: Sequence[Sequence[float]], style: RenderStyle, reserve: float):
        pts = np.asarray(points, dtype=float)
        self.lo = pts.min(axis=0)
        span = np.maximum(pts.max(axis=0) - self.lo, 1e-12)
        usable_w = style.width - 2 * style.margin - reserve
        usable_h = style.height - 2 * style.margin
        self.scale = min(usable_w / span[0], usable_h / span[1])
        self.margin = style.margin
        self.height = style.height

    def __call__(self, p: Sequence[float]):
        x = self.margin + (p[0] - self.lo[0]) * self.scale
        y = self.height - self.margin - (p[1] - self.lo[1]) * self.scale
        return x, y


def _sub(parent, tag: str, **attrs) -> etree._Element:
    element = etree.SubElement(parent, f"{{{SVG_NS}}}{tag}")
    for key, value in attrs.items():
        element.set(key.replace('_', '-'), str(value))
    return element


def _path_data(points, view: _Viewport) -> str:
    coords = [view(p) for p in points]
    head = f"M {_fmt(coords[0][0])} {_fmt(coords[0][1])}"
    tail = " ".join(f"L {_fmt(x)} {_fmt(y)}" for x, y in coords[1:])
    return f"{head} {tail} Z"


def _add_legend(root, style: RenderStyle, cmap, norm) -> None:
    steps = RENDERING['LEGEND_STEPS']
    legend = _sub(root, 'g', id='legend')
    box = 14
    x = style.width - style.margin - 60
    y0 = style.margin
    _sub(legend, 'text', x=_fmt(x), y=_fmt(y0 - 4), font_size=RENDERING['FONT_SIZE']).text = "error"
    for i, value in enumerate(np.linspace(style.error_range, -style.error_range, steps)):
        y = y0 + i * box
        _sub(legend, 'rect', x=_fmt(x), y=_fmt(y), width=box, height=box,
             fill=to_hex(cmap(norm(value))), stroke=style.stroke, stroke_width=0.5)
        label = _sub(legend, 'text', x=_fmt(x + box + 4), y=_fmt(y + box - 3),
                     font_size=RENDERING['FONT_SIZE'])
        label.text = f"{value:+.0%}"


def render_svg(m: MetaphoricalMap, style: Optional[RenderStyle] = None) -> str:
    """Serialize the map as an SVG document; output is deterministic for fixed input"""
    style = style or RenderStyle()
    reserve = 70 if style.heatmap else 0
    view = _Viewport(list(m.vertex_pool.values()), style, reserve)

    root = etree.Element(f"{{{SVG_NS}}}svg", nsmap={None: SVG_NS})
    root.set('width', str(style.width))
    root.set('height', str(style.height))
    root.set('viewBox', f"0 0 {style.width} {style.height}")

    defs = _sub(root, 'defs')
    pattern = _sub(defs, 'pattern', id='hole-hatch', width=6, height=6,
                   patternUnits='userSpaceOnUse', patternTransform='rotate(45)')
    _sub(pattern, 'line', x1=0, y1=0, x2=0, y2=6, stroke=RENDERING['HOLE_HATCH'], stroke_width=1)

    fills: Dict[int, str] = {}
    cmap = colormaps[style.colormap]
    norm = Normalize(vmin=-style.error_range, vmax=style.error_range, clip=True)
    if style.heatmap:
        for row in evaluate(m).per_region:
            fills[row.region_id] = to_hex(cmap(norm(row.signed_error)))

    layer = _sub(root, 'g', id='regions')
    for r in m.regions:
        points = [m.vertex_pool[p] for p in r.boundary]
        if r.is_hole:
            fill = 'url(#hole-hatch)'
        else:
            fill = fills.get(r.id, style.fill)
        _sub(layer, 'path', id=f"region-{r.id}", d=_path_data(points, view), fill=fill,
             stroke=style.stroke, stroke_width=style.stroke_width, stroke_linejoin='round',
             **{'class': r.kind})

    if style.labels:
        labels = _sub(root, 'g', id='labels', font_size=RENDERING['FONT_SIZE'], text_anchor='middle')
        for rid, c in region_centroids(m).items():
            region = m.region(rid)
            if region.is_hole:
                continue
            x, y = view(c)
            text = _sub(labels, 'text', x=_fmt(x), y=_fmt(y))
            text.text = str(region.source_vertex if region.source_vertex is not None else rid)

    if style.show_points:
        dots = _sub(root, 'g', id='points', fill=style.stroke)
        for p in m.vertex_pool.values():
            x, y = view(p)
            _sub(dots, 'circle', cx=_fmt(x), cy=_fmt(y), r=1.5)

    if style.heatmap:
        _add_legend(root, style, cmap, norm)

    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding='UTF-8').decode('utf-8')


def write_svg(m: MetaphoricalMap, path: Union[str, Path], style: Optional[RenderStyle] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(m, style), encoding='utf-8')
    logger.info("Rendered %d regions to %s", len(m.regions), path)
    return path
