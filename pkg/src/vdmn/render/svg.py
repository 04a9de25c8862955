"""Self-contained SVG renderer, no external layout engine.

Each indicator becomes a ``<g>`` whose id is the indicator id, holding
the styled rectangle and its content block (title, value with unit,
trend arrow, responsibility). Level bands and cluster boxes are drawn
behind the nodes as the padded bounding box of their members, so
containment is a checkable geometric fact, not a drawing convention.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..dsl import format_number
from ..engine import Valuation, derived_development
from ..model import Development, GatewayGuard, Indicator, LinkKind, Model, OPERATOR_SYMBOLS
from .layout import Layout, NodeBox, layout_model
from .style import Border, Fill, SVG_FILL, style_for

_DASH = {
    LinkKind.DIRECT: None,
    LinkKind.INDIRECT: "7 5",
    LinkKind.LOGICAL_ALLOCATION: "2 4",
}

_TREND = {Development.UP: "▲", Development.FLAT: "▬", Development.DOWN: "▼"}

_BAND_FILL = "#f5f5f5"
_CLUSTER_STROKE = "#777777"
_BADGE_RADIUS = 11.0


def _fmt(value: float) -> str:
    return f"{value:g}"


def _bounding_rect(boxes: list[NodeBox], pad: float) -> tuple[float, float, float, float]:
    x0 = min(b.x for b in boxes) - pad
    y0 = min(b.y for b in boxes) - pad
    x1 = max(b.x + b.width for b in boxes) + pad
    y1 = max(b.y + b.height for b in boxes) + pad
    return x0, y0, x1 - x0, y1 - y0


def _line(parent: ET.Element, p1: tuple[float, float], p2: tuple[float, float],
          dash: str | None, arrow: bool) -> None:
    attrs = {
        "x1": _fmt(p1[0]),
        "y1": _fmt(p1[1]),
        "x2": _fmt(p2[0]),
        "y2": _fmt(p2[1]),
        "stroke": "#333333",
        "stroke-width": "1.2",
    }
    if dash:
        attrs["stroke-dasharray"] = dash
    if arrow:
        attrs["marker-end"] = "url(#vdmn-arrow)"
    ET.SubElement(parent, "line", attrs)


def _text(parent: ET.Element, x: float, y: float, content: str, *,
          size: float = 12, color: str = "black", weight: str | None = None,
          anchor: str = "middle") -> None:
    attrs = {
        "x": _fmt(x),
        "y": _fmt(y),
        "font-size": _fmt(size),
        "fill": color,
        "text-anchor": anchor,
        "font-family": "Helvetica, Arial, sans-serif",
    }
    if weight:
        attrs["font-weight"] = weight
    el = ET.SubElement(parent, "text", attrs)
    el.text = content


def _trim(text: str, limit: int) -> str:
    return text if len(text) <= limit else text[: limit - 1] + "…"


def _guard_text(guard: GatewayGuard) -> str:
    if guard.is_default:
        return "default"
    return f"{guard.comparator.value} {format_number(guard.threshold)}"


def _node_group(svg: ET.Element, model: Model, ind: Indicator, box: NodeBox,
                show_content: bool, valuation: Valuation | None,
                trends: dict[str, Development]) -> None:
    style = style_for(ind, model.is_cut(ind.id))
    group = ET.SubElement(svg, "g", {"id": ind.id, "class": "indicator"})
    rect_attrs = {
        "x": _fmt(box.x),
        "y": _fmt(box.y),
        "width": _fmt(box.width),
        "height": _fmt(box.height),
        "rx": "4",
        "fill": SVG_FILL[style.fill],
        "stroke": "#000000",
        "stroke-width": "1.4",
    }
    if style.border is Border.DASHED:
        rect_attrs["stroke-dasharray"] = "8 4"
    ET.SubElement(group, "rect", rect_attrs)

    color = style.text_color
    cx = box.center_x
    _text(group, cx, box.y + 20, _trim(ind.content.title, 24), size=12.5,
          color=color, weight="bold")
    if show_content:
        value = valuation.value(ind.id) if valuation is not None else None
        reason = valuation.reason(ind.id) if valuation is not None else None
        line2 = None
        if value is not None:
            unit = ind.content.metric_unit
            line2 = format_number(value) + (f" {unit.text()}" if unit else "")
        elif reason is not None:
            line2 = f"n/a ({reason.reason.value})"
        if line2:
            trend = trends.get(ind.id) or (
                ind.content.development
                if ind.content.development in _TREND
                else None
            )
            if trend:
                line2 += f" {_TREND[trend]}"
            _text(group, cx, box.y + 38, _trim(line2, 26), size=11.5, color=color)
        if ind.content.responsibility:
            _text(group, cx, box.y + 54, _trim(ind.content.responsibility, 28),
                  size=10, color=color)
    if model.is_cut(ind.id):
        _text(group, cx, box.y + box.height - 6,
              _trim("✂ " + model.cut_labels[ind.id], 28), size=9.5, color=color)
    elif ind.id in model.subtree_refs:
        _text(group, cx, box.y + box.height - 6,
              _trim("↪ " + model.subtree_refs[ind.id], 28), size=9.5, color=color)


def to_svg(
    model: Model,
    show_operators: bool = True,
    show_levels: bool = True,
    show_clusters: bool = True,
    show_content: bool = True,
    valuation: Valuation | None = None,
    max_width: float = 10000.0,
) -> str:
    layout = layout_model(model, max_width=max_width)
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": _fmt(layout.width),
            "height": _fmt(layout.height),
            "viewBox": f"0 0 {_fmt(layout.width)} {_fmt(layout.height)}",
            "font-family": "Helvetica, Arial, sans-serif",
        },
    )
    defs = ET.SubElement(svg, "defs")
    marker = ET.SubElement(
        defs,
        "marker",
        {
            "id": "vdmn-arrow",
            "markerWidth": "9",
            "markerHeight": "8",
            "refX": "8",
            "refY": "4",
            "orient": "auto",
        },
    )
    ET.SubElement(marker, "path", {"d": "M0,0 L9,4 L0,8 z", "fill": "#333333"})
    ET.SubElement(
        svg,
        "rect",
        {"x": "0", "y": "0", "width": _fmt(layout.width), "height": _fmt(layout.height),
         "fill": "#ffffff"},
    )

    if show_levels:
        for level in model.levels:
            for band in level.bands:
                boxes = [layout.boxes[m] for m in band.members if m in layout.boxes]
                if not boxes:
                    continue
                x, y, w, h = _bounding_rect(boxes, pad=14)
                group = ET.SubElement(
                    svg, "g", {"class": f"level-band level-{level.kind.value}"}
                )
                ET.SubElement(
                    group,
                    "rect",
                    {"x": _fmt(x), "y": _fmt(y), "width": _fmt(w), "height": _fmt(h),
                     "fill": _BAND_FILL, "stroke": "#dddddd"},
                )
                _text(group, x + 4, y + 12, band.name, size=9.5, color="#555555",
                      anchor="start")

    if show_clusters:
        for index, cluster in enumerate(model.clusters):
            boxes = [layout.boxes[m] for m in cluster.members if m in layout.boxes]
            if not boxes:
                continue
            x, y, w, h = _bounding_rect(boxes, pad=8)
            group = ET.SubElement(
                svg, "g", {"id": f"cluster-{index}", "class": f"cluster cluster-{cluster.kind.value}"}
            )
            ET.SubElement(
                group,
                "rect",
                {"x": _fmt(x), "y": _fmt(y), "width": _fmt(w), "height": _fmt(h),
                 "fill": "none", "stroke": _CLUSTER_STROKE, "stroke-dasharray": "4 3"},
            )
            _text(group, x + 4, y - 4, cluster.name, size=10, color=_CLUSTER_STROKE,
                  anchor="start")

    badge_centers: dict[str, tuple[float, float]] = {}
    if show_operators:
        for spec in model.operators:
            box = layout.boxes[spec.parent]
            badge_centers[spec.parent] = (box.center_x, box.y + box.height + 26)

    edge_layer = ET.SubElement(svg, "g", {"class": "links"})
    for link in model.links:
        src = layout.boxes[link.source]
        dst = layout.boxes[link.target]
        if link.kind.is_analytical and link.target in badge_centers:
            end = badge_centers[link.target]
        else:
            end = dst.bottom if src.y > dst.y else dst.top
        start = src.top if src.y > dst.y else src.bottom
        _line(edge_layer, start, end, _DASH[link.kind], arrow=True)
        if link.guard is not None:
            mid_x = (start[0] + end[0]) / 2
            mid_y = (start[1] + end[1]) / 2 - 3
            _text(edge_layer, mid_x, mid_y, _guard_text(link.guard), size=9,
                  color="#555555")

    if show_operators:
        for spec in model.operators:
            cx, cy = badge_centers[spec.parent]
            box = layout.boxes[spec.parent]
            group = ET.SubElement(svg, "g", {"id": f"op-{spec.parent}", "class": "operator"})
            ET.SubElement(
                group,
                "line",
                {"x1": _fmt(cx), "y1": _fmt(cy - _BADGE_RADIUS), "x2": _fmt(cx),
                 "y2": _fmt(box.y + box.height), "stroke": "#333333",
                 "stroke-width": "1.2"},
            )
            ET.SubElement(
                group,
                "circle",
                {"cx": _fmt(cx), "cy": _fmt(cy), "r": _fmt(_BADGE_RADIUS),
                 "fill": "#ffffff", "stroke": "#333333"},
            )
            _text(group, cx, cy + 3.5, OPERATOR_SYMBOLS[spec.op], size=10.5)

    trends = derived_development(model, valuation) if valuation is not None else {}
    for ind in model.indicators:
        _node_group(svg, model, ind, layout.boxes[ind.id], show_content, valuation, trends)

    return ET.tostring(svg, encoding="unicode") + "\n"
