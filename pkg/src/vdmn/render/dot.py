"""Graphviz DOT emitter.

Output is deterministic: clusters first (a node's first appearance
decides its cluster membership), then unclustered nodes, rank groups,
operator badges, and edges, each in canonical model order. Explicit
operators become small intermediate badge nodes so n-ary combinations
read unambiguously; links into such parents route through the badge.
"""

from __future__ import annotations

from ..dsl import format_number
from ..engine import Valuation
from ..model import GatewayGuard, LinkKind, Model, OPERATOR_SYMBOLS
from .style import Border, DOT_FILL, style_for

_EDGE_STYLE = {
    LinkKind.DIRECT: "solid",
    LinkKind.INDIRECT: "dashed",
    LinkKind.LOGICAL_ALLOCATION: "dotted",
}


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _node_label(model: Model, indicator_id: str, show_content: bool,
                valuation: Valuation | None) -> str:
    ind = model.indicator(indicator_id)
    lines = [ind.content.title]
    if show_content:
        value = valuation.value(indicator_id) if valuation is not None else None
        if value is None:
            value = ind.content.result_type_values.get(
                valuation.result_type if valuation is not None else "actual"
            )
        if value is not None:
            unit = ind.content.metric_unit
            lines.append(format_number(value) + (f" {unit.text()}" if unit else ""))
        if ind.content.responsibility:
            lines.append(ind.content.responsibility)
    if model.is_cut(indicator_id):
        lines.append(f"[cut: {model.cut_labels[indicator_id]}]")
    if indicator_id in model.subtree_refs:
        lines.append(f"[sub-tree: {model.subtree_refs[indicator_id]}]")
    return "\n".join(lines)


def _node_line(model: Model, indicator_id: str, show_content: bool,
               valuation: Valuation | None) -> str:
    ind = model.indicator(indicator_id)
    style = style_for(ind, model.is_cut(indicator_id))
    styles = ["filled"]
    if style.border is Border.DASHED:
        styles.append("dashed")
    label = _node_label(model, indicator_id, show_content, valuation)
    return (
        f"{_quote(indicator_id)} [label={_quote(label)}, shape=box, "
        f"style={_quote(','.join(styles))}, fillcolor={DOT_FILL[style.fill]}, "
        f"fontcolor={style.text_color}]"
    )


def _guard_label(guard: GatewayGuard) -> str:
    if guard.is_default:
        return "default"
    return f"{guard.comparator.value} {format_number(guard.threshold)}"


def to_dot(
    model: Model,
    show_operators: bool = True,
    show_levels: bool = True,
    show_clusters: bool = True,
    show_content: bool = False,
    valuation: Valuation | None = None,
) -> str:
    out: list[str] = [f"digraph {_quote(model.name or 'model')} {{"]
    out.append("  rankdir=BT;")
    out.append("  node [fontname=\"Helvetica\"];")

    placed: set[str] = set()
    if show_clusters:
        for i, cluster in enumerate(model.clusters):
            out.append(f"  subgraph cluster_{i} {{")
            out.append(f"    label={_quote(cluster.name)};")
            out.append(f"    style=dashed;")
            for member in cluster.members:
                if member in placed:
                    out.append(f"    {_quote(member)};")
                else:
                    placed.add(member)
                    out.append(f"    {_node_line(model, member, show_content, valuation)};")
            out.append("  }")
    for ind in model.indicators:
        if ind.id not in placed:
            out.append(f"  {_node_line(model, ind.id, show_content, valuation)};")

    if show_levels:
        for level in model.levels:
            for band in level.bands:
                if not band.members:
                    continue
                names = "; ".join(_quote(m) for m in band.members)
                out.append(f"  // {level.kind.value} band: {band.name}")
                out.append(f"  {{ rank=same; {names}; }}")

    badge_parents: set[str] = set()
    if show_operators:
        for spec in model.operators:
            badge = f"op:{spec.parent}"
            symbol = OPERATOR_SYMBOLS[spec.op]
            badge_parents.add(spec.parent)
            out.append(
                f"  {_quote(badge)} [label={_quote(symbol)}, shape=circle, "
                f"width=0.25, fixedsize=true, fontsize=10];"
            )
            out.append(f"  {_quote(badge)} -> {_quote(spec.parent)} [arrowhead=none];")

    for link in model.links:
        target = link.target
        if (
            link.kind.is_analytical
            and link.target in badge_parents
        ):
            target = f"op:{link.target}"
        attrs = [f"style={_EDGE_STYLE[link.kind]}"]
        if link.guard is not None:
            attrs.append(f"label={_quote(_guard_label(link.guard))}")
        out.append(f"  {_quote(link.source)} -> {_quote(target)} [{', '.join(attrs)}];")

    out.append("}")
    return "\n".join(out) + "\n"
