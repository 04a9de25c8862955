import re
import xml.etree.ElementTree as ET

import pytest

from vdmn import (
    FunctionRole,
    Indicator,
    IndicatorContent,
    IndicatorType,
    LayoutOverflow,
    evaluate,
    style_for,
    to_dot,
    to_svg,
)
from vdmn.render.style import Border, Fill

from .oracles import check_dot

NS = {"s": "http://www.w3.org/2000/svg"}


def _ind(itype=IndicatorType.VALUE_DRIVER, role=FunctionRole.REGULAR):
    return Indicator(id="X", itype=itype, role=role, content=IndicatorContent(title="X"))


def _svg(model, **kwargs):
    return ET.fromstring(to_svg(model, **kwargs))


def _node_rect(tree, indicator_id):
    group = next(
        g for g in tree.findall(".//s:g", NS)
        if g.get("id") == indicator_id and g.get("class") == "indicator"
    )
    return group.find("s:rect", NS)


def _texts(element):
    return [t.text for t in element.findall(".//s:text", NS)]


# ---------------------------------------------------------------------------
# style table


def test_root_is_black_with_white_text():
    style = style_for(_ind(itype=IndicatorType.KEY_BUSINESS))
    assert style.fill is Fill.BLACK
    assert style.border is Border.SOLID
    assert style.text_color == "white"


def test_root_fill_beats_role():
    style = style_for(_ind(itype=IndicatorType.KEY_BUSINESS, role=FunctionRole.KEY_VALUE_INDICATOR))
    assert style.fill is Fill.BLACK


@pytest.mark.parametrize("role", [FunctionRole.INPUT, FunctionRole.CALCULATION])
def test_input_and_calculation_are_transparent(role):
    assert style_for(_ind(role=role)).fill is Fill.TRANSPARENT


def test_key_value_driver_is_grey():
    assert style_for(_ind(role=FunctionRole.KEY_VALUE_INDICATOR)).fill is Fill.GREY


def test_plain_indicator_is_white():
    style = style_for(_ind())
    assert style.fill is Fill.WHITE
    assert style.text_color == "black"


def test_dashed_borders_for_subsidiary_and_cut():
    assert style_for(_ind(itype=IndicatorType.SUBSIDIARY_RESULT)).border is Border.DASHED
    assert style_for(_ind(), is_cut=True).border is Border.DASHED
    assert style_for(_ind()).border is Border.SOLID


# ---------------------------------------------------------------------------
# DOT


def test_dot_parses_for_all_fixture_models(corpus, everything):
    for model in [corpus.get(n) for n in corpus.names()] + [everything]:
        nodes, edges = check_dot(to_dot(model))
        assert {i.id for i in model.indicators} <= nodes, model.name
        assert edges, model.name


def test_dot_prelude_and_operator_badges(gross_profit):
    dot = to_dot(gross_profit)
    assert "rankdir=BT;" in dot
    nodes, edges = check_dot(dot)
    assert "op:GP" in nodes
    assert ("op:GP", "GP") in edges  # badge hangs off its parent
    assert ("REV", "op:GP") in edges  # analytical links route through the badge
    assert ("COGS", "op:GP") in edges


def test_dot_edge_styles(roce, gross_profit):
    dot = to_dot(roce)
    assert re.search(r'"Training" -> "COGS" \[style=dotted\]', dot)
    assert re.search(r'"Revenue" -> "op:Capital_Turnover" \[style=dashed\]', dot)
    assert re.search(r'"Fixed_Assets" -> "op:Capital_Employed" \[style=solid\]', dot)


def test_dot_node_styling(gross_profit):
    dot = to_dot(gross_profit)
    gp_line = next(l for l in dot.splitlines() if l.strip().startswith('"GP" ['))
    assert "fillcolor=black" in gp_line and "fontcolor=white" in gp_line
    volume_line = next(l for l in dot.splitlines() if l.strip().startswith('"Volume" ['))
    assert "fillcolor=grey" in volume_line
    ratio_line = next(l for l in dot.splitlines() if l.strip().startswith('"Ratio" ['))
    assert 'style="filled,dashed"' in ratio_line
    material_line = next(l for l in dot.splitlines() if l.strip().startswith('"Material" ['))
    assert 'style="filled,dashed"' in material_line  # cut leaf
    assert "[cut: raw material sourcing detail]" in material_line


def test_dot_input_nodes_transparent(roce):
    dot = to_dot(roce)
    fa_line = next(l for l in dot.splitlines() if l.strip().startswith('"Fixed_Assets" ['))
    assert "fillcolor=transparent" in fa_line


def test_dot_clusters_and_guards(everything):
    dot = to_dot(everything)
    assert 'subgraph cluster_' in dot
    assert 'label="Levers"' in dot
    assert re.search(r'label=">= 2"', dot)
    assert re.search(r'label="default"', dot)
    assert "[sub-tree: capacity detail]" in dot


def test_dot_valuation_content(gross_profit):
    dot = to_dot(gross_profit, show_content=True, valuation=evaluate(gross_profit))
    assert "1000 EUR" in dot
    assert "Head of Sales" in dot


def test_dot_show_flags(gross_profit):
    bare = to_dot(gross_profit, show_operators=False, show_levels=False, show_clusters=False)
    assert "op:" not in bare
    assert "rank=same" not in bare
    assert "subgraph" not in bare
    check_dot(bare)


def test_dot_is_deterministic(gross_profit):
    assert to_dot(gross_profit) == to_dot(gross_profit)


def test_dot_escapes_awkward_titles():
    from vdmn import parse_text

    model = parse_text(
        """
        model "tricky \\"quotes\\"" {
          kbi R { title "Line\\nBreak \\"x\\"" }
          driver A { result actual = 1 }
          A -> R [order=0]
        }
        """
    ).expect()
    nodes, _ = check_dot(to_dot(model))
    assert "R" in nodes


# ---------------------------------------------------------------------------
# SVG


def test_svg_is_wellformed_for_all_fixture_models(corpus, everything):
    for model in [corpus.get(n) for n in corpus.names()] + [everything]:
        tree = _svg(model)
        assert tree.tag == "{http://www.w3.org/2000/svg}svg"
        assert float(tree.get("width")) > 0
        groups = {g.get("id") for g in tree.findall(".//s:g", NS)}
        assert {i.id for i in model.indicators} <= groups


def test_svg_node_fills(gross_profit, roce):
    tree = _svg(gross_profit)
    assert _node_rect(tree, "GP").get("fill") == "#000000"
    assert _node_rect(tree, "Volume").get("fill") == "#808080"
    assert _node_rect(tree, "Labor").get("fill") == "#ffffff"
    roce_tree = _svg(roce)
    assert _node_rect(roce_tree, "Fixed_Assets").get("fill") == "none"


def test_svg_dashed_borders(gross_profit):
    tree = _svg(gross_profit)
    assert _node_rect(tree, "Ratio").get("stroke-dasharray") == "8 4"
    assert _node_rect(tree, "Material").get("stroke-dasharray") == "8 4"
    assert _node_rect(tree, "GP").get("stroke-dasharray") is None


def test_svg_operator_badges(gross_profit):
    tree = _svg(gross_profit)
    badge = next(g for g in tree.findall(".//s:g", NS) if g.get("id") == "op-GP")
    assert badge.find("s:circle", NS) is not None
    assert "-" in _texts(badge)


def test_svg_valuation_values_and_trends(gross_profit):
    tree = _svg(gross_profit, valuation=evaluate(gross_profit))
    gp_group = next(g for g in tree.findall(".//s:g", NS) if g.get("id") == "GP")
    assert "400 EUR ▲" in _texts(gp_group)  # above its budget comparative
    energy = next(g for g in tree.findall(".//s:g", NS) if g.get("id") == "Energy")
    assert "50 EUR ▲" in _texts(energy)  # declared development


def test_svg_marks_uncomputed_nodes(gross_profit):
    tree = _svg(gross_profit, valuation=evaluate(gross_profit, result_type="forecast"))
    texts = _texts(tree)
    assert any(t == "n/a (missing_binding)" for t in texts)


def test_svg_cut_and_subtree_markers(gross_profit, everything):
    texts = _texts(_svg(gross_profit))
    assert any(t.startswith("✂ raw material sourcing") for t in texts)  # long labels trim
    texts = _texts(_svg(everything))
    assert "↪ capacity detail" in texts
    assert any(t == ">= 2" for t in texts)
    assert any(t == "default" for t in texts)


def test_svg_band_contains_its_members(gross_profit):
    tree = _svg(gross_profit)
    band = next(
        g for g in tree.findall(".//s:g", NS)
        if (g.get("class") or "").startswith("level-band")
        and "value drivers" in _texts(g)
    )
    rect = band.find("s:rect", NS)
    bx, by = float(rect.get("x")), float(rect.get("y"))
    bw, bh = float(rect.get("width")), float(rect.get("height"))
    for member in ("Price", "Volume", "Material", "Labor", "Overhead"):
        node = _node_rect(tree, member)
        x, y = float(node.get("x")), float(node.get("y"))
        w, h = float(node.get("width")), float(node.get("height"))
        assert bx <= x and x + w <= bx + bw, member
        assert by <= y and y + h <= by + bh, member


def test_svg_show_flags(gross_profit):
    tree = _svg(
        gross_profit,
        show_operators=False,
        show_levels=False,
        show_clusters=False,
        show_content=False,
    )
    classes = {g.get("class") for g in tree.findall(".//s:g", NS)}
    assert not any((c or "").startswith("level-band") for c in classes)
    assert not any((c or "").startswith("cluster") for c in classes)
    assert not any(g.get("id", "").startswith("op-") for g in tree.findall(".//s:g", NS))
    assert "400 EUR" not in _texts(tree)


def test_svg_is_deterministic(gross_profit):
    assert to_svg(gross_profit) == to_svg(gross_profit)


def test_svg_layout_overflow(gross_profit):
    with pytest.raises(LayoutOverflow) as err:
        to_svg(gross_profit, max_width=300)
    assert "row" in str(err.value)
