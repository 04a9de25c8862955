import pytest

from vdmn import (
    IndicatorType,
    apply_tree_cut,
    evaluate,
    extract_subtree,
    merge_subtree,
    parse_text,
    validate,
)
from vdmn.errors import IdCollision, IsRoot, NonSeparable, ReferenceMismatch, UnknownReference
from vdmn.transform import ORIGINAL_TYPE_ATTR

from .generators import random_cut_case, random_separable_case


def _model(src):
    return parse_text(src).expect()


# ---------------------------------------------------------------------------
# extraction


def test_extract_cogs_branch(gross_profit):
    extracted, remainder = extract_subtree(gross_profit, "COGS")

    assert extracted.name == "COGS"
    assert extracted.root.id == "COGS"
    assert extracted.root.itype is IndicatorType.KEY_BUSINESS
    assert extracted.root.content.data_attributes[ORIGINAL_TYPE_ATTR] == "financial"
    assert {i.id for i in extracted.indicators} == {"COGS", "Material", "Labor", "Overhead", "Energy"}
    # the Material cut travels with its branch
    assert extracted.cut_labels == {"Material": "raw material sourcing detail"}

    assert remainder.indicator("COGS").itype is IndicatorType.FINANCIAL
    assert remainder.analytical_children("COGS") == ()
    assert remainder.subtree_refs == {"COGS": "COGS"}
    assert not remainder.cut_labels


def test_extracted_branch_evaluates_standalone(gross_profit):
    extracted, _ = extract_subtree(gross_profit, "COGS")
    assert evaluate(extracted).root_value == pytest.approx(600)


def test_remainder_evaluates_with_boundary_binding(gross_profit):
    _, remainder = extract_subtree(gross_profit, "COGS")
    val = evaluate(remainder, {"COGS": 600})
    assert val.root_value == pytest.approx(400)
    assert val.value("Ratio") == pytest.approx(0.6)  # indirect links survive


def test_merge_restores_original(gross_profit):
    extracted, remainder = extract_subtree(gross_profit, "COGS")
    assert merge_subtree(remainder, extracted) == gross_profit


def test_extract_merge_with_decorations(everything):
    extracted, remainder = extract_subtree(everything, "Fn")
    assert {i.id for i in extracted.indicators} == {"Fn", "D5", "SubT"}
    assert extracted.subtree_refs == {"SubT": "capacity detail"}
    assert remainder.cut_labels == {"Cut1": "maintenance block"}
    assert merge_subtree(remainder, extracted) == everything


def test_extract_capital_employed_is_separable(roce):
    extracted, remainder = extract_subtree(roce, "Capital_Employed")
    assert evaluate(extracted).root_value == pytest.approx(200000)
    assert merge_subtree(remainder, extracted) == roce


def test_extract_root_is_refused(gross_profit):
    with pytest.raises(IsRoot):
        extract_subtree(gross_profit, "GP")


def test_extract_unknown_boundary(gross_profit):
    with pytest.raises(UnknownReference):
        extract_subtree(gross_profit, "Nope")


def test_extract_ebit_refused_by_crossing_links(roce):
    with pytest.raises(NonSeparable) as err:
        extract_subtree(roce, "EBIT")
    crossing = set(err.value.links)
    assert ("Training", "COGS") in crossing
    assert ("Wage_Level", "COGS") in crossing
    assert ("Revenue", "Capital_Turnover") in crossing


def test_extract_refused_when_selector_crosses():
    m = _model(
        """
        model "selector out" {
          kbi R {}
          fin P {}
          driver A { result actual = 1 }
          driver B { result actual = 2 }
          driver S { result actual = 3 }
          P -> R [order=0]
          S -> R [order=1]
          A -> P [order=0, when >= 2]
          B -> P [order=1, when default]
          op P = X(S)
        }
        """
    )
    with pytest.raises(NonSeparable) as err:
        extract_subtree(m, "P")
    assert ("S", "P") in set(err.value.links)


def test_extract_refused_when_vdgroup_straddles():
    m = _model(
        """
        model "straddle" {
          kbi R {}
          fin P {}
          driver A { result actual = 1 }
          driver B { result actual = 2 }
          driver Lever {}
          P -> R [order=0]
          B -> R [order=1]
          A -> P [order=0]
          Lever ..> A
          cluster vdgroup "Levers" @A [Lever, B]
        }
        """
    )
    with pytest.raises(NonSeparable) as err:
        extract_subtree(m, "P")
    assert ("B", "A") in set(err.value.links)


# ---------------------------------------------------------------------------
# merge error paths


def test_merge_requires_matching_reference(gross_profit, everything):
    _, remainder = extract_subtree(gross_profit, "COGS")
    foreign, _ = extract_subtree(everything, "Fn")
    with pytest.raises(ReferenceMismatch):
        merge_subtree(remainder, foreign)


def test_merge_requires_boundary_root():
    remainder = _model(
        """
        model "main" {
          kbi R {}
          fin B {}
          B -> R [order=0]
          subtree B => "Sub"
        }
        """
    )
    extracted = _model(
        """
        model "Sub" {
          kbi C {}
          driver X { result actual = 1 }
          X -> C [order=0]
        }
        """
    )
    with pytest.raises(ReferenceMismatch):
        merge_subtree(remainder, extracted)


def test_merge_rejects_id_collisions():
    remainder = _model(
        """
        model "main" {
          kbi R {}
          fin B {}
          driver X { result actual = 9 }
          B -> R [order=0]
          X -> R [order=1]
          subtree B => "B"
        }
        """
    )
    extracted = _model(
        """
        model "B" {
          kbi B {}
          driver X { result actual = 1 }
          X -> B [order=0]
        }
        """
    )
    with pytest.raises(IdCollision) as err:
        merge_subtree(remainder, extracted)
    assert err.value.ids == ("X",)


# ---------------------------------------------------------------------------
# tree cuts


def test_cut_cogs_prunes_branch(gross_profit):
    cut = apply_tree_cut(gross_profit, "COGS", "cost detail")
    ids = {i.id for i in cut.indicators}
    assert ids == {"GP", "REV", "COGS", "Price", "Volume", "Ratio"}
    assert cut.is_cut("COGS")
    assert cut.cut_labels == {"COGS": "cost detail"}
    assert cut.analytical_children("COGS") == ()
    # the indirect feed into Ratio must survive the cut
    assert cut.analytical_children("Ratio") == ("COGS", "REV")


def test_cut_model_passes_validation(gross_profit):
    cut = apply_tree_cut(gross_profit, "COGS", "cost detail")
    findings = validate(cut)
    assert not any(f.code == "V003" for f in findings)


def test_cut_root_is_refused(gross_profit):
    with pytest.raises(IsRoot):
        apply_tree_cut(gross_profit, "GP", "x")


def test_cut_keeps_descendants_with_outside_consumers():
    m = _model(
        """
        model "shared" {
          kbi R {}
          fin A {}
          subsidiary B {}
          driver C { result actual = 3 }
          driver D { result actual = 4 }
          A -> R [order=0]
          C -> A [order=0]
          D -> A [order=1]
          C ~> B [order=0]
          D ~> B [order=1]
          op R = fx(sum)
          op A = +
          op B = *
        }
        """
    )
    cut = apply_tree_cut(m, "A", "details elsewhere")
    ids = {i.id for i in cut.indicators}
    assert ids == {"R", "A", "B", "C", "D"}  # C and D still feed B
    val = evaluate(cut, {"A": 7})
    assert val.root_value == pytest.approx(7)
    assert val.value("B") == pytest.approx(12)


def test_cut_keeps_selector_used_by_surviving_gateway():
    m = _model(
        """
        model "selector kept" {
          kbi R {}
          fin P {}
          driver G {}
          driver A { result actual = 1 }
          driver B { result actual = 2 }
          driver S { result actual = 5 }
          P -> R [order=0]
          G -> R [order=1]
          S -> P [order=0]
          A -> G [order=0, when >= 2]
          B -> G [order=1, when default]
          op G = X(S)
          op R = +
        }
        """
    )
    cut = apply_tree_cut(m, "P", "elsewhere")
    assert cut.has("S")  # still referenced as a gateway selector
    val = evaluate(cut, {"P": 10})
    assert val.value("G") == pytest.approx(1)
    assert val.root_value == pytest.approx(11)


def test_cut_drops_nested_decomposition_entries(everything):
    cut = apply_tree_cut(everything, "Alpha", "upper half elsewhere")
    assert cut.cut_labels == {"Alpha": "upper half elsewhere"}
    assert "Cut1" not in {i.id for i in cut.indicators}
    assert not cut.subtree_refs


# ---------------------------------------------------------------------------
# generated cases


def test_random_separable_cases_round_trip():
    for seed in range(25):
        model, boundary = random_separable_case(seed)
        extracted, remainder = extract_subtree(model, boundary)
        assert extracted.root.id == boundary, seed
        assert remainder.subtree_refs[boundary] == extracted.name, seed
        assert merge_subtree(remainder, extracted) == model, seed


def test_random_cut_and_bind_identity():
    for seed in range(15):
        case, node = random_cut_case(seed)
        base = evaluate(case.model, case.bindings)
        pruned = apply_tree_cut(case.model, node, "elsewhere")
        kept = {k: v for k, v in case.bindings.items() if pruned.has(k)}
        kept[node] = base.value(node)
        val = evaluate(pruned, kept)
        assert val.root_value == pytest.approx(base.root_value, rel=1e-12, abs=1e-12), seed
