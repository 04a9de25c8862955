import json

import pytest

from vdmn import emit_interchange, model_to_document, parse_interchange

from .generators import random_full_model


def test_document_shape(gross_profit):
    doc = model_to_document(gross_profit)
    assert doc["name"] == "Gross Profit"
    ids = {i["id"] for i in doc["indicators"]}
    assert {"GP", "REV", "COGS", "Volume"} <= ids
    assert any(l["kind"] == "indirect" for l in doc["links"])
    assert doc["decomposition"]["tree_cuts"] == [
        {"node": "Material", "label": "raw material sourcing detail"}
    ]


def test_emit_parse_round_trip(gross_profit, roce, everything):
    for model in (gross_profit, roce, everything):
        back = parse_interchange(emit_interchange(model)).expect()
        assert back == model


def test_round_trip_generated_models():
    for seed in range(40):
        model = random_full_model(seed)
        back = parse_interchange(emit_interchange(model), file=f"seed-{seed}").expect()
        assert back == model


def test_emission_is_deterministic(everything):
    assert emit_interchange(everything) == emit_interchange(everything)


def test_invalid_json_is_a_diagnostic():
    res = parse_interchange("{not json")
    assert res.model is None
    assert res.errors


def test_schema_violations_are_diagnostics():
    doc = {"name": "x"}  # missing required collections
    res = parse_interchange(json.dumps(doc))
    assert res.model is None
    assert res.errors


def test_bad_enum_value_is_a_diagnostic(gross_profit):
    doc = model_to_document(gross_profit)
    doc["indicators"][0]["type"] = "galactic"
    res = parse_interchange(json.dumps(doc))
    assert res.model is None


def test_model_error_surfaces_as_diagnostic(gross_profit):
    doc = model_to_document(gross_profit)
    doc["links"].append(dict(doc["links"][0]))  # duplicate link
    res = parse_interchange(json.dumps(doc))
    assert res.model is None
    assert res.errors


def test_unknown_top_level_key_rejected(gross_profit):
    doc = model_to_document(gross_profit)
    doc["flavor"] = "vanilla"
    res = parse_interchange(json.dumps(doc))
    assert res.model is None
