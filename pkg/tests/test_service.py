import xml.etree.ElementTree as ET

import pytest
from fastapi.testclient import TestClient

from vdmn.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _create_session(client, **payload):
    payload.setdefault("model", "gross_profit")
    response = client.post("/sessions", json=payload)
    assert response.status_code == 201, response.text
    return response.json()


# ---------------------------------------------------------------------------
# model browsing


def test_list_models(client):
    body = client.get("/models").json()
    by_name = {m["name"]: m for m in body["models"]}
    assert set(by_name) == {"gross_profit", "roce"}
    gp = by_name["gross_profit"]
    assert gp["title"] == "Gross Profit"
    assert gp["root"] == "GP"
    assert gp["indicators"] == 10
    assert gp["errors"] == 0
    assert by_name["roce"]["warnings"] == 2


def test_model_detail(client):
    body = client.get("/models/gross_profit").json()
    assert body["name"] == "gross_profit"
    assert {i["id"] for i in body["model"]["indicators"]} >= {"GP", "REV", "COGS"}
    assert body["diagnostics"] == []
    assert set(body["overridable"]) == {"Price", "Volume", "Material", "Labor",
                                        "Overhead", "Energy"}


def test_model_detail_reports_diagnostics(client):
    body = client.get("/models/roce").json()
    codes = [d["code"] for d in body["diagnostics"]]
    assert codes == ["V008", "V008"]


def test_unknown_model_is_404(client):
    response = client.get("/models/nope")
    assert response.status_code == 404
    assert response.json()["detail"]["error"] == "UnknownModel"


# ---------------------------------------------------------------------------
# evaluation


def test_evaluate_defaults(client):
    body = client.post("/models/gross_profit/evaluate", json={}).json()
    assert body["root"] == "GP"
    assert body["values"]["GP"] == pytest.approx(400)
    assert body["values"]["REV"] == pytest.approx(1000)
    assert body["not_computed"] == {}


def test_evaluate_with_bindings(client):
    body = client.post(
        "/models/gross_profit/evaluate", json={"bindings": {"Volume": 110}}
    ).json()
    assert body["values"]["GP"] == pytest.approx(500)


def test_evaluate_other_result_type(client):
    body = client.post(
        "/models/gross_profit/evaluate", json={"result_type": "budget"}
    ).json()
    assert body["values"]["GP"] is None
    assert body["not_computed"]["Price"]["reason"] == "missing_binding"


def test_evaluate_division_by_zero_modes(client):
    response = client.post(
        "/models/gross_profit/evaluate", json={"bindings": {"Volume": 0}}
    )
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "DivisionByZero"

    body = client.post(
        "/models/gross_profit/evaluate",
        json={"bindings": {"Volume": 0}, "division_by_zero": "mark"},
    ).json()
    assert body["not_computed"]["Ratio"]["reason"] == "division_by_zero_downstream"
    assert body["values"]["GP"] == pytest.approx(-600)


def test_evaluate_conflicting_binding_is_409(client):
    response = client.post(
        "/models/gross_profit/evaluate", json={"bindings": {"GP": 1}}
    )
    assert response.status_code == 409
    assert response.json()["detail"]["error"] == "ConflictingBinding"


def test_evaluate_rejects_unknown_fields(client):
    response = client.post(
        "/models/gross_profit/evaluate", json={"bindingz": {"Volume": 1}}
    )
    assert response.status_code == 422


def test_evaluate_rejects_bad_zero_mode(client):
    response = client.post(
        "/models/gross_profit/evaluate", json={"division_by_zero": "explode"}
    )
    assert response.status_code == 422


# ---------------------------------------------------------------------------
# sensitivity


def test_model_sensitivity(client):
    body = client.get("/models/gross_profit/sensitivity").json()
    assert body["root"] == "GP"
    assert body["root_value"] == pytest.approx(400)
    assert body["epsilon"] == pytest.approx(1e-3)
    entries = body["entries"]
    assert {e["id"] for e in entries[:2]} == {"Price", "Volume"}
    energy = next(e for e in entries if e["id"] == "Energy")
    assert energy["controllable"] is False


def test_model_sensitivity_epsilon_param(client):
    body = client.get("/models/gross_profit/sensitivity", params={"epsilon": 0.01}).json()
    assert body["epsilon"] == pytest.approx(0.01)
    response = client.get("/models/gross_profit/sensitivity", params={"epsilon": -1})
    assert response.status_code == 422


def test_roce_sensitivity_skips_valueless_drivers(client):
    body = client.get("/models/roce/sensitivity").json()
    ids = {e["id"] for e in body["entries"]}
    assert ids == {"Fixed_Assets", "Working_Capital"}
    assert all(e["elasticity"] < 0 for e in body["entries"])


# ---------------------------------------------------------------------------
# rendering endpoints


def test_svg_endpoint(client):
    response = client.get("/models/gross_profit/svg")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/svg+xml")
    tree = ET.fromstring(response.text)
    assert tree.tag == "{http://www.w3.org/2000/svg}svg"
    assert "400 EUR" in response.text

    plain = client.get("/models/gross_profit/svg", params={"values": "false"})
    assert "400 EUR" not in plain.text


def test_dot_endpoint(client):
    response = client.get("/models/roce/dot")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/vnd.graphviz")
    assert response.text.startswith("digraph")


# ---------------------------------------------------------------------------
# sessions


def test_session_lifecycle(client):
    created = _create_session(client)
    sid = created["session"]
    assert created["model"] == "gross_profit"
    assert created["overrides"] == {}
    assert created["valuation"]["values"]["GP"] == pytest.approx(400)
    assert "Volume" in created["overridable"]

    fetched = client.get(f"/sessions/{sid}").json()
    assert fetched["valuation"]["values"]["GP"] == pytest.approx(400)


def test_session_with_base_bindings(client):
    created = _create_session(client, bindings={"Volume": 90})
    assert created["valuation"]["values"]["GP"] == pytest.approx(300)


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404


def test_session_override_patch(client):
    sid = _create_session(client)["session"]
    body = client.patch(f"/sessions/{sid}/overrides", json={"Volume": 110}).json()
    assert body["overrides"] == {"Volume": 110.0}
    assert body["valuation"]["values"]["GP"] == pytest.approx(500)
    root_entry = next(e for e in body["report"]["entries"] if e["id"] == "GP")
    assert root_entry["base"] == pytest.approx(400)
    assert root_entry["new"] == pytest.approx(500)
    assert root_entry["percent"] == pytest.approx(25)

    # null removes a single override
    body = client.patch(f"/sessions/{sid}/overrides", json={"Volume": None}).json()
    assert body["overrides"] == {}
    assert body["valuation"]["values"]["GP"] == pytest.approx(400)


def test_session_override_rejects_computed_nodes(client):
    sid = _create_session(client)["session"]
    response = client.patch(f"/sessions/{sid}/overrides", json={"REV": 5})
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "OverrideNotALeafDriver"


def test_session_override_rejects_unknown_indicator(client):
    sid = _create_session(client)["session"]
    response = client.patch(f"/sessions/{sid}/overrides", json={"Nope": 1})
    assert response.status_code == 404
    assert response.json()["detail"]["error"] == "UnknownIndicator"


def test_session_override_rolls_back_on_engine_error(client):
    sid = _create_session(client)["session"]
    client.patch(f"/sessions/{sid}/overrides", json={"Volume": 110})
    response = client.patch(f"/sessions/{sid}/overrides", json={"Volume": 0})
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "DivisionByZero"
    # prior state survived
    body = client.get(f"/sessions/{sid}").json()
    assert body["overrides"] == {"Volume": 110.0}
    assert body["valuation"]["values"]["GP"] == pytest.approx(500)


def test_session_reset(client):
    sid = _create_session(client)["session"]
    client.patch(f"/sessions/{sid}/overrides", json={"Volume": 110, "Price": 11})
    body = client.delete(f"/sessions/{sid}/overrides").json()
    assert body["overrides"] == {}
    assert body["valuation"]["values"]["GP"] == pytest.approx(400)


def test_session_sensitivity_uses_overrides(client):
    sid = _create_session(client)["session"]
    client.patch(f"/sessions/{sid}/overrides", json={"Volume": 110})
    body = client.get(f"/sessions/{sid}/sensitivity").json()
    volume = next(e for e in body["entries"] if e["id"] == "Volume")
    assert volume["base_value"] == pytest.approx(110)
    assert body["root_value"] == pytest.approx(500)


def test_session_create_rejects_unknown_model(client):
    response = client.post("/sessions", json={"model": "nothing"})
    assert response.status_code == 404


def test_session_create_rejects_unknown_fields(client):
    response = client.post("/sessions", json={"model": "gross_profit", "bogus": 1})
    assert response.status_code == 422
