"""JSON interchange format, schema-validated and round-trip safe.

Documents carry a required ``"vdmn_version": "1.0"`` field and are
checked against the packaged schema (``schema/vdmn-1.0.json``) before
conversion, so readers get positioned diagnostics instead of attribute
errors. ``emit_interchange`` writes keys in a fixed order and omits
empty optional fields; repeated emission of the same model is
byte-identical.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from .diagnostics import (
    P_BAD_UNIT,
    P_INVALID_JSON,
    P_SCHEMA_VIOLATION,
    ParseDiagnostic,
    Severity,
    SourceSpan,
)
from .dsl import ParseResult, _ParsedLink, _assign_orders
from .errors import ModelError
from .model import (
    Band,
    ClusterKind,
    ClusterSpec,
    Comparator,
    ComparativeValue,
    Decomposition,
    Development,
    FunctionRole,
    GatewayGuard,
    Indicator,
    IndicatorContent,
    IndicatorType,
    LevelKind,
    LevelSpec,
    LinkKind,
    Model,
    Operator,
    OperatorSpec,
    SubTreeRef,
    TreeCutRef,
    ValueType,
    build_model,
    result_type_sort_key,
)
from .units import parse_unit

VDMN_VERSION = "1.0"
SCHEMA_RESOURCE = "vdmn-1.0.json"


@lru_cache(maxsize=1)
def interchange_schema() -> dict:
    text = resources.files("vdmn.schema").joinpath(SCHEMA_RESOURCE).read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=1)
def _validator() -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(interchange_schema())


def _json_path(error: jsonschema.ValidationError) -> str:
    parts = ["$"]
    for piece in error.absolute_path:
        if isinstance(piece, int):
            parts.append(f"[{piece}]")
        else:
            parts.append(f".{piece}")
    return "".join(parts)


def parse_interchange(document: str, file: str = "<json>") -> ParseResult:
    """Parse a JSON interchange document; never raises on bad input."""
    diagnostics: list[ParseDiagnostic] = []
    top = SourceSpan(file, 1, 1)
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        diagnostics.append(
            ParseDiagnostic(
                Severity.ERROR,
                P_INVALID_JSON,
                f"invalid JSON: {exc.msg}",
                SourceSpan(file, exc.lineno, exc.colno),
            )
        )
        return ParseResult(None, tuple(diagnostics))

    errors = sorted(_validator().iter_errors(data), key=lambda e: str(list(e.absolute_path)))
    for err in errors:
        diagnostics.append(
            ParseDiagnostic(
                Severity.ERROR, P_SCHEMA_VIOLATION, f"{_json_path(err)}: {err.message}", top
            )
        )
    if errors:
        return ParseResult(None, tuple(diagnostics))

    indicators = []
    for entry in data["indicators"]:
        unit = None
        if "unit" in entry:
            try:
                unit = parse_unit(entry["unit"])
            except ValueError as exc:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR, P_BAD_UNIT, f"indicator '{entry['id']}': {exc}", top
                    )
                )
                continue
        comparative = None
        if "comparative" in entry:
            comparative = ComparativeValue(
                entry["comparative"]["result_type"], float(entry["comparative"]["value"])
            )
        indicators.append(
            Indicator(
                id=entry["id"],
                itype=IndicatorType(entry["type"]),
                role=FunctionRole(entry.get("role", "regular")),
                content=IndicatorContent(
                    title=entry.get("title") or entry["id"],
                    value_type=ValueType(entry["value_type"]) if "value_type" in entry else None,
                    metric_unit=unit,
                    data_attributes=entry.get("data_attributes", {}),
                    result_type_values={
                        k: float(v) for k, v in entry.get("values", {}).items()
                    },
                    comparative_value=comparative,
                    development=Development(entry["development"])
                    if "development" in entry
                    else None,
                    responsibility=entry.get("responsibility"),
                ),
            )
        )

    parsed_links = []
    for entry in data.get("links", ()):
        guard = None
        if "guard" in entry:
            g = entry["guard"]
            if g.get("default"):
                guard = GatewayGuard(is_default=True)
            else:
                guard = GatewayGuard(
                    selector_indicator=g.get("selector"),
                    comparator=Comparator(g["comparator"]),
                    threshold=float(g["threshold"]),
                )
        parsed_links.append(
            _ParsedLink(
                source=entry["source"],
                target=entry["target"],
                kind=LinkKind(entry["kind"]),
                order=entry.get("order"),
                guard=guard,
                span=top,
            )
        )

    operators = []
    for entry in data.get("operators", ()):
        operators.append(
            OperatorSpec(
                parent=entry["parent"],
                op=Operator(entry["op"]),
                function_name=entry.get("function"),
                function_params=entry.get("params"),
                selector=entry.get("selector"),
            )
        )

    levels = [
        LevelSpec(
            kind=LevelKind(entry["kind"]),
            bands=tuple(Band(b["name"], tuple(b["members"])) for b in entry["bands"]),
        )
        for entry in data.get("levels", ())
    ]
    clusters = [
        ClusterSpec(
            kind=ClusterKind(entry["kind"]),
            name=entry["name"],
            members=tuple(entry["members"]),
            attached_to=entry.get("attached_to"),
        )
        for entry in data.get("clusters", ())
    ]
    decomposition = Decomposition(
        sub_trees=tuple(
            SubTreeRef(s["boundary"], s["ref"])
            for s in data.get("decomposition", {}).get("sub_trees", ())
        ),
        tree_cuts=tuple(
            TreeCutRef(c["node"], c["label"])
            for c in data.get("decomposition", {}).get("tree_cuts", ())
        ),
    )

    if any(d.severity is Severity.ERROR for d in diagnostics):
        return ParseResult(None, tuple(diagnostics))

    try:
        model = build_model(
            name=data["name"],
            indicators=indicators,
            links=_assign_orders(parsed_links),
            operators=operators,
            levels=levels,
            clusters=clusters,
            decomposition=decomposition,
        )
    except (ModelError, ValueError) as exc:
        code = exc.code if isinstance(exc, ModelError) else P_SCHEMA_VIOLATION
        diagnostics.append(ParseDiagnostic(Severity.ERROR, code, str(exc), top))
        return ParseResult(None, tuple(diagnostics))
    return ParseResult(model, tuple(diagnostics))


def parse_interchange_file(path) -> ParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse_interchange(fh.read(), file=str(path))


def model_to_document(model: Model) -> dict:
    """Plain-dict form of the model, keys in canonical order."""
    doc: dict = {"vdmn_version": VDMN_VERSION, "name": model.name}
    doc["indicators"] = [_indicator_entry(ind) for ind in model.indicators]
    if model.links:
        doc["links"] = [_link_entry(link) for link in model.links]
    if model.operators:
        doc["operators"] = [_operator_entry(spec) for spec in model.operators]
    if model.levels:
        doc["levels"] = [
            {
                "kind": level.kind.value,
                "bands": [{"name": b.name, "members": list(b.members)} for b in level.bands],
            }
            for level in model.levels
        ]
    if model.clusters:
        doc["clusters"] = [
            {
                "kind": c.kind.value,
                "name": c.name,
                "members": list(c.members),
                **({"attached_to": c.attached_to} if c.attached_to else {}),
            }
            for c in model.clusters
        ]
    if model.decomposition.sub_trees or model.decomposition.tree_cuts:
        decomp: dict = {}
        if model.decomposition.sub_trees:
            decomp["sub_trees"] = [
                {"boundary": s.boundary, "ref": s.ref} for s in model.decomposition.sub_trees
            ]
        if model.decomposition.tree_cuts:
            decomp["tree_cuts"] = [
                {"node": c.node, "label": c.label} for c in model.decomposition.tree_cuts
            ]
        doc["decomposition"] = decomp
    return doc


def _indicator_entry(ind: Indicator) -> dict:
    entry: dict = {"id": ind.id, "type": ind.itype.value}
    if ind.role is not FunctionRole.REGULAR:
        entry["role"] = ind.role.value
    c = ind.content
    entry["title"] = c.title
    if c.value_type is not None:
        entry["value_type"] = c.value_type.value
    if c.metric_unit is not None:
        entry["unit"] = c.metric_unit.text()
    if c.data_attributes:
        entry["data_attributes"] = {k: c.data_attributes[k] for k in sorted(c.data_attributes)}
    if c.result_type_values:
        entry["values"] = {
            k: c.result_type_values[k]
            for k in sorted(c.result_type_values, key=result_type_sort_key)
        }
    if c.comparative_value is not None:
        entry["comparative"] = {
            "result_type": c.comparative_value.result_type,
            "value": c.comparative_value.value,
        }
    if c.development is not None:
        entry["development"] = c.development.value
    if c.responsibility is not None:
        entry["responsibility"] = c.responsibility
    return entry


def _link_entry(link) -> dict:
    entry = {"source": link.source, "target": link.target, "kind": link.kind.value,
             "order": link.order}
    if link.guard is not None:
        if link.guard.is_default:
            entry["guard"] = {"default": True}
        else:
            guard: dict = {}
            if link.guard.selector_indicator is not None:
                guard["selector"] = link.guard.selector_indicator
            guard["comparator"] = link.guard.comparator.value
            guard["threshold"] = link.guard.threshold
            entry["guard"] = guard
    return entry


def _operator_entry(spec: OperatorSpec) -> dict:
    entry = {"parent": spec.parent, "op": spec.op.value}
    if spec.function_name is not None:
        entry["function"] = spec.function_name
    if spec.function_params:
        entry["params"] = {k: spec.function_params[k] for k in sorted(spec.function_params)}
    if spec.selector is not None:
        entry["selector"] = spec.selector
    return entry


def emit_interchange(model: Model) -> str:
    return json.dumps(model_to_document(model), indent=2, ensure_ascii=False) + "\n"
