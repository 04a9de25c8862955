"""Rule engine for model quality checks.

Structural impossibilities are errors; modelling-guidance violations are
warnings. Each rule owns one stable code (V001...) so callers can assert
on codes, whitelist expected findings, or gate builds. ``validate`` is
pure and returns diagnostics in a deterministic order: by code, then by
subject ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .constructs import ALL_CONSTRUCTS, construct_inventory
from .diagnostics import Severity, ValidationDiagnostic
from .errors import InvalidArgument
from .model import (
    ARITHMETIC_OPERATORS,
    ClusterKind,
    FunctionRole,
    IndicatorType,
    Model,
    Operator,
)

MAX_RECOMMENDED_DEPTH = 4
UNSTRUCTURED_SIZE_LIMIT = 10


def _v001_operator_arity(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for parent, spec in sorted(model.operator_by_parent.items()):
        links = model.child_links(parent)
        if spec.op in ARITHMETIC_OPERATORS and len(links) < 2:
            yield (parent,), (
                f"operator '{spec.op.value}' on '{parent}' needs at least 2 analytical "
                f"children, found {len(links)}"
            )
        elif spec.op is Operator.FUNCTION and len(links) < 1:
            yield (parent,), f"function operator on '{parent}' needs at least 1 analytical child"
        elif spec.op is Operator.GATEWAY:
            guarded = [l for l in links if l.guard is not None]
            if len(guarded) < 2:
                yield (parent,), (
                    f"gateway '{parent}' needs at least 2 guarded children, "
                    f"found {len(guarded)}"
                )


def _v002_gateway_shape(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for parent, spec in sorted(model.operator_by_parent.items()):
        if spec.op is not Operator.GATEWAY:
            continue
        links = model.child_links(parent)
        defaults = [l for l in links if l.guard is not None and l.guard.is_default]
        if len(defaults) != 1:
            yield (parent,), (
                f"gateway '{parent}' needs exactly one default guard, found {len(defaults)}"
            )
        selectors = {spec.selector} if spec.selector else set()
        for link in links:
            if link.guard is not None and link.guard.selector_indicator is not None:
                selectors.add(link.guard.selector_indicator)
        if not selectors:
            yield (parent,), f"gateway '{parent}' has no selector indicator"
        for selector in sorted(selectors):
            if selector == parent or selector in model.descendants_of(parent):
                yield (parent, selector), (
                    f"gateway '{parent}' selector '{selector}' is not evaluable before "
                    f"the gateway (it is the gateway or one of its descendants)"
                )


def _v003_cut_with_children(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for node in sorted(model.cut_labels):
        children = model.analytical_children(node)
        if children:
            yield (node,), (
                f"cut indicator '{node}' still has analytical children: "
                + ", ".join(children)
            )


def _v004_allocation_into_arithmetic_leaf(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    targets = sorted({l.target for l in model.logical_links})
    for target in targets:
        spec = model.operator_by_parent.get(target)
        if spec is None or spec.op not in ARITHMETIC_OPERATORS:
            continue
        if not model.analytical_children(target):
            yield (target,), (
                f"'{target}' receives only logical allocations but declares arithmetic "
                f"operator '{spec.op.value}'; it cannot be computed"
            )


def _v005_depth(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    depth = model.hierarchy_depth()
    if depth > MAX_RECOMMENDED_DEPTH:
        yield (model.root.id,), (
            f"hierarchy has {depth} levels; more than {MAX_RECOMMENDED_DEPTH} "
            f"significantly increases complexity"
        )


def _v006_unstructured(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    if len(model.indicators) > UNSTRUCTURED_SIZE_LIMIT and not model.levels and not model.clusters:
        yield (), (
            f"model has {len(model.indicators)} indicators but no levels or clusters; "
            f"consider organising it"
        )


def _v007_key_value_role(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for ind in model.indicators:
        if (
            ind.role is FunctionRole.KEY_VALUE_INDICATOR
            and ind.itype is not IndicatorType.VALUE_DRIVER
        ):
            yield (ind.id,), (
                f"key value role on '{ind.id}' ({ind.itype.value}); the role highlights "
                f"value drivers"
            )


def _v008_unlinked_cluster_member(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    linked = {l.source for l in model.analytical_links} | {
        l.target for l in model.analytical_links
    }
    seen: set[str] = set()
    for cluster in model.clusters:
        for member in cluster.members:
            if member not in linked and member not in seen:
                seen.add(member)
                yield (member,), (
                    f"'{member}' is grouped in cluster '{cluster.name}' but has no "
                    f"analytical link; informal groupings are not recommended"
                )


def _v009_unit_consistency(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for parent, spec in sorted(model.operator_by_parent.items()):
        links = model.child_links(parent)
        if not links:
            continue
        child_units = [model.indicator(l.source).content.metric_unit for l in links]
        if spec.op in (Operator.ADD, Operator.SUBTRACT):
            declared = [u for u in child_units if u is not None]
            if len(declared) >= 2:
                first = declared[0]
                for other in declared[1:]:
                    if not first.same_dimension(other):
                        yield (parent,), (
                            f"children of '{parent}' ({spec.op.value}) mix units "
                            f"'{first.text()}' and '{other.text()}'"
                        )
                        break
        elif spec.op in (Operator.MULTIPLY, Operator.DIVIDE):
            parent_unit = model.indicator(parent).content.metric_unit
            if parent_unit is None or any(u is None for u in child_units):
                continue
            derived = child_units[0]
            for other in child_units[1:]:
                derived = (
                    derived.multiply(other)
                    if spec.op is Operator.MULTIPLY
                    else derived.divide(other)
                )
            if not derived.same_dimension(parent_unit):
                yield (parent,), (
                    f"'{parent}' declares unit '{parent_unit.text()}' but its children "
                    f"derive '{derived.text()}' under {spec.op.value}"
                )


def _v010_defaulted_operator(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for ind in model.indicators:
        spec, defaulted = model.effective_operator(ind.id)
        if spec is not None and defaulted:
            yield (ind.id,), (
                f"'{ind.id}' has analytical children but no operator; it defaults to "
                f"logical, which limits usability"
            )


def _v011_subsidiary_on_spine(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    root_id = model.root.id
    for ind in model.indicators:
        if ind.itype is not IndicatorType.SUBSIDIARY_RESULT:
            continue
        node = ind.id
        seen = set()
        while node is not None and node not in seen:
            seen.add(node)
            node = model.direct_parent(node)
            if node == root_id:
                yield (ind.id,), (
                    f"subsidiary result '{ind.id}' sits on the direct spine of the "
                    f"root; attach it with an indirect link instead"
                )
                break


def _v012_group_attachment(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for cluster in model.clusters:
        if cluster.kind is not ClusterKind.VALUE_DRIVER_GROUP:
            continue
        if cluster.attached_to is None:
            yield (),  (
                f"value driver group '{cluster.name}' declares no indicator it "
                f"influences (attached_to missing)"
            )
        elif not model.reaches_root(cluster.attached_to):
            yield (cluster.attached_to,), (
                f"value driver group '{cluster.name}' attaches to "
                f"'{cluster.attached_to}', which has no analytical path to the root"
            )


def _v013_external_key_value(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for ind in model.indicators:
        if (
            ind.itype is IndicatorType.EXTERNAL
            and ind.role is FunctionRole.KEY_VALUE_INDICATOR
        ):
            yield (ind.id,), (
                f"external indicator '{ind.id}' is marked key value, but external "
                f"factors cannot be actively controlled"
            )


def _v014_stored_value_on_computed(model: Model) -> Iterable[tuple[tuple[str, ...], str]]:
    for ind in model.indicators:
        if not ind.content.result_type_values or model.is_cut(ind.id):
            continue
        spec, _ = model.effective_operator(ind.id)
        if spec is not None and spec.op is not Operator.LOGICAL:
            yield (ind.id,), (
                f"'{ind.id}' stores result values but is computed by "
                f"'{spec.op.value}'; the stored values are ignored during evaluation"
            )


_Rule = Callable[[Model], Iterable[tuple[tuple[str, ...], str]]]

RULES: tuple[tuple[str, Severity, _Rule], ...] = (
    ("V001", Severity.ERROR, _v001_operator_arity),
    ("V002", Severity.ERROR, _v002_gateway_shape),
    ("V003", Severity.ERROR, _v003_cut_with_children),
    ("V004", Severity.ERROR, _v004_allocation_into_arithmetic_leaf),
    ("V005", Severity.WARNING, _v005_depth),
    ("V006", Severity.WARNING, _v006_unstructured),
    ("V007", Severity.WARNING, _v007_key_value_role),
    ("V008", Severity.WARNING, _v008_unlinked_cluster_member),
    ("V009", Severity.WARNING, _v009_unit_consistency),
    ("V010", Severity.WARNING, _v010_defaulted_operator),
    ("V011", Severity.WARNING, _v011_subsidiary_on_spine),
    ("V012", Severity.ERROR, _v012_group_attachment),
    ("V013", Severity.WARNING, _v013_external_key_value),
    ("V014", Severity.WARNING, _v014_stored_value_on_computed),
)


def validate(model: Model) -> list[ValidationDiagnostic]:
    """All rule findings for the model, deterministically ordered."""
    diagnostics: list[ValidationDiagnostic] = []
    for code, severity, rule in RULES:
        findings = sorted(rule(model), key=lambda f: f[0])
        for subjects, message in findings:
            subjects = tuple(s for s in subjects if s)
            diagnostics.append(ValidationDiagnostic(code, severity, subjects, message))
    return diagnostics


def has_errors(diagnostics: Sequence[ValidationDiagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


@dataclass(frozen=True)
class CoverageReport:
    """Construct usage counts across a corpus of models."""

    counts: dict[str, int]
    unused: tuple[str, ...]
    model_count: int

    def to_json_dict(self) -> dict:
        return {
            "model_count": self.model_count,
            "counts": {tag: self.counts[tag] for tag in sorted(self.counts)},
            "unused": list(self.unused),
        }


def coverage_report(models: Sequence[Model]) -> CoverageReport:
    """How many corpus models exercise each of the 34 constructs."""
    if not models:
        raise InvalidArgument("coverage_report needs at least one model")
    counts = {tag: 0 for tag in sorted(ALL_CONSTRUCTS)}
    for model in models:
        for tag in construct_inventory(model):
            counts[tag] += 1
    unused = tuple(tag for tag in sorted(counts) if counts[tag] == 0)
    return CoverageReport(counts=counts, unused=unused, model_count=len(models))
