"""Inventory of notation constructs used by a model.

The notation defines 34 constructs across three dimensions: what an
indicator is (types, roles, content slots), how indicators connect
(link kinds, operators), and how a tree is organized at scale (levels,
clusters, decomposition). ``construct_inventory`` reports which of the
34 a given model exercises; the validator's coverage report aggregates
it across a corpus.
"""

from __future__ import annotations

from .model import (
    ClusterKind,
    FunctionRole,
    IndicatorType,
    LevelKind,
    LinkKind,
    Model,
    Operator,
)

INDICATOR_TYPE_TAGS = {
    IndicatorType.KEY_BUSINESS: "KeyBusinessIndicator",
    IndicatorType.FINANCIAL: "FinancialIndicator",
    IndicatorType.VALUE_DRIVER: "ValueDriver",
    IndicatorType.EXTERNAL: "ExternalIndicator",
    IndicatorType.SUBSIDIARY_RESULT: "SubsidiaryResult",
}

ROLE_TAGS = {
    FunctionRole.KEY_VALUE_INDICATOR: "KeyValueIndicator",
    FunctionRole.INPUT: "InputCalculation",
    FunctionRole.CALCULATION: "InputCalculation",
}

CONTENT_TAGS = (
    "Title",
    "ValueType",
    "MetricUnit",
    "DataAttributes",
    "ResultType",
    "ComparativeValue",
    "Development",
    "Responsibility",
)

LINK_TAGS = {
    LinkKind.DIRECT: "DirectAnalyticalLink",
    LinkKind.INDIRECT: "IndirectAnalyticalLink",
    LinkKind.LOGICAL_ALLOCATION: "LogicalAllocation",
}

OPERATOR_TAGS = {
    Operator.LOGICAL: "Logical",
    Operator.ADD: "Addition",
    Operator.SUBTRACT: "Subtraction",
    Operator.MULTIPLY: "Multiplication",
    Operator.DIVIDE: "Division",
    Operator.FUNCTION: "Function",
    Operator.GATEWAY: "Gateway",
}

LEVEL_TAGS = {
    LevelKind.INDICATOR_TYPE: "IndicatorTypeLevel",
    LevelKind.BRANCH_LEVEL: "BranchLevel",
    LevelKind.TIME_HORIZON: "TimeHorizon",
}

CLUSTER_TAGS = {
    ClusterKind.VALUE_DRIVER_GROUP: "ValueDriverGroup",
    ClusterKind.BUSINESS_MODEL: "BusinessModel",
    ClusterKind.FUNCTIONS: "Functions",
    ClusterKind.CALCULATION: "Calculation",
}

DECOMPOSITION_TAGS = ("SubTree", "TreeCut")

ALL_CONSTRUCTS: frozenset[str] = frozenset(
    list(INDICATOR_TYPE_TAGS.values())
    + list(ROLE_TAGS.values())
    + list(CONTENT_TAGS)
    + list(LINK_TAGS.values())
    + list(OPERATOR_TAGS.values())
    + list(LEVEL_TAGS.values())
    + list(CLUSTER_TAGS.values())
    + list(DECOMPOSITION_TAGS)
)


def construct_inventory(model: Model) -> frozenset[str]:
    """Tags of every construct the model exercises.

    Title is always present (every indicator carries one). Operators
    count only when declared: a parent falling back to the logical
    default does not, by itself, put Logical in the inventory.
    """
    tags: set[str] = set()
    for ind in model.indicators:
        tags.add(INDICATOR_TYPE_TAGS[ind.itype])
        role_tag = ROLE_TAGS.get(ind.role)
        if role_tag:
            tags.add(role_tag)
        tags.add("Title")
        content = ind.content
        if content.value_type is not None:
            tags.add("ValueType")
        if content.metric_unit is not None:
            tags.add("MetricUnit")
        if content.data_attributes:
            tags.add("DataAttributes")
        if content.result_type_values:
            tags.add("ResultType")
        if content.comparative_value is not None:
            tags.add("ComparativeValue")
        if content.development is not None:
            tags.add("Development")
        if content.responsibility is not None:
            tags.add("Responsibility")
    for link in model.links:
        tags.add(LINK_TAGS[link.kind])
    for spec in model.operators:
        tags.add(OPERATOR_TAGS[spec.op])
    for level in model.levels:
        tags.add(LEVEL_TAGS[level.kind])
    for cluster in model.clusters:
        tags.add(CLUSTER_TAGS[cluster.kind])
    if model.decomposition.sub_trees:
        tags.add("SubTree")
    if model.decomposition.tree_cuts:
        tags.add("TreeCut")
    return frozenset(tags)
