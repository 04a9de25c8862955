"""Value driver tree modelling: parse, validate, evaluate, restructure, render.

The package is organized as:

- ``vdmn.model``       immutable tree structures and ``build_model``
- ``vdmn.dsl``         the textual ``.vdt`` language
- ``vdmn.interchange`` the JSON document form plus its schema
- ``vdmn.validator``   structural findings V001..V014 and corpus coverage
- ``vdmn.engine``      evaluation, what-if deltas, sensitivity ranking
- ``vdmn.transform``   sub-tree extraction/merge and tree cuts
- ``vdmn.render``      DOT and SVG output
- ``vdmn.registry``    named model stores, including the packaged demos
- ``vdmn.service``     FastAPI application (``create_app``)
- ``vdmn.cli``         command-line front over all of the above
"""

from .constructs import ALL_CONSTRUCTS, construct_inventory
from .diagnostics import ParseDiagnostic, Severity, SourceSpan, ValidationDiagnostic
from .dsl import ParseResult, emit_text, parse_file, parse_text
from .engine import (
    DEFAULT_REGISTRY,
    Bindings,
    FunctionRegistry,
    NotComputed,
    NotComputedReason,
    SensitivityReport,
    Valuation,
    WhatIfReport,
    derived_development,
    evaluate,
    overridable_ids,
    sensitivity,
    what_if,
)
from .errors import (
    ConflictingBinding,
    CycleDetected,
    DivisionByZero,
    EngineError,
    GuardUnresolvable,
    InvalidArgument,
    LayoutOverflow,
    ModelError,
    NonSeparable,
    UnknownReference,
    VdmnError,
)
from .interchange import (
    VDMN_VERSION,
    emit_interchange,
    interchange_schema,
    model_to_document,
    parse_interchange,
    parse_interchange_file,
)
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
    Link,
    LinkKind,
    Model,
    Operator,
    OperatorSpec,
    SubTreeRef,
    TreeCutRef,
    ValueType,
    build_model,
)
from .registry import ModelRegistry, corpus_expectations, load_corpus, load_dir
from .render import layout_model, style_for, to_dot, to_svg
from .transform import apply_tree_cut, extract_subtree, merge_subtree
from .units import Unit, parse_unit
from .validator import CoverageReport, coverage_report, has_errors, validate

__version__ = "1.0.0"

__all__ = [
    "ALL_CONSTRUCTS",
    "Band",
    "Bindings",
    "ClusterKind",
    "ClusterSpec",
    "Comparator",
    "ComparativeValue",
    "ConflictingBinding",
    "CoverageReport",
    "CycleDetected",
    "DEFAULT_REGISTRY",
    "Decomposition",
    "Development",
    "DivisionByZero",
    "EngineError",
    "FunctionRegistry",
    "FunctionRole",
    "GatewayGuard",
    "GuardUnresolvable",
    "Indicator",
    "IndicatorContent",
    "IndicatorType",
    "InvalidArgument",
    "LayoutOverflow",
    "LevelKind",
    "LevelSpec",
    "Link",
    "LinkKind",
    "Model",
    "ModelError",
    "ModelRegistry",
    "NonSeparable",
    "NotComputed",
    "NotComputedReason",
    "Operator",
    "OperatorSpec",
    "ParseDiagnostic",
    "ParseResult",
    "SensitivityReport",
    "Severity",
    "SourceSpan",
    "SubTreeRef",
    "TreeCutRef",
    "Unit",
    "UnknownReference",
    "Valuation",
    "ValueType",
    "ValidationDiagnostic",
    "VdmnError",
    "WhatIfReport",
    "VDMN_VERSION",
    "apply_tree_cut",
    "build_model",
    "construct_inventory",
    "corpus_expectations",
    "coverage_report",
    "derived_development",
    "emit_interchange",
    "emit_text",
    "evaluate",
    "extract_subtree",
    "has_errors",
    "interchange_schema",
    "layout_model",
    "load_corpus",
    "load_dir",
    "merge_subtree",
    "model_to_document",
    "overridable_ids",
    "parse_file",
    "parse_interchange",
    "parse_interchange_file",
    "parse_text",
    "parse_unit",
    "sensitivity",
    "style_for",
    "to_dot",
    "to_svg",
    "validate",
    "what_if",
    "__version__",
]
