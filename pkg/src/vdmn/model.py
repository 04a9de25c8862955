"""Typed in-memory representation of a value driver tree.

A model is a set of indicators wired child-to-parent by analytical links
(direct or indirect) and optionally annotated with logical allocations,
per-parent operators, level bands, clusters, and decomposition records.
``build_model`` is the only sanctioned constructor: it checks every
structural invariant (single root, acyclicity, direct-link forest, resolved
references) and normalizes collection ordering so that equal models compare
equal and serialize identically. Models are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from heapq import heappop, heappush
from typing import Iterable, Mapping

from .errors import (
    BandOverlap,
    CycleDetected,
    DuplicateCluster,
    DuplicateDecompositionEntry,
    DuplicateGuardDefault,
    DuplicateId,
    DuplicateLevelKind,
    DuplicateLink,
    DuplicateOperator,
    DuplicateOrder,
    EmptyCluster,
    InvalidId,
    MultipleDirectParents,
    MultipleRoots,
    NoRoot,
    UnknownReference,
)
from .units import Unit

ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class IndicatorType(str, Enum):
    KEY_BUSINESS = "key_business"
    FINANCIAL = "financial"
    VALUE_DRIVER = "value_driver"
    EXTERNAL = "external"
    SUBSIDIARY_RESULT = "subsidiary_result"


class FunctionRole(str, Enum):
    KEY_VALUE_INDICATOR = "key_value"
    REGULAR = "regular"
    INPUT = "input"
    CALCULATION = "calculation"


class ValueType(str, Enum):
    QUANTITATIVE = "quantitative"
    QUALITATIVE = "qualitative"
    LEADING = "leading"
    LAGGING = "lagging"


class Development(str, Enum):
    UP = "up"
    FLAT = "flat"
    DOWN = "down"
    DERIVED = "derived"


class LinkKind(str, Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"
    LOGICAL_ALLOCATION = "logical_allocation"

    @property
    def is_analytical(self) -> bool:
        return self is not LinkKind.LOGICAL_ALLOCATION


class Operator(str, Enum):
    LOGICAL = "logical"
    ADD = "add"
    SUBTRACT = "subtract"
    MULTIPLY = "multiply"
    DIVIDE = "divide"
    FUNCTION = "function"
    GATEWAY = "gateway"


ARITHMETIC_OPERATORS = frozenset(
    {Operator.ADD, Operator.SUBTRACT, Operator.MULTIPLY, Operator.DIVIDE}
)

OPERATOR_SYMBOLS = {
    Operator.LOGICAL: "L",
    Operator.ADD: "+",
    Operator.SUBTRACT: "-",
    Operator.MULTIPLY: "*",
    Operator.DIVIDE: ":",
    Operator.FUNCTION: "fx",
    Operator.GATEWAY: "X",
}


class Comparator(str, Enum):
    LT = "<"
    LE = "<="
    EQ = "=="
    GE = ">="
    GT = ">"
    NE = "!="

    def matches(self, value: float, threshold: float) -> bool:
        if self is Comparator.LT:
            return value < threshold
        if self is Comparator.LE:
            return value <= threshold
        if self is Comparator.EQ:
            return value == threshold
        if self is Comparator.GE:
            return value >= threshold
        if self is Comparator.GT:
            return value > threshold
        return value != threshold


# Result types partition indicator values into planning perspectives.
# The four below are well known; any other nonempty token is accepted.
RESULT_ACTUAL = "actual"
RESULT_BUDGET = "budget"
RESULT_FORECAST = "forecast"
RESULT_PLAN = "plan"
KNOWN_RESULT_TYPES = (RESULT_ACTUAL, RESULT_BUDGET, RESULT_FORECAST, RESULT_PLAN)


def result_type_sort_key(result_type: str) -> tuple[int, str]:
    try:
        return (KNOWN_RESULT_TYPES.index(result_type), result_type)
    except ValueError:
        return (len(KNOWN_RESULT_TYPES), result_type)


@dataclass(frozen=True)
class ComparativeValue:
    """A second value to compare against, e.g. last year's actual."""

    result_type: str
    value: float


@dataclass(frozen=True)
class IndicatorContent:
    title: str
    value_type: ValueType | None = None
    metric_unit: Unit | None = None
    data_attributes: Mapping[str, str] = field(default_factory=dict)
    result_type_values: Mapping[str, float] = field(default_factory=dict)
    comparative_value: ComparativeValue | None = None
    development: Development | None = None
    responsibility: str | None = None

    def __post_init__(self):
        if not self.title:
            raise ValueError("indicator title must be nonempty")
        object.__setattr__(self, "data_attributes", dict(self.data_attributes))
        object.__setattr__(
            self, "result_type_values", {k: float(v) for k, v in self.result_type_values.items()}
        )


@dataclass(frozen=True)
class Indicator:
    id: str
    itype: IndicatorType
    role: FunctionRole = FunctionRole.REGULAR
    content: IndicatorContent = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.content is None:
            object.__setattr__(self, "content", IndicatorContent(title=self.id))


@dataclass(frozen=True)
class GatewayGuard:
    """Branch condition on a link into a gateway parent.

    Either a comparison of the selector indicator's value against a
    threshold, or the single default branch taken when nothing matches.
    """

    selector_indicator: str | None = None
    comparator: Comparator | None = None
    threshold: float | None = None
    is_default: bool = False

    def __post_init__(self):
        if self.is_default:
            if self.comparator is not None or self.threshold is not None:
                raise ValueError("a default guard carries no comparator or threshold")
        else:
            if self.comparator is None or self.threshold is None:
                raise ValueError("a non-default guard needs a comparator and threshold")


@dataclass(frozen=True)
class Link:
    source: str  # child
    target: str  # parent
    kind: LinkKind
    order: int = 0
    guard: GatewayGuard | None = None

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("link order must be >= 0")


@dataclass(frozen=True)
class OperatorSpec:
    parent: str
    op: Operator
    function_name: str | None = None
    function_params: Mapping[str, float] | None = None
    selector: str | None = None

    def __post_init__(self):
        if self.op is Operator.FUNCTION and not self.function_name:
            raise ValueError("function operators need a function name")
        if self.op is not Operator.FUNCTION and self.function_name:
            raise ValueError("only function operators carry a function name")
        if self.function_params is not None:
            object.__setattr__(
                self, "function_params", {k: float(v) for k, v in self.function_params.items()}
            )
        if self.selector is not None and self.op is not Operator.GATEWAY:
            raise ValueError("only gateway operators carry a selector")


class LevelKind(str, Enum):
    INDICATOR_TYPE = "indicator_type"
    BRANCH_LEVEL = "branch_level"
    TIME_HORIZON = "time_horizon"


class ClusterKind(str, Enum):
    VALUE_DRIVER_GROUP = "value_driver_group"
    BUSINESS_MODEL = "business_model"
    FUNCTIONS = "functions"
    CALCULATION = "calculation"


@dataclass(frozen=True)
class Band:
    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))


@dataclass(frozen=True)
class LevelSpec:
    kind: LevelKind
    bands: tuple[Band, ...]

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(sorted(self.bands, key=lambda b: b.name)))


@dataclass(frozen=True)
class ClusterSpec:
    kind: ClusterKind
    name: str
    members: tuple[str, ...]
    attached_to: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))


@dataclass(frozen=True)
class SubTreeRef:
    boundary: str
    ref: str


@dataclass(frozen=True)
class TreeCutRef:
    node: str
    label: str


@dataclass(frozen=True)
class Decomposition:
    sub_trees: tuple[SubTreeRef, ...] = ()
    tree_cuts: tuple[TreeCutRef, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "sub_trees", tuple(sorted(self.sub_trees, key=lambda s: s.boundary))
        )
        object.__setattr__(self, "tree_cuts", tuple(sorted(self.tree_cuts, key=lambda c: c.node)))


_KIND_RANK = {LinkKind.DIRECT: 0, LinkKind.INDIRECT: 1, LinkKind.LOGICAL_ALLOCATION: 2}
_LEVEL_RANK = {k: i for i, k in enumerate(LevelKind)}
_CLUSTER_RANK = {k: i for i, k in enumerate(ClusterKind)}


@dataclass(frozen=True)
class Model:
    name: str
    indicators: tuple[Indicator, ...]
    links: tuple[Link, ...]
    operators: tuple[OperatorSpec, ...] = ()
    levels: tuple[LevelSpec, ...] = ()
    clusters: tuple[ClusterSpec, ...] = ()
    decomposition: Decomposition = Decomposition()

    # -- lookup ---------------------------------------------------------

    @cached_property
    def by_id(self) -> dict[str, Indicator]:
        return {ind.id: ind for ind in self.indicators}

    def indicator(self, indicator_id: str) -> Indicator:
        try:
            return self.by_id[indicator_id]
        except KeyError:
            raise UnknownReference(indicator_id) from None

    def has(self, indicator_id: str) -> bool:
        return indicator_id in self.by_id

    @cached_property
    def root(self) -> Indicator:
        for ind in self.indicators:
            if ind.itype is IndicatorType.KEY_BUSINESS:
                return ind
        raise NoRoot()

    @cached_property
    def analytical_links(self) -> tuple[Link, ...]:
        return tuple(l for l in self.links if l.kind.is_analytical)

    @cached_property
    def logical_links(self) -> tuple[Link, ...]:
        return tuple(l for l in self.links if not l.kind.is_analytical)

    @cached_property
    def _children(self) -> dict[str, tuple[Link, ...]]:
        children: dict[str, list[Link]] = {ind.id: [] for ind in self.indicators}
        for link in self.analytical_links:
            children[link.target].append(link)
        return {pid: tuple(sorted(ls, key=lambda l: l.order)) for pid, ls in children.items()}

    @cached_property
    def _parents(self) -> dict[str, tuple[Link, ...]]:
        parents: dict[str, list[Link]] = {ind.id: [] for ind in self.indicators}
        for link in self.analytical_links:
            parents[link.source].append(link)
        return {cid: tuple(sorted(ls, key=lambda l: l.target)) for cid, ls in parents.items()}

    def child_links(self, parent_id: str) -> tuple[Link, ...]:
        self.indicator(parent_id)
        return self._children[parent_id]

    def analytical_children(self, parent_id: str) -> tuple[str, ...]:
        """Ids of the parent's analytical children in declared order."""
        return tuple(l.source for l in self.child_links(parent_id))

    def parent_links(self, child_id: str) -> tuple[Link, ...]:
        self.indicator(child_id)
        return self._parents[child_id]

    def direct_parent(self, child_id: str) -> str | None:
        for link in self.parent_links(child_id):
            if link.kind is LinkKind.DIRECT:
                return link.target
        return None

    @cached_property
    def operator_by_parent(self) -> dict[str, OperatorSpec]:
        return {spec.parent: spec for spec in self.operators}

    def effective_operator(self, parent_id: str) -> tuple[OperatorSpec | None, bool]:
        """Declared operator, or the logical default for linked parents.

        Returns (spec, defaulted): spec is None for leaves; defaulted is
        True when a parent with analytical children lacks a declaration.
        """
        spec = self.operator_by_parent.get(parent_id)
        if spec is not None:
            return spec, False
        if self._children[parent_id]:
            return OperatorSpec(parent=parent_id, op=Operator.LOGICAL), True
        return None, False

    @cached_property
    def cut_labels(self) -> dict[str, str]:
        return {cut.node: cut.label for cut in self.decomposition.tree_cuts}

    @cached_property
    def subtree_refs(self) -> dict[str, str]:
        return {sub.boundary: sub.ref for sub in self.decomposition.sub_trees}

    def is_cut(self, indicator_id: str) -> bool:
        return indicator_id in self.cut_labels

    # -- traversal ------------------------------------------------------

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """All indicator ids, children before parents, ties by id."""
        remaining = {ind.id: len(self._children[ind.id]) for ind in self.indicators}
        heap = [iid for iid, n in remaining.items() if n == 0]
        heap.sort()
        order: list[str] = []
        while heap:
            iid = heappop(heap)
            order.append(iid)
            for link in self._parents[iid]:
                remaining[link.target] -= 1
                if remaining[link.target] == 0:
                    heappush(heap, link.target)
        return tuple(order)

    def descendants_of(self, indicator_id: str) -> set[str]:
        """Ids reachable downward from the indicator (excluding itself)."""
        self.indicator(indicator_id)
        seen: set[str] = set()
        stack = [l.source for l in self._children[indicator_id]]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(l.source for l in self._children[nid])
        return seen

    def ancestors_of(self, indicator_id: str) -> set[str]:
        """Ids reachable upward from the indicator (excluding itself)."""
        self.indicator(indicator_id)
        seen: set[str] = set()
        stack = [l.target for l in self._parents[indicator_id]]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(l.target for l in self._parents[nid])
        return seen

    def reaches_root(self, indicator_id: str) -> bool:
        return indicator_id == self.root.id or self.root.id in self.ancestors_of(indicator_id)

    def hierarchy_depth(self) -> int:
        """Node count of the longest analytical path ending at the root."""
        depth: dict[str, int] = {}
        for iid in self.topological_order:
            children = self._children[iid]
            depth[iid] = 1 + max((depth[l.source] for l in children), default=0)
        return depth[self.root.id]


def build_model(
    name: str,
    indicators: Iterable[Indicator],
    links: Iterable[Link] = (),
    operators: Iterable[OperatorSpec] = (),
    levels: Iterable[LevelSpec] = (),
    clusters: Iterable[ClusterSpec] = (),
    decomposition: Decomposition | None = None,
) -> Model:
    """Assemble and check a model from parsed or programmatic parts.

    Raises a ModelError subclass naming the first violated invariant;
    otherwise returns an immutable, canonically ordered Model.
    """
    indicators = tuple(indicators)
    links = tuple(links)
    operators = tuple(operators)
    levels = tuple(levels)
    clusters = tuple(clusters)
    decomposition = decomposition or Decomposition()

    ids: set[str] = set()
    for ind in indicators:
        if not ID_RE.match(ind.id):
            raise InvalidId(ind.id)
        if ind.id in ids:
            raise DuplicateId(ind.id)
        ids.add(ind.id)

    roots = [ind.id for ind in indicators if ind.itype is IndicatorType.KEY_BUSINESS]
    if not roots:
        raise NoRoot()
    if len(roots) > 1:
        raise MultipleRoots(tuple(roots))
    root_id = roots[0]

    def check_ref(iid: str, context: str) -> None:
        if iid not in ids:
            raise UnknownReference(iid, context)

    for link in links:
        check_ref(link.source, "link source")
        check_ref(link.target, "link target")
        if link.guard is not None and link.guard.selector_indicator is not None:
            check_ref(link.guard.selector_indicator, "guard selector")
    for spec in operators:
        check_ref(spec.parent, "operator")
        if spec.selector is not None:
            check_ref(spec.selector, "gateway selector")
    for level in levels:
        for band in level.bands:
            for member in band.members:
                check_ref(member, f"level band '{band.name}'")
    for cluster in clusters:
        for member in cluster.members:
            check_ref(member, f"cluster '{cluster.name}'")
        if cluster.attached_to is not None:
            check_ref(cluster.attached_to, f"cluster '{cluster.name}' attachment")
    for sub in decomposition.sub_trees:
        check_ref(sub.boundary, "sub-tree boundary")
    for cut in decomposition.tree_cuts:
        check_ref(cut.node, "tree cut")

    for link in links:
        if link.source == link.target:
            raise CycleDetected((link.source, link.target))

    seen_links: set[tuple[str, str, LinkKind]] = set()
    for link in links:
        key = (link.source, link.target, link.kind)
        if key in seen_links:
            raise DuplicateLink(link.source, link.target)
        seen_links.add(key)

    orders_per_target: dict[str, set[int]] = {}
    direct_parents: dict[str, list[str]] = {}
    defaults_per_target: dict[str, int] = {}
    for link in links:
        if link.kind.is_analytical:
            used = orders_per_target.setdefault(link.target, set())
            if link.order in used:
                raise DuplicateOrder(link.target, link.order)
            used.add(link.order)
        if link.kind is LinkKind.DIRECT:
            direct_parents.setdefault(link.source, []).append(link.target)
        if link.guard is not None and link.guard.is_default:
            defaults_per_target[link.target] = defaults_per_target.get(link.target, 0) + 1

    for child, parents in sorted(direct_parents.items()):
        if len(parents) > 1:
            raise MultipleDirectParents(child, tuple(sorted(parents)))
    for target, count in sorted(defaults_per_target.items()):
        if count > 1:
            raise DuplicateGuardDefault(target)

    seen_ops: set[str] = set()
    for spec in operators:
        if spec.parent in seen_ops:
            raise DuplicateOperator(spec.parent)
        seen_ops.add(spec.parent)

    _check_acyclic(ids, links)

    for link in links:
        if link.kind.is_analytical and link.source == root_id:
            raise NoRoot("the key business indicator has an outgoing analytical link")

    seen_level_kinds: set[LevelKind] = set()
    for level in levels:
        if level.kind in seen_level_kinds:
            raise DuplicateLevelKind(level.kind.value)
        seen_level_kinds.add(level.kind)
        placed: set[str] = set()
        for band in level.bands:
            for member in band.members:
                if member in placed:
                    raise BandOverlap(level.kind.value, member)
                placed.add(member)

    seen_clusters: set[tuple[ClusterKind, str]] = set()
    for cluster in clusters:
        if not cluster.members:
            raise EmptyCluster(cluster.name)
        key = (cluster.kind, cluster.name)
        if key in seen_clusters:
            raise DuplicateCluster(cluster.kind.value, cluster.name)
        seen_clusters.add(key)

    seen_decomp: set[str] = set()
    for entry_id in [s.boundary for s in decomposition.sub_trees] + [
        c.node for c in decomposition.tree_cuts
    ]:
        if entry_id in seen_decomp:
            raise DuplicateDecompositionEntry(entry_id)
        seen_decomp.add(entry_id)

    links = _stamp_guard_selectors(links, operators)

    return Model(
        name=name,
        indicators=tuple(sorted(indicators, key=lambda i: i.id)),
        links=tuple(
            sorted(links, key=lambda l: (l.target, l.order, _KIND_RANK[l.kind], l.source))
        ),
        operators=tuple(sorted(operators, key=lambda o: o.parent)),
        levels=tuple(sorted(levels, key=lambda lv: _LEVEL_RANK[lv.kind])),
        clusters=tuple(sorted(clusters, key=lambda c: (_CLUSTER_RANK[c.kind], c.name))),
        decomposition=decomposition,
    )


def _check_acyclic(ids: set[str], links: tuple[Link, ...]) -> None:
    out_edges: dict[str, list[str]] = {iid: [] for iid in ids}
    for link in links:
        if link.kind.is_analytical:
            out_edges[link.source].append(link.target)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {iid: WHITE for iid in ids}
    for start in sorted(ids):
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        path = [start]
        color[start] = GREY
        while stack:
            node, idx = stack[-1]
            if idx < len(out_edges[node]):
                stack[-1] = (node, idx + 1)
                nxt = out_edges[node][idx]
                if color[nxt] == GREY:
                    cycle_start = path.index(nxt)
                    raise CycleDetected(tuple(path[cycle_start:] + [nxt]))
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, 0))
                    path.append(nxt)
            else:
                color[node] = BLACK
                stack.pop()
                path.pop()


def _stamp_guard_selectors(
    links: tuple[Link, ...], operators: tuple[OperatorSpec, ...]
) -> tuple[Link, ...]:
    selectors = {
        spec.parent: spec.selector
        for spec in operators
        if spec.op is Operator.GATEWAY and spec.selector is not None
    }
    if not selectors:
        return links
    stamped = []
    for link in links:
        guard = link.guard
        if guard is not None and guard.selector_indicator is None and link.target in selectors:
            guard = replace(guard, selector_indicator=selectors[link.target])
            link = replace(link, guard=guard)
        stamped.append(link)
    return tuple(stamped)
