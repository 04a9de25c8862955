"""Bottom-up evaluation, what-if deltas, and sensitivity ranking.

Values flow child to parent along analytical links in topological order.
Leaves take their value from external bindings first, then from values
stored on the indicator; computed parents combine children per their
operator. Parents with the logical operator are documentation-only and
stay uncomputed unless bound directly. Missing inputs do not abort the
run: the affected nodes carry a NotComputed marker with a reason, which
propagates upward, so partial models still evaluate as far as they can.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from heapq import heappop, heappush
from typing import Callable, Mapping, Sequence

from .errors import (
    ConflictingBinding,
    DivisionByZero,
    FunctionApplicationError,
    GuardUnresolvable,
    InvalidArgument,
    OverrideNotALeafDriver,
    RootNotComputable,
    UnknownFunction,
)
from .model import (
    Development,
    IndicatorType,
    Link,
    Model,
    Operator,
    OperatorSpec,
    RESULT_ACTUAL,
)

FLAT_TOLERANCE = 1e-9
DEFAULT_EPSILON = 1e-3


class Bindings:
    """External values keyed by indicator id and result type."""

    def __init__(
        self,
        values: Mapping[str, float] | Mapping[tuple[str, str], float] | None = None,
        result_type: str = RESULT_ACTUAL,
    ):
        table: dict[tuple[str, str], float] = {}
        for key, value in (values or {}).items():
            if isinstance(key, tuple):
                iid, rt = key
            else:
                iid, rt = key, result_type
            table[(iid, rt)] = float(value)
        self._table = table

    @classmethod
    def of(cls, values: Mapping[str, float] | None, result_type: str = RESULT_ACTUAL) -> "Bindings":
        return cls(values, result_type)

    def value(self, indicator_id: str, result_type: str) -> float | None:
        return self._table.get((indicator_id, result_type))

    def ids(self, result_type: str) -> set[str]:
        return {iid for iid, rt in self._table if rt == result_type}

    def overridden(self, overrides: "Bindings") -> "Bindings":
        merged = Bindings()
        merged._table = {**self._table, **overrides._table}
        return merged

    def items(self):
        return self._table.items()

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other) -> bool:
        return isinstance(other, Bindings) and self._table == other._table

    def __repr__(self) -> str:
        return f"Bindings({self._table!r})"


def _builtin_avg(values: Sequence[float], params: Mapping[str, float]) -> float:
    return sum(values) / len(values)


def _builtin_sum(values: Sequence[float], params: Mapping[str, float]) -> float:
    return sum(values)


def _builtin_min(values: Sequence[float], params: Mapping[str, float]) -> float:
    return min(values)


def _builtin_max(values: Sequence[float], params: Mapping[str, float]) -> float:
    return max(values)


def _builtin_weighted_sum(values: Sequence[float], params: Mapping[str, float]) -> float:
    weights = [params.get(f"w{i + 1}") for i in range(len(values))]
    if any(w is None for w in weights) or len(params) != len(values):
        raise ValueError(
            f"weighted_sum needs exactly one weight per child (w1..w{len(values)}), "
            f"got {sorted(params)}"
        )
    return sum(w * v for w, v in zip(weights, values))


def _builtin_linear(values: Sequence[float], params: Mapping[str, float]) -> float:
    a = params.get("a", 1.0)
    b = params.get("b", 0.0)
    return a * values[0] + b


FunctionImpl = Callable[[Sequence[float], Mapping[str, float]], float]


class FunctionRegistry:
    """Named n-ary functions usable by function operators."""

    def __init__(self, include_builtins: bool = True):
        self._functions: dict[str, FunctionImpl] = {}
        if include_builtins:
            self._functions.update(
                avg=_builtin_avg,
                sum=_builtin_sum,
                min=_builtin_min,
                max=_builtin_max,
                weighted_sum=_builtin_weighted_sum,
                linear=_builtin_linear,
            )

    def register(self, name: str, impl: FunctionImpl) -> None:
        self._functions[name] = impl

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._functions))

    def apply(self, name: str, values: Sequence[float], params: Mapping[str, float]) -> float:
        try:
            impl = self._functions[name]
        except KeyError:
            raise UnknownFunction(name) from None
        try:
            result = impl(values, params)
        except (ValueError, ArithmeticError, IndexError) as exc:
            raise FunctionApplicationError(name, str(exc)) from None
        return float(result)


DEFAULT_REGISTRY = FunctionRegistry()


class NotComputedReason(str, Enum):
    LOGICAL_OPERATOR = "logical_operator"
    MISSING_BINDING = "missing_binding"
    CUT_WITHOUT_VALUE = "cut_without_value"
    DIVISION_BY_ZERO_DOWNSTREAM = "division_by_zero_downstream"


@dataclass(frozen=True)
class NotComputed:
    reason: NotComputedReason
    detail: str = ""

    def to_json_dict(self) -> dict:
        out: dict = {"reason": self.reason.value}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Valuation:
    result_type: str
    values: Mapping[str, float | NotComputed]
    gateway_choices: Mapping[str, str]
    root_id: str

    def value(self, indicator_id: str) -> float | None:
        v = self.values[indicator_id]
        return None if isinstance(v, NotComputed) else float(v)

    def reason(self, indicator_id: str) -> NotComputed | None:
        v = self.values[indicator_id]
        return v if isinstance(v, NotComputed) else None

    @property
    def root_value(self) -> float | None:
        return self.value(self.root_id)

    def to_json_dict(self) -> dict:
        return {
            "result_type": self.result_type,
            "root": self.root_id,
            "values": {
                iid: (v if isinstance(v, float) else None) for iid, v in sorted(self.values.items())
            },
            "not_computed": {
                iid: v.to_json_dict()
                for iid, v in sorted(self.values.items())
                if isinstance(v, NotComputed)
            },
            "gateway_choices": dict(sorted(self.gateway_choices.items())),
        }


def _evaluation_order(model: Model) -> tuple[str, ...]:
    """Topological order extended with selector-before-gateway edges."""
    extra: dict[str, list[str]] = {}
    for parent, spec in model.operator_by_parent.items():
        if spec.op is not Operator.GATEWAY:
            continue
        selectors = set()
        if spec.selector:
            selectors.add(spec.selector)
        for link in model.child_links(parent):
            if link.guard is not None and link.guard.selector_indicator is not None:
                selectors.add(link.guard.selector_indicator)
        children = set(model.analytical_children(parent))
        for selector in selectors - children:
            extra.setdefault(selector, []).append(parent)

    indegree = {ind.id: len(model.child_links(ind.id)) for ind in model.indicators}
    for targets in extra.values():
        for target in targets:
            indegree[target] += 1
    heap = sorted(iid for iid, n in indegree.items() if n == 0)
    order: list[str] = []
    while heap:
        iid = heappop(heap)
        order.append(iid)
        for link in model.parent_links(iid):
            indegree[link.target] -= 1
            if indegree[link.target] == 0:
                heappush(heap, link.target)
        for target in extra.get(iid, ()):
            indegree[target] -= 1
            if indegree[target] == 0:
                heappush(heap, target)
    if len(order) != len(model.indicators):
        stuck = sorted(iid for iid, n in indegree.items() if n > 0)
        gateway = next(
            (iid for iid in stuck if model.operator_by_parent.get(iid) is not None
             and model.operator_by_parent[iid].op is Operator.GATEWAY),
            stuck[0],
        )
        raise GuardUnresolvable(gateway, "selector depends on the gateway's own value")
    return tuple(order)


def evaluate(
    model: Model,
    bindings: Bindings | Mapping[str, float] | None = None,
    registry: FunctionRegistry | None = None,
    result_type: str = RESULT_ACTUAL,
    division_by_zero: str = "raise",
) -> Valuation:
    """Evaluate every indicator; missing inputs degrade to NotComputed.

    division_by_zero: "raise" aborts on a zero divisor naming the parent;
    "mark" records the parent as NotComputed and continues.
    """
    if division_by_zero not in ("raise", "mark"):
        raise InvalidArgument(f"division_by_zero must be 'raise' or 'mark', got {division_by_zero!r}")
    if not isinstance(bindings, Bindings):
        bindings = Bindings(bindings, result_type)
    registry = registry or DEFAULT_REGISTRY
    for iid in bindings.ids(result_type):
        model.indicator(iid)

    values: dict[str, float | NotComputed] = {}
    choices: dict[str, str] = {}

    for iid in _evaluation_order(model):
        values[iid] = _node_value(
            model, iid, values, choices, bindings, registry, result_type, division_by_zero
        )

    return Valuation(
        result_type=result_type,
        values=values,
        gateway_choices=choices,
        root_id=model.root.id,
    )


def _node_value(
    model: Model,
    iid: str,
    values: dict[str, float | NotComputed],
    choices: dict[str, str],
    bindings: Bindings,
    registry: FunctionRegistry,
    result_type: str,
    division_by_zero: str,
) -> float | NotComputed:
    bound = bindings.value(iid, result_type)
    stored = model.indicator(iid).content.result_type_values.get(result_type)
    links = model.child_links(iid)
    spec, _ = model.effective_operator(iid)

    if model.is_cut(iid):
        # A cut prunes the subtree behind this node; only a supplied value
        # can stand in for the pruned computation.
        if bound is not None:
            return bound
        if stored is not None:
            return stored
        return NotComputed(NotComputedReason.CUT_WITHOUT_VALUE)

    if spec is None:
        if bound is not None:
            return bound
        if stored is not None:
            return stored
        return NotComputed(NotComputedReason.MISSING_BINDING)

    if spec.op is Operator.LOGICAL:
        if bound is not None:
            return bound
        if stored is not None:
            return stored
        return NotComputed(NotComputedReason.LOGICAL_OPERATOR)

    if bound is not None:
        raise ConflictingBinding(iid)

    if spec.op is Operator.GATEWAY:
        return _gateway_value(model, iid, spec, links, values, choices)

    child_values: list[float] = []
    for link in links:
        v = values[link.source]
        if isinstance(v, NotComputed):
            return NotComputed(v.reason, detail=f"child '{link.source}' not computed")
        child_values.append(v)

    if spec.op is Operator.ADD:
        return math.fsum(child_values)
    if spec.op is Operator.SUBTRACT:
        acc = child_values[0]
        for v in child_values[1:]:
            acc -= v
        return acc
    if spec.op is Operator.MULTIPLY:
        acc = 1.0
        for v in child_values:
            acc *= v
        return acc
    if spec.op is Operator.DIVIDE:
        acc = child_values[0]
        for v in child_values[1:]:
            if v == 0.0:
                if division_by_zero == "raise":
                    raise DivisionByZero(iid)
                return NotComputed(
                    NotComputedReason.DIVISION_BY_ZERO_DOWNSTREAM,
                    detail=f"zero divisor under '{iid}'",
                )
            acc /= v
        return acc
    return registry.apply(spec.function_name, child_values, spec.function_params or {})


def _gateway_value(
    model: Model,
    iid: str,
    spec: OperatorSpec,
    links: Sequence[Link],
    values: dict[str, float | NotComputed],
    choices: dict[str, str],
) -> float | NotComputed:
    guarded = [l for l in links if l.guard is not None and not l.guard.is_default]
    default = next((l for l in links if l.guard is not None and l.guard.is_default), None)

    chosen: Link | None = None
    for link in guarded:
        guard = link.guard
        selector = guard.selector_indicator or spec.selector
        if selector is None:
            raise GuardUnresolvable(iid, f"guard on '{link.source}' has no selector")
        sel_value = values.get(selector)
        if sel_value is None:
            raise GuardUnresolvable(iid, f"selector '{selector}' is not part of the model run")
        if isinstance(sel_value, NotComputed):
            return NotComputed(
                NotComputedReason.MISSING_BINDING,
                detail=f"gateway selector '{selector}' not computed",
            )
        if guard.comparator.matches(sel_value, guard.threshold):
            chosen = link
            break
    if chosen is None:
        if default is None:
            raise GuardUnresolvable(iid)
        chosen = default

    choices[iid] = chosen.source
    v = values[chosen.source]
    if isinstance(v, NotComputed):
        return NotComputed(v.reason, detail=f"chosen branch '{chosen.source}' not computed")
    return v


@dataclass(frozen=True)
class WhatIfEntry:
    indicator_id: str
    base: float | None
    new: float | None
    delta: float | None
    percent: float | None


@dataclass(frozen=True)
class WhatIfReport:
    result_type: str
    root_id: str
    overrides: dict[str, float]
    entries: tuple[WhatIfEntry, ...]
    base: Valuation
    new: Valuation

    @property
    def root_entry(self) -> WhatIfEntry:
        return next(e for e in self.entries if e.indicator_id == self.root_id)

    def to_json_dict(self) -> dict:
        return {
            "result_type": self.result_type,
            "root": self.root_id,
            "overrides": dict(sorted(self.overrides.items())),
            "entries": [
                {
                    "id": e.indicator_id,
                    "base": e.base,
                    "new": e.new,
                    "delta": e.delta,
                    "percent": e.percent,
                }
                for e in self.entries
            ],
        }


def overridable_ids(model: Model) -> tuple[str, ...]:
    """Indicators a what-if run may rebind: inputs, not computed nodes."""
    out = []
    for ind in model.indicators:
        if model.is_cut(ind.id):
            out.append(ind.id)
            continue
        if ind.itype not in (IndicatorType.VALUE_DRIVER, IndicatorType.EXTERNAL):
            continue
        spec, _ = model.effective_operator(ind.id)
        if spec is None or spec.op is Operator.LOGICAL:
            out.append(ind.id)
    return tuple(sorted(set(out)))


def what_if(
    model: Model,
    base: Bindings | Mapping[str, float] | None,
    overrides: Bindings | Mapping[str, float],
    registry: FunctionRegistry | None = None,
    result_type: str = RESULT_ACTUAL,
) -> WhatIfReport:
    """Evaluate twice and report every indicator whose value moved."""
    if not isinstance(base, Bindings):
        base = Bindings(base, result_type)
    if not isinstance(overrides, Bindings):
        overrides = Bindings(overrides, result_type)

    allowed = set(overridable_ids(model))
    for (iid, rt), _value in sorted(overrides.items()):
        model.indicator(iid)
        if iid not in allowed:
            raise OverrideNotALeafDriver(iid)

    before = evaluate(model, base, registry, result_type)
    after = evaluate(model, base.overridden(overrides), registry, result_type)

    entries: list[WhatIfEntry] = []
    root_id = model.root.id
    for ind in model.indicators:
        b = before.value(ind.id)
        n = after.value(ind.id)
        if b == n and ind.id != root_id:
            continue
        delta = (n - b) if (b is not None and n is not None) else None
        percent = (delta / abs(b) * 100.0) if (delta is not None and b != 0) else None
        entries.append(WhatIfEntry(ind.id, b, n, delta, percent))
    entries.sort(key=lambda e: (e.indicator_id != root_id, e.indicator_id))
    return WhatIfReport(
        result_type=result_type,
        root_id=root_id,
        overrides={iid: v for (iid, rt), v in overrides.items() if rt == result_type},
        entries=tuple(entries),
        base=before,
        new=after,
    )


@dataclass(frozen=True)
class SensitivityEntry:
    driver_id: str
    base_value: float
    delta_per_unit: float
    elasticity: float | None
    controllable: bool


@dataclass(frozen=True)
class SensitivityReport:
    result_type: str
    root_id: str
    root_value: float
    epsilon: float
    entries: tuple[SensitivityEntry, ...]

    def to_json_dict(self) -> dict:
        return {
            "result_type": self.result_type,
            "root": self.root_id,
            "root_value": self.root_value,
            "epsilon": self.epsilon,
            "entries": [
                {
                    "id": e.driver_id,
                    "base_value": e.base_value,
                    "delta_per_unit": e.delta_per_unit,
                    "elasticity": e.elasticity,
                    "controllable": e.controllable,
                }
                for e in self.entries
            ],
        }


def sensitivity(
    model: Model,
    bindings: Bindings | Mapping[str, float] | None = None,
    registry: FunctionRegistry | None = None,
    result_type: str = RESULT_ACTUAL,
    epsilon: float = DEFAULT_EPSILON,
) -> SensitivityReport:
    """Central-difference influence of each bindable driver on the root.

    Drivers are value drivers and external indicators that act as inputs
    under the current bindings; each is nudged by a relative step (or an
    absolute step when its base value is 0). Entries are ranked by
    |elasticity| descending; zero-based drivers have no elasticity and
    rank after the rest by |delta per unit|.
    """
    if epsilon <= 0:
        raise InvalidArgument(f"epsilon must be positive, got {epsilon}")
    if not isinstance(bindings, Bindings):
        bindings = Bindings(bindings, result_type)
    registry = registry or DEFAULT_REGISTRY

    base = evaluate(model, bindings, registry, result_type)
    root_value = base.root_value
    if root_value is None:
        reason = base.reason(model.root.id)
        raise RootNotComputable(model.root.id, reason.reason.value if reason else "unknown")

    drivers = []
    for iid in overridable_ids(model):
        ind = model.indicator(iid)
        if ind.itype not in (IndicatorType.VALUE_DRIVER, IndicatorType.EXTERNAL):
            continue
        base_value = base.value(iid)
        if base_value is None:
            continue
        drivers.append((iid, base_value, ind.itype))

    entries: list[SensitivityEntry] = []
    for iid, base_value, itype in drivers:
        if base_value != 0.0:
            lo, hi = base_value * (1 - epsilon), base_value * (1 + epsilon)
        else:
            lo, hi = -epsilon, epsilon
        r_hi = evaluate(model, bindings.overridden(Bindings({iid: hi}, result_type)),
                        registry, result_type).root_value
        r_lo = evaluate(model, bindings.overridden(Bindings({iid: lo}, result_type)),
                        registry, result_type).root_value
        if r_hi is None or r_lo is None:
            raise RootNotComputable(model.root.id, f"root lost under perturbation of '{iid}'")
        delta_per_unit = (r_hi - r_lo) / (hi - lo)
        if base_value != 0.0 and root_value != 0.0:
            elasticity = delta_per_unit * base_value / root_value
        else:
            elasticity = None
        entries.append(
            SensitivityEntry(
                driver_id=iid,
                base_value=base_value,
                delta_per_unit=delta_per_unit,
                elasticity=elasticity,
                controllable=itype is not IndicatorType.EXTERNAL,
            )
        )

    entries.sort(
        key=lambda e: (
            e.elasticity is None,
            -abs(e.elasticity) if e.elasticity is not None else -abs(e.delta_per_unit),
            e.driver_id,
        )
    )
    return SensitivityReport(
        result_type=result_type,
        root_id=model.root.id,
        root_value=root_value,
        epsilon=epsilon,
        entries=tuple(entries),
    )


def derived_development(
    model: Model,
    valuation: Valuation,
    bindings: Bindings | None = None,
) -> dict[str, Development]:
    """Trend per indicator with a comparative value and a computed value."""
    out: dict[str, Development] = {}
    for ind in model.indicators:
        comparative = ind.content.comparative_value
        if comparative is None:
            continue
        value = valuation.value(ind.id)
        if value is None and bindings is not None:
            value = bindings.value(ind.id, valuation.result_type)
        if value is None:
            continue
        diff = value - comparative.value
        if abs(diff) <= FLAT_TOLERANCE * max(1.0, abs(value)):
            out[ind.id] = Development.FLAT
        elif diff > 0:
            out[ind.id] = Development.UP
        else:
            out[ind.id] = Development.DOWN
    return out
