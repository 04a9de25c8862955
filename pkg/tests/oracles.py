"""Independent reference implementations used to check the real ones.

Nothing here calls into vdmn.engine or vdmn.render logic: the evaluator
recurses straight over the link list, the differentiator applies
textbook chain rules, and the DOT checker is a from-scratch parser for
the dialect the renderer claims to emit. If an oracle and the library
agree on random inputs, a shared bug would have to be implemented twice
in different shapes.
"""

from __future__ import annotations

import math
import re

from vdmn.model import IndicatorType, Model, Operator


class OracleError(Exception):
    pass


def _ordered_children(model: Model, parent: str) -> list[str]:
    links = [
        l for l in model.links if l.target == parent and l.kind.value != "logical_allocation"
    ]
    links.sort(key=lambda l: l.order)
    return [l.source for l in links]


def _apply_function(name: str, params: dict[str, float] | None, values: list[float]) -> float:
    params = params or {}
    if name == "avg":
        return sum(values) / len(values)
    if name == "sum":
        return sum(values)
    if name == "min":
        return min(values)
    if name == "max":
        return max(values)
    if name == "weighted_sum":
        try:
            weights = [params[f"w{i + 1}"] for i in range(len(values))]
        except KeyError as exc:
            raise OracleError(f"weighted_sum missing weight {exc}") from None
        return sum(w * v for w, v in zip(weights, values))
    if name == "linear":
        a = params.get("a", 1.0)
        b = params.get("b", 0.0)
        return a * values[0] + b
    raise OracleError(f"oracle does not know function '{name}'")


def naive_evaluate(
    model: Model,
    bindings: dict[str, float] | None = None,
    result_type: str = "actual",
) -> dict[str, float]:
    """Values for every computable indicator, by direct recursion.

    Gateway-free models only. Raises OracleError on division by zero or
    an indicator it cannot resolve, instead of marking it.
    """
    bindings = bindings or {}
    cuts = {c.node for c in model.decomposition.tree_cuts}
    memo: dict[str, float | None] = {}

    def resolve_external(iid: str) -> float | None:
        if iid in bindings:
            return float(bindings[iid])
        stored = model.indicator(iid).content.result_type_values
        if result_type in stored:
            return float(stored[result_type])
        return None

    def value(iid: str) -> float | None:
        if iid in memo:
            return memo[iid]
        memo[iid] = None  # cycle sentinel; build_model already forbids cycles
        spec = next((o for o in model.operators if o.parent == iid), None)
        children = _ordered_children(model, iid)
        out: float | None
        if iid in cuts or not children or (spec is not None and spec.op is Operator.LOGICAL):
            out = resolve_external(iid)
        else:
            op = spec.op if spec is not None else Operator.LOGICAL
            if op is Operator.LOGICAL:
                out = resolve_external(iid)
            elif op is Operator.GATEWAY:
                raise OracleError("gateway models are outside this oracle")
            else:
                vals = []
                for child in children:
                    v = value(child)
                    if v is None:
                        memo[iid] = None
                        return None
                    vals.append(v)
                if op is Operator.ADD:
                    out = math.fsum(vals)
                elif op is Operator.SUBTRACT:
                    out = vals[0]
                    for v in vals[1:]:
                        out -= v
                elif op is Operator.MULTIPLY:
                    out = 1.0
                    for v in vals:
                        out *= v
                elif op is Operator.DIVIDE:
                    out = vals[0]
                    for v in vals[1:]:
                        if v == 0:
                            raise OracleError(f"division by zero at '{iid}'")
                        out /= v
                else:
                    out = _apply_function(spec.function_name, spec.function_params, vals)
        memo[iid] = out
        return out

    result: dict[str, float] = {}
    for ind in model.indicators:
        v = value(ind.id)
        if v is not None:
            result[ind.id] = v
    return result


def analytic_root_derivative(
    model: Model, values: dict[str, float], leaf: str
) -> float:
    """d(root)/d(leaf) by chain rule over the analytical DAG.

    Arithmetic operators only (+ - * :). ``values`` must hold a value
    for every indicator on a path between leaf and root.
    """
    cuts = {c.node for c in model.decomposition.tree_cuts}
    memo: dict[str, float] = {}

    def d(iid: str) -> float:
        if iid == leaf:
            return 1.0
        if iid in memo:
            return memo[iid]
        children = _ordered_children(model, iid)
        spec = next((o for o in model.operators if o.parent == iid), None)
        if iid in cuts or not children or spec is None or spec.op is Operator.LOGICAL:
            memo[iid] = 0.0
            return 0.0
        op = spec.op
        if op is Operator.ADD:
            out = sum(d(c) for c in children)
        elif op is Operator.SUBTRACT:
            out = d(children[0]) - sum(d(c) for c in children[1:])
        elif op is Operator.MULTIPLY:
            out = 0.0
            for i, child in enumerate(children):
                term = d(child)
                for j, other in enumerate(children):
                    if i != j:
                        term *= values[other]
                out += term
        elif op is Operator.DIVIDE:
            cur = values[children[0]]
            dcur = d(children[0])
            for child in children[1:]:
                v = values[child]
                dcur = (dcur * v - cur * d(child)) / (v * v)
                cur = cur / v
            out = dcur
        else:
            raise OracleError(f"operator '{op.value}' outside the analytic oracle")
        memo[iid] = out
        return out

    return d(model.root.id)


def analytic_elasticity(model: Model, values: dict[str, float], leaf: str) -> float:
    root_value = values[model.root.id]
    if root_value == 0:
        raise OracleError("root value is zero; elasticity undefined")
    return analytic_root_derivative(model, values, leaf) * values[leaf] / root_value


# -- DOT grammar check ------------------------------------------------------

_DOT_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<arrow>->)
  | (?P<id>[A-Za-z0-9_.:-]+)
  | (?P<punct>[{}\[\];,=])
    """,
    re.VERBOSE,
)


class DotCheckError(Exception):
    pass


def _dot_tokens(text: str) -> list[str]:
    out: list[str] = []
    pos = 0
    while pos < len(text):
        m = _DOT_TOKEN.match(text, pos)
        if m is None:
            raise DotCheckError(f"bad character at offset {pos}: {text[pos]!r}")
        pos = m.end()
        if m.lastgroup != "ws":
            out.append(m.group())
    return out


class _DotParser:
    """Recursive check of the digraph dialect the renderer emits."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0
        self.declared_nodes: set[str] = set()
        self.edges: list[tuple[str, str]] = []

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise DotCheckError("unexpected end of input")
        if expected is not None and tok != expected:
            raise DotCheckError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def name(self) -> str:
        tok = self.take()
        if tok.startswith('"'):
            return tok[1:-1].replace('\\"', '"')
        if not re.fullmatch(r"[A-Za-z0-9_.:-]+", tok):
            raise DotCheckError(f"not a name: {tok!r}")
        return tok

    def attr_list(self) -> None:
        self.take("[")
        while self.peek() != "]":
            self.name()
            self.take("=")
            self.name()
            if self.peek() == ",":
                self.take(",")
        self.take("]")

    def statement(self) -> None:
        tok = self.peek()
        if tok == "subgraph":
            self.take()
            self.name()
            self.block()
            return
        if tok == "{":
            self.block()
            return
        first = self.name()
        nxt = self.peek()
        if nxt == "=":
            self.take("=")
            self.name()
        elif nxt == "->":
            self.take("->")
            second = self.name()
            if self.peek() == "[":
                self.attr_list()
            self.edges.append((first, second))
        elif nxt == "[":
            self.attr_list()
            if first not in ("node", "edge", "graph"):
                self.declared_nodes.add(first)
        else:
            self.declared_nodes.add(first)
        if self.peek() == ";":
            self.take(";")

    def block(self) -> None:
        self.take("{")
        while self.peek() != "}":
            self.statement()
        self.take("}")

    def parse(self) -> None:
        self.take("digraph")
        if self.peek() != "{":
            self.name()
        self.block()
        if self.peek() is not None:
            raise DotCheckError(f"trailing token {self.peek()!r}")


def check_dot(text: str) -> tuple[set[str], list[tuple[str, str]]]:
    """Parse DOT text; returns (declared nodes, edges) or raises.

    Also rejects edges whose endpoints were never declared, which is the
    mistake a stringly-typed emitter is most likely to make.
    """
    parser = _DotParser(_dot_tokens(text))
    parser.parse()
    for src, dst in parser.edges:
        if src not in parser.declared_nodes:
            raise DotCheckError(f"edge endpoint '{src}' never declared")
        if dst not in parser.declared_nodes:
            raise DotCheckError(f"edge endpoint '{dst}' never declared")
    return parser.declared_nodes, parser.edges
