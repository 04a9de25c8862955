"""Textual language for value driver trees.

One ``model "Name" { ... }`` block per file. Items inside the block:

  indicator   kbi|fin|driver|external|subsidiary ID [@key|@input|@calc] { content }
  link        CHILD -> PARENT [order=N, when ...]   (~> indirect, ..> allocation)
  operator    op ID = L | + | - | * | : | fx(name, k=v, ...) | X(selector)
  level       level type|branch|time { "band": [IDs], ... }
  cluster     cluster vdgroup|bizmodel|function|calc "Name" [@ID] [IDs]
  decomposition  subtree ID => "ref"       cut ID => "label"

Content lines use key-value form: title, unit, value_type, result,
compare, dev, resp, attr. ``//`` starts a line comment. ``parse_text``
recovers from syntax errors where it can and reports all of them;
``emit_text`` writes the single canonical form, so emission after a
parse is idempotent byte-for-byte.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .diagnostics import (
    P_BAD_CHARACTER,
    P_BAD_ESCAPE,
    P_BAD_NUMBER,
    P_BAD_UNIT,
    P_DUPLICATE_CONTENT_KEY,
    P_UNEXPECTED_EOF,
    P_UNEXPECTED_TOKEN,
    P_UNTERMINATED_STRING,
    ParseDiagnostic,
    Severity,
    SourceSpan,
)
from .errors import ModelError
from .model import (
    Band,
    ClusterKind,
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
    ClusterSpec,
    Model,
    OPERATOR_SYMBOLS,
    Operator,
    OperatorSpec,
    SubTreeRef,
    TreeCutRef,
    ValueType,
    build_model,
    result_type_sort_key,
)
from .units import Unit, parse_unit


class TokenType(Enum):
    ID = "identifier"
    STRING = "string"
    NUMBER = "number"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    LPAREN = "'('"
    RPAREN = "')'"
    COMMA = "','"
    EQUALS = "'='"
    COLON = "':'"
    AT = "'@'"
    PLUS = "'+'"
    MINUS = "'-'"
    STAR = "'*'"
    ARROW_DIRECT = "'->'"
    ARROW_INDIRECT = "'~>'"
    ARROW_LOGICAL = "'..>'"
    DARROW = "'=>'"
    LT = "'<'"
    LE = "'<='"
    EQEQ = "'=='"
    GE = "'>='"
    GT = "'>'"
    NE = "'!='"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    line: int
    column: int
    value: object = None


_INDICATOR_KEYWORDS = {
    "kbi": IndicatorType.KEY_BUSINESS,
    "fin": IndicatorType.FINANCIAL,
    "driver": IndicatorType.VALUE_DRIVER,
    "external": IndicatorType.EXTERNAL,
    "subsidiary": IndicatorType.SUBSIDIARY_RESULT,
}

_ROLE_FLAGS = {
    "key": FunctionRole.KEY_VALUE_INDICATOR,
    "input": FunctionRole.INPUT,
    "calc": FunctionRole.CALCULATION,
}

_LEVEL_KEYWORDS = {
    "type": LevelKind.INDICATOR_TYPE,
    "branch": LevelKind.BRANCH_LEVEL,
    "time": LevelKind.TIME_HORIZON,
}

_CLUSTER_KEYWORDS = {
    "vdgroup": ClusterKind.VALUE_DRIVER_GROUP,
    "bizmodel": ClusterKind.BUSINESS_MODEL,
    "function": ClusterKind.FUNCTIONS,
    "calc": ClusterKind.CALCULATION,
}

_ARROW_KINDS = {
    TokenType.ARROW_DIRECT: LinkKind.DIRECT,
    TokenType.ARROW_INDIRECT: LinkKind.INDIRECT,
    TokenType.ARROW_LOGICAL: LinkKind.LOGICAL_ALLOCATION,
}

_COMPARATOR_TOKENS = {
    TokenType.LT: Comparator.LT,
    TokenType.LE: Comparator.LE,
    TokenType.EQEQ: Comparator.EQ,
    TokenType.GE: Comparator.GE,
    TokenType.GT: Comparator.GT,
    TokenType.NE: Comparator.NE,
}

_CONTENT_KEYS = ("title", "unit", "value_type", "result", "compare", "dev", "resp", "attr")

_ITEM_KEYWORDS = set(_INDICATOR_KEYWORDS) | {"op", "level", "cluster", "subtree", "cut"}

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r", "/": "/"}


class _Lexer:
    def __init__(self, source: str, file: str, diagnostics: list[ParseDiagnostic]):
        self.source = source
        self.file = file
        self.diagnostics = diagnostics
        self.pos = 0
        self.line = 1
        self.column = 1

    def _span(self, line: int, column: int, length: int = 1) -> SourceSpan:
        return SourceSpan(self.file, line, column, length)

    def _error(self, code: str, message: str, line: int, column: int, length: int = 1) -> None:
        self.diagnostics.append(
            ParseDiagnostic(Severity.ERROR, code, message, self._span(line, column, length))
        )

    def _peek(self, offset: int = 0) -> str:
        idx = self.pos + offset
        return self.source[idx] if idx < len(self.source) else ""

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def tokens(self) -> Iterator[Token]:
        while self.pos < len(self.source):
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance()
                continue
            if ch == "/" and self._peek(1) == "/":
                while self.pos < len(self.source) and self._peek() != "\n":
                    self._advance()
                continue
            line, column = self.line, self.column
            if ch == '"':
                yield self._string(line, column)
                continue
            if ch.isdigit() or (ch in "+-." and self._peek(1).isdigit()):
                tok = self._number(line, column)
                if tok is not None:
                    yield tok
                continue
            if ch.isalpha() or ch == "_":
                yield self._identifier(line, column)
                continue
            punct = self._punct(line, column)
            if punct is not None:
                yield punct
        yield Token(TokenType.EOF, "", self.line, self.column)

    def _string(self, line: int, column: int) -> Token:
        self._advance()
        chars: list[str] = []
        while True:
            if self.pos >= len(self.source) or self._peek() == "\n":
                self._error(P_UNTERMINATED_STRING, "unterminated string", line, column)
                break
            ch = self._advance()
            if ch == '"':
                break
            if ch == "\\":
                if self.pos >= len(self.source):
                    self._error(P_UNTERMINATED_STRING, "unterminated string", line, column)
                    break
                esc = self._advance()
                if esc in _ESCAPES:
                    chars.append(_ESCAPES[esc])
                elif esc == "u":
                    hexits = self.source[self.pos : self.pos + 4]
                    if len(hexits) == 4 and all(c in "0123456789abcdefABCDEF" for c in hexits):
                        for _ in range(4):
                            self._advance()
                        chars.append(chr(int(hexits, 16)))
                    else:
                        self._error(
                            P_BAD_ESCAPE, "bad unicode escape", self.line, self.column - 2, 2
                        )
                else:
                    self._error(P_BAD_ESCAPE, f"bad escape '\\{esc}'", self.line, self.column - 2, 2)
            else:
                chars.append(ch)
        text = "".join(chars)
        return Token(TokenType.STRING, text, line, column, value=text)

    def _number(self, line: int, column: int) -> Token | None:
        start = self.pos
        if self._peek() in "+-":
            self._advance()
        while self._peek().isdigit():
            self._advance()
        if self._peek() == "." and self._peek(1).isdigit():
            self._advance()
            while self._peek().isdigit():
                self._advance()
        if self._peek() in "eE" and (
            self._peek(1).isdigit() or (self._peek(1) in "+-" and self._peek(2).isdigit())
        ):
            self._advance()
            if self._peek() in "+-":
                self._advance()
            while self._peek().isdigit():
                self._advance()
        text = self.source[start : self.pos]
        try:
            value = float(text)
        except ValueError:
            self._error(P_BAD_NUMBER, f"bad number '{text}'", line, column, len(text))
            return None
        return Token(TokenType.NUMBER, text, line, column, value=value)

    def _identifier(self, line: int, column: int) -> Token:
        start = self.pos
        self._advance()
        while True:
            ch = self._peek()
            if ch.isalnum() or ch == "_":
                self._advance()
            elif ch == "-" and self._peek(1) != ">":
                self._advance()
            else:
                break
        text = self.source[start : self.pos]
        return Token(TokenType.ID, text, line, column, value=text)

    def _punct(self, line: int, column: int) -> Token | None:
        ch = self._advance()
        two = ch + self._peek()

        def tok(ttype: TokenType, text: str) -> Token:
            for _ in range(len(text) - 1):
                self._advance()
            return Token(ttype, text, line, column)

        if ch == "." and two == ".." and self._peek(1) == ">":
            return tok(TokenType.ARROW_LOGICAL, "..>")  # consumes '.>' after the first '.'
        if two == "->":
            return tok(TokenType.ARROW_DIRECT, "->")
        if two == "~>":
            return tok(TokenType.ARROW_INDIRECT, "~>")
        if two == "=>":
            return tok(TokenType.DARROW, "=>")
        if two == "==":
            return tok(TokenType.EQEQ, "==")
        if two == ">=":
            return tok(TokenType.GE, ">=")
        if two == "<=":
            return tok(TokenType.LE, "<=")
        if two == "!=":
            return tok(TokenType.NE, "!=")
        simple = {
            "{": TokenType.LBRACE,
            "}": TokenType.RBRACE,
            "[": TokenType.LBRACKET,
            "]": TokenType.RBRACKET,
            "(": TokenType.LPAREN,
            ")": TokenType.RPAREN,
            ",": TokenType.COMMA,
            "=": TokenType.EQUALS,
            ":": TokenType.COLON,
            "@": TokenType.AT,
            "+": TokenType.PLUS,
            "-": TokenType.MINUS,
            "*": TokenType.STAR,
            "<": TokenType.LT,
            ">": TokenType.GT,
        }
        if ch in simple:
            return Token(simple[ch], ch, line, column)
        self._error(P_BAD_CHARACTER, f"unexpected character {ch!r}", line, column)
        return None


@dataclass
class ParseResult:
    model: Model | None
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.model is not None

    @property
    def errors(self) -> tuple[ParseDiagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity is Severity.ERROR)

    def expect(self) -> Model:
        """The model, or a ValueError rendering every diagnostic."""
        if self.model is None:
            raise ValueError("\n".join(d.render() for d in self.diagnostics) or "parse failed")
        return self.model


@dataclass
class _ParsedLink:
    source: str
    target: str
    kind: LinkKind
    order: int | None
    guard: GatewayGuard | None
    span: SourceSpan


class _Parser:
    def __init__(self, tokens: list[Token], file: str, diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.file = file
        self.diagnostics = diagnostics
        self.pos = 0
        self.name: str | None = None
        self.indicators: list[Indicator] = []
        self.links: list[_ParsedLink] = []
        self.operators: list[OperatorSpec] = []
        self.levels: list[LevelSpec] = []
        self.clusters: list[ClusterSpec] = []
        self.sub_trees: list[SubTreeRef] = []
        self.tree_cuts: list[TreeCutRef] = []
        self.spans: dict[str, SourceSpan] = {}
        self.header_span = SourceSpan(file, 1, 1)

    # -- token plumbing ---------------------------------------------------

    def _peek(self, offset: int = 0) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def _span_of(self, tok: Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.column, max(len(tok.text), 1))

    def _error_at(self, tok: Token, message: str, code: str = P_UNEXPECTED_TOKEN) -> None:
        if tok.type is TokenType.EOF:
            code = P_UNEXPECTED_EOF
        self.diagnostics.append(
            ParseDiagnostic(Severity.ERROR, code, message, self._span_of(tok))
        )

    def _expect(self, ttype: TokenType, what: str | None = None) -> Token | None:
        tok = self._peek()
        if tok.type is ttype:
            return self._advance()
        self._error_at(tok, f"expected {what or ttype.value}, found {_describe(tok)}")
        return None

    def _expect_keyword(self, word: str) -> Token | None:
        tok = self._peek()
        if tok.type is TokenType.ID and tok.text == word:
            return self._advance()
        self._error_at(tok, f"expected '{word}', found {_describe(tok)}")
        return None

    def _sync_to_item(self) -> None:
        depth = 0
        while True:
            tok = self._peek()
            if tok.type is TokenType.EOF:
                return
            if depth == 0:
                if tok.type is TokenType.ID and tok.text in _ITEM_KEYWORDS:
                    return
                if tok.type is TokenType.ID and self._peek(1).type in _ARROW_KINDS:
                    return
                if tok.type is TokenType.RBRACE:
                    return
            if tok.type in (TokenType.LBRACE, TokenType.LBRACKET, TokenType.LPAREN):
                depth += 1
            elif tok.type in (TokenType.RBRACE, TokenType.RBRACKET, TokenType.RPAREN):
                if depth == 0:
                    return
                depth -= 1
            self._advance()

    # -- grammar ------------------------------------------------------------

    def parse(self) -> None:
        if self._expect_keyword("model") is None:
            self._sync_to_item()
        name_tok = self._expect(TokenType.STRING, "model name string")
        if name_tok is not None:
            self.name = str(name_tok.value)
            self.header_span = self._span_of(name_tok)
        if self._expect(TokenType.LBRACE) is None:
            self._sync_to_item()
        while True:
            tok = self._peek()
            if tok.type is TokenType.EOF:
                self._error_at(tok, "expected '}' to close the model block")
                break
            if tok.type is TokenType.RBRACE:
                self._advance()
                break
            before = self.pos
            self._item()
            if self.pos == before:
                self._advance()
                self._sync_to_item()
        trailing = self._peek()
        if trailing.type is not TokenType.EOF:
            self._error_at(trailing, f"unexpected {_describe(trailing)} after model block")

    def _item(self) -> None:
        tok = self._peek()
        if tok.type is not TokenType.ID:
            self._error_at(tok, f"expected a model item, found {_describe(tok)}")
            self._advance()
            self._sync_to_item()
            return
        word = tok.text
        if word in _INDICATOR_KEYWORDS:
            self._indicator()
        elif word == "op":
            self._operator()
        elif word == "level":
            self._level()
        elif word == "cluster":
            self._cluster()
        elif word == "subtree":
            self._subtree()
        elif word == "cut":
            self._treecut()
        elif self._peek(1).type in _ARROW_KINDS:
            self._link()
        else:
            self._error_at(tok, f"expected a model item, found {_describe(tok)}")
            self._advance()
            self._sync_to_item()

    def _indicator(self) -> None:
        kw = self._advance()
        itype = _INDICATOR_KEYWORDS[kw.text]
        id_tok = self._expect(TokenType.ID, "indicator id")
        if id_tok is None:
            self._sync_to_item()
            return
        role = FunctionRole.REGULAR
        if self._peek().type is TokenType.AT:
            self._advance()
            flag = self._expect(TokenType.ID, "role flag (key, input or calc)")
            if flag is not None:
                if flag.text in _ROLE_FLAGS:
                    role = _ROLE_FLAGS[flag.text]
                else:
                    self._error_at(flag, f"unknown role flag '@{flag.text}'")
        if self._expect(TokenType.LBRACE) is None:
            self._sync_to_item()
            return
        content = self._content(id_tok.text)
        self.spans.setdefault(id_tok.text, self._span_of(id_tok))
        self.indicators.append(
            Indicator(id=id_tok.text, itype=itype, role=role, content=content)
        )

    def _content(self, indicator_id: str) -> IndicatorContent:
        title: str | None = None
        value_type: ValueType | None = None
        unit: Unit | None = None
        attrs: dict[str, str] = {}
        values: dict[str, float] = {}
        compare: ComparativeValue | None = None
        development: Development | None = None
        responsibility: str | None = None

        def duplicate(tok: Token, what: str) -> None:
            self.diagnostics.append(
                ParseDiagnostic(
                    Severity.ERROR,
                    P_DUPLICATE_CONTENT_KEY,
                    f"duplicate {what} for '{indicator_id}'",
                    self._span_of(tok),
                )
            )

        while True:
            tok = self._peek()
            if tok.type is TokenType.RBRACE:
                self._advance()
                break
            if tok.type is TokenType.EOF:
                self._error_at(tok, "expected '}' to close the indicator block")
                break
            if tok.type is not TokenType.ID or tok.text not in _CONTENT_KEYS:
                self._error_at(
                    tok, f"expected a content key {_CONTENT_KEYS}, found {_describe(tok)}"
                )
                self._sync_content()
                continue
            key = self._advance()
            if key.text == "title":
                val = self._expect(TokenType.STRING, "title string")
                if val is not None:
                    if title is not None:
                        duplicate(key, "title")
                    elif not val.value:
                        self._error_at(val, "title must be nonempty")
                    else:
                        title = str(val.value)
            elif key.text == "unit":
                val = self._expect(TokenType.STRING, "unit string")
                if val is not None:
                    if unit is not None:
                        duplicate(key, "unit")
                    else:
                        try:
                            unit = parse_unit(str(val.value))
                        except ValueError as exc:
                            self.diagnostics.append(
                                ParseDiagnostic(
                                    Severity.ERROR, P_BAD_UNIT, str(exc), self._span_of(val)
                                )
                            )
            elif key.text == "value_type":
                val = self._expect(TokenType.ID, "value type (quantitative, qualitative, leading or lagging)")
                if val is not None:
                    if value_type is not None:
                        duplicate(key, "value_type")
                    else:
                        try:
                            value_type = ValueType(val.text)
                        except ValueError:
                            self._error_at(val, f"unknown value type '{val.text}'")
            elif key.text == "result":
                rt = self._result_type_token()
                if rt is None:
                    self._sync_content()
                    continue
                if self._expect(TokenType.EQUALS) is None:
                    self._sync_content()
                    continue
                num = self._expect(TokenType.NUMBER, "value")
                if num is not None:
                    if rt[0] in values:
                        duplicate(key, f"result value for '{rt[0]}'")
                    else:
                        values[rt[0]] = float(num.value)  # type: ignore[arg-type]
            elif key.text == "compare":
                rt = self._result_type_token()
                if rt is None:
                    self._sync_content()
                    continue
                if self._expect(TokenType.EQUALS) is None:
                    self._sync_content()
                    continue
                num = self._expect(TokenType.NUMBER, "value")
                if num is not None:
                    if compare is not None:
                        duplicate(key, "comparative value")
                    else:
                        compare = ComparativeValue(rt[0], float(num.value))  # type: ignore[arg-type]
            elif key.text == "dev":
                val = self._expect(TokenType.ID, "development (up, flat, down or derived)")
                if val is not None:
                    if development is not None:
                        duplicate(key, "development")
                    else:
                        try:
                            development = Development(val.text)
                        except ValueError:
                            self._error_at(val, f"unknown development '{val.text}'")
            elif key.text == "resp":
                val = self._expect(TokenType.STRING, "responsibility string")
                if val is not None:
                    if responsibility is not None:
                        duplicate(key, "responsibility")
                    else:
                        responsibility = str(val.value)
            elif key.text == "attr":
                name = self._expect(TokenType.STRING, "attribute name string")
                if name is None or self._expect(TokenType.EQUALS) is None:
                    self._sync_content()
                    continue
                val = self._expect(TokenType.STRING, "attribute value string")
                if val is not None:
                    if name.value in attrs:
                        duplicate(key, f"attribute '{name.value}'")
                    else:
                        attrs[str(name.value)] = str(val.value)
        return IndicatorContent(
            title=title or indicator_id,
            value_type=value_type,
            metric_unit=unit,
            data_attributes=attrs,
            result_type_values=values,
            comparative_value=compare,
            development=development,
            responsibility=responsibility,
        )

    def _result_type_token(self) -> tuple[str, Token] | None:
        tok = self._peek()
        if tok.type in (TokenType.ID, TokenType.STRING):
            self._advance()
            text = str(tok.value)
            if not text:
                self._error_at(tok, "result type must be nonempty")
                return None
            return text, tok
        self._error_at(tok, f"expected a result type, found {_describe(tok)}")
        return None

    def _sync_content(self) -> None:
        while True:
            tok = self._peek()
            if tok.type in (TokenType.RBRACE, TokenType.EOF):
                return
            if tok.type is TokenType.ID and tok.text in _CONTENT_KEYS:
                return
            self._advance()

    def _link(self) -> None:
        source = self._advance()
        arrow = self._advance()
        kind = _ARROW_KINDS[arrow.type]
        target = self._expect(TokenType.ID, "target indicator id")
        if target is None:
            self._sync_to_item()
            return
        order: int | None = None
        guard: GatewayGuard | None = None
        if self._peek().type is TokenType.LBRACKET:
            self._advance()
            if self._expect_keyword("order") is None or self._expect(TokenType.EQUALS) is None:
                self._sync_to_item()
                return
            num = self._expect(TokenType.NUMBER, "order integer")
            if num is None:
                self._sync_to_item()
                return
            if float(num.value) != int(float(num.value)) or float(num.value) < 0:  # type: ignore[arg-type]
                self._error_at(num, f"order must be a nonnegative integer, found {num.text}")
                self._sync_to_item()
                return
            order = int(float(num.value))  # type: ignore[arg-type]
            if self._peek().type is TokenType.COMMA:
                self._advance()
                guard = self._guard()
                if guard is None:
                    self._sync_to_item()
                    return
            if self._expect(TokenType.RBRACKET) is None:
                self._sync_to_item()
                return
        self.links.append(
            _ParsedLink(source.text, target.text, kind, order, guard, self._span_of(source))
        )

    def _guard(self) -> GatewayGuard | None:
        if self._expect_keyword("when") is None:
            return None
        tok = self._peek()
        if tok.type is TokenType.ID and tok.text == "default":
            self._advance()
            return GatewayGuard(is_default=True)
        selector: str | None = None
        if tok.type is TokenType.ID:
            selector = self._advance().text
            tok = self._peek()
        if tok.type not in _COMPARATOR_TOKENS:
            self._error_at(tok, f"expected a comparator or 'default', found {_describe(tok)}")
            return None
        comparator = _COMPARATOR_TOKENS[self._advance().type]
        num = self._expect(TokenType.NUMBER, "guard threshold")
        if num is None:
            return None
        return GatewayGuard(
            selector_indicator=selector, comparator=comparator, threshold=float(num.value)  # type: ignore[arg-type]
        )

    def _operator(self) -> None:
        self._advance()
        parent = self._expect(TokenType.ID, "parent indicator id")
        if parent is None or self._expect(TokenType.EQUALS) is None:
            self._sync_to_item()
            return
        tok = self._advance()
        spec: OperatorSpec | None = None
        if tok.type is TokenType.PLUS:
            spec = OperatorSpec(parent.text, Operator.ADD)
        elif tok.type is TokenType.MINUS:
            spec = OperatorSpec(parent.text, Operator.SUBTRACT)
        elif tok.type is TokenType.STAR:
            spec = OperatorSpec(parent.text, Operator.MULTIPLY)
        elif tok.type is TokenType.COLON:
            spec = OperatorSpec(parent.text, Operator.DIVIDE)
        elif tok.type is TokenType.ID and tok.text == "L":
            spec = OperatorSpec(parent.text, Operator.LOGICAL)
        elif tok.type is TokenType.ID and tok.text == "fx":
            spec = self._function_operator(parent.text)
        elif tok.type is TokenType.ID and tok.text == "X":
            spec = self._gateway_operator(parent.text)
        else:
            self._error_at(tok, f"expected an operator symbol, found {_describe(tok)}")
        if spec is not None:
            self.spans.setdefault(spec.parent, self._span_of(parent))
            self.operators.append(spec)
        else:
            self._sync_to_item()

    def _function_operator(self, parent: str) -> OperatorSpec | None:
        if self._expect(TokenType.LPAREN) is None:
            return None
        name = self._expect(TokenType.ID, "function name")
        if name is None:
            return None
        params: dict[str, float] = {}
        while self._peek().type is TokenType.COMMA:
            self._advance()
            pname = self._expect(TokenType.ID, "parameter name")
            if pname is None or self._expect(TokenType.EQUALS) is None:
                return None
            pval = self._expect(TokenType.NUMBER, "parameter value")
            if pval is None:
                return None
            params[pname.text] = float(pval.value)  # type: ignore[arg-type]
        if self._expect(TokenType.RPAREN) is None:
            return None
        return OperatorSpec(
            parent, Operator.FUNCTION, function_name=name.text, function_params=params or None
        )

    def _gateway_operator(self, parent: str) -> OperatorSpec | None:
        if self._expect(TokenType.LPAREN) is None:
            return None
        selector: str | None = None
        if self._peek().type is TokenType.ID:
            selector = self._advance().text
        if self._expect(TokenType.RPAREN) is None:
            return None
        return OperatorSpec(parent, Operator.GATEWAY, selector=selector)

    def _level(self) -> None:
        self._advance()
        kind_tok = self._expect(TokenType.ID, "level kind (type, branch or time)")
        if kind_tok is None or kind_tok.text not in _LEVEL_KEYWORDS:
            if kind_tok is not None:
                self._error_at(kind_tok, f"unknown level kind '{kind_tok.text}'")
            self._sync_to_item()
            return
        if self._expect(TokenType.LBRACE) is None:
            self._sync_to_item()
            return
        bands: list[Band] = []
        while True:
            tok = self._peek()
            if tok.type is TokenType.RBRACE:
                self._advance()
                break
            if tok.type is TokenType.EOF:
                self._error_at(tok, "expected '}' to close the level block")
                break
            name = self._expect(TokenType.STRING, "band name string")
            if name is None or self._expect(TokenType.COLON) is None:
                self._sync_to_item()
                return
            members = self._id_list()
            if members is None:
                self._sync_to_item()
                return
            bands.append(Band(str(name.value), tuple(members)))
            if self._peek().type is TokenType.COMMA:
                self._advance()
        self.levels.append(LevelSpec(_LEVEL_KEYWORDS[kind_tok.text], tuple(bands)))

    def _id_list(self) -> list[str] | None:
        if self._expect(TokenType.LBRACKET) is None:
            return None
        members: list[str] = []
        if self._peek().type is TokenType.RBRACKET:
            self._advance()
            return members
        while True:
            member = self._expect(TokenType.ID, "indicator id")
            if member is None:
                return None
            members.append(member.text)
            tok = self._advance()
            if tok.type is TokenType.RBRACKET:
                return members
            if tok.type is not TokenType.COMMA:
                self._error_at(tok, f"expected ',' or ']', found {_describe(tok)}")
                return None
            if self._peek().type is TokenType.RBRACKET:
                self._advance()
                return members

    def _cluster(self) -> None:
        self._advance()
        kind_tok = self._expect(TokenType.ID, "cluster kind (vdgroup, bizmodel, function or calc)")
        if kind_tok is None or kind_tok.text not in _CLUSTER_KEYWORDS:
            if kind_tok is not None:
                self._error_at(kind_tok, f"unknown cluster kind '{kind_tok.text}'")
            self._sync_to_item()
            return
        name = self._expect(TokenType.STRING, "cluster name string")
        if name is None:
            self._sync_to_item()
            return
        attached_to: str | None = None
        if self._peek().type is TokenType.AT:
            self._advance()
            attach = self._expect(TokenType.ID, "attachment indicator id")
            if attach is None:
                self._sync_to_item()
                return
            attached_to = attach.text
        members = self._id_list()
        if members is None:
            self._sync_to_item()
            return
        self.clusters.append(
            ClusterSpec(
                kind=_CLUSTER_KEYWORDS[kind_tok.text],
                name=str(name.value),
                members=tuple(members),
                attached_to=attached_to,
            )
        )

    def _subtree(self) -> None:
        self._advance()
        boundary = self._expect(TokenType.ID, "boundary indicator id")
        if boundary is None or self._expect(TokenType.DARROW) is None:
            self._sync_to_item()
            return
        ref = self._expect(TokenType.STRING, "sub-tree reference string")
        if ref is None:
            self._sync_to_item()
            return
        self.sub_trees.append(SubTreeRef(boundary.text, str(ref.value)))

    def _treecut(self) -> None:
        self._advance()
        node = self._expect(TokenType.ID, "cut indicator id")
        if node is None or self._expect(TokenType.DARROW) is None:
            self._sync_to_item()
            return
        label = self._expect(TokenType.STRING, "cut label string")
        if label is None:
            self._sync_to_item()
            return
        self.tree_cuts.append(TreeCutRef(node.text, str(label.value)))

    # -- assembly -------------------------------------------------------

    def assemble(self) -> Model | None:
        if any(d.severity is Severity.ERROR for d in self.diagnostics):
            return None
        links = _assign_orders(self.links)
        try:
            return build_model(
                name=self.name or "",
                indicators=self.indicators,
                links=links,
                operators=self.operators,
                levels=self.levels,
                clusters=self.clusters,
                decomposition=Decomposition(
                    sub_trees=tuple(self.sub_trees), tree_cuts=tuple(self.tree_cuts)
                ),
            )
        except ModelError as exc:
            span = self.header_span
            for subject in exc.subjects:
                if subject in self.spans:
                    span = self.spans[subject]
                    break
            self.diagnostics.append(
                ParseDiagnostic(Severity.ERROR, exc.code, exc.message, span)
            )
            return None


def _assign_orders(parsed: list[_ParsedLink]) -> list[Link]:
    """Fill omitted orders with the smallest unused slot per parent."""
    used: dict[str, set[int]] = {}
    for p in parsed:
        if p.kind.is_analytical and p.order is not None:
            used.setdefault(p.target, set()).add(p.order)
    links: list[Link] = []
    for p in parsed:
        order = p.order
        if order is None:
            if p.kind.is_analytical:
                taken = used.setdefault(p.target, set())
                order = 0
                while order in taken:
                    order += 1
                taken.add(order)
            else:
                order = 0
        links.append(Link(p.source, p.target, p.kind, order, p.guard))
    return links


def _describe(tok: Token) -> str:
    if tok.type is TokenType.EOF:
        return "end of input"
    if tok.type is TokenType.ID:
        return f"'{tok.text}'"
    if tok.type is TokenType.STRING:
        return "a string"
    return tok.type.value


def parse_text(source: str, file: str = "<text>") -> ParseResult:
    """Parse DSL text; collects diagnostics instead of raising."""
    diagnostics: list[ParseDiagnostic] = []
    tokens = list(_Lexer(source, file, diagnostics).tokens())
    parser = _Parser(tokens, file, diagnostics)
    parser.parse()
    model = parser.assemble()
    return ParseResult(model, tuple(diagnostics))


def parse_file(path) -> ParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read(), file=str(path))


# -- emission -------------------------------------------------------------


def format_number(value: float) -> str:
    if value != value or value in (math.inf, -math.inf):
        raise ValueError(f"cannot serialize non-finite number {value!r}")
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _quote(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


_TYPE_KEYWORDS = {v: k for k, v in _INDICATOR_KEYWORDS.items()}
_ROLE_KEYWORDS = {v: k for k, v in _ROLE_FLAGS.items()}
_LEVEL_TO_KEYWORD = {v: k for k, v in _LEVEL_KEYWORDS.items()}
_CLUSTER_TO_KEYWORD = {v: k for k, v in _CLUSTER_KEYWORDS.items()}
_ARROW_TEXT = {
    LinkKind.DIRECT: "->",
    LinkKind.INDIRECT: "~>",
    LinkKind.LOGICAL_ALLOCATION: "..>",
}


def _emit_indicator(ind: Indicator, out: list[str]) -> None:
    head = f"  {_TYPE_KEYWORDS[ind.itype]} {ind.id}"
    if ind.role is not FunctionRole.REGULAR:
        head += f" @{_ROLE_KEYWORDS[ind.role]}"
    out.append(head + " {")
    c = ind.content
    out.append(f"    title {_quote(c.title)}")
    if c.value_type is not None:
        out.append(f"    value_type {c.value_type.value}")
    if c.metric_unit is not None:
        out.append(f"    unit {_quote(c.metric_unit.text())}")
    for rt in sorted(c.result_type_values, key=result_type_sort_key):
        out.append(f"    result {_result_type_text(rt)} = {format_number(c.result_type_values[rt])}")
    if c.comparative_value is not None:
        cv = c.comparative_value
        out.append(f"    compare {_result_type_text(cv.result_type)} = {format_number(cv.value)}")
    if c.development is not None:
        out.append(f"    dev {c.development.value}")
    if c.responsibility is not None:
        out.append(f"    resp {_quote(c.responsibility)}")
    for attr in sorted(c.data_attributes):
        out.append(f"    attr {_quote(attr)} = {_quote(c.data_attributes[attr])}")
    out.append("  }")


_BARE_RT = re.compile(r"^[a-z_][a-z0-9_]*$")


def _result_type_text(rt: str) -> str:
    return rt if _BARE_RT.match(rt) else _quote(rt)


def _emit_link(link: Link, model: Model, out: list[str]) -> None:
    line = f"  {link.source} {_ARROW_TEXT[link.kind]} {link.target}"
    tail: list[str] = []
    if link.kind.is_analytical or link.order != 0:
        tail.append(f"order={link.order}")
    if link.guard is not None:
        tail.append(f"when {_guard_text(link.guard, model, link.target)}")
    if tail:
        line += " [" + ", ".join(tail) + "]"
    out.append(line)


def _guard_text(guard: GatewayGuard, model: Model, target: str) -> str:
    if guard.is_default:
        return "default"
    spec = model.operator_by_parent.get(target)
    selector = spec.selector if spec is not None else None
    prefix = ""
    if guard.selector_indicator is not None and guard.selector_indicator != selector:
        prefix = f"{guard.selector_indicator} "
    return f"{prefix}{guard.comparator.value} {format_number(guard.threshold)}"


def _emit_operator(spec: OperatorSpec, out: list[str]) -> None:
    if spec.op is Operator.FUNCTION:
        params = spec.function_params or {}
        inner = spec.function_name + "".join(
            f", {k}={format_number(v)}" for k, v in sorted(params.items())
        )
        rhs = f"fx({inner})"
    elif spec.op is Operator.GATEWAY:
        rhs = f"X({spec.selector})" if spec.selector else "X()"
    else:
        rhs = OPERATOR_SYMBOLS[spec.op]
    out.append(f"  op {spec.parent} = {rhs}")


def emit_text(model: Model) -> str:
    """Canonical DSL text; stable under parse/emit cycles."""
    out: list[str] = [f"model {_quote(model.name)} {{"]
    for ind in model.indicators:
        _emit_indicator(ind, out)
    for link in model.links:
        _emit_link(link, model, out)
    for spec in model.operators:
        _emit_operator(spec, out)
    for level in model.levels:
        out.append(f"  level {_LEVEL_TO_KEYWORD[level.kind]} {{")
        for i, band in enumerate(level.bands):
            comma = "," if i < len(level.bands) - 1 else ""
            out.append(f"    {_quote(band.name)}: [{', '.join(band.members)}]{comma}")
        out.append("  }")
    for cluster in model.clusters:
        attach = f" @{cluster.attached_to}" if cluster.attached_to else ""
        out.append(
            f"  cluster {_CLUSTER_TO_KEYWORD[cluster.kind]} {_quote(cluster.name)}{attach}"
            f" [{', '.join(cluster.members)}]"
        )
    for sub in model.decomposition.sub_trees:
        out.append(f"  subtree {sub.boundary} => {_quote(sub.ref)}")
    for cut in model.decomposition.tree_cuts:
        out.append(f"  cut {cut.node} => {_quote(cut.label)}")
    out.append("}")
    return "\n".join(out) + "\n"
