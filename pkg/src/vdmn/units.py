"""Units of measurement attached to indicators.

A unit is a product of base-unit symbols raised to integer exponents, e.g.
``$``, ``piece``, ``$/piece`` or ``$*h/piece^2``. The empty product is
dimensionless; ``%`` is dimensionless with a display hint. Multiplication
adds exponents, division subtracts them, and zero exponents vanish, so the
algebra is closed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

_SYMBOL_RE = re.compile(r"[^\s*/^0-9][^\s*/^]*")


@dataclass(frozen=True)
class Unit:
    exponents: tuple[tuple[str, int], ...] = ()
    percent: bool = False

    def __post_init__(self):
        exps = self.exponents
        if isinstance(exps, Mapping):
            exps = tuple(exps.items())
        normalized = tuple(sorted((s, e) for s, e in exps if e != 0))
        if self.percent and normalized:
            raise ValueError("percent units are dimensionless")
        object.__setattr__(self, "exponents", normalized)

    @property
    def is_dimensionless(self) -> bool:
        return not self.exponents

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)

    def multiply(self, other: Unit) -> Unit:
        merged = self.as_dict()
        for sym, exp in other.exponents:
            merged[sym] = merged.get(sym, 0) + exp
        return Unit(tuple(merged.items()))

    def divide(self, other: Unit) -> Unit:
        merged = self.as_dict()
        for sym, exp in other.exponents:
            merged[sym] = merged.get(sym, 0) - exp
        return Unit(tuple(merged.items()))

    def same_dimension(self, other: Unit) -> bool:
        return self.exponents == other.exponents

    def text(self) -> str:
        """Canonical text form, e.g. ``$/piece^2``, ``%``, or ``1``."""
        if self.percent:
            return "%"
        if not self.exponents:
            return "1"
        num = [(s, e) for s, e in self.exponents if e > 0]
        den = [(s, -e) for s, e in self.exponents if e < 0]
        head = "*".join(_term(s, e) for s, e in num) if num else "1"
        if not den:
            return head
        return head + "/" + "/".join(_term(s, e) for s, e in den)

    def __str__(self) -> str:
        return self.text()


DIMENSIONLESS = Unit()
PERCENT = Unit(percent=True)


def _term(symbol: str, exponent: int) -> str:
    return symbol if exponent == 1 else f"{symbol}^{exponent}"


def parse_unit(text: str) -> Unit:
    """Parse a unit expression.

    Accepts ``%``, ``1``, and products/quotients of symbol terms with
    optional ``^`` exponents. Raises ValueError on malformed input.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty unit")
    if text == "%":
        return PERCENT
    exponents: dict[str, int] = {}
    sign = 1
    pos = 0
    expect_term = True
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "*/":
            if expect_term:
                raise ValueError(f"unexpected '{ch}' in unit {text!r}")
            if ch == "/":
                sign = -1
            expect_term = True
            pos += 1
            continue
        if not expect_term:
            raise ValueError(f"missing '*' or '/' before {text[pos:]!r} in unit {text!r}")
        if ch == "1":
            # bare 1 denotes the dimensionless factor, only valid as a full term
            pos += 1
        else:
            match = _SYMBOL_RE.match(text, pos)
            if not match:
                raise ValueError(f"bad unit symbol at {text[pos:]!r} in unit {text!r}")
            symbol = match.group(0)
            pos = match.end()
            exponent = 1
            if pos < len(text) and text[pos] == "^":
                pos += 1
                exp_match = re.match(r"-?\d+", text[pos:])
                if not exp_match:
                    raise ValueError(f"bad exponent in unit {text!r}")
                exponent = int(exp_match.group(0))
                pos += len(exp_match.group(0))
            exponents[symbol] = exponents.get(symbol, 0) + sign * exponent
        sign = 1  # '/' binds only the term that follows it
        expect_term = False
    if expect_term:
        raise ValueError(f"dangling operator in unit {text!r}")
    return Unit(tuple(exponents.items()))
