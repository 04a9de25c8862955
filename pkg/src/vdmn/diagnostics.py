"""Coded diagnostics shared by the parser, interchange reader, and validator.

Codes are stable identifiers: P* for syntax and interchange problems,
M* for structural model errors, V* for validation rules. Tests and tools
key on codes, never on message text.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan

    def to_json_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "span": {
                "file": self.span.file,
                "line": self.span.line,
                "column": self.span.column,
                "length": self.span.length,
            },
        }

    def render(self) -> str:
        return f"{self.span}: {self.severity.value}[{self.code}]: {self.message}"


@dataclass(frozen=True)
class ValidationDiagnostic:
    code: str
    severity: Severity
    subjects: tuple[str, ...]
    message: str

    def to_json_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "subjects": list(self.subjects),
            "message": self.message,
        }

    def render(self) -> str:
        subjects = " (" + ", ".join(self.subjects) + ")" if self.subjects else ""
        return f"{self.severity.value}[{self.code}]: {self.message}{subjects}"


# Parser / interchange diagnostic codes
P_BAD_CHARACTER = "P001"
P_UNTERMINATED_STRING = "P002"
P_BAD_NUMBER = "P003"
P_UNEXPECTED_TOKEN = "P004"
P_UNEXPECTED_EOF = "P005"
P_BAD_UNIT = "P006"
P_DUPLICATE_CONTENT_KEY = "P007"
P_BAD_ESCAPE = "P008"
P_INVALID_JSON = "P101"
P_SCHEMA_VIOLATION = "P102"
