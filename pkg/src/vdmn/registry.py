"""Named model store backing the service and sub-tree references.

A registry maps short names (file stems) to parsed models. ``load_dir``
reads every ``*.vdt`` and ``*.vdt.json``/``*.json`` model file in a
directory; ``load_corpus`` loads the two models shipped with the
package. Sub-tree references point across models by registry name or
by model name, resolved with ``resolve_ref``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .diagnostics import ParseDiagnostic, Severity
from .dsl import parse_text
from .errors import InvalidArgument
from .interchange import parse_interchange
from .model import Model

_CORPUS_PACKAGE = "vdmn.corpus"


@dataclass
class ModelRegistry:
    """Mutable name -> model map with parse bookkeeping."""

    models: dict[str, Model] = field(default_factory=dict)
    diagnostics: dict[str, tuple[ParseDiagnostic, ...]] = field(default_factory=dict)
    sources: dict[str, str] = field(default_factory=dict)

    def names(self) -> list[str]:
        return sorted(self.models)

    def get(self, name: str) -> Model | None:
        return self.models.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.models

    def __len__(self) -> int:
        return len(self.models)

    def add(self, name: str, model: Model, *, source: str = "",
            diagnostics: tuple[ParseDiagnostic, ...] = ()) -> None:
        if name in self.models:
            raise InvalidArgument(f"registry already holds a model named '{name}'")
        self.models[name] = model
        self.diagnostics[name] = diagnostics
        if source:
            self.sources[name] = source

    def add_text(self, name: str, source: str, *, file: str = "<text>") -> Model:
        result = parse_text(source, file=file)
        model = result.expect()
        self.add(name, model, source=file,
                 diagnostics=tuple(d for d in result.diagnostics))
        return model

    def resolve_ref(self, ref: str) -> Model | None:
        """Model a sub-tree reference points to, by registry or model name."""
        hit = self.models.get(ref)
        if hit is not None:
            return hit
        for model in self.models.values():
            if model.name == ref:
                return model
        return None


def _load_source(registry: ModelRegistry, name: str, text: str, file: str) -> None:
    if file.endswith(".json"):
        result = parse_interchange(text, file=file)
    else:
        result = parse_text(text, file=file)
    errors = [d for d in result.diagnostics if d.severity is Severity.ERROR]
    if errors or result.model is None:
        rendered = "; ".join(d.render() for d in errors) or "no model produced"
        raise InvalidArgument(f"cannot load '{file}': {rendered}")
    registry.add(name, result.model, source=file,
                 diagnostics=tuple(result.diagnostics))


def _stem(filename: str) -> str:
    for suffix in (".vdt.json", ".vdt", ".json"):
        if filename.endswith(suffix):
            return filename[: -len(suffix)]
    return filename


def load_dir(path: str | Path) -> ModelRegistry:
    """Registry over every model file directly inside ``path``."""
    base = Path(path)
    if not base.is_dir():
        raise InvalidArgument(f"'{base}' is not a directory")
    registry = ModelRegistry()
    entries = sorted(
        p for p in base.iterdir()
        if p.is_file()
        and (p.name.endswith(".vdt") or p.name.endswith(".vdt.json")
             or p.name.endswith(".json"))
        and not p.name.endswith(".expected.json")
    )
    for entry in entries:
        _load_source(registry, _stem(entry.name), entry.read_text("utf-8"), str(entry))
    if not registry.models:
        raise InvalidArgument(f"no model files found in '{base}'")
    return registry


def load_corpus() -> ModelRegistry:
    """The two models packaged with the library."""
    registry = ModelRegistry()
    root = resources.files(_CORPUS_PACKAGE)
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".vdt"):
            _load_source(
                registry,
                _stem(entry.name),
                entry.read_text(encoding="utf-8"),
                entry.name,
            )
    return registry


def corpus_expectations() -> dict[str, dict]:
    """Packaged expected-results records, keyed by model name."""
    out: dict[str, dict] = {}
    root = resources.files(_CORPUS_PACKAGE)
    for entry in root.iterdir():
        if entry.name.endswith(".expected.json"):
            record = json.loads(entry.read_text(encoding="utf-8"))
            out[record["model"]] = record
    return out
