"""Exception hierarchy for model construction, evaluation, and transforms.

Model construction errors carry a stable ``code`` (M001...) so that parsers
and the service layer can surface them as coded diagnostics without string
matching on messages.
"""

from __future__ import annotations


class VdmnError(Exception):
    """Base class for all toolkit errors."""


class ModelError(VdmnError):
    """A structural invariant was violated while building a model."""

    code = "M000"

    def __init__(self, message: str, subjects: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.subjects = tuple(subjects)


class DuplicateId(ModelError):
    code = "M001"

    def __init__(self, indicator_id: str):
        super().__init__(f"duplicate indicator id '{indicator_id}'", (indicator_id,))


class CycleDetected(ModelError):
    code = "M002"

    def __init__(self, path: tuple[str, ...]):
        super().__init__("analytical links form a cycle: " + " -> ".join(path), path)
        self.path = tuple(path)


class NoRoot(ModelError):
    code = "M003"

    def __init__(self, message: str = "model has no key business indicator"):
        super().__init__(message)


class MultipleRoots(ModelError):
    code = "M004"

    def __init__(self, ids: tuple[str, ...]):
        super().__init__(
            "model declares more than one key business indicator: " + ", ".join(ids), ids
        )


class UnknownReference(ModelError):
    code = "M005"

    def __init__(self, indicator_id: str, context: str = ""):
        where = f" in {context}" if context else ""
        super().__init__(f"reference to unknown indicator '{indicator_id}'{where}", (indicator_id,))
        self.indicator_id = indicator_id


class MultipleDirectParents(ModelError):
    code = "M006"

    def __init__(self, indicator_id: str, parents: tuple[str, ...]):
        super().__init__(
            f"'{indicator_id}' has more than one direct parent: " + ", ".join(parents),
            (indicator_id,),
        )


class DuplicateGuardDefault(ModelError):
    code = "M007"

    def __init__(self, parent_id: str):
        super().__init__(f"gateway '{parent_id}' declares more than one default guard", (parent_id,))


class DuplicateLink(ModelError):
    code = "M008"

    def __init__(self, source: str, target: str):
        super().__init__(f"duplicate link {source} -> {target}", (source, target))


class DuplicateOrder(ModelError):
    code = "M009"

    def __init__(self, target: str, order: int):
        super().__init__(
            f"children of '{target}' reuse order {order}; orders must be distinct", (target,)
        )


class DuplicateOperator(ModelError):
    code = "M010"

    def __init__(self, parent_id: str):
        super().__init__(f"more than one operator declared for '{parent_id}'", (parent_id,))


class DuplicateLevelKind(ModelError):
    code = "M011"

    def __init__(self, kind: str):
        super().__init__(f"more than one level of kind '{kind}'")


class BandOverlap(ModelError):
    code = "M012"

    def __init__(self, kind: str, indicator_id: str):
        super().__init__(
            f"indicator '{indicator_id}' appears in more than one band of the '{kind}' level",
            (indicator_id,),
        )


class EmptyCluster(ModelError):
    code = "M013"

    def __init__(self, name: str):
        super().__init__(f"cluster '{name}' has no members")


class DuplicateCluster(ModelError):
    code = "M014"

    def __init__(self, kind: str, name: str):
        super().__init__(f"duplicate cluster '{name}' of kind '{kind}'")


class InvalidId(ModelError):
    code = "M015"

    def __init__(self, indicator_id: str):
        super().__init__(
            f"invalid indicator id {indicator_id!r}; ids use letters, digits, '_' and '-'",
            (indicator_id,),
        )


class DuplicateDecompositionEntry(ModelError):
    code = "M016"

    def __init__(self, indicator_id: str):
        super().__init__(
            f"indicator '{indicator_id}' referenced by more than one decomposition entry",
            (indicator_id,),
        )


class EngineError(VdmnError):
    """Evaluation could not proceed."""


class DivisionByZero(EngineError):
    def __init__(self, parent_id: str):
        super().__init__(f"division by zero while computing '{parent_id}'")
        self.parent_id = parent_id


class UnknownFunction(EngineError):
    def __init__(self, name: str):
        super().__init__(f"unknown function '{name}'")
        self.name = name


class FunctionApplicationError(EngineError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"function '{name}': {reason}")
        self.name = name


class GuardUnresolvable(EngineError):
    def __init__(self, gateway_id: str, reason: str = "no guard matched and no default declared"):
        super().__init__(f"gateway '{gateway_id}': {reason}")
        self.gateway_id = gateway_id


class ConflictingBinding(EngineError):
    def __init__(self, indicator_id: str):
        super().__init__(
            f"'{indicator_id}' is computed by an operator and cannot be bound directly"
        )
        self.indicator_id = indicator_id


class OverrideNotALeafDriver(EngineError):
    def __init__(self, indicator_id: str):
        super().__init__(
            f"'{indicator_id}' is not an overridable leaf driver, external factor, or cut node"
        )
        self.indicator_id = indicator_id


class RootNotComputable(EngineError):
    def __init__(self, root_id: str, reason: str):
        super().__init__(f"root '{root_id}' is not computable: {reason}")
        self.root_id = root_id


class TransformError(VdmnError):
    """A decomposition transform was not applicable."""


class IsRoot(TransformError):
    def __init__(self, indicator_id: str):
        super().__init__(f"'{indicator_id}' is the root and cannot be extracted or cut")


class NonSeparable(TransformError):
    def __init__(self, links: tuple[tuple[str, str], ...]):
        pairs = ", ".join(f"{s} -> {t}" for s, t in links)
        super().__init__(f"subtree is not separable; escaping links: {pairs}")
        self.links = tuple(links)


class ReferenceMismatch(TransformError):
    def __init__(self, message: str):
        super().__init__(message)


class IdCollision(TransformError):
    def __init__(self, ids: tuple[str, ...]):
        super().__init__("indicator ids collide during merge: " + ", ".join(ids))
        self.ids = tuple(ids)


class RenderError(VdmnError):
    pass


class LayoutOverflow(RenderError):
    def __init__(self, band: str, width: float, max_width: float):
        super().__init__(
            f"layer '{band}' is {width:.0f}px wide, exceeding the {max_width:.0f}px limit; "
            "consider decomposing the model"
        )


class InvalidArgument(VdmnError, ValueError):
    pass
