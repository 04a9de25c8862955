"""Decomposition transforms: sub-tree extraction, tree cuts, and merge.

All three are pure functions returning freshly built models. Extraction
splits on a boundary indicator whose branch is self-contained: if any
link or gateway-selector dependency crosses the partition, the split is
refused rather than silently duplicating or dropping edges, because a
duplicate driver would double-count in sensitivity rankings. A tree cut
prunes the branch behind a node but keeps shared descendants that still
feed surviving nodes. Merging is the inverse of extraction up to the
bookkeeping annotation on the extracted root.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import IdCollision, IsRoot, NonSeparable, ReferenceMismatch, UnknownReference
from .model import (
    Band,
    ClusterKind,
    ClusterSpec,
    Decomposition,
    Indicator,
    IndicatorType,
    LevelSpec,
    Link,
    Model,
    Operator,
    SubTreeRef,
    TreeCutRef,
    build_model,
)

ORIGINAL_TYPE_ATTR = "vdmn.original_type"


def _selector_dependencies(model: Model) -> list[tuple[str, str]]:
    """(selector, gateway parent) pairs, including per-guard selectors."""
    deps: list[tuple[str, str]] = []
    for parent, spec in sorted(model.operator_by_parent.items()):
        if spec.op is not Operator.GATEWAY:
            continue
        selectors = {spec.selector} if spec.selector else set()
        for link in model.child_links(parent):
            if link.guard is not None and link.guard.selector_indicator is not None:
                selectors.add(link.guard.selector_indicator)
        for selector in sorted(selectors):
            deps.append((selector, parent))
    return deps


def _filter_levels(levels, keep: set[str]) -> list[LevelSpec]:
    out = []
    for level in levels:
        bands = []
        for band in level.bands:
            members = tuple(m for m in band.members if m in keep)
            if members:
                bands.append(Band(band.name, members))
        if bands:
            out.append(LevelSpec(level.kind, tuple(bands)))
    return out


def _filter_clusters(clusters, keep: set[str]) -> list[ClusterSpec]:
    out = []
    for cluster in clusters:
        if cluster.kind is ClusterKind.VALUE_DRIVER_GROUP:
            # The group annotates its attachment point, so it travels with it.
            if cluster.attached_to is not None and cluster.attached_to not in keep:
                continue
        members = tuple(m for m in cluster.members if m in keep)
        if not members:
            continue
        attached = cluster.attached_to if cluster.attached_to in keep else None
        out.append(ClusterSpec(cluster.kind, cluster.name, members, attached))
    return out


def _filter_decomposition(decomposition: Decomposition, keep: set[str]) -> Decomposition:
    return Decomposition(
        sub_trees=tuple(s for s in decomposition.sub_trees if s.boundary in keep),
        tree_cuts=tuple(c for c in decomposition.tree_cuts if c.node in keep),
    )


def extract_subtree(model: Model, boundary: str):
    """Split at the boundary: its branch becomes a stand-alone model.

    Returns (extracted, remainder). The boundary appears in both: as the
    extracted model's root (retyped, original type kept in a data
    attribute) and as a referencing leaf in the remainder.
    """
    ind = model.indicator(boundary)
    if ind.id == model.root.id:
        raise IsRoot(boundary)

    inside = model.descendants_of(boundary)
    extracted_ids = inside | {boundary}
    remainder_ids = {i.id for i in model.indicators} - inside

    crossing: list[tuple[str, str]] = []
    for link in model.links:
        if link.source in inside and link.target not in extracted_ids:
            crossing.append((link.source, link.target))
        elif link.source not in inside and link.target in inside:
            crossing.append((link.source, link.target))
    for selector, gateway in _selector_dependencies(model):
        if gateway in inside or gateway == boundary:
            if selector not in extracted_ids:
                crossing.append((selector, gateway))
        else:
            if selector in inside:
                crossing.append((selector, gateway))
    for cluster in model.clusters:
        if cluster.kind is not ClusterKind.VALUE_DRIVER_GROUP:
            continue
        attached = cluster.attached_to
        if attached is None or attached == boundary:
            # Attachment-free groups split like plain clusters; a group on
            # the boundary itself lands in both halves and re-unions.
            continue
        if attached in inside:
            stranded = [m for m in cluster.members if m not in extracted_ids]
        else:
            stranded = [m for m in cluster.members if m in inside]
        crossing.extend((member, attached) for member in stranded)
    if crossing:
        raise NonSeparable(tuple(sorted(set(crossing))))

    extracted_indicators = []
    for i in model.indicators:
        if i.id == boundary:
            attrs = dict(i.content.data_attributes)
            attrs[ORIGINAL_TYPE_ATTR] = i.itype.value
            extracted_indicators.append(
                replace(
                    i,
                    itype=IndicatorType.KEY_BUSINESS,
                    content=replace(i.content, data_attributes=attrs),
                )
            )
        elif i.id in inside:
            extracted_indicators.append(i)

    extracted = build_model(
        name=boundary,
        indicators=extracted_indicators,
        links=[l for l in model.links if l.source in inside],
        operators=[o for o in model.operators if o.parent in extracted_ids],
        levels=_filter_levels(model.levels, extracted_ids),
        clusters=_filter_clusters(model.clusters, extracted_ids),
        decomposition=_filter_decomposition(model.decomposition, inside),
    )

    remainder_decomp = _filter_decomposition(model.decomposition, remainder_ids - {boundary})
    remainder = build_model(
        name=model.name,
        indicators=[i for i in model.indicators if i.id in remainder_ids],
        links=[l for l in model.links if l.source in remainder_ids and l.target in remainder_ids],
        operators=[o for o in model.operators if o.parent in remainder_ids and o.parent != boundary],
        levels=_filter_levels(model.levels, remainder_ids),
        clusters=_filter_clusters(model.clusters, remainder_ids),
        decomposition=Decomposition(
            sub_trees=remainder_decomp.sub_trees + (SubTreeRef(boundary, extracted.name),),
            tree_cuts=remainder_decomp.tree_cuts,
        ),
    )
    return extracted, remainder


def merge_subtree(remainder: Model, extracted: Model) -> Model:
    """Reattach an extracted branch at its recorded boundary."""
    entry = next(
        (s for s in remainder.decomposition.sub_trees if s.ref == extracted.name), None
    )
    if entry is None:
        raise ReferenceMismatch(
            f"remainder '{remainder.name}' has no sub-tree reference named '{extracted.name}'"
        )
    boundary = entry.boundary
    if extracted.root.id != boundary:
        raise ReferenceMismatch(
            f"extracted root '{extracted.root.id}' does not match the recorded "
            f"boundary '{boundary}'"
        )
    incoming = {i.id for i in extracted.indicators} - {boundary}
    collisions = tuple(sorted(incoming & {i.id for i in remainder.indicators}))
    if collisions:
        raise IdCollision(collisions)

    # The remainder's view of the boundary wins: it keeps the original
    # type and carries no extraction annotation.
    indicators = list(remainder.indicators) + [
        i for i in extracted.indicators if i.id != boundary
    ]
    links = list(remainder.links) + list(extracted.links)
    operators = [o for o in remainder.operators if o.parent != boundary] + list(
        extracted.operators
    )

    levels_by_kind: dict = {}
    for level in list(remainder.levels) + list(extracted.levels):
        if level.kind not in levels_by_kind:
            levels_by_kind[level.kind] = {}
        bands = levels_by_kind[level.kind]
        for band in level.bands:
            bands.setdefault(band.name, set()).update(band.members)
    levels = [
        LevelSpec(kind, tuple(Band(name, tuple(members)) for name, members in bands.items()))
        for kind, bands in levels_by_kind.items()
    ]

    clusters_by_key: dict = {}
    for cluster in list(remainder.clusters) + list(extracted.clusters):
        key = (cluster.kind, cluster.name)
        if key in clusters_by_key:
            prior = clusters_by_key[key]
            clusters_by_key[key] = ClusterSpec(
                cluster.kind,
                cluster.name,
                tuple(set(prior.members) | set(cluster.members)),
                prior.attached_to or cluster.attached_to,
            )
        else:
            clusters_by_key[key] = cluster
    clusters = list(clusters_by_key.values())

    sub_trees = tuple(
        s
        for s in remainder.decomposition.sub_trees + extracted.decomposition.sub_trees
        if not (s.boundary == boundary and s.ref == extracted.name)
    )
    tree_cuts = remainder.decomposition.tree_cuts + extracted.decomposition.tree_cuts

    return build_model(
        name=remainder.name,
        indicators=indicators,
        links=links,
        operators=operators,
        levels=levels,
        clusters=clusters,
        decomposition=Decomposition(sub_trees=sub_trees, tree_cuts=tree_cuts),
    )


def apply_tree_cut(model: Model, node: str, label: str) -> Model:
    """Prune the branch behind the node; it becomes a referencing leaf.

    Descendants that still feed a surviving indicator through any link or
    selector dependency stay in the model.
    """
    ind = model.indicator(node)
    if ind.id == model.root.id:
        raise IsRoot(node)

    candidates = model.descendants_of(node)
    kept = {i.id for i in model.indicators} - candidates

    # Dependency edges that keep a candidate alive, minus the severed
    # links into the cut node itself.
    edges: dict[str, set[str]] = {}
    for link in model.links:
        if link.target == node and link.kind.is_analytical:
            continue
        edges.setdefault(link.source, set()).add(link.target)
    for selector, gateway in _selector_dependencies(model):
        edges.setdefault(selector, set()).add(gateway)

    changed = True
    while changed:
        changed = False
        for candidate in sorted(candidates - kept):
            if edges.get(candidate, set()) & kept:
                kept.add(candidate)
                changed = True
    removed = candidates - kept

    links = [
        l
        for l in model.links
        if l.source in kept
        and l.target in kept
        and not (l.target == node and l.kind.is_analytical)
    ]
    cuts = tuple(c for c in model.decomposition.tree_cuts if c.node in kept and c.node != node)
    return build_model(
        name=model.name,
        indicators=[i for i in model.indicators if i.id in kept],
        links=links,
        operators=[o for o in model.operators if o.parent in kept and o.parent != node],
        levels=_filter_levels(model.levels, kept),
        clusters=_filter_clusters(model.clusters, kept),
        decomposition=Decomposition(
            sub_trees=tuple(
                s for s in model.decomposition.sub_trees if s.boundary in kept
            ),
            tree_cuts=cuts + (TreeCutRef(node, label),),
        ),
    )
