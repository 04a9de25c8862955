"""Layered coordinate assignment for the SVG renderer.

Rows follow the hierarchy: the root sits in row 0 and every node lands
one row below its lowest parent (longest path from the root). Secondary
sinks such as subsidiary results hover one row above their highest
child; indicators with no links drop to the bottom row. Within a row,
a few barycenter sweeps against the neighbouring rows reduce edge
crossings, with the indicator id as the deterministic tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LayoutOverflow
from ..model import Model

NODE_WIDTH = 170.0
NODE_HEIGHT = 66.0
H_GAP = 36.0
V_GAP = 70.0
MARGIN = 24.0
SWEEPS = 4


@dataclass(frozen=True)
class NodeBox:
    indicator_id: str
    x: float
    y: float
    width: float = NODE_WIDTH
    height: float = NODE_HEIGHT

    @property
    def center_x(self) -> float:
        return self.x + self.width / 2

    @property
    def top(self) -> tuple[float, float]:
        return (self.center_x, self.y)

    @property
    def bottom(self) -> tuple[float, float]:
        return (self.center_x, self.y + self.height)


@dataclass(frozen=True)
class Layout:
    boxes: dict[str, NodeBox]
    rows: tuple[tuple[str, ...], ...]
    width: float
    height: float


def assign_rows(model: Model) -> dict[str, int]:
    parents = {ind.id: [l.target for l in model.parent_links(ind.id)] for ind in model.indicators}
    children = {ind.id: list(model.analytical_children(ind.id)) for ind in model.indicators}
    row: dict[str, int] = {model.root.id: 0}
    ordered = list(reversed(model.topological_order))

    def fill() -> None:
        for iid in ordered:
            if iid in row:
                continue
            known = [row[p] for p in parents[iid] if p in row]
            if known:
                row[iid] = max(known) + 1

    fill()
    # Sinks that are not the root anchor themselves just above their
    # highest placed child; repeat until every connected node is placed.
    progress = True
    while progress:
        progress = False
        for iid in sorted(parents):
            if iid in row or parents[iid]:
                continue
            child_rows = [row[c] for c in children[iid] if c in row]
            if child_rows:
                row[iid] = max(0, min(child_rows) - 1)
                progress = True
                fill()
    bottom = max(row.values(), default=0) + 1
    for ind in model.indicators:
        if ind.id not in row:
            row[ind.id] = bottom
    return row


def _barycenter_sweeps(model: Model, rows: list[list[str]]) -> None:
    neighbours: dict[str, set[str]] = {ind.id: set() for ind in model.indicators}
    for link in model.analytical_links:
        neighbours[link.source].add(link.target)
        neighbours[link.target].add(link.source)

    def reorder(index: int) -> None:
        anchor: dict[str, float] = {}
        for r in (index - 1, index + 1):
            if 0 <= r < len(rows):
                for pos, iid in enumerate(rows[r]):
                    anchor[iid] = float(pos)
        def key(iid: str) -> tuple[float, str]:
            anchors = [anchor[n] for n in neighbours[iid] if n in anchor]
            mean = sum(anchors) / len(anchors) if anchors else float(len(rows[index]))
            return (mean, iid)
        rows[index].sort(key=key)

    for sweep in range(SWEEPS):
        indices = range(len(rows)) if sweep % 2 == 0 else range(len(rows) - 1, -1, -1)
        for index in indices:
            reorder(index)


def layout_model(model: Model, max_width: float = 10000.0) -> Layout:
    row_of = assign_rows(model)
    row_count = max(row_of.values(), default=0) + 1
    rows: list[list[str]] = [[] for _ in range(row_count)]
    for iid in sorted(row_of):
        rows[row_of[iid]].append(iid)
    _barycenter_sweeps(model, rows)

    widths = [len(r) * NODE_WIDTH + max(0, len(r) - 1) * H_GAP for r in rows]
    for index, width in enumerate(widths):
        if width > max_width:
            raise LayoutOverflow(f"row {index}", width, max_width)
    total_width = max(widths, default=NODE_WIDTH) + 2 * MARGIN
    total_height = row_count * NODE_HEIGHT + (row_count - 1) * V_GAP + 2 * MARGIN

    boxes: dict[str, NodeBox] = {}
    for index, row_ids in enumerate(rows):
        y = MARGIN + index * (NODE_HEIGHT + V_GAP)
        x = (total_width - widths[index]) / 2
        for iid in row_ids:
            boxes[iid] = NodeBox(iid, x, y)
            x += NODE_WIDTH + H_GAP
    return Layout(
        boxes=boxes,
        rows=tuple(tuple(r) for r in rows),
        width=total_width,
        height=total_height,
    )
