"""Visual style table for indicator nodes.

The palette: the key business indicator is black, key value drivers are
grey, input/calculation variables are transparent, subsidiary results
and cut leaves get dashed borders. Everything else is a plain white
rectangle. The table is total over (type, role, cut flag).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..model import FunctionRole, Indicator, IndicatorType


class Shape(str, Enum):
    RECTANGLE = "rectangle"


class Fill(str, Enum):
    BLACK = "black"
    GREY = "grey"
    WHITE = "white"
    TRANSPARENT = "transparent"


class Border(str, Enum):
    SOLID = "solid"
    DASHED = "dashed"


@dataclass(frozen=True)
class VisualStyle:
    shape: Shape
    fill: Fill
    border: Border

    @property
    def text_color(self) -> str:
        return "white" if self.fill is Fill.BLACK else "black"


def style_for(indicator: Indicator, is_cut: bool = False) -> VisualStyle:
    """Style per the precedence: root > input > key value > plain."""
    if indicator.itype is IndicatorType.KEY_BUSINESS:
        fill = Fill.BLACK
    elif indicator.role in (FunctionRole.INPUT, FunctionRole.CALCULATION):
        fill = Fill.TRANSPARENT
    elif indicator.role is FunctionRole.KEY_VALUE_INDICATOR:
        fill = Fill.GREY
    else:
        fill = Fill.WHITE
    dashed = indicator.itype is IndicatorType.SUBSIDIARY_RESULT or is_cut
    return VisualStyle(
        shape=Shape.RECTANGLE,
        fill=fill,
        border=Border.DASHED if dashed else Border.SOLID,
    )


SVG_FILL = {
    Fill.BLACK: "#000000",
    Fill.GREY: "#808080",
    Fill.WHITE: "#ffffff",
    Fill.TRANSPARENT: "none",
}

DOT_FILL = {
    Fill.BLACK: "black",
    Fill.GREY: "grey",
    Fill.WHITE: "white",
    Fill.TRANSPARENT: "transparent",
}
