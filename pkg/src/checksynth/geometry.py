"""Integer pixel rectangles shared by every stage of the pipeline."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Rect(NamedTuple):
    """Axis-aligned box: top-left corner plus width and height, in pixels."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def inside(self, width: int, height: int) -> bool:
        """True if the box has positive area and lies within a width x height raster."""
        return self.w > 0 and self.h > 0 and self.x >= 0 and self.y >= 0 and \
            self.x2 <= width and self.y2 <= height

    def contains(self, other: "Rect") -> bool:
        return other.x >= self.x and other.y >= self.y and \
            other.x2 <= self.x2 and other.y2 <= self.y2

    def shifted(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x + dx, self.y + dy, self.w, self.h)

    def as_list(self) -> list[int]:
        return [int(self.x), int(self.y), int(self.w), int(self.h)]


def ink_bbox(mask) -> Rect | None:
    """Tight bounding box of the non-zero pixels of a 2-D mask, or None if empty."""
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.any(axis=0))
    return Rect(int(cols[0]), int(rows[0]),
                int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1))
