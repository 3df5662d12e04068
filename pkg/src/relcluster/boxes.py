"""Axis-parallel boxes and box-with-hole regions.

Boxes carry per-side closedness bits so that box partitions (children of a
split, the 2d-piece decomposition of a box with a hole) are exactly disjoint:
every point lies in at most one piece, decided by ordinary float comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class Box:
    """Product of per-attribute intervals, each side open or closed."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    lo_closed: tuple[bool, ...] = None  # type: ignore[assignment]
    hi_closed: tuple[bool, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        d = len(self.lo)
        if len(self.hi) != d:
            raise GeometryError("box lo/hi dimension mismatch")
        if self.lo_closed is None:
            object.__setattr__(self, "lo_closed", (True,) * d)
        if self.hi_closed is None:
            object.__setattr__(self, "hi_closed", (True,) * d)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def is_empty(self) -> bool:
        for i in range(self.dim):
            if self.lo[i] > self.hi[i]:
                return True
            if self.lo[i] == self.hi[i] and not (self.lo_closed[i] and self.hi_closed[i]):
                return True
        return False

    def contains_point(self, p: Sequence[float]) -> bool:
        for i, x in enumerate(p):
            if x < self.lo[i] or (x == self.lo[i] and not self.lo_closed[i]):
                return False
            if x > self.hi[i] or (x == self.hi[i] and not self.hi_closed[i]):
                return False
        return True

    def mask_of(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (n, d) coordinate array."""
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise GeometryError("point array dimension mismatch")
        mask = np.ones(len(pts), dtype=bool)
        for i in range(self.dim):
            col = pts[:, i]
            mask &= (col >= self.lo[i]) if self.lo_closed[i] else (col > self.lo[i])
            mask &= (col <= self.hi[i]) if self.hi_closed[i] else (col < self.hi[i])
        return mask

    def contains_box(self, other: "Box") -> bool:
        """Componentwise containment; closedness checked on shared endpoints."""
        if other.is_empty():
            return True
        for i in range(self.dim):
            if other.lo[i] < self.lo[i] or other.hi[i] > self.hi[i]:
                return False
            if other.lo[i] == self.lo[i] and other.lo_closed[i] and not self.lo_closed[i]:
                return False
            if other.hi[i] == self.hi[i] and other.hi_closed[i] and not self.hi_closed[i]:
                return False
        return True

    def min_sqdist(self, x: Sequence[float]) -> float:
        """Squared distance from x to the closure of the box."""
        s = 0.0
        for i, v in enumerate(x):
            if v < self.lo[i]:
                s += (self.lo[i] - v) ** 2
            elif v > self.hi[i]:
                s += (v - self.hi[i]) ** 2
        return s

    def max_sqdist(self, x: Sequence[float]) -> float:
        """Squared distance from x to the farthest corner."""
        s = 0.0
        for i, v in enumerate(x):
            s += max(abs(v - self.lo[i]), abs(v - self.hi[i])) ** 2
        return s


@dataclass(frozen=True)
class Region:
    """A box, or the difference outer - hole of two nested boxes."""

    outer: Box
    hole: Optional[Box] = None
    _pieces: tuple = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.hole is not None and not self.outer.contains_box(self.hole):
            raise GeometryError("hole is not contained in the outer box")
        pieces = (self.outer,) if self.hole is None else tuple(decompose_hole(self))
        object.__setattr__(self, "_pieces", pieces)

    @property
    def dim(self) -> int:
        return self.outer.dim

    def pieces(self) -> tuple[Box, ...]:
        """Disjoint boxes whose union is the region (just the outer box if no hole)."""
        return self._pieces

    def contains_point(self, p: Sequence[float]) -> bool:
        if not self.outer.contains_point(p):
            return False
        return self.hole is None or not self.hole.contains_point(p)

    def mask_of(self, pts: np.ndarray) -> np.ndarray:
        mask = self.outer.mask_of(pts)
        if self.hole is not None:
            mask &= ~self.hole.mask_of(pts)
        return mask

    def min_sqdist(self, x: Sequence[float]) -> float:
        if not self._pieces:
            return float("inf")
        return min(b.min_sqdist(x) for b in self._pieces)

    def max_sqdist(self, x: Sequence[float]) -> float:
        if not self._pieces:
            return 0.0
        return max(b.max_sqdist(x) for b in self._pieces)


def decompose_hole(region: Region) -> list[Box]:
    """Partition outer - hole into at most 2d pairwise-disjoint boxes.

    Peeling order: for each dimension i ascending, emit the slab below the
    hole then the slab above it, with dimensions < i pinned to the hole's
    interval and dimensions > i spanning the full outer interval.  Empty
    slabs (hole face touching the outer boundary) are dropped.
    """
    outer, hole = region.outer, region.hole
    if hole is None:
        return [outer]
    if not outer.contains_box(hole):
        raise GeometryError("hole is not contained in the outer box")
    d = outer.dim
    boxes: list[Box] = []
    for i in range(d):
        lo = list(hole.lo[:i]) + [0.0] + list(outer.lo[i + 1 :])
        hi = list(hole.hi[:i]) + [0.0] + list(outer.hi[i + 1 :])
        loc = list(hole.lo_closed[:i]) + [True] + list(outer.lo_closed[i + 1 :])
        hic = list(hole.hi_closed[:i]) + [True] + list(outer.hi_closed[i + 1 :])
        # slab below the hole in dimension i
        below = Box(
            tuple(lo[:i] + [outer.lo[i]] + lo[i + 1 :]),
            tuple(hi[:i] + [hole.lo[i]] + hi[i + 1 :]),
            tuple(loc[:i] + [outer.lo_closed[i]] + loc[i + 1 :]),
            tuple(hic[:i] + [not hole.lo_closed[i]] + hic[i + 1 :]),
        )
        # slab above the hole in dimension i
        above = Box(
            tuple(lo[:i] + [hole.hi[i]] + lo[i + 1 :]),
            tuple(hi[:i] + [outer.hi[i]] + hi[i + 1 :]),
            tuple(loc[:i] + [not hole.hi_closed[i]] + loc[i + 1 :]),
            tuple(hic[:i] + [outer.hi_closed[i]] + hic[i + 1 :]),
        )
        for b in (below, above):
            if not b.is_empty():
                boxes.append(b)
    return boxes


def parse_box_literal(text: str, attr_names: Sequence[str]) -> Box:
    """Parse the CLI grammar ``ATTR:lo..hi,ATTR:lo..hi`` into a closed box.

    Unlisted attributes are unconstrained (full real line).
    """
    lo = [-np.inf] * len(attr_names)
    hi = [np.inf] * len(attr_names)
    index = {a: i for i, a in enumerate(attr_names)}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part or ".." not in part:
            raise GeometryError(f"bad box literal component {part!r}")
        name, rng = part.split(":", 1)
        name = name.strip()
        if name not in index:
            raise GeometryError(
                f"unknown attribute {name!r} in box literal; clustering attributes are {list(attr_names)}"
            )
        a, b = rng.split("..", 1)
        try:
            lo[index[name]] = float(a)
            hi[index[name]] = float(b)
        except ValueError as exc:
            raise GeometryError(f"bad interval in box literal {part!r}") from exc
    return Box(tuple(lo), tuple(hi))
