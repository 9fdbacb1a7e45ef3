"""Dyadic-cube Hausdorff content: sparse tree DP for the minimal cover,
densest-cube extraction, and the zoom that rescales a dense cube to the
unit cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    AngleLabError,
    BudgetExceeded,
    EmptyGrid,
    InvalidDelta,
    InvalidDepth,
    InvalidDimension,
)
from .geom import PointCloud

# Cap on 2^(levels * dimension), the number of cells a full grid would hold.
DEFAULT_CELL_BUDGET = 2_000_000

Cell = tuple[int, ...]
Cube = tuple[int, Cell]


@dataclass(frozen=True)
class DyadicGrid:
    """Occupied cells of the level-m dyadic subdivision of the unit cube.

    Cell (i1, ..., id) is the product of the intervals
    [i_j * 2^(-m), (i_j + 1) * 2^(-m)).
    """

    dimension: int
    levels: int
    occupied: frozenset[Cell]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InvalidDimension("grid dimension must be at least 1")
        if self.levels < 0:
            raise InvalidDepth("grid level count must be non-negative")
        side = 1 << self.levels
        for cell in self.occupied:
            if len(cell) != self.dimension:
                raise InvalidDimension(
                    f"cell {cell} does not have {self.dimension} coordinates"
                )
            if not all(isinstance(c, int) and 0 <= c < side for c in cell):
                raise AngleLabError(f"cell {cell} is outside [0, 2^{self.levels})^d")

    def __len__(self) -> int:
        return len(self.occupied)

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "levels": self.levels,
            "occupied": [list(c) for c in sorted(self.occupied)],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DyadicGrid":
        cells = frozenset(tuple(int(c) for c in cell) for cell in data["occupied"])
        return cls(int(data["dimension"]), int(data["levels"]), cells)


def from_points(
    cloud: PointCloud, m: int, budget: int = DEFAULT_CELL_BUDGET
) -> DyadicGrid:
    """Mark every level-m cell holding a cloud point.

    The cloud must already sit inside the unit cube.  A point on a cell
    boundary goes to the lower-index cell, so the full grid of cell
    corners rasterizes deterministically.
    """
    if m < 0:
        raise InvalidDepth("grid level count must be non-negative")
    d = cloud.dimension
    if (1 << (m * d)) > budget:
        raise BudgetExceeded(
            f"a level-{m} grid in dimension {d} holds 2^{m * d} cells"
        )
    pts = cloud.points
    if len(cloud) and (pts.min() < 0.0 or pts.max() > 1.0):
        raise AngleLabError("points must lie inside the unit cube")
    side = 1 << m
    idx = np.clip(np.ceil(pts * side).astype(np.int64) - 1, 0, side - 1)
    cells = frozenset(tuple(int(c) for c in row) for row in idx)
    return DyadicGrid(d, m, cells)


def _tree_values(
    grid: DyadicGrid, s: float
) -> tuple[list[dict[Cell, float]], list[dict[Cell, bool]]]:
    """Minimal cover value and take-own-cube flag for every nonempty node.

    values[j][idx] is the cheapest cover of the occupied cells inside the
    level-j cube idx; flags[j][idx] says whether the single cube idx
    itself achieves it (ties prefer the coarser cube).
    """
    m = grid.levels
    values: list[dict[Cell, float]] = [dict() for _ in range(m + 1)]
    flags: list[dict[Cell, bool]] = [dict() for _ in range(m + 1)]
    leaf = (2.0 ** (-m)) ** s
    for cell in grid.occupied:
        values[m][cell] = leaf
        flags[m][cell] = True
    for j in range(m - 1, -1, -1):
        own = (2.0 ** (-j)) ** s
        sums: dict[Cell, float] = {}
        # accumulate children in sorted order so the value is a canonical
        # left-to-right sum, reproducible across interpreter runs
        for child in sorted(values[j + 1]):
            parent = tuple(c >> 1 for c in child)
            sums[parent] = sums.get(parent, 0.0) + values[j + 1][child]
        for parent, child_sum in sums.items():
            take = own <= child_sum
            values[j][parent] = own if take else child_sum
            flags[j][parent] = take
    return values, flags


@dataclass(frozen=True)
class ContentResult:
    """Value of the minimal dyadic cover and the antichain achieving it."""

    value: float
    exponent: float
    cover: tuple[Cube, ...]

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "exponent": self.exponent,
            "cover": [[level, list(idx)] for level, idx in self.cover],
        }


def dyadic_content(grid: DyadicGrid, s: float) -> ContentResult:
    """Infimum of sum(edge^s) over dyadic-cube covers of the occupied cells.

    Bottom-up over the cube tree: a node is covered either by itself or
    by the best covers of its nonempty children, whichever is cheaper
    (the node wins ties, keeping the cover coarse).
    """
    if s <= 0.0:
        raise AngleLabError("content exponent must be positive")
    if not grid.occupied:
        return ContentResult(0.0, float(s), ())
    values, flags = _tree_values(grid, s)
    root: Cell = (0,) * grid.dimension
    cover: list[Cube] = []
    stack: list[Cube] = [(0, root)]
    while stack:
        level, idx = stack.pop()
        if flags[level][idx]:
            cover.append((level, idx))
            continue
        base = tuple(c << 1 for c in idx)
        for child in values[level + 1]:
            if tuple(c >> 1 for c in child) == idx:
                stack.append((level + 1, child))
    cover.sort()
    return ContentResult(values[0][root], float(s), tuple(cover))


class DenseCubeResult(NamedTuple):
    cube: Cube
    normalized_content: float
    meets_lemma: bool


def dense_cube(grid: DyadicGrid, s: float) -> DenseCubeResult:
    """Dyadic cube maximizing content of the restriction over edge^s.

    Ties go to the coarsest level, then the smallest index.  meets_lemma
    reports whether the maximum clears the density threshold 2^(-2-s).
    """
    if not grid.occupied:
        raise EmptyGrid("dense cube search needs an occupied cell")
    if s <= 0.0:
        raise AngleLabError("content exponent must be positive")
    values, _ = _tree_values(grid, s)
    best: Cube | None = None
    best_val = -1.0
    for level in range(grid.levels + 1):
        edge_pow = (2.0 ** (-level)) ** s
        for idx in sorted(values[level]):
            ratio = values[level][idx] / edge_pow
            if ratio > best_val:
                best_val = ratio
                best = (level, idx)
    assert best is not None
    return DenseCubeResult(best, best_val, best_val >= 2.0 ** (-2.0 - s))


@dataclass(frozen=True)
class ZoomResult:
    """A dense cube together with its restriction rescaled to the unit cube."""

    cube: Cube
    normalized_content: float
    passes_claim: bool
    rescaled: DyadicGrid

    def to_json_dict(self) -> dict:
        return {
            "cube": [self.cube[0], list(self.cube[1])],
            "normalized_content": self.normalized_content,
            "passes_claim": self.passes_claim,
            "rescaled": self.rescaled.to_json_dict(),
        }


def microset_zoom(grid: DyadicGrid, s: float, delta: float) -> ZoomResult:
    """Zoom into the cube maximizing normalized (s - 2*delta)-content.

    Only cubes with edge at least 2^(ceil(m*delta/(2d)) - m) compete, so
    the zoomed piece keeps a definite share of the original resolution.
    The claim threshold 2^(-s-2) uses the undamped exponent s.
    """
    if not (0.0 < delta < s / 2.0):
        raise InvalidDelta("need 0 < delta < s/2")
    if not grid.occupied:
        raise EmptyGrid("zoom needs an occupied cell")
    m, d = grid.levels, grid.dimension
    max_level = m - math.ceil(m * delta / (2.0 * d))
    if max_level < 0:
        raise InvalidDelta("delta admits no cube at this grid resolution")
    s_zoom = s - 2.0 * delta
    values, _ = _tree_values(grid, s_zoom)
    best: Cube | None = None
    best_val = -1.0
    for level in range(min(max_level, m) + 1):
        edge_pow = (2.0 ** (-level)) ** s_zoom
        for idx in sorted(values[level]):
            ratio = values[level][idx] / edge_pow
            if ratio > best_val:
                best_val = ratio
                best = (level, idx)
    assert best is not None
    level, anchor = best
    shift = m - level
    inside = [
        cell
        for cell in grid.occupied
        if all(c >> shift == a for c, a in zip(cell, anchor))
    ]
    rel = frozenset(
        tuple(c - (a << shift) for c, a in zip(cell, anchor)) for cell in inside
    )
    rescaled = DyadicGrid(d, shift, rel)
    passes = best_val >= 2.0 ** (-s - 2.0)
    return ZoomResult(best, best_val, passes, rescaled)
