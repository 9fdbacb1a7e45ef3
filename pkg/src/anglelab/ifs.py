"""Homothetic iterated function systems and their certificates.

A homothety is x -> center + ratio * (x - center), stored as (center,
ratio) and applied in the affine form x -> ratio * x + offset with
offset = (1 - ratio) * center.  Compositions of homotheties with ratios
in (0, 1) are again homotheties, so fixed points of compositions are
available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateSystem,
    DegenerateVector,
    DimensionMismatch,
    EmptyCloud,
    IdenticalCodes,
    InvalidArity,
    InvalidCode,
    InvalidDepth,
    InvalidDimension,
    InvalidRatio,
    NotSeparated,
    SameIndex,
)
from .geom import (
    DEGENERACY_ABS,
    AngleInterval,
    PointCloud,
    Point,
    line_pair_angle,
    regular_simplex,
)
from .polytope import hull_distance

DEFAULT_POINT_BUDGET = 2_000_000

# Angle values (degrees) that high-dimensional self-similar sets of this
# construction cannot avoid; every angle of a gasket cloud stays within
# the deviation bound of one of these.
SPECIAL_ANGLES = (0.0, 60.0, 90.0, 120.0, 180.0)

AddressCode = tuple[int, ...]


@dataclass(frozen=True)
class Homothety:
    """Contraction x -> center + ratio * (x - center) with ratio in (0,1)."""

    center: Point
    ratio: float

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise InvalidRatio(f"ratio must lie in (0, 1), got {self.ratio}")
        c = tuple(float(x) for x in self.center)
        if not all(math.isfinite(x) for x in c):
            raise DegenerateVector("center coordinates must be finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "ratio", float(self.ratio))

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def offset(self) -> np.ndarray:
        return (1.0 - self.ratio) * np.asarray(self.center, dtype=float)

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return self.ratio * pts + self.offset

    def compose(self, other: "Homothety") -> "Homothety":
        """The composition self . other, as a homothety in center form."""
        if self.dimension != other.dimension:
            raise DimensionMismatch("cannot compose maps of different dimensions")
        r = self.ratio * other.ratio
        b = self.ratio * other.offset + self.offset
        return Homothety(tuple(b / (1.0 - r)), r)

    def to_json_dict(self) -> dict:
        return {"center": [float(x) for x in self.center], "ratio": self.ratio}


class HomotheticIFS:
    """A finite list of homotheties in a common dimension."""

    __slots__ = ("maps", "dimension")

    def __init__(self, maps: Sequence[Homothety]):
        maps = tuple(maps)
        if len(maps) < 2:
            raise InvalidArity("an iterated function system needs at least 2 maps")
        d = maps[0].dimension
        for h in maps:
            if h.dimension != d:
                raise DimensionMismatch("all maps must share one dimension")
        if all(h.center == maps[0].center for h in maps):
            raise DegenerateSystem("maps need at least two distinct centers")
        self.maps = maps
        self.dimension = d

    def __len__(self) -> int:
        return len(self.maps)

    def centers(self) -> np.ndarray:
        return np.array([h.center for h in self.maps], dtype=float)

    def validate_code(self, code) -> AddressCode:
        digits = tuple(int(x) for x in code)
        for x in digits:
            if not (0 <= x < len(self.maps)):
                raise InvalidCode(f"digit {x} outside the map alphabet")
        return digits

    def compose_word(self, code) -> Homothety:
        """Composition S_{c1} . S_{c2} . ... for a nonempty address code."""
        digits = self.validate_code(code)
        if not digits:
            raise InvalidCode("cannot compose an empty address code")
        ratio = 1.0
        offset = np.zeros(self.dimension)
        for digit in digits:
            h = self.maps[digit]
            ratio, offset = ratio * h.ratio, ratio * h.offset + offset
        return Homothety(tuple(offset / (1.0 - ratio)), ratio)

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "maps": [h.to_json_dict() for h in self.maps],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HomotheticIFS":
        if not isinstance(data, dict) or "maps" not in data:
            raise DimensionMismatch("IFS JSON needs a 'maps' list")
        maps = [Homothety(tuple(m["center"]), float(m["ratio"])) for m in data["maps"]]
        ifs = cls(maps)
        if "dimension" in data and int(data["dimension"]) != ifs.dimension:
            raise DimensionMismatch("declared dimension disagrees with the maps")
        return ifs

    def __repr__(self) -> str:
        return f"HomotheticIFS(m={len(self.maps)}, d={self.dimension})"


def gasket_ifs(n: int, delta: float) -> HomotheticIFS:
    """n+1 homotheties of ratio delta at the vertices of a regular n-simplex."""
    if n < 2:
        raise InvalidDimension("gasket construction needs dimension n >= 2")
    if not (0.0 < delta < 0.5):
        raise InvalidRatio("gasket ratio must lie in (0, 1/2)")
    verts = regular_simplex(n)
    return HomotheticIFS([Homothety(tuple(v), delta) for v in verts])


def similarity_dimension(ifs: HomotheticIFS) -> float:
    """The unique s > 0 with sum(ratio_i^s) = 1, by bisection."""
    ratios = np.array([h.ratio for h in ifs.maps], dtype=float)
    lo = 0.0
    hi = math.log(len(ratios)) / math.log(1.0 / ratios.max())
    for _ in range(200):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        if float(np.sum(ratios**mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def iterate_cloud(
    ifs: HomotheticIFS,
    depth: int,
    seeds,
    budget: int = DEFAULT_POINT_BUDGET,
    label: str | None = None,
) -> PointCloud:
    """All images of the seeds under every depth-long composition.

    Points are enumerated in (address code, seed index) lexicographic
    order and deduplicated bitwise; strongly separated systems with
    distinct seeds produce no duplicates beyond coinciding fixed points.
    """
    if depth < 0:
        raise InvalidDepth("depth must be >= 0")
    seeds = np.asarray(seeds, dtype=float)
    if seeds.ndim != 2 or seeds.shape[0] == 0:
        raise EmptyCloud("seeds must form a nonempty (n, d) array")
    if seeds.shape[1] != ifs.dimension:
        raise DimensionMismatch("seed dimension disagrees with the system")
    m = len(ifs.maps)
    total = (m**depth) * seeds.shape[0]
    if total > budget:
        raise BudgetExceeded(f"{total} points exceed the budget of {budget}")

    ratios = np.array([h.ratio for h in ifs.maps], dtype=float)
    offsets = np.array([h.offset for h in ifs.maps], dtype=float)
    scale = np.ones(1)
    shift = np.zeros((1, ifs.dimension))
    for _ in range(depth):
        scale_new = (scale[:, None] * ratios[None, :]).reshape(-1)
        shift_new = (
            scale[:, None, None] * offsets[None, :, :] + shift[:, None, :]
        ).reshape(-1, ifs.dimension)
        scale, shift = scale_new, shift_new
    pts = (
        scale[:, None, None] * seeds[None, :, :] + shift[:, None, :]
    ).reshape(-1, ifs.dimension)
    return PointCloud(pts, label=label)


def separation_gap(ifs: HomotheticIFS) -> float:
    """Minimum distance between images of the center hull under map pairs.

    The convex hull of the centers contains the attractor, so a positive
    value certifies strong separation; 0.0 means separation could not be
    certified (images touch or overlap).
    """
    centers = ifs.centers()
    images = [h.apply(centers) for h in ifs.maps]
    gap = math.inf
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            gap = min(gap, hull_distance(images[i], images[j]))
    return float(gap)


def direction_deviation_bound(delta: float) -> float:
    """Largest angle (degrees) between a chord of a piece pair and the
    line of their centers, for gasket ratio delta: 2*acos((1-2d)/(1+2d))."""
    if not (0.0 < delta < 0.5):
        raise InvalidRatio("deviation bound needs delta in (0, 1/2)")
    return math.degrees(2.0 * math.acos((1.0 - 2.0 * delta) / (1.0 + 2.0 * delta)))


@dataclass(frozen=True)
class AvoidanceCertificate:
    """Outcome of checking an angle window against the unavoidable set."""

    certified: bool
    epsilon: float
    window: AngleInterval
    special: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.certified

    def to_json_dict(self) -> dict:
        return {
            "certified": self.certified,
            "epsilon": self.epsilon,
            "window": [self.window.lo, self.window.hi],
            "special": list(self.special),
        }


def avoidance_certificate(n: int, delta: float, window: AngleInterval) -> AvoidanceCertificate:
    """Certify that no gasket(n, delta) angle ever enters the window.

    Sound for every iteration depth, including the limit set: the check
    uses the closed window against closed epsilon-neighborhoods of the
    special angles, so 'certified' survives passage to the attractor.
    """
    if n < 2:
        raise InvalidDimension("certificate needs gasket dimension n >= 2")
    eps = direction_deviation_bound(delta)
    certified = all(
        window.hi < a - eps or window.lo > a + eps for a in SPECIAL_ANGLES
    )
    return AvoidanceCertificate(certified, eps, window, SPECIAL_ANGLES)


def parallel_pair_lift(
    ifs: HomotheticIFS, code0, code1, seeds: tuple[Point, Point]
) -> tuple[Point, Point, int, int]:
    """Strip the common prefix of two coded points, preserving direction.

    Returns (y0, y1, i, j): the images of the seeds under the stripped
    codes and the first differing digits.  Since the stripped prefix is
    a homothety with positive ratio, y0 - y1 is parallel to x0 - x1.
    """
    c0 = ifs.validate_code(code0)
    c1 = ifs.validate_code(code1)
    if c0 == c1:
        raise IdenticalCodes("address codes must differ")
    if len(c0) != len(c1):
        raise InvalidCode("address codes must have equal lengths")
    s0 = np.asarray(seeds[0], dtype=float)
    s1 = np.asarray(seeds[1], dtype=float)
    if s0.shape != (ifs.dimension,) or s1.shape != (ifs.dimension,):
        raise DimensionMismatch("seeds must be points of the system dimension")

    x0 = ifs.compose_word(c0).apply(s0)
    x1 = ifs.compose_word(c1).apply(s1)
    if float(np.linalg.norm(x0 - x1)) <= DEGENERACY_ABS:
        raise DegenerateVector("coded points coincide; no direction to preserve")

    p = 0
    while c0[p] == c1[p]:
        p += 1
    if p == 0:
        y0, y1 = x0, x1
    else:
        prefix = ifs.compose_word(c0[:p])
        y0 = (x0 - prefix.offset) / prefix.ratio
        y1 = (x1 - prefix.offset) / prefix.ratio
    return (
        tuple(float(v) for v in y0),
        tuple(float(v) for v in y1),
        c0[p],
        c1[p],
    )


@dataclass(frozen=True)
class RectangleWitness:
    """Four points forming a near-rectangle, with their deviation.

    deviation = max(opposite-side parallelism angles in degrees,
    relative diagonal-length mismatch); 0 for an exact rectangle.
    """

    corners: tuple[Point, Point, Point, Point]
    deviation: float

    def to_json_dict(self, params: dict | None = None) -> dict:
        return {
            "kind": "rectangle",
            "points": [list(c) for c in self.corners],
            "metric": self.deviation,
            "params": params or {},
        }


def deviation_of_corners(corners) -> float:
    """Recompute the rectangle deviation of four corners A, B, C, D."""
    a, b, c, d = (np.asarray(p, dtype=float) for p in corners)
    side1 = line_pair_angle(a, b, d, c)
    side2 = line_pair_angle(b, c, a, d)
    d1 = float(np.linalg.norm(a - c))
    d2 = float(np.linalg.norm(b - d))
    diag = abs(d1 - d2) / max(d1, d2)
    return max(side1, side2, diag)


def rectangle_in(
    ifs: HomotheticIFS,
    f_index: int,
    g_index: int,
    depth: int,
    budget: int = DEFAULT_POINT_BUDGET,
) -> RectangleWitness:
    """Search a depth-iterate cloud for the rectangle of two map pairs.

    With P the fixed point of f.g and Q the fixed point of g.f, any pair
    (x, y) perpendicular to P-Q yields corners f(g(x)), f(g(y)),
    g(f(y)), g(f(x)) close to a rectangle; the pair minimizing the
    normalized projection onto P-Q is selected (ties by point index).
    """
    if not (0 <= f_index < len(ifs.maps)) or not (0 <= g_index < len(ifs.maps)):
        raise InvalidCode("map index outside the system")
    if f_index == g_index:
        raise SameIndex("rectangle construction needs two different maps")
    if separation_gap(ifs) <= 0.0:
        raise NotSeparated("system is not certified strongly separated")

    f = ifs.maps[f_index]
    g = ifs.maps[g_index]
    fg = f.compose(g)
    gf = g.compose(f)
    p = np.asarray(fg.center, dtype=float)
    q = np.asarray(gf.center, dtype=float)
    axis = q - p
    axis = axis / np.linalg.norm(axis)

    cloud = iterate_cloud(ifs, depth, ifs.centers(), budget=budget)
    pts = cloud.points
    n = pts.shape[0]
    proj = pts @ axis
    sq = np.einsum("ij,ij->i", pts, pts)

    best = (math.inf, -1, -1)
    chunk = 256
    for start in range(0, n - 1, chunk):
        stop = min(start + chunk, n - 1)
        rows = np.arange(start, stop)
        d2 = sq[rows][:, None] + sq[None, :] - 2.0 * (pts[rows] @ pts.T)
        d2 = np.maximum(d2, 1e-300)
        ratio2 = (proj[rows][:, None] - proj[None, :]) ** 2 / d2
        mask = np.arange(n)[None, :] <= rows[:, None]
        ratio2[mask] = math.inf
        flat = int(np.argmin(ratio2))
        val = float(ratio2.reshape(-1)[flat])
        if val < best[0]:
            i, j = divmod(flat, n)
            best = (val, start + i, j)

    x = pts[best[1]]
    y = pts[best[2]]
    corners = (
        tuple(float(v) for v in fg.apply(x)),
        tuple(float(v) for v in fg.apply(y)),
        tuple(float(v) for v in gf.apply(y)),
        tuple(float(v) for v in gf.apply(x)),
    )
    return RectangleWitness(corners, deviation_of_corners(corners))
