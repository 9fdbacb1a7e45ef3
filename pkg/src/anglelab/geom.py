"""Angles, point clouds, and angle spectra of finite point sets.

All angles are in degrees, as float64.  Inner products are clamped to
[-1, 1] before acos so boundary configurations never produce NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AngleLabError,
    DegenerateVector,
    DimensionMismatch,
    EmptyCloud,
    InvalidDimension,
    InvalidWindow,
    TooFewPoints,
)

Point = tuple[float, ...]

# Degeneracy threshold for a bare pair of points, with no cloud to set a
# scale.  Effectively only exact coincidence is rejected.
DEGENERACY_ABS = 1e-300

# Relative degeneracy threshold used when a cloud supplies a scale.
DEGENERACY_REL = 1e-12


def _as_vector(p, dimension: int | None = None) -> np.ndarray:
    v = np.asarray(p, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a point, got shape {v.shape}")
    if dimension is not None and v.shape[0] != dimension:
        raise DimensionMismatch(f"point has dimension {v.shape[0]}, expected {dimension}")
    return v


def angle_at(apex, p, q, threshold: float = DEGENERACY_ABS) -> float:
    """Angle at `apex` between the arms toward `p` and `q`, in degrees.

    Raises DegenerateVector if either arm is shorter than `threshold`,
    and DimensionMismatch if the three points disagree in dimension.
    Swapping the arms returns the exact same float.
    """
    a = _as_vector(apex)
    u = _as_vector(p, a.shape[0]) - a
    v = _as_vector(q, a.shape[0]) - a
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu <= threshold or nv <= threshold:
        raise DegenerateVector("arm too short to define an angle")
    c = float(u @ v) / (nu * nv)
    c = max(-1.0, min(1.0, c))
    return math.degrees(math.acos(c))


def line_pair_angle(a, b, c, d) -> float:
    """Angle in [0, 90] degrees between the lines through (a,b) and (c,d).

    Orientation of either segment is ignored, so the result is exactly
    invariant under swapping a with b, c with d, or the two pairs.
    Evaluated as 2*atan2(|u-w|, |u+w|) on unit vectors with w oriented
    along u, which keeps full precision near 0 and 90 where the plain
    arccos of the inner product loses half the significant digits.
    """
    a = _as_vector(a)
    u = _as_vector(b, a.shape[0]) - a
    cc = _as_vector(c, a.shape[0])
    v = _as_vector(d, a.shape[0]) - cc
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu <= DEGENERACY_ABS or nv <= DEGENERACY_ABS:
        raise DegenerateVector("segment too short to define a line")
    u = u / nu
    w = v / nv
    if float(u @ w) < 0.0:
        w = -w
    half = math.atan2(
        math.sqrt(float((u - w) @ (u - w))), math.sqrt(float((u + w) @ (u + w)))
    )
    return math.degrees(2.0 * half)


def regular_simplex(n: int) -> np.ndarray:
    """Vertices of a regular n-simplex with unit edges, as an (n+1, n) array.

    Construction: the n+1 standard basis vectors of R^(n+1) scaled by
    1/sqrt(2) have unit pairwise distances; they are mapped isometrically
    onto R^n with an orthonormal basis of the sum-zero subspace (signed
    Helmert rows).  Vertex 0 lands at the origin and vertex 1 at e_1.
    """
    if n < 1:
        raise InvalidDimension("simplex dimension must be >= 1")
    verts = np.eye(n + 1) / math.sqrt(2.0)
    basis = np.zeros((n, n + 1))
    for k in range(1, n + 1):
        basis[k - 1, :k] = -1.0
        basis[k - 1, k] = float(k)
        basis[k - 1] /= math.sqrt(k * (k + 1))
    return (verts - verts[0]) @ basis.T


class PointCloud:
    """Finite list of distinct points in R^d.

    Exact duplicates are dropped (first occurrence kept); near-duplicates
    are preserved.  Coordinates must be finite.
    """

    __slots__ = ("_pts", "label")

    def __init__(self, points, dimension: int | None = None, label: str | None = None):
        arr = np.asarray(points, dtype=float)
        if arr.size == 0:
            if dimension is None:
                raise DimensionMismatch("empty cloud needs an explicit dimension")
            arr = arr.reshape(0, dimension)
        if arr.ndim != 2:
            raise DimensionMismatch(f"points must form an (n, d) array, got shape {arr.shape}")
        if dimension is not None and arr.shape[1] != dimension:
            raise DimensionMismatch(
                f"points have dimension {arr.shape[1]}, expected {dimension}"
            )
        if not np.all(np.isfinite(arr)):
            raise AngleLabError("coordinates must be finite")
        arr = _dedup_bitwise(arr)
        arr.setflags(write=False)
        self._pts = arr
        self.label = label

    @property
    def dimension(self) -> int:
        return int(self._pts.shape[1])

    @property
    def points(self) -> np.ndarray:
        """Read-only (n, d) float64 view of the stored points."""
        return self._pts

    def __len__(self) -> int:
        return int(self._pts.shape[0])

    def point(self, i: int) -> Point:
        return tuple(float(x) for x in self._pts[i])

    def bbox_extent(self) -> float:
        """Largest per-axis extent; 0.0 for empty or single-point clouds."""
        if len(self) == 0:
            return 0.0
        spans = self._pts.max(axis=0) - self._pts.min(axis=0)
        return float(spans.max()) if spans.size else 0.0

    def to_json_dict(self) -> dict:
        out = {
            "dimension": self.dimension,
            "points": [[float(x) for x in row] for row in self._pts],
        }
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PointCloud":
        if not isinstance(data, dict) or "dimension" not in data or "points" not in data:
            raise DimensionMismatch("cloud JSON needs 'dimension' and 'points'")
        d = int(data["dimension"])
        pts = data["points"]
        for row in pts:
            if len(row) != d:
                raise DimensionMismatch("point length disagrees with declared dimension")
        return cls(pts, dimension=d, label=data.get("label"))

    def to_csv(self) -> str:
        lines = [",".join(repr(float(x)) for x in row) for row in self._pts]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_csv(cls, text: str, label: str | None = None) -> "PointCloud":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            rows.append([float(tok) for tok in line.split(",")])
        if not rows:
            raise EmptyCloud("no points in CSV input")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch("CSV rows have inconsistent widths")
        return cls(rows, label=label)

    def __repr__(self) -> str:
        return f"PointCloud(n={len(self)}, d={self.dimension}, label={self.label!r})"


def _dedup_bitwise(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] <= 1:
        return np.ascontiguousarray(arr)
    arr = np.ascontiguousarray(arr)
    view = arr.view([("", arr.dtype)] * arr.shape[1]).ravel()
    _, first = np.unique(view, return_index=True)
    if first.shape[0] == arr.shape[0]:
        return arr
    return arr[np.sort(first)]


@dataclass(frozen=True)
class AngleInterval:
    """Angle window given by center and radius, both in degrees."""

    center: float
    radius: float

    def __post_init__(self):
        if not (0.0 <= self.center <= 180.0) or self.radius < 0.0:
            raise InvalidWindow(f"bad angle window ({self.center}, {self.radius})")

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def contains_open(self, angle: float) -> bool:
        return self.lo < angle < self.hi

    def overlaps_closed(self, lo: float, hi: float) -> bool:
        """Whether the closed window [lo_self, hi_self] meets [lo, hi]."""
        return not (self.hi < lo or hi < self.lo)


@dataclass(frozen=True)
class TripleWitness:
    """An apex with two arms and the angle they enclose, in degrees."""

    apex: Point
    arm1: Point
    arm2: Point
    angle: float

    def recompute(self) -> float:
        return angle_at(self.apex, self.arm1, self.arm2)

    def to_json_dict(self, kind: str, params: dict | None = None) -> dict:
        return {
            "kind": kind,
            "points": [list(self.apex), list(self.arm1), list(self.arm2)],
            "metric": self.angle,
            "params": params or {},
        }


def _cloud_threshold(pts: np.ndarray) -> float:
    if pts.shape[0] == 0:
        return DEGENERACY_ABS
    spans = pts.max(axis=0) - pts.min(axis=0)
    diag = math.sqrt(float(spans @ spans))
    return max(DEGENERACY_ABS, DEGENERACY_REL * diag)


def _apex_pair_angles(pts: np.ndarray, a: int, threshold: float):
    """Angles of all unordered arm pairs at apex index a.

    Returns (arm_indices, angles) where angles is the condensed upper
    triangle in lexicographic (i, j) order over arm positions, or None
    if fewer than two valid arms exist.
    """
    n = pts.shape[0]
    arms = np.concatenate([np.arange(0, a), np.arange(a + 1, n)])
    vec = pts[arms] - pts[a]
    norms = np.sqrt(np.einsum("ij,ij->i", vec, vec))
    ok = norms > threshold
    arms = arms[ok]
    if arms.shape[0] < 2:
        return None
    unit = vec[ok] / norms[ok][:, None]
    cosmat = np.clip(unit @ unit.T, -1.0, 1.0)
    iu, ju = np.triu_indices(arms.shape[0], k=1)
    ang = np.degrees(np.arccos(cosmat[iu, ju]))
    return arms, iu, ju, ang


def _require_cloud(cloud: PointCloud, least: int):
    if len(cloud) < least:
        raise TooFewPoints(f"need at least {least} points, have {len(cloud)}")


def _sampled_triples(n: int, budget: int, seed: int) -> np.ndarray:
    """Deterministic sample of distinct (apex, i, j) triples with i < j."""
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, int, int]] = set()
    out = []
    # Oversample in rounds; the loop terminates because the triple space
    # is larger than the budget whenever sampling is used.
    while len(out) < budget:
        take = max(1024, 2 * (budget - len(out)))
        a = rng.integers(0, n, size=take)
        i = rng.integers(0, n, size=take)
        j = rng.integers(0, n, size=take)
        for t in range(take):
            aa, ii, jj = int(a[t]), int(i[t]), int(j[t])
            if ii > jj:
                ii, jj = jj, ii
            if aa == ii or aa == jj or ii == jj:
                continue
            key = (aa, ii, jj)
            if key in seen:
                continue
            seen.add(key)
            out.append(key)
            if len(out) == budget:
                break
    arr = np.array(sorted(out), dtype=np.int64)
    return arr


def _total_triples(n: int) -> int:
    return n * ((n - 1) * (n - 2) // 2)


def angle_spectrum(
    cloud: PointCloud,
    budget: int | None = None,
    seed: int = 0,
) -> list[tuple[float, TripleWitness]]:
    """All apex angles of the cloud, sorted by angle.

    Every unordered pair of arms is measured at every apex; ties in the
    angle are broken by (apex, arm, arm) index order.  With `budget` set
    and smaller than the triple count, a seeded deterministic subsample
    of that many triples is used instead.  Intended for clouds small
    enough that the full list fits in memory.
    """
    _require_cloud(cloud, 3)
    pts = cloud.points
    n = pts.shape[0]
    threshold = _cloud_threshold(pts)

    quads = []  # (angle, apex, i, j)
    if budget is not None and budget < _total_triples(n):
        triples = _sampled_triples(n, budget, seed)
        for a, i, j in triples:
            u = pts[i] - pts[a]
            v = pts[j] - pts[a]
            nu = math.sqrt(float(u @ u))
            nv = math.sqrt(float(v @ v))
            if nu <= threshold or nv <= threshold:
                continue
            c = max(-1.0, min(1.0, float(u @ v) / (nu * nv)))
            quads.append((math.degrees(math.acos(c)), int(a), int(i), int(j)))
    else:
        for a in range(n):
            got = _apex_pair_angles(pts, a, threshold)
            if got is None:
                continue
            arms, iu, ju, ang = got
            for t in range(ang.shape[0]):
                quads.append((float(ang[t]), a, int(arms[iu[t]]), int(arms[ju[t]])))

    quads.sort(key=lambda q: (q[0], q[1], q[2], q[3]))
    out = []
    for ang, a, i, j in quads:
        w = TripleWitness(cloud.point(a), cloud.point(i), cloud.point(j), ang)
        out.append((ang, w))
    return out


def spectrum_hits(
    cloud: PointCloud,
    window: AngleInterval,
    budget: int | None = None,
    seed: int = 0,
) -> Optional[TripleWitness]:
    """First triple whose angle falls in the open window, or None.

    Triples are scanned in lexicographic (apex, arm, arm) index order,
    so `None` with no budget is an exhaustive absence statement.
    """
    _require_cloud(cloud, 3)
    pts = cloud.points
    n = pts.shape[0]
    threshold = _cloud_threshold(pts)

    if budget is not None and budget < _total_triples(n):
        triples = _sampled_triples(n, budget, seed)
        for a, i, j in triples:
            u = pts[i] - pts[a]
            v = pts[j] - pts[a]
            nu = math.sqrt(float(u @ u))
            nv = math.sqrt(float(v @ v))
            if nu <= threshold or nv <= threshold:
                continue
            c = max(-1.0, min(1.0, float(u @ v) / (nu * nv)))
            ang = math.degrees(math.acos(c))
            if window.contains_open(ang):
                exact = angle_at(cloud.point(a), cloud.point(i), cloud.point(j))
                return TripleWitness(cloud.point(a), cloud.point(i), cloud.point(j), exact)
        return None

    for a in range(n):
        got = _apex_pair_angles(pts, a, threshold)
        if got is None:
            continue
        arms, iu, ju, ang = got
        hit = (ang > window.lo) & (ang < window.hi)
        if hit.any():
            t = int(np.argmax(hit))
            i, j = int(arms[iu[t]]), int(arms[ju[t]])
            exact = angle_at(cloud.point(a), cloud.point(i), cloud.point(j))
            return TripleWitness(cloud.point(a), cloud.point(i), cloud.point(j), exact)
    return None
