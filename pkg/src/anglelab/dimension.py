"""Packing numbers, Minkowski dimension estimates, well-spread subsets.

Scale-indexed operations (dimension estimate, well-spread extraction)
first translate the cloud's bounding box to the origin and divide by the
largest per-axis extent, so the data sits in the unit cube and the
dyadic scales 2^(-k) are meaningful.  The greedy packing primitive
itself works on raw coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRange, EmptyCloud, InvalidScales
from .geom import Point, PointCloud


def _normalize_unit(pts: np.ndarray) -> np.ndarray:
    """Translate the min corner to 0; shrink into the unit cube if needed.

    Clouds already of extent <= 1 are only translated, never stretched:
    the dyadic scale indices k then keep their meaning, and shrinking a
    cloud by a power of two shifts the usable k-range instead of
    silently renormalizing it.
    """
    lo = pts.min(axis=0)
    extent = float((pts.max(axis=0) - lo).max())
    if extent <= 1.0:
        return pts - lo
    return (pts - lo) / extent


def _greedy_pack_indices(pts: np.ndarray, epsilon: float) -> list[int]:
    """Indices kept by index-order greedy packing: pairwise distance > 2*epsilon.

    Kept centers carry pairwise disjoint closed balls of radius epsilon.
    Neighbor candidates come from a uniform grid hash at cell size
    2*epsilon; cells are enumerated directly in low dimensions and the
    occupied-cell table is scanned instead when 3^d would be larger.
    """
    n, d = pts.shape
    cell = 2.0 * epsilon
    cells = np.floor(pts / cell).astype(np.int64)
    occupied: dict[tuple[int, ...], list[int]] = {}
    kept: list[int] = []
    enumerate_neighbors = 3**d <= 128
    offsets = (
        list(itertools.product((-1, 0, 1), repeat=d)) if enumerate_neighbors else None
    )
    for i in range(n):
        key = tuple(cells[i])
        if enumerate_neighbors:
            candidates: list[int] = []
            for off in offsets:
                bucket = occupied.get(tuple(k + o for k, o in zip(key, off)))
                if bucket:
                    candidates.extend(bucket)
        else:
            candidates = []
            arr = cells[i]
            for okey, bucket in occupied.items():
                if all(abs(a - b) <= 1 for a, b in zip(okey, arr)):
                    candidates.extend(bucket)
        ok = True
        if candidates:
            diffs = pts[candidates] - pts[i]
            if float(np.einsum("ij,ij->i", diffs, diffs).min()) <= (2.0 * epsilon) ** 2:
                ok = False
        if ok:
            kept.append(i)
            occupied.setdefault(key, []).append(i)
    return kept


@dataclass(frozen=True)
class PackingReport:
    """A maximal packing: centers with pairwise distance > 2*epsilon."""

    epsilon: float
    count: int
    centers: tuple[Point, ...]

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "count": self.count,
            "centers": [list(c) for c in self.centers],
        }


def packing_number_greedy(cloud: PointCloud, epsilon: float) -> PackingReport:
    """Greedy (index-order) maximal packing of the cloud at radius epsilon.

    Every cloud point is within 2*epsilon of some returned center, so
    the count is sandwiched between the optimal packing numbers at
    2*epsilon and epsilon.
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot pack an empty cloud")
    if epsilon <= 0.0:
        raise InvalidScales("packing radius must be positive")
    kept = _greedy_pack_indices(cloud.points, epsilon)
    centers = tuple(cloud.point(i) for i in kept)
    return PackingReport(float(epsilon), len(kept), centers)


@dataclass(frozen=True)
class MinkowskiEstimate:
    """Least-squares fit of log2 P(A, 2^-k) against k."""

    slope: float
    scales: tuple[tuple[int, int], ...]
    fit_residual: float

    def to_json_dict(self) -> dict:
        return {
            "slope": self.slope,
            "scales": [[k, c] for k, c in self.scales],
            "residual": self.fit_residual,
        }


def minkowski_dimension_estimate(
    cloud: PointCloud, k_min: int, k_max: int
) -> MinkowskiEstimate:
    """Empirical upper Minkowski dimension over scales 2^-k, k in [k_min, k_max].

    The cloud is normalized into the unit cube first.  Scales where the
    packing count has stagnated at the cloud size carry no information
    and are dropped; at least two scales must survive.
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot estimate dimension of an empty cloud")
    if k_min >= k_max:
        raise InvalidScales("need k_min < k_max")
    pts = _normalize_unit(cloud.points)
    n = pts.shape[0]
    scales = []
    for k in range(k_min, k_max + 1):
        count = len(_greedy_pack_indices(pts, 2.0 ** (-k)))
        if count < n:
            scales.append((k, count))
    if len(scales) < 2:
        raise DegenerateRange("fewer than 2 scales below the cloud size")
    ks = np.array([k for k, _ in scales], dtype=float)
    logs = np.log2([c for _, c in scales])
    slope, intercept = np.polyfit(ks, logs, 1)
    fitted = slope * ks + intercept
    residual = float(np.sqrt(np.mean((fitted - logs) ** 2)))
    return MinkowskiEstimate(max(0.0, float(slope)), tuple(scales), residual)


@dataclass(frozen=True)
class WellSpreadResult:
    """Points (in normalized unit-cube coordinates) with pairwise
    distances confined to the two-scale window [2^(-k+1), 2^(-l+2)]."""

    points: tuple[Point, ...]
    k: int
    l: int
    t: float

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def meets_count_bound(self) -> bool:
        """Whether the count exceeds 2^((k-l)t); favorable scales only."""
        return self.count > 2.0 ** ((self.k - self.l) * self.t)

    def to_json_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "k": self.k,
            "l": self.l,
            "t": self.t,
            "count": self.count,
            "meets_count_bound": self.meets_count_bound,
        }


def _well_spread_core(pts: np.ndarray, k: int, l: int) -> list[int]:
    """Largest bucket of a 2^-k packing inside doubled 2^-l balls.

    `pts` must already live in the unit cube.  Returns row indices of the
    fine-packing points lying in the closed ball of radius 2^(-l+1)
    around the coarse center owning the most of them (ties: lowest
    center index).
    """
    fine_idx = _greedy_pack_indices(pts, 2.0 ** (-k))
    coarse_idx = _greedy_pack_indices(pts, 2.0 ** (-l))
    fine = pts[fine_idx]
    radius = 2.0 ** (-l + 1)
    best_mask = None
    best_count = -1
    for ci in coarse_idx:
        diffs = fine - pts[ci]
        mask = np.einsum("ij,ij->i", diffs, diffs) <= radius * radius
        count = int(mask.sum())
        if count > best_count:
            best_mask = mask
            best_count = count
    return [fine_idx[j] for j in np.nonzero(best_mask)[0]]


def well_spread_subset(
    cloud: PointCloud, t: float, k: int, l: int
) -> WellSpreadResult:
    """Extract a subset whose pairwise distances live in one scale window.

    Follows the two-packing construction: a maximal 2^-k packing is
    bucketed by the doubled balls of a maximal 2^-l packing and the
    fullest bucket is returned.  The distance window always holds; the
    count bound count > 2^((k-l)t) holds only at favorable k and is
    reported via meets_count_bound, never enforced.  Points are returned
    in the normalized unit-cube frame in which the window is meaningful.
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot extract from an empty cloud")
    if not (0 < l < k):
        raise InvalidScales("need 0 < l < k")
    if t <= 0.0:
        raise InvalidScales("exponent t must be positive")
    pts = _normalize_unit(cloud.points)
    core = pts[_well_spread_core(pts, k, l)]
    return WellSpreadResult(
        tuple(tuple(float(x) for x in p) for p in core), int(k), int(l), float(t)
    )
