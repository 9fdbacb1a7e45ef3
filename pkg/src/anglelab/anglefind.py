"""Witness searches in finite point clouds: almost-regular triangles via
interval coloring, near-right angles via projection of a well-spread
subset, extreme (near-0/180) angles, and the supplementary-angle chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dimension import _normalize_unit, _well_spread_core
from .errors import (
    AngleLabError,
    InvalidArity,
    InvalidScales,
    InvalidWindow,
    NoFarPoint,
    TooFewPoints,
)
from .geom import Point, PointCloud, TripleWitness, _apex_pair_angles, _cloud_threshold, angle_at

# Finest scale tried when hunting the distance shell [a, 4a].
TRIANGLE_SCAN_MAX_K = 40
# Chain searches rank arms by distance and keep this many per apex.
CHAIN_ARM_CAP = 64
# Number of starting triples the chain tries before settling.
CHAIN_START_CAP = 16


def ramsey_bound(r: int) -> int:
    """Upper bound 3*r! on the Ramsey number R_r(3), as an exact integer."""
    if r < 2:
        raise InvalidArity("the coloring bound needs at least 2 colors")
    return 3 * math.factorial(r)


@dataclass(frozen=True)
class RegularityParams:
    """Coloring parameters derived from a regularity target delta."""

    delta: float
    n_colors: int
    ramsey_items: int


def regularity_params(delta: float) -> RegularityParams:
    """N = ceil(3/delta) distance intervals and the 3*N! item guarantee."""
    if delta <= 0.0:
        raise InvalidWindow("regularity delta must be positive")
    n_colors = max(2, math.ceil(3.0 / delta))
    return RegularityParams(float(delta), n_colors, ramsey_bound(n_colors))


def color_distances(pts: np.ndarray, a: float, n_colors: int) -> np.ndarray:
    """Color index of each pairwise distance within the shell [a, 4a].

    The shell is split into n_colors half-open intervals
    [a + i*w, a + (i+1)*w) of width w = 3a/n_colors, the last one closed.
    Distances outside the shell are clamped to the nearest end interval.
    Returns a symmetric integer matrix with -1 on the diagonal.
    """
    pts = np.asarray(pts, dtype=float)
    diffs = pts[:, None, :] - pts[None, :, :]
    dists = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    width = 3.0 * a / n_colors
    # a distance sitting on an interval boundary belongs to the upper
    # interval; the nudge keeps it there when rounding lands a few ulps low
    # (e.g. unit sides of an exact equilateral triple straddling a boundary)
    colors = np.floor((dists - a) / width + 1e-9).astype(np.int64)
    colors = np.clip(colors, 0, n_colors - 1)
    np.fill_diagonal(colors, -1)
    return colors


def find_monochromatic_triangle(colors: np.ndarray) -> Optional[tuple[int, int, int]]:
    """First triple i < j < m whose three pairwise colors agree."""
    n = colors.shape[0]
    for i in range(n - 2):
        row_i = colors[i]
        for j in range(i + 1, n - 1):
            c = row_i[j]
            hits = np.nonzero((row_i[j + 1 :] == c) & (colors[j, j + 1 :] == c))[0]
            if hits.size:
                return i, j, j + 1 + int(hits[0])
    return None


@dataclass(frozen=True)
class TriangleWitness:
    """Three cloud points whose side lengths agree to within one interval."""

    vertices: tuple[Point, Point, Point]
    side_ratio: float
    color: int

    def recompute_ratio(self) -> float:
        v = [np.asarray(p, dtype=float) for p in self.vertices]
        sides = [
            float(np.linalg.norm(v[0] - v[1])),
            float(np.linalg.norm(v[1] - v[2])),
            float(np.linalg.norm(v[0] - v[2])),
        ]
        return max(sides) / min(sides)

    def to_json_dict(self, params: dict | None = None) -> dict:
        out = {
            "kind": "triangle",
            "points": [list(p) for p in self.vertices],
            "metric": self.side_ratio,
            "params": {"color": self.color},
        }
        if params:
            out["params"].update(params)
        return out


def almost_regular_triangle(
    cloud: PointCloud, delta: float
) -> Optional[TriangleWitness]:
    """Find three points whose side ratio is at most 1 + delta.

    A well-spread subset with pairwise distances inside one shell
    [a, 4a] is extracted first (adjacent scales l = k - 1, choosing the
    k that maximizes the subset).  Its pairwise distances are colored by
    ceil(3/delta) intervals of the shell and the first monochromatic
    triangle found is returned; same color forces the ratio bound.
    Returns None when the subset has no monochromatic triple.
    """
    if delta <= 0.0:
        raise InvalidWindow("regularity delta must be positive")
    if len(cloud) < 3:
        raise TooFewPoints("need at least 3 points for a triangle")
    pts = _normalize_unit(cloud.points)
    best: list[int] = []
    best_k = 0
    for k in range(2, TRIANGLE_SCAN_MAX_K + 1):
        core = _well_spread_core(pts, k, k - 1)
        if len(core) > len(best):
            best = core
            best_k = k
    if len(best) < 3:
        return None
    a = 2.0 ** (-best_k + 1)
    n_colors = max(2, math.ceil(3.0 / delta))
    colors = color_distances(pts[best], a, n_colors)
    triple = find_monochromatic_triangle(colors)
    if triple is None:
        return None
    i, j, m = triple
    vertices = (
        cloud.point(best[i]),
        cloud.point(best[j]),
        cloud.point(best[m]),
    )
    v = [np.asarray(p) for p in vertices]
    sides = [
        float(np.linalg.norm(v[0] - v[1])),
        float(np.linalg.norm(v[1] - v[2])),
        float(np.linalg.norm(v[0] - v[2])),
    ]
    return TriangleWitness(vertices, max(sides) / min(sides), int(colors[i, j]))


@dataclass(frozen=True)
class RightAngleWitness:
    """A projection-selected triple whose apex angle is close to 90 degrees."""

    triple: TripleWitness
    deviation: float
    scale_params: tuple[int, int, float]

    def to_json_dict(self) -> dict:
        k, l, t = self.scale_params
        return {
            "kind": "right",
            "points": [
                list(self.triple.apex),
                list(self.triple.arm1),
                list(self.triple.arm2),
            ],
            "metric": self.deviation,
            "params": {"k": k, "l": l, "t": t, "angle": self.triple.angle},
        }


def near_right_witness(cloud: PointCloud, k: int, l: int) -> RightAngleWitness:
    """Search for an angle near 90 degrees by projecting a well-spread subset.

    The cloud is rescaled so its diameter exceeds 2, a well-spread
    subset S at scales (k, l) is extracted, and the pair of S whose
    projections onto the line from S's first point O to the farthest
    cloud point P are closest yields the apex: the angle at Q1 between
    P and Q2 is reported with its deviation from 90 degrees.
    """
    if not (0 < l < k):
        raise InvalidScales("need 0 < l < k")
    if len(cloud) < 3:
        raise TooFewPoints("need at least 3 points")
    pts = cloud.points
    lo = pts.min(axis=0)
    extent = float((pts.max(axis=0) - lo).max())
    if extent <= 0.0:
        raise NoFarPoint("all points coincide; the diameter cannot be rescaled above 2")
    unit = (pts - lo) / extent
    work = unit * 4.0
    core = _well_spread_core(unit, k, l)
    if len(core) < 2:
        raise TooFewPoints("the well-spread subset is too small to project")
    origin = work[core[0]]
    dists = np.linalg.norm(work - origin, axis=1)
    p_idx = int(np.argmax(dists))
    direction = (work[p_idx] - origin) / dists[p_idx]
    proj = (work[core] - origin) @ direction
    gaps = np.abs(proj[:, None] - proj[None, :])
    spans = np.linalg.norm(work[core][:, None, :] - work[core][None, :, :], axis=2)
    iu, ju = np.triu_indices(len(core), k=1)
    # ties in the projection gap (common on symmetric clouds) go to the
    # closest pair: the apex angle error grows with the pair's span
    flat = int(np.lexsort((ju, iu, spans[iu, ju], gaps[iu, ju]))[0])
    q1_idx, q2_idx = core[int(iu[flat])], core[int(ju[flat])]
    if q1_idx == p_idx:
        q1_idx, q2_idx = q2_idx, q1_idx
    apex = cloud.point(q1_idx)
    arm_p = cloud.point(p_idx)
    arm_q = cloud.point(q2_idx)
    angle = angle_at(apex, arm_p, arm_q, threshold=_cloud_threshold(pts))
    t_achieved = math.log2(len(core)) / (k - l)
    triple = TripleWitness(apex, arm_p, arm_q, angle)
    return RightAngleWitness(triple, abs(angle - 90.0), (int(k), int(l), t_achieved))


def near_extreme_witness(cloud: PointCloud, target: str) -> TripleWitness:
    """Exhaustive search for the smallest (zero) or largest (straight) angle."""
    if target not in ("zero", "straight"):
        raise AngleLabError("target must be 'zero' or 'straight'")
    if len(cloud) < 3:
        raise TooFewPoints("need at least 3 points")
    pts = cloud.points
    threshold = _cloud_threshold(pts)
    sign = 1.0 if target == "zero" else -1.0
    best_val = math.inf
    best: tuple[int, int, int] | None = None
    for a in range(pts.shape[0]):
        res = _apex_pair_angles(pts, a, threshold)
        if res is None:
            continue
        arms, iu, ju, ang = res
        vals = sign * ang
        pos = int(np.argmin(vals))
        if vals[pos] < best_val:
            best_val = vals[pos]
            best = (a, int(arms[iu[pos]]), int(arms[ju[pos]]))
    if best is None:
        raise TooFewPoints("no apex has two distinct arms")
    a, i, j = best
    apex, p, q = cloud.point(a), cloud.point(i), cloud.point(j)
    return TripleWitness(apex, p, q, angle_at(apex, p, q, threshold=threshold))


def _vector_angle_degrees(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between two nonzero vectors (not lines): range [0, 180]."""
    un = u / math.sqrt(float(u @ u))
    vn = v / math.sqrt(float(v @ v))
    half = math.atan2(
        math.sqrt(float((un - vn) @ (un - vn))),
        math.sqrt(float((un + vn) @ (un + vn))),
    )
    return math.degrees(2.0 * half)


def _window_triples(
    pts: np.ndarray,
    active: np.ndarray,
    lo: float,
    hi: float,
    threshold: float,
    max_candidates: int,
) -> list[tuple[int, int, int]]:
    """Up to max_candidates triples (p, q, r) with angle at q in (lo, hi).

    Apexes are scanned in index order.  For each apex only the
    CHAIN_ARM_CAP farthest arms are paired (documented heuristic); the
    in-window pair maximizing the shorter arm wins, and the farther arm
    of the pair is labeled p.
    """
    found: list[tuple[int, int, int]] = []
    for q_pos in range(len(active)):
        q = int(active[q_pos])
        others = np.concatenate([active[:q_pos], active[q_pos + 1 :]])
        if others.shape[0] < 2:
            break
        vec = pts[others] - pts[q]
        norms = np.sqrt(np.einsum("ij,ij->i", vec, vec))
        ok = norms > threshold
        others, vec, norms = others[ok], vec[ok], norms[ok]
        if others.shape[0] < 2:
            continue
        order = np.lexsort((others, -norms))[:CHAIN_ARM_CAP]
        others, vec, norms = others[order], vec[order], norms[order]
        unit = vec / norms[:, None]
        ang = np.degrees(np.arccos(np.clip(unit @ unit.T, -1.0, 1.0)))
        iu, ju = np.triu_indices(others.shape[0], k=1)
        window = (ang[iu, ju] > lo) & (ang[iu, ju] < hi)
        if not window.any():
            continue
        shorter = np.minimum(norms[iu], norms[ju])
        shorter[~window] = -1.0
        pos = int(np.argmax(shorter))
        p_arm, r_arm = int(others[iu[pos]]), int(others[ju[pos]])
        found.append((p_arm, q, r_arm))
        if len(found) >= max_candidates:
            break
    return found


@dataclass(frozen=True)
class ChainReport:
    """Outcome of one supplementary-angle chain run (heuristic search)."""

    witness: TripleWitness
    steps: int
    direction_gap: float
    pair: tuple[int, int]

    def to_json_dict(self, params: dict | None = None) -> dict:
        out = self.witness.to_json_dict("supplementary", params or {})
        out["params"].update(
            {
                "steps": self.steps,
                "achieved_gap": self.direction_gap,
                "heuristic": True,
            }
        )
        return out


def _chain_from(
    pts: np.ndarray,
    start: tuple[int, int, int],
    lo: float,
    hi: float,
    epsilon: float,
    max_steps: int,
    threshold: float,
) -> Optional[ChainReport]:
    triples = [start]
    while len(triples) < max_steps:
        p, q, r = triples[-1]
        radius = epsilon * min(
            float(np.linalg.norm(pts[q] - pts[p])),
            float(np.linalg.norm(pts[q] - pts[r])),
        )
        ball = np.nonzero(np.linalg.norm(pts - pts[p], axis=1) <= radius)[0]
        if ball.shape[0] < 3:
            break
        nxt = _window_triples(pts, ball, lo, hi, threshold, 1)
        if not nxt:
            break
        triples.append(nxt[0])
    if len(triples) < 2:
        return None
    dirs = [pts[p] - pts[q] for p, q, _ in triples]
    best_gap = math.inf
    best_pair: tuple[int, int] | None = None
    for a in range(len(triples) - 1):
        for b in range(a + 1, len(triples)):
            q_a, q_b, r_b = triples[a][1], triples[b][1], triples[b][2]
            if q_a == q_b or r_b == q_b:
                continue
            gap = _vector_angle_degrees(dirs[a], dirs[b])
            if gap < best_gap:
                best_gap = gap
                best_pair = (a, b)
    if best_pair is None:
        return None
    a, b = best_pair
    apex = tuple(float(x) for x in pts[triples[b][1]])
    arm1 = tuple(float(x) for x in pts[triples[a][1]])
    arm2 = tuple(float(x) for x in pts[triples[b][2]])
    angle = angle_at(apex, arm1, arm2, threshold=threshold)
    witness = TripleWitness(apex, arm1, arm2, angle)
    return ChainReport(witness, len(triples), best_gap, (a, b))


def supplementary_chain_report(
    cloud: PointCloud,
    alpha: float,
    delta: float,
    epsilon: float,
    max_steps: int,
) -> Optional[ChainReport]:
    """Chase angles near alpha through shrinking neighborhoods.

    Mirrors the recursive construction: each step finds a triple with
    apex angle inside (alpha - delta, alpha + delta) within the
    epsilon * min(arm)-ball around the previous step's p point; two
    steps with nearly parallel q->p directions then exhibit an angle
    near 180 - alpha.  The minimum direction gap actually achieved is
    reported (it may exceed epsilon); the search is a documented
    heuristic and returns None when no chain of length 2 forms.
    """
    if delta <= 0.0 or alpha + delta <= 0.0 or alpha - delta >= 180.0:
        raise InvalidWindow("the angle window around alpha is empty")
    if not (0.0 < epsilon < 1.0):
        raise InvalidWindow("direction tolerance must lie in (0, 1)")
    if len(cloud) < 3:
        raise TooFewPoints("need at least 3 points")
    pts = cloud.points
    threshold = _cloud_threshold(pts)
    lo, hi = alpha - delta, alpha + delta
    starts = _window_triples(
        pts, np.arange(pts.shape[0]), lo, hi, threshold, CHAIN_START_CAP
    )
    best: Optional[ChainReport] = None
    for p, q, r in starts:
        for labeled in ((p, q, r), (r, q, p)):
            report = _chain_from(pts, labeled, lo, hi, epsilon, max_steps, threshold)
            if report is None:
                continue
            if report.direction_gap < epsilon:
                return report
            if best is None or report.direction_gap < best.direction_gap:
                best = report
    return best


def supplementary_chain(
    cloud: PointCloud,
    alpha: float,
    delta: float,
    epsilon: float,
    max_steps: int,
) -> Optional[TripleWitness]:
    """Witness triple with angle near 180 - alpha, or None if the chain dies."""
    report = supplementary_chain_report(cloud, alpha, delta, epsilon, max_steps)
    return None if report is None else report.witness
