"""Crossing, merging and Hausdorff checks between traced polylines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from igeom.core import ParameterDomainError

from .tracer import FlowPath

PolylineLike = Union[FlowPath, np.ndarray]

_CHUNK = 512


@dataclass(frozen=True)
class Crossing:
    """Segment ``index_a`` of a crosses segment ``index_b`` of b at ``point``.

    ``s_a`` and ``s_b`` are arclength parameters of the crossing point.
    """

    index_a: int
    index_b: int
    s_a: float
    s_b: float
    point: complex

    @property
    def point_on_a(self) -> complex:
        return self.point

    @property
    def point_on_b(self) -> complex:
        return self.point


def _points(path: PolylineLike) -> np.ndarray:
    return np.asarray(getattr(path, "points", path), dtype=complex)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u.real * v.imag - u.imag * v.real


def _crossing_matrix(a0, a1, b0, b1):
    """Strict transversal crossing flags, shape (len(a0), len(b0))."""
    da = (a1 - a0)[:, None]
    db = (b1 - b0)[None, :]
    o1 = np.sign(_cross(da, b0[None, :] - a0[:, None]))
    o2 = np.sign(_cross(da, b1[None, :] - a0[:, None]))
    o3 = np.sign(_cross(db, a0[:, None] - b0[None, :]))
    o4 = np.sign(_cross(db, a1[:, None] - b0[None, :]))
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def _segment_lengths(points: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(points)))])


def _iter_crossings(a: np.ndarray, b: np.ndarray):
    if len(a) < 2 or len(b) < 2:
        return
    b0, b1 = b[:-1], b[1:]
    for lo in range(0, len(a) - 1, _CHUNK):
        hi = min(lo + _CHUNK, len(a) - 1)
        flags = _crossing_matrix(a[lo:hi], a[lo + 1 : hi + 1], b0, b1)
        for i, j in zip(*np.nonzero(flags)):
            yield lo + int(i), int(j)


def _crossing_at(a: np.ndarray, b: np.ndarray, i: int, j: int) -> Crossing:
    p, r = a[i], a[i + 1] - a[i]
    q, s = b[j], b[j + 1] - b[j]
    denom = _cross(np.asarray(r), np.asarray(s))
    t = float(_cross(np.asarray(q - p), np.asarray(s)) / denom)
    u = float(_cross(np.asarray(q - p), np.asarray(r)) / denom)
    arc_a = _segment_lengths(a)
    arc_b = _segment_lengths(b)
    return Crossing(
        index_a=i,
        index_b=j,
        s_a=float(arc_a[i] + t * abs(r)),
        s_b=float(arc_b[j] + u * abs(s)),
        point=complex(p + t * r),
    )


def detect_first_crossing(a: PolylineLike, b: PolylineLike) -> Optional[Crossing]:
    """First transversal crossing along ``a`` (ties broken along ``b``); touching does not count."""

    pa, pb = _points(a), _points(b)
    best = None
    for i, j in _iter_crossings(pa, pb):
        if best is not None and i > best[0]:
            break
        candidate = _crossing_at(pa, pb, i, j)
        if best is None or (candidate.s_a, candidate.s_b) < (best[1].s_a, best[1].s_b):
            best = (i, candidate)
    return None if best is None else best[1]


def count_crossings(a: PolylineLike, b: PolylineLike) -> int:
    return sum(1 for _ in _iter_crossings(_points(a), _points(b)))


def all_crossings(a: PolylineLike, b: PolylineLike) -> list[Crossing]:
    """Every segment crossing, ordered along ``a`` then ``b``."""

    pa, pb = _points(a), _points(b)
    found = [_crossing_at(pa, pb, i, j) for i, j in _iter_crossings(pa, pb)]
    return sorted(found, key=lambda c: (c.s_a, c.s_b))


def transversal_crossings(a: PolylineLike, b: PolylineLike, tol: float) -> list[Crossing]:
    """Crossings that survive once touches are removed.

    Two consecutive crossings along ``a`` between which ``a`` never gets
    farther than ``tol`` from ``b`` are one touch seen twice by the
    discretisation; both are dropped.
    """

    if tol < 0:
        raise ParameterDomainError(f"touch tolerance must be non-negative, got {tol}")
    pa, pb = _points(a), _points(b)
    crossings = all_crossings(pa, pb)
    if len(crossings) < 2 or tol == 0:
        return crossings
    distances = _distances_to(pa, pb)
    kept: list[Crossing] = []
    for crossing in crossings:
        if kept:
            between = distances[kept[-1].index_a + 1 : crossing.index_a + 1]
            if between.size == 0 or float(between.max()) <= tol:
                kept.pop()
                continue
        kept.append(crossing)
    return kept


def count_transversal_crossings(a: PolylineLike, b: PolylineLike, tol: float) -> int:
    return len(transversal_crossings(a, b, tol))


def brute_force_crossings(a: PolylineLike, b: PolylineLike) -> list[tuple[int, int]]:
    """All crossing segment pairs by a plain double loop."""

    pa, pb = _points(a), _points(b)
    pairs = []
    for i in range(len(pa) - 1):
        for j in range(len(pb) - 1):
            flags = _crossing_matrix(pa[i : i + 1], pa[i + 1 : i + 2], pb[j : j + 1], pb[j + 1 : j + 2])
            if flags[0, 0]:
                pairs.append((i, j))
    return pairs


def _densify(points: np.ndarray, parts: int = 4) -> np.ndarray:
    if len(points) < 2:
        return points
    t = np.arange(parts) / parts
    segs = points[:-1, None] + t[None, :] * (points[1:] - points[:-1])[:, None]
    return np.concatenate([segs.ravel(), points[-1:]])


def _distances_to(points: np.ndarray, target: np.ndarray, densify: bool = True) -> np.ndarray:
    dense = _densify(target) if densify else target
    tree = cKDTree(np.column_stack([dense.real, dense.imag]))
    distances, _ = tree.query(np.column_stack([points.real, points.imag]))
    return distances


def detect_merge(a: PolylineLike, b: PolylineLike, eps: float, *, min_tail: float = 0.0) -> Optional[float]:
    """First arclength of ``a`` after which all of ``a`` stays within ``eps`` of ``b``.

    The merged tail must span at least one segment and ``min_tail`` of arclength;
    a path that only ends near ``b`` has not merged.
    """

    if eps <= 0:
        raise ParameterDomainError(f"merge tolerance must be positive, got {eps}")
    if min_tail < 0:
        raise ParameterDomainError(f"merged tail length must be non-negative, got {min_tail}")
    pa, pb = _points(a), _points(b)
    if len(pa) == 0 or len(pb) == 0:
        return None
    distances = _distances_to(pa, pb)
    suffix_max = np.maximum.accumulate(distances[::-1])[::-1]
    hits = np.flatnonzero(suffix_max <= eps)
    if hits.size == 0 or hits[0] == len(pa) - 1:
        return None
    arclength = _segment_lengths(pa)
    start = float(arclength[hits[0]])
    if arclength[-1] - start < min_tail:
        return None
    return start


def directed_hausdorff(a: PolylineLike, b: PolylineLike, *, b_is_polyline: bool = True) -> float:
    """``max over a`` of the distance to ``b``; pass ``b_is_polyline=False`` for a bare point set."""

    pa, pb = _points(a), _points(b)
    if len(pa) == 0:
        return 0.0
    if len(pb) == 0:
        return float("inf")
    return float(np.max(_distances_to(pa, pb, densify=b_is_polyline)))
