"""Brute-force ground truth for verification: materialized joins, exact
clustering costs, exhaustive tiny-instance optima, a twin activity tracker
that replays a tree's canonical choices, and a chi-square uniformity test.

Verification only; nothing here is on the algorithmic hot path.  The join
materialization deliberately avoids the join-tree machinery: relations are
folded left-to-right with hash joins on *all* common attributes, which is
the textbook definition of the join result.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import chi2

from .boxes import Region
from .errors import DomainError, ForeignSampleError, TooLargeError
from .relational import DatabaseInstance


class BruteOracle:
    """Materialized join of an instance, projected to clustering attributes."""

    def __init__(self, instance: DatabaseInstance):
        self.instance = instance
        self.points = np.asarray(_materialize(instance), dtype=np.float64)
        if self.points.size == 0:
            self.points = self.points.reshape(0, instance.dim)

    @property
    def size(self) -> int:
        return len(self.points)

    def tuples(self) -> list[tuple[float, ...]]:
        return [tuple(row) for row in self.points.tolist()]

    def count_in(self, shape) -> int:
        return int(shape.mask_of(self.points).sum())

    def points_in(self, shape) -> np.ndarray:
        return self.points[shape.mask_of(self.points)]

    def tracker(self) -> "TwinTracker":
        return TwinTracker(self)


def _materialize(instance: DatabaseInstance) -> list[tuple[float, ...]]:
    """Left-fold hash join over all relations, matching on every common
    attribute; then project onto the clustering attributes (bag)."""
    attr_names = instance.attr_names
    partial: list[dict[str, float]] = [{}]
    for rel in instance.relations:
        if rel.nrows == 0:
            partial = []
            break
        common = [a for a in rel.attrs if partial and a in partial[0]]
        index: dict[tuple, list[int]] = {}
        cols = [rel.attrs.index(a) for a in common]
        for j in range(rel.nrows):
            key = tuple(float(rel.data[j, c]) for c in cols)
            index.setdefault(key, []).append(j)
        grown: list[dict[str, float]] = []
        for t in partial:
            key = tuple(t[a] for a in common)
            for j in index.get(key, []):
                new = dict(t)
                for pos, a in enumerate(rel.attrs):
                    new[a] = float(rel.data[j, pos])
                grown.append(new)
        partial = grown
    cattrs = instance.clustering_attrs
    return [tuple(t[a] for a in cattrs) for t in partial]


class TwinTracker:
    """Mirror of a tree's active set, driven by its instrumentation trace.

    The tracker replays the exact canonical regions the tree chose, so count
    and report comparisons against the tree are exact, not approximate.
    """

    def __init__(self, oracle: BruteOracle):
        self.oracle = oracle
        self.mask = np.ones(oracle.size, dtype=bool)
        self._snapshots: dict[int, np.ndarray] = {}
        self._cursor = 0

    def replay(self, trace: Sequence) -> None:
        """Consume any new events appended to the trace since the last call."""
        while self._cursor < len(trace):
            self.apply(trace[self._cursor])
            self._cursor += 1

    def apply(self, event: tuple) -> None:
        kind = event[0]
        if kind == "inactive":
            _, _x, _r, regions = event
            for region in regions:
                self.mask &= ~region.mask_of(self.oracle.points)
        elif kind == "snapshot":
            self._snapshots[event[1]] = self.mask.copy()
        elif kind == "restore":
            self.mask = self._snapshots[event[1]].copy()
        elif kind in ("class-start", "class-end"):
            pass  # clustering-loop markers; meaningful to tests, not to the mask
        else:
            raise DomainError(f"unknown trace event {kind!r}")

    def active_points(self) -> np.ndarray:
        return self.oracle.points[self.mask]

    def active_tuples(self) -> list[tuple[float, ...]]:
        return [tuple(row) for row in self.active_points().tolist()]

    def count_in_region(self, region: Region) -> int:
        return int((self.mask & region.mask_of(self.oracle.points)).sum())

    def contains_active(self, region: Region, point: Sequence[float]) -> bool:
        hit = self.mask & region.mask_of(self.oracle.points)
        return bool(np.any(np.all(self.oracle.points[hit] == np.asarray(point), axis=1)))


def twin_track(oracle: BruteOracle, trace: Sequence) -> TwinTracker:
    """Tracker with the given event log already replayed."""
    t = oracle.tracker()
    t.replay(trace)
    return t


# -- exact costs and optima -------------------------------------------------


def _min_sqdists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.min(np.einsum("ijk,ijk->ij", diff, diff), axis=1)


def brute_cost(points, centers, objective: str) -> float:
    """Exact u / v / mu cost under Euclidean distance."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if centers.size == 0:
        raise DomainError("cost needs at least one center")
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.size == 0:
        return 0.0
    sq = _min_sqdists(points, centers)
    if objective == "kcenter":
        return float(np.sqrt(sq.max()))
    if objective == "kmedian":
        return float(np.sqrt(sq).sum())
    if objective == "kmeans":
        return float(sq.sum())
    raise DomainError(f"unknown objective {objective!r}")


def brute_opt(points, k: int, objective: str) -> tuple[list[tuple[float, ...]], float]:
    """Exhaustive discrete optimum over k-subsets of the points.

    k >= 2 is limited to 16 distinct points (C(n,k) blowup); k = 1 scans any n.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(pts) == 0:
        raise DomainError("empty point set")
    if k < 1:
        raise DomainError("k must be positive")
    distinct = np.unique(pts, axis=0)
    if k >= len(distinct):
        return [tuple(p) for p in distinct.tolist()], 0.0
    if k == 1:
        best, best_c = None, np.inf
        for i in range(len(distinct)):
            c = brute_cost(pts, distinct[i : i + 1], objective)
            if c < best_c:
                best, best_c = [tuple(distinct[i])], c
        return best, float(best_c)
    if len(distinct) > 16:
        raise TooLargeError(f"{len(distinct)} distinct points is too many for exhaustive k>=2")
    best, best_c = None, np.inf
    for combo in combinations(range(len(distinct)), k):
        c = brute_cost(pts, distinct[list(combo)], objective)
        if c < best_c:
            best, best_c = [tuple(distinct[i]) for i in combo], c
    return best, float(best_c)


def gonzalez_cost(points, k: int, first: int = 0) -> float:
    """k-center cost of the classic farthest-first traversal on materialized
    points; an upper bound on the optimum, usable as a reference at scales
    where the exhaustive optimum is out of reach."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(pts) == 0:
        return 0.0
    d = np.sum((pts - pts[first]) ** 2, axis=1)
    for _ in range(1, k):
        j = int(np.argmax(d))
        d = np.minimum(d, np.sum((pts - pts[j]) ** 2, axis=1))
    return float(np.sqrt(d.max()))


def chi_square_uniformity(
    samples: Iterable[tuple], support: Sequence[tuple], alpha: float = 1e-3
) -> tuple[float, bool]:
    """Pearson statistic of the samples against the uniform distribution on
    the support; passes when the statistic is below the alpha critical value
    with |support|-1 degrees of freedom."""
    support = list(support)
    if len(support) < 2:
        raise DomainError("support must have at least two outcomes")
    index = {s: i for i, s in enumerate(support)}
    counts = np.zeros(len(support))
    n = 0
    for s in samples:
        if s not in index:
            raise ForeignSampleError(f"sample {s!r} outside the declared support")
        counts[index[s]] += 1
        n += 1
    if n == 0:
        raise DomainError("no samples")
    expected = n / len(support)
    stat = float(((counts - expected) ** 2 / expected).sum())
    crit = float(chi2.isf(alpha, len(support) - 1))
    return stat, stat < crit
