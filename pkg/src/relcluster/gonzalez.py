"""Farthest-point queries, approximate farthest-first traversal, and the
remote-edge/tree/cycle/pseudoforest/matching diversity objectives.

The farthest-point search probes radii r, deactivating a ball around every
anchor point and asking whether anything survives.  Survival at r certifies
a point farther than r; total coverage at r certifies nothing is farther
than (1+eps')r.  An adjacent (success, failure) radius pair within a
(1+eps') factor therefore certifies the returned point to within (1-eps) of
the true maximum.  Probe radii come from ranks over the 1-D value multiset
(L-infinity candidates) refined by a geometric grid up to sqrt(d), plus a
multiplicative bisection that closes any remaining gap.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .clustering import kcenter_refined, select_kth_pairwise_distance, value_set, _prepare
from .errors import DomainError, NoCandidateError
from .relational import DatabaseInstance, count_join
from .tree import RbbdTree


def farthest_point(
    instance: DatabaseInstance,
    anchors: Sequence[tuple[float, ...]],
    epsilon: float,
    seed: int = 0,
    tree: Optional[RbbdTree] = None,
) -> tuple[float, ...]:
    """A point p with phi(p, anchors) >= (1-eps) max over the join results.

    Locations are the unit of identity: anchors absorb every join result at
    the same coordinates, and NoCandidateError means every join-result
    location is anchored.
    """
    if not anchors:
        raise DomainError("anchors must be non-empty")
    inst = _prepare(instance)
    anchors = [tuple(float(v) for v in a) for a in anchors]
    eps_p = epsilon / 2.0
    d = inst.dim
    if tree is None:
        tree = RbbdTree(inst, eps_p, np.random.default_rng(seed))
    base = tree.snapshot()
    probes: list[tuple[float, Optional[tuple[float, ...]]]] = []

    def probe(r: float) -> Optional[tuple[float, ...]]:
        tree.restore(base)
        for a in anchors:
            tree.inactive(a, r)
        p = tree.rep()
        probes.append((r, p))
        return p

    def fallback() -> tuple[float, ...]:
        # max distance is zero (or every location coincides with an anchor):
        # radius-0 deactivation kills exactly the coincident locations, so
        # any survivor is a valid answer and emptiness is exact.
        tree.restore(base)
        for a in anchors:
            tree.inactive(a, 0.0)
        p = tree.rep()
        if p is None:
            raise NoCandidateError("every join-result location is an anchor")
        return p

    v = value_set(inst)
    if len(v) < 2:
        return fallback()  # all coordinates equal: max distance is zero
    total = len(v) * (len(v) - 1) // 2
    sqrt_d = math.sqrt(d)

    # outer search over L-infinity ranks (v is distinct: all diffs positive)
    lo_rank, hi_rank = 1, total
    r_of = {}

    def rank_radius(z: int) -> float:
        if z not in r_of:
            r_of[z] = select_kth_pairwise_distance(v, z)
        return r_of[z]

    if probe(rank_radius(lo_rank)) is None:
        # even the smallest positive candidate covers everything; descend
        g = rank_radius(lo_rank)
        r_lo = g / (1.0 + eps_p) ** 2
        p_lo = probe(r_lo)
        if p_lo is None:
            return fallback()  # max distance is zero (within coverage slack)
        r_hi = g
        mid = g / (1.0 + eps_p)
        p_mid = probe(mid)
        if p_mid is not None:
            r_lo, p_lo = mid, p_mid
        else:
            r_hi = mid
        return _certify(probe, r_lo, p_lo, r_hi, eps_p)

    lo, hi = lo_rank, hi_rank
    while lo < hi:  # largest succeeding rank
        mid = (lo + hi + 1) // 2
        if probe(rank_radius(mid)) is not None:
            lo = mid
        else:
            hi = mid - 1
    r_hat = rank_radius(lo)
    fail_r = rank_radius(lo + 1) if lo < hi_rank else None

    # inner geometric grid on [r_hat, sqrt(d) r_hat]
    steps = max(1, math.ceil(math.log(sqrt_d) / math.log(1.0 + eps_p))) if d > 1 else 1
    grid = [r_hat * (1.0 + eps_p) ** i for i in range(steps + 1)]
    g_lo, g_hi = 0, len(grid) - 1
    best_r, best_p = r_hat, probe(r_hat)
    if best_p is None:  # non-monotone wobble; retreat into bisection
        return _certify(probe, grid[0] / (1.0 + eps_p) ** 2, probe(grid[0] / (1.0 + eps_p) ** 2) or fallback(), grid[0], eps_p)
    while g_lo < g_hi:
        mid = (g_lo + g_hi + 1) // 2
        p = probe(grid[mid])
        if p is not None:
            best_r, best_p = grid[mid], p
            g_lo = mid
        else:
            g_hi = mid - 1
    if g_lo < len(grid) - 1:
        fail_r = grid[g_lo + 1]
    elif fail_r is None or fail_r <= best_r:
        fail_r = best_r * (1.0 + eps_p)
        while probe(fail_r) is not None:  # escalate to an observed failure
            best_r = fail_r
            best_p = probes[-1][1]
            fail_r *= 1.0 + eps_p
    return _certify(probe, best_r, best_p, fail_r, eps_p)


def _certify(probe, r_succ: float, p_succ, r_fail: float, eps_p: float):
    """Bisect multiplicatively until the failing radius is within (1+eps')

    of the succeeding one; the surviving point is then certified."""
    slack = (1.0 + eps_p) * (1.0 + 1e-9)
    for _ in range(80):
        if r_fail <= r_succ * slack:
            return p_succ
        mid = math.sqrt(r_succ * r_fail)
        p = probe(mid)
        if p is not None:
            r_succ, p_succ = mid, p
        else:
            r_fail = mid
    return p_succ


def gonzalez_approx(
    instance: DatabaseInstance,
    k: int,
    epsilon: float,
    seed: int = 0,
    candidate_factor: float = 1.0,
) -> list[tuple[float, ...]]:
    """eps-approximate farthest-first traversal for k steps.

    Runs the (2+eps) k-center with k' = min(n, k ceil(c eps^-d)) centers,
    then the exact in-memory traversal over that candidate set: each
    returned prefix step is within (1-eps) of the true farthest distance.
    """
    inst = _prepare(instance)
    n = count_join(inst)
    if k < 1 or k > n:
        raise DomainError(f"k must be in [1, {n}]")
    d = inst.dim
    k_prime = min(n, k * math.ceil(candidate_factor * epsilon**-d))
    sol = kcenter_refined(inst, k_prime, epsilon, seed)
    cand = np.asarray(list(dict.fromkeys(sol.centers)), dtype=np.float64)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]).generate_state(1)[0])
    first = int(rng.integers(len(cand)))
    picks = [first]
    dists = np.sqrt(np.sum((cand - cand[first]) ** 2, axis=1))
    while len(picks) < k:
        if len(picks) < len(cand):
            j = int(np.argmax(dists))
            picks.append(j)
            dists = np.minimum(dists, np.sqrt(np.sum((cand - cand[j]) ** 2, axis=1)))
        else:
            picks.append(picks[0])  # candidates exhausted: repeat (distance 0)
    return [tuple(cand[j]) for j in picks]


# -- diversity objectives -------------------------------------------------


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def remote_edge_value(points) -> float:
    dm = _pairwise(np.asarray(points, dtype=np.float64))
    n = len(dm)
    return float(min(dm[i, j] for i in range(n) for j in range(i + 1, n)))


def mst_weight(points) -> float:
    dm = _pairwise(np.asarray(points, dtype=np.float64))
    n = len(dm)
    in_tree = [0]
    best = dm[0].copy()
    total = 0.0
    for _ in range(n - 1):
        best[in_tree] = np.inf
        j = int(np.argmin(best))
        total += float(best[j])
        in_tree.append(j)
        best = np.minimum(best, dm[j])
    return total


def tsp_tour_value(points) -> tuple[float, bool]:
    """Exact min tour for up to 12 points (Held-Karp), else the doubled-MST
    shortcut tour length, flagged inexact."""
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    dm = _pairwise(pts)
    if n <= 2:
        return float(2.0 * dm[0, -1]) if n == 2 else 0.0, True
    if n <= 12:
        full = 1 << (n - 1)  # subsets of {1..n-1}; tour fixed to start at 0
        dp = np.full((full, n - 1), np.inf)
        for j in range(n - 1):
            dp[1 << j, j] = dm[0, j + 1]
        for s in range(full):
            for j in range(n - 1):
                base = dp[s, j]
                if not np.isfinite(base):
                    continue
                for j2 in range(n - 1):
                    if s & (1 << j2):
                        continue
                    s2 = s | (1 << j2)
                    cost = base + dm[j + 1, j2 + 1]
                    if cost < dp[s2, j2]:
                        dp[s2, j2] = cost
        best = min(dp[full - 1, j] + dm[j + 1, 0] for j in range(n - 1))
        return float(best), True
    # preorder shortcut of the doubled MST
    in_tree = [0]
    parent = {0: None}
    best = dm[0].copy()
    src = np.zeros(n, dtype=int)
    while len(in_tree) < n:
        b = best.copy()
        b[in_tree] = np.inf
        j = int(np.argmin(b))
        parent[j] = int(src[j])
        in_tree.append(j)
        upd = dm[j] < best
        best[upd] = dm[j][upd]
        src[upd] = j
    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for c, p in parent.items():
        if p is not None:
            children[p].append(c)
    tour = []
    stack = [0]
    while stack:
        u = stack.pop()
        tour.append(u)
        stack.extend(reversed(children[u]))
    cost = sum(dm[tour[i], tour[(i + 1) % n]] for i in range(n))
    return float(cost), False


def pseudoforest_value(points) -> float:
    dm = _pairwise(np.asarray(points, dtype=np.float64))
    np.fill_diagonal(dm, np.inf)
    return float(dm.min(axis=1).sum())


def matching_value(points) -> tuple[float, bool]:
    """Exact min-weight perfect matching for up to 12 points (bitmask DP),
    else greedy closest-pair, flagged inexact."""
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n % 2:
        raise DomainError("perfect matching needs an even number of points")
    dm = _pairwise(pts)
    if n <= 12:
        memo = {0: 0.0}

        def solve(mask: int) -> float:
            if mask in memo:
                return memo[mask]
            i = (mask & -mask).bit_length() - 1
            best = math.inf
            rest = mask & ~(1 << i)
            m = rest
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                best = min(best, dm[i, j] + solve(rest & ~(1 << j)))
            memo[mask] = best
            return best

        return float(solve((1 << n) - 1)), True
    left = set(range(n))
    total = 0.0
    while left:
        pairs = [(dm[i, j], i, j) for i, j in combinations(sorted(left), 2)]
        w, i, j = min(pairs)
        total += w
        left -= {i, j}
    return float(total), False


_EVALUATORS = {
    "rre": lambda pts: (remote_edge_value(pts), True),
    "rrt": lambda pts: (mst_weight(pts), True),
    "rrc": tsp_tour_value,
    "rrp": lambda pts: (pseudoforest_value(pts), True),
    "rrm": matching_value,
}


def diversity_value(points, objective: str) -> tuple[float, bool]:
    """(value, exact flag) of a diversity objective on a finite point set."""
    objective = objective.lower()
    if objective not in _EVALUATORS:
        raise DomainError(f"unknown diversity objective {objective!r}")
    return _EVALUATORS[objective](points)


def diversity_solve(
    instance: DatabaseInstance,
    k: int,
    objective: str,
    epsilon: float,
    seed: int = 0,
) -> tuple[list[tuple[float, ...]], float, bool]:
    """Farthest-first selection plus the exact (or flagged) evaluator."""
    objective = objective.lower()
    if objective not in _EVALUATORS:
        raise DomainError(f"unknown diversity objective {objective!r}")
    if k < 2:
        raise DomainError("diversity objectives need k >= 2")
    if objective == "rrm" and k % 2:
        raise DomainError("remote matching needs an even k")
    S = gonzalez_approx(instance, k, epsilon, seed)
    value, exact = diversity_value(S, objective)
    return S, value, exact
