"""Relational k-center, and constant-factor k-means / k-median, over a join.

k-center: a fixed-radius greedy loop on the decomposition tree (pick any
active point, deactivate its 2r-ball, repeat up to k times) wrapped in a
binary search over candidate radii.  Candidate radii come from pairwise
L-infinity distances, which over a join are differences of two base-table
values: the value multiset V of all clustering columns contains every such
distance, and rank selection over V's pairwise differences replaces sorting
the quadratically many join-result distances.

k-means / k-median: iterative sampling-and-covering.  Each round samples a
batch of active points, implicitly partitions the remaining active points
into geometric distance classes around the batch via count+deactivate
sweeps at doubling radii, commits the classes up to the last "heavy" one,
and charges each committed point the top of its class window.  The running
charge total r_S is a certified upper bound on the final clustering cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, EmptyJoinError, RankError
from .relational import DatabaseInstance, count_join, enumerate_join, semi_join_reduce
from .tree import RbbdTree, SamplePolicy


@dataclass
class ClusterSolution:
    """Centers, certified cost bound r_S, and run metadata."""

    objective: str
    k: int
    epsilon: float
    seed: int
    centers: list[tuple[float, ...]]
    cost_estimate: float
    trace: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "spec": "1",
            "objective": self.objective,
            "k": self.k,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "centers": [list(c) for c in self.centers],
            "cost_estimate": _sig12(self.cost_estimate),
            "trace": self.trace,
        }


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _prepare(instance: DatabaseInstance) -> DatabaseInstance:
    return instance if instance.reduced else semi_join_reduce(instance)


# Probe radii derived from pairwise-value differences are inflated by a hair:
# composed float distances (sums of squares, sqrt) can exceed the ideal 2r by
# an ulp exactly at the covering argument's boundary.  The internal epsilon is
# shaved by more than the guard so certified bounds stay strictly inside the
# stated approximation constants.
_RADIUS_GUARD = 1.0 + 1e-9
_EPS_SHAVE = 1.0 - 1e-6


# -- pairwise-distance rank selection ----------------------------------------


def value_set(instance: DatabaseInstance) -> np.ndarray:
    """Sorted distinct values of all clustering columns.

    Every pairwise L-infinity distance between join results equals the
    absolute difference of two of these values.
    """
    vals: list[np.ndarray] = []
    for a in instance.clustering_attrs:
        for rel in instance.relations:
            if a in rel.attrs and rel.nrows:
                vals.append(rel.col(a))
    if not vals:
        return np.empty(0)
    return np.unique(np.concatenate(vals))


def _le_boundaries(v: np.ndarray, t: float) -> np.ndarray:
    """Per j, the smallest i with v[j] - v[i] <= t (direct float comparison).

    searchsorted on the rearranged inequality v[i] >= v[j] - t can be off by
    a rounding ulp; flagged positions are repaired with an exact bisection."""
    n = len(v)
    j_idx = np.arange(n)
    idx = np.minimum(np.searchsorted(v, v - t, side="left"), j_idx)
    left_bad = (idx > 0) & ((v - v[np.maximum(idx - 1, 0)]) <= t)
    right_bad = (v - v[idx]) > t
    for j in np.nonzero(left_bad | right_bad)[0]:
        lo, hi = 0, int(j)  # predicate holds at i=j (diff 0 <= t for t >= 0)
        while lo < hi:
            m = (lo + hi) // 2
            if v[j] - v[m] <= t:
                hi = m
            else:
                lo = m + 1
        idx[j] = lo
    return idx


def _count_pairs_le(v: np.ndarray, t: float) -> int:
    if t < 0:
        return 0
    idx = _le_boundaries(v, t)
    return int((np.arange(len(v)) - idx).sum())


def _min_diff_gt(v: np.ndarray, t: float) -> Optional[float]:
    """Smallest realized pairwise difference strictly greater than t."""
    if len(v) < 2:
        return None
    if t < 0:
        return float((v[1:] - v[:-1]).min())
    idx = _le_boundaries(v, t)
    has = idx >= 1
    if not has.any():
        return None
    cands = v[has] - v[idx[has] - 1]
    return float(cands.min())


def select_kth_pairwise_distance(values: Sequence[float], z: int) -> float:
    """z-th smallest |v_i - v_j| over unordered pairs, ties with multiplicity.

    Binary search on the value axis with a two-pointer pair count per probe,
    then an exact finisher that lands on a realized difference.
    """
    v = np.sort(np.asarray(list(values), dtype=np.float64))
    n = len(v)
    total = n * (n - 1) // 2
    if not 1 <= z <= total:
        raise RankError(f"rank {z} outside [1, {total}]")
    lo, hi = -1.0, float(v[-1] - v[0])
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_pairs_le(v, mid) >= z:
            hi = mid
        else:
            lo = mid
    while True:
        t = _min_diff_gt(v, lo)
        if t is None:  # numerically impossible given the rank check
            return hi
        if _count_pairs_le(v, t) >= z:
            return t
        lo = t


# -- k-center -----------------------------------------------------------------


def _greedy_cover(tree: RbbdTree, k: int, r: float) -> Optional[list[tuple[float, ...]]]:
    """One fixed-radius pass: S, or None when k picks do not cover Q'."""
    S: list[tuple[float, ...]] = []
    while True:
        p = tree.rep()
        if p is None:
            return S
        if len(S) == k:
            return None
        S.append(p)
        tree.inactive(p, 2.0 * r)


def kcenter_fixed_radius(
    instance: DatabaseInstance, k: int, epsilon: float, r: float, seed: int = 0
) -> Optional[list[tuple[float, ...]]]:
    """Fixed-radius k-center: covers every active point with k balls of
    radius 2(1+eps)r when possible, else returns None."""
    if k < 1:
        raise DomainError("k must be positive")
    if r < 0:
        raise DomainError("radius must be non-negative")
    inst = _prepare(instance)
    tree = RbbdTree(inst, epsilon, seed)
    return _greedy_cover(tree, k, r)


def _coincident_solution(inst, k, epsilon, seed, objective) -> ClusterSolution:
    pts = enumerate_join(inst, limit=1)
    return ClusterSolution(objective, k, epsilon, seed, [pts[0]], 0.0, {"degenerate": "single-point"})


def kcenter_constant(
    instance: DatabaseInstance, k: int, epsilon: float, seed: int = 0
) -> ClusterSolution:
    """(2 sqrt(d) + eps)-approximate k-center with a certified bound r_S.

    Internally rescales eps to eps/(2 sqrt(d)) so that the certified
    r_S = 2(1+eps') sqrt(d) r' stays within (2 sqrt(d)+eps) times the
    optimum after the L-infinity-to-L2 conversion.
    """
    if k < 1:
        raise DomainError("k must be positive")
    inst = _prepare(instance)
    n = count_join(inst)
    if n == 0:
        raise EmptyJoinError("k-center over an empty join")
    d = inst.dim
    eps_int = epsilon / (2.0 * math.sqrt(d)) * _EPS_SHAVE
    rng = np.random.default_rng(seed)
    tree = RbbdTree(inst, eps_int, rng)
    if n == 1:
        return _coincident_solution(inst, k, epsilon, seed, "kcenter")
    v = value_set(inst)
    total = len(v) * (len(v) - 1) // 2
    if total == 0:  # one distinct value everywhere: all points coincide
        return _coincident_solution(inst, k, epsilon, seed, "kcenter")

    base = tree.snapshot()
    sqrt_d = math.sqrt(d)
    probes: list[dict] = []

    def probe(radius: float) -> Optional[list[tuple[float, ...]]]:
        tree.restore(base)
        S = _greedy_cover(tree, k, radius)
        probes.append({"r": radius, "ok": S is not None})
        return S

    zero = probe(0.0)
    if zero is not None:  # at most k distinct locations: exact zero cost
        return ClusterSolution(
            "kcenter", k, epsilon, seed, zero, 0.0, {"n": n, "probes": probes, "final_radius": 0.0}
        )
    r_top = sqrt_d * float(v[-1] - v[0]) * _RADIUS_GUARD
    best = probe(r_top)
    best_r = r_top
    while best is None:  # float-rounding guard; mathematically unreachable
        best_r *= 1.0 + eps_int
        best = probe(best_r)
    lo, hi = 1, total
    while lo < hi:
        mid = (lo + hi) // 2
        r = sqrt_d * select_kth_pairwise_distance(v, mid) * _RADIUS_GUARD
        S = probe(r)
        if S is not None:
            best, best_r = S, r
            hi = mid
        else:
            lo = mid + 1
    r_s = 2.0 * (1.0 + eps_int) * best_r
    return ClusterSolution(
        "kcenter",
        k,
        epsilon,
        seed,
        best,
        r_s,
        {"n": n, "eps_internal": eps_int, "probes": probes, "final_radius": best_r},
    )


def kcenter_refined(
    instance: DatabaseInstance, k: int, epsilon: float, seed: int = 0
) -> ClusterSolution:
    """(2+eps)-approximate k-center: first-level rank search, then a second
    binary search over a (1+eps/5) geometric grid spanning the first-level
    bound's uncertainty interval."""
    if k < 1:
        raise DomainError("k must be positive")
    inst = _prepare(instance)
    d = inst.dim
    eps_p = epsilon / 5.0
    base_sol = kcenter_constant(inst, k, eps_p, seed)
    if base_sol.cost_estimate == 0.0:
        base_sol.trace["refined"] = "zero-cost first level"
        return ClusterSolution(
            "kcenter", k, epsilon, seed, base_sol.centers, 0.0, base_sol.trace
        )
    span = 2.0 * math.sqrt(d) + eps_p
    lo_r = base_sol.cost_estimate / span
    steps = math.ceil(math.log(span) / math.log(1.0 + eps_p))
    grid = [lo_r * (1.0 + eps_p) ** i for i in range(steps + 1)]

    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]).generate_state(1)[0])
    tree = RbbdTree(inst, eps_p, rng)
    base = tree.snapshot()
    probes: list[dict] = []

    def probe(radius: float) -> Optional[list[tuple[float, ...]]]:
        tree.restore(base)
        S = _greedy_cover(tree, k, radius)
        probes.append({"r": radius, "ok": S is not None})
        return S

    best = probe(grid[-1])
    best_r = grid[-1]
    while best is None:  # grid top is >= the first-level bound; guard anyway
        best_r *= 1.0 + eps_p
        best = probe(best_r)
    lo, hi = 0, len(grid) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        S = probe(grid[mid])
        if S is not None:
            best, best_r = S, grid[mid]
            hi = mid
        else:
            lo = mid + 1
    r_s = 2.0 * (1.0 + eps_p) * best_r
    return ClusterSolution(
        "kcenter",
        k,
        epsilon,
        seed,
        best,
        r_s,
        {
            "n": base_sol.trace.get("n"),
            "eps_internal": eps_p,
            "first_level_bound": base_sol.cost_estimate,
            "grid_size": len(grid),
            "probes": probes,
            "final_radius": best_r,
        },
    )


def estimate_scale_L(
    instance: DatabaseInstance, k: int, seed: int = 0, epsilon: float = 0.1
) -> tuple[list[tuple[float, ...]], float, ClusterSolution]:
    """k-center pilot run pinning the k-means scale: returns (V, L, solution)
    with L**2/9 <= mu_opt <= |q(D)| L**2."""
    sol = kcenter_refined(instance, k, epsilon, seed)
    return sol.centers, sol.cost_estimate, sol


# -- k-means / k-median --------------------------------------------------------


@dataclass
class KMeansSchedule:
    """Parameter ladder of the sampling-and-covering loop.

    Defaults follow the published constants (base-2 logs, ceilings); tests
    may inject smaller ones to exercise the loop at desk scale.
    """

    n: int
    k: int
    epsilon: float
    sample_factor: float = 240.0
    stop_factor: float = 480.0
    beta_divisor: float = 10.0
    eps_shrink: float = 400.0  # user eps -> charge/tree eps
    scale_epsilon: float = 0.1  # eps pinned for the k-center pilot
    tree_epsilon: Optional[float] = None
    L_override: Optional[float] = None

    @property
    def log2n(self) -> float:
        return math.log2(max(self.n, 2))

    @property
    def M(self) -> int:
        return math.ceil(2 * self.log2n) + 3

    @property
    def sample_size(self) -> int:
        return math.ceil(self.sample_factor * self.k * self.log2n**2)

    @property
    def stop_threshold(self) -> int:
        return math.ceil(self.stop_factor * self.k * self.log2n**2)

    def beta_threshold(self, tau: int) -> float:
        return tau / (self.beta_divisor * self.log2n)

    @property
    def eps_internal(self) -> float:
        return self.epsilon / self.eps_shrink

    def radii(self, L: float) -> tuple[list[float], float]:
        """(b_0..b_M, a_inf): doubling ladder from L/(4n) up, plus the
        far-class threshold 2 L n."""
        b0 = L / (4.0 * self.n)
        return [b0 * 2.0**j for j in range(self.M + 1)], 2.0 * L * self.n


def kmeans_constant(
    instance: DatabaseInstance,
    k: int,
    epsilon: float,
    power: int = 2,
    seed: int = 0,
    schedule: Optional[KMeansSchedule] = None,
    instrument: bool = False,
) -> ClusterSolution:
    """Constant-factor k-means (power=2) or k-median (power=1) with
    O(k log^3 n) centers and a certified cost bound r_S >= mu_S / v_S.

    Every committed point is within (1+eps') b_j of a sampled center, by the
    deactivation oracle's guarantee, and is charged ((1+eps') b_j)^power, so
    the exact-cost inequality holds on every run regardless of randomness.
    """
    if k < 1:
        raise DomainError("k must be positive")
    if power not in (1, 2):
        raise DomainError("power must be 1 (median) or 2 (means)")
    objective = "kmeans" if power == 2 else "kmedian"
    inst = _prepare(instance)
    n = count_join(inst)
    if n == 0:
        raise EmptyJoinError(f"{objective} over an empty join")
    if n == 1:
        return _coincident_solution(inst, k, epsilon, seed, objective)
    sched = schedule or KMeansSchedule(n=n, k=k, epsilon=epsilon)
    seeds = np.random.SeedSequence([seed, 2]).generate_state(3)

    if sched.L_override is not None:
        L = sched.L_override
        pilot_trace = {"L_override": L}
    else:
        _, L, pilot = estimate_scale_L(inst, k, int(seeds[0]), epsilon=sched.scale_epsilon)
        pilot_trace = {"pilot_probes": len(pilot.trace.get("probes", []))}
    eps_int = sched.eps_internal
    tree_eps = sched.tree_epsilon if sched.tree_epsilon is not None else eps_int
    tree = RbbdTree(inst, tree_eps, np.random.default_rng(int(seeds[1])), instrument=instrument)

    if L == 0.0:  # at most k distinct locations: every active point is a center
        S = _dedupe(tree.report())
        return ClusterSolution(
            objective, k, epsilon, seed, S, 0.0, {"n": n, "L": 0.0, "iterations": 0, **pilot_trace}
        )

    b, a_inf = sched.radii(L)
    ladder = b + [math.inf]
    S: list[tuple[float, ...]] = []
    r_s = 0.0
    tau = n
    taus = [tau]
    betas: list[int] = []
    counts_log: list[list[int]] = []
    it = 0
    while tau > sched.stop_threshold:
        it += 1
        z = min(sched.sample_size, tau)
        X = _dedupe(tree.sample(z))
        S.extend(X)
        tokens = []
        c = []
        for j, radius in enumerate(ladder):
            tokens.append(tree.snapshot())
            if tree.trace is not None:
                tree.trace.append(("class-start", it, j))
            cj = 0
            for x in X:
                cj += tree.count(x, radius)
                tree.inactive(x, radius)
            if tree.trace is not None:
                tree.trace.append(("class-end", it, j, cj))
            c.append(cj)
        thresh = sched.beta_threshold(tau)
        finite = c[:-1]
        heavy = [j for j, cj in enumerate(finite) if cj > thresh]
        beta = max(heavy) if heavy else max(j for j, cj in enumerate(finite) if cj > 0)
        tree.restore(tokens[beta + 1])
        committed = sum(c[: beta + 1])
        tau -= committed
        r_s += sum(c[j] * ((1.0 + eps_int) * b[j]) ** power for j in range(beta + 1))
        taus.append(tau)
        betas.append(beta)
        counts_log.append(c)
    leftovers = tree.report()
    S = _dedupe(S + leftovers)
    trace = {
        "n": n,
        "L": L,
        "iterations": it,
        "taus": taus,
        "betas": betas,
        "class_counts": counts_log,
        "a_inf": a_inf,
        **pilot_trace,
    }
    sol = ClusterSolution(objective, k, epsilon, seed, S, r_s, trace)
    if instrument:
        sol.trace["tree"] = tree  # type: ignore[assignment]
    return sol


def _dedupe(points: Sequence[tuple[float, ...]]) -> list[tuple[float, ...]]:
    return list(dict.fromkeys(points))
