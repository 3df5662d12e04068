"""End-to-end acceptance battery.

Each test implements one acceptance criterion at its stated tolerance and
prints a single pass/fail line (visible with pytest -s or on failure).
Desk-scale oracles: materialized joins, exhaustive optima, a twin activity
tracker replaying the tree's exact canonical choices, and chi-square tests.
"""

import json
import math
import time

import numpy as np
import pytest

from relcluster import (
    Box,
    BruteOracle,
    KMeansSchedule,
    RbbdTree,
    Region,
    SamplePolicy,
    brute_cost,
    brute_opt,
    chi_square_uniformity,
    count_join,
    count_rect,
    estimate_scale_L,
    gonzalez_approx,
    gonzalez_cost,
    kcenter_constant,
    kcenter_refined,
    kmeans_constant,
    region_query,
    report_rect,
    repr_rect,
    sample_rect,
    farthest_point,
    twin_track,
)
from relcluster.cli import main as cli_main

from conftest import join_pair_instance, points_instance, random_box, random_instance


def report(num: int, name: str, ok: bool, detail: str = ""):
    print(f"[acceptance {num:02d}] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"acceptance criterion {num} ({name}) failed: {detail}"


def brute_max_dist(points, anchors):
    pts = np.asarray(points, dtype=np.float64)
    a = np.asarray(anchors, dtype=np.float64)
    return float(np.sqrt(((pts[:, None, :] - a[None, :, :]) ** 2).sum(-1)).min(1).max())


# -- 1: oracle exactness ---------------------------------------------------------


def test_acceptance_01_oracle_exactness():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    pairs = 0
    bad = 0
    while pairs < 500:
        inst = random_instance(rng, rows_max=30, max_join=10_000, min_join=0)
        oracle = BruteOracle(inst)
        for _ in range(9):
            box = random_box(rng, oracle, inst.dim)
            want = sorted(map(tuple, oracle.points[box.mask_of(oracle.points)].tolist()))
            if count_rect(inst, box) != len(want):
                bad += 1
            elif sorted(report_rect(inst, box)) != want:
                bad += 1
            else:
                rep = repr_rect(inst, box)
                if (rep is None) != (len(want) == 0) or (rep is not None and rep not in want):
                    bad += 1
            pairs += 1
    elapsed = time.perf_counter() - t0
    report(
        1,
        "oracle exactness vs brute join",
        bad == 0 and elapsed < 60.0,
        f"({pairs} pairs, {bad} mismatches, {elapsed:.1f}s)",
    )


# -- 2: sampling uniformity -------------------------------------------------------


def test_acceptance_02_sampling_uniformity():
    rng = np.random.default_rng(102)
    b_vals = rng.integers(0, 4, 14).astype(float)
    inst = join_pair_instance(rng, rows=14, key_range=4)
    oracle = BruteOracle(inst)
    support_box = sorted(set(oracle.tuples()))
    assert 2 <= len(support_box) <= 64

    grid = points_instance(
        [(float(i), float(j)) for i in range(8) for j in range(8)]
    )
    region = Region(
        Box((0.0, 0.0), (8.0, 8.0)),
        Box((2.0, 2.0), (6.0, 6.0), (True, True), (False, False)),
    )
    support_hole = [
        (float(i), float(j))
        for i in range(8)
        for j in range(8)
        if not (2 <= i < 6 and 2 <= j < 6)
    ]

    passes = {"sample_rect": 0, "region_sample": 0, "tree_sample": 0}
    reps = 20
    for rep_i in range(reps):
        seed = 1000 + rep_i
        draws = sample_rect(inst, None, 400 * len(support_box), seed=seed)
        _, ok = chi_square_uniformity(draws, support_box)
        passes["sample_rect"] += ok

        draws = region_query("sample", grid, region, z=400 * len(support_hole), seed=seed)
        _, ok = chi_square_uniformity(draws, support_hole)
        passes["region_sample"] += ok

        tree = RbbdTree(grid, 0.3, seed=seed)
        tree.inactive((0.0, 0.0), 2.2)  # carve out a corner to shrink Q'
        support_tree = sorted(set(tree.report()))
        draws = tree.sample(400 * len(support_tree))
        _, ok = chi_square_uniformity(draws, support_tree)
        passes["tree_sample"] += ok

    ok = all(v >= 19 for v in passes.values())
    report(2, "sampling uniformity (chi-square, alpha=1e-3)", ok, f"{passes} of {reps}")


# -- 3: canonical sandwich ---------------------------------------------------------


def test_acceptance_03_canonical_sandwich():
    rng = np.random.default_rng(103)
    balls = 0
    violations = 0
    while balls < 200:
        inst = random_instance(rng, rows_max=12, max_join=500)
        oracle = BruteOracle(inst)
        eps = float(rng.choice([0.15, 0.25, 0.5]))
        tree = RbbdTree(inst, eps, seed=balls, instrument=True)
        tracker = twin_track(oracle, tree.trace)
        pts = oracle.points
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        for _ in range(10):
            x = lo + rng.random(inst.dim) * span * 1.1 - 0.05 * span
            r = float(rng.random() * span.max() * 0.7)
            canon = tree.canonical_nodes(tuple(x), r)
            covered = np.zeros(len(pts), dtype=bool)
            for u in canon:
                covered |= u.region.mask_of(pts)
            tracker.replay(tree.trace)
            active = tracker.mask
            sq = np.sum((pts - x) ** 2, axis=1)
            if np.any(active & (sq <= r * r) & ~covered):
                violations += 1
            rr = (1 + eps) * r
            if np.any(active & covered & (sq > rr * rr)):
                violations += 1
            if rng.random() < 0.4:
                tree.inactive(tuple(x), r)
            balls += 1
    report(3, "canonical sandwich (exact, 200 balls)", violations == 0, f"{violations} violations")


# -- 4: state consistency -----------------------------------------------------------


def test_acceptance_04_state_consistency():
    rng = np.random.default_rng(104)
    bad = 0
    for trial in range(5):
        inst = random_instance(rng, rows_max=10, max_join=400)
        oracle = BruteOracle(inst)
        tree = RbbdTree(inst, 0.3, seed=500 + trial, instrument=True)
        tracker = twin_track(oracle, tree.trace)
        pts = oracle.points
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        for op in range(50):
            kind = int(rng.integers(0, 4))
            x = tuple(lo + rng.random(inst.dim) * span)
            r = float(rng.random() * span.max() * 0.5)
            if kind == 0:
                tree.inactive(x, r)
            elif kind == 1:
                tree.count(x, r)
            elif kind == 2 and tree.root.active:
                tree.sample(int(rng.integers(1, 4)))
            else:
                tree.report()
            tracker.replay(tree.trace)
            if op % 10 == 9:
                for u in tree.active_nodes():
                    if u.count != tracker.count_in_region(u.region):
                        bad += 1
                    if not tracker.contains_active(u.region, u.rep):
                        bad += 1
                if sorted(tree.report()) != sorted(tracker.active_tuples()):
                    bad += 1
    report(4, "node state matches twin tracker", bad == 0, f"{bad} divergences")


# -- 5: shrink balance ---------------------------------------------------------------


def test_acceptance_05_shrink_balance():
    rng = np.random.default_rng(105)
    n = 20_000
    inst = points_instance(np.round(rng.random((n, 2)) * 100, 4))
    tree = RbbdTree(inst, 0.1, seed=1, sample_policy=SamplePolicy(0.1))
    lam = tree.sample_size
    assert tree.root.count >= 4 * lam, (tree.root.count, lam)
    pts = BruteOracle(inst).points
    runs = 1000
    ok_runs = 0
    for i in range(runs):
        plan = tree.shrink_plan(tree.root, np.random.default_rng(2000 + i))
        frac = plan.reported.to_box().mask_of(pts).sum() / len(pts)
        if 1 / 3 - 0.2 <= frac <= 2 / 3 + 0.2:
            ok_runs += 1
    report(
        5,
        "randomized shrink balance (eps=0.1)",
        ok_runs >= 0.99 * runs,
        f"({ok_runs}/{runs} within [1/3-2eps, 2/3+2eps], Lambda={lam})",
    )


# -- 6: k-center guarantee -----------------------------------------------------------


def test_acceptance_06_kcenter_guarantee():
    rng = np.random.default_rng(106)
    eps = 0.25
    good = 0
    runs = 100
    for trial in range(runs):
        inst = random_instance(rng, rows_max=6, max_join=16, value_range=5, decimals=1)
        oracle = BruteOracle(inst)
        k = int(rng.integers(1, 4))
        sol = kcenter_constant(inst, k, eps, seed=trial)
        cost = brute_cost(oracle.points, sol.centers, "kcenter")
        _, opt = brute_opt(oracle.points, k, "kcenter")
        d = inst.dim
        if cost <= sol.cost_estimate and sol.cost_estimate <= (2 * math.sqrt(d) + eps) * opt:
            good += 1
    ok_tiny = good >= 0.99 * runs

    bad_large = 0
    for trial in range(50):
        while True:
            rows = int(rng.integers(60, 200))
            inst = join_pair_instance(rng, rows=rows, key_range=int(rng.integers(10, 30)))
            n = count_join(inst)
            if 50 <= n <= 5000:
                break
        oracle = BruteOracle(inst)
        k = int(rng.integers(1, 4))
        sol = kcenter_constant(inst, k, eps, seed=trial)
        ref = gonzalez_cost(oracle.points, k)
        cost = brute_cost(oracle.points, sol.centers, "kcenter")
        if cost > sol.cost_estimate or cost > (2 * math.sqrt(2) + eps) * ref:
            bad_large += 1
    report(
        6,
        "k-center bound (2*sqrt(d)+eps)",
        ok_tiny and bad_large == 0,
        f"(tiny {good}/{runs}, large violations {bad_large}/50)",
    )


# -- 7: refined k-center --------------------------------------------------------------


def test_acceptance_07_kcenter_refined():
    rng = np.random.default_rng(107)
    eps = 0.3
    good = 0
    runs = 100
    for trial in range(runs):
        inst = random_instance(rng, rows_max=6, max_join=16, value_range=5, decimals=1)
        oracle = BruteOracle(inst)
        k = int(rng.integers(1, 4))
        sol = kcenter_refined(inst, k, eps, seed=trial)
        cost = brute_cost(oracle.points, sol.centers, "kcenter")
        _, opt = brute_opt(oracle.points, k, "kcenter")
        if cost <= sol.cost_estimate and sol.cost_estimate <= (2 + eps) * opt:
            good += 1
    report(7, "refined k-center bound (2+eps)", good >= 0.99 * runs, f"({good}/{runs})")


# -- 8: k-means / k-median --------------------------------------------------------------


def test_acceptance_08_kmeans_kmedian():
    rng = np.random.default_rng(108)
    problems = []

    # unconditional mu_S <= r_S, trivial regime, |S| and iteration bounds
    ratio_good = 0
    tiny_runs = 40
    for trial in range(tiny_runs):
        inst = random_instance(rng, rows_max=5, max_join=12, value_range=5, decimals=1)
        oracle = BruteOracle(inst)
        k = int(rng.integers(1, 3))
        power = 2 if trial % 2 == 0 else 1
        objective = "kmeans" if power == 2 else "kmedian"
        sol = kmeans_constant(inst, k, 0.3, power=power, seed=trial)
        n = oracle.size
        cost = brute_cost(oracle.points, sol.centers, objective)
        if cost > sol.cost_estimate * (1 + 1e-12) + 1e-12:
            problems.append(f"tiny {trial}: cost {cost} > r_S {sol.cost_estimate}")
        _, opt = brute_opt(oracle.points, k, objective)
        if sol.cost_estimate <= 84.5 * opt + 1e-12:
            ratio_good += 1
        log2n = math.log2(max(n, 2))
        if len(sol.centers) > 300 * k * log2n**3:
            problems.append(f"tiny {trial}: |S|={len(sol.centers)} over bound")
        if sol.trace["iterations"] > 4 * log2n + 8:
            problems.append(f"tiny {trial}: iterations over bound")
    if ratio_good < 0.95 * tiny_runs:
        problems.append(f"ratio bound held only {ratio_good}/{tiny_runs}")

    # loop regime via an injected schedule: the exact inequality must still hold
    iter_good = 0
    loop_runs = 8
    for trial in range(loop_runs):
        inst = join_pair_instance(rng, rows=int(rng.integers(90, 140)), key_range=16)
        n = count_join(inst)
        sched = KMeansSchedule(
            n=n, k=2, epsilon=0.4, sample_factor=1.5, stop_factor=3.0,
            tree_epsilon=0.3, scale_epsilon=0.4,
        )
        if n <= sched.stop_threshold:
            continue
        sol = kmeans_constant(inst, 2, 0.4, power=2, seed=trial, schedule=sched)
        oracle = BruteOracle(inst)
        cost = brute_cost(oracle.points, sol.centers, "kmeans")
        if cost > sol.cost_estimate * (1 + 1e-12):
            problems.append(f"loop {trial}: cost {cost} > r_S {sol.cost_estimate}")
        if sol.trace["iterations"] <= 4 * math.log2(n) + 8:
            iter_good += 1
    if iter_good < loop_runs - 1:
        problems.append(f"loop iteration bound held only {iter_good}")

    # L sandwich on tiny instances
    for trial in range(12):
        inst = random_instance(rng, rows_max=5, max_join=12, value_range=5, decimals=1)
        oracle = BruteOracle(inst)
        k = int(rng.integers(1, 3))
        _, L, _ = estimate_scale_L(inst, k, seed=trial)
        _, mu_opt = brute_opt(oracle.points, k, "kmeans")
        n = oracle.size
        if L == 0.0:
            if mu_opt != 0.0:
                problems.append(f"L {trial}: L=0 but mu_opt={mu_opt}")
        elif not (L * L / 9 <= mu_opt + 1e-12 and mu_opt <= n * L * L + 1e-12):
            problems.append(f"L {trial}: sandwich broken L={L} mu_opt={mu_opt}")

    report(8, "k-means/median bounds", not problems, "; ".join(problems[:4]))


# -- 9: farthest point / Gonzalez ------------------------------------------------------


def test_acceptance_09_farthest_gonzalez():
    rng = np.random.default_rng(109)
    eps = 0.2
    runs = 200
    successes = 0
    violations = 0
    for trial in range(runs):
        inst = random_instance(rng, rows_max=10, max_join=500, decimals=1)
        oracle = BruteOracle(inst)
        mat = oracle.points
        k = int(rng.integers(1, 4))
        uniq = np.unique(mat, axis=0)
        idx = rng.choice(len(uniq), size=min(k, len(uniq)), replace=False)
        anchors = [tuple(uniq[i]) for i in idx]
        best = brute_max_dist(mat, anchors)
        try:
            p = farthest_point(inst, anchors, eps, seed=trial)
        except Exception:  # count as a failed run, not a violation
            continue
        successes += 1
        got = brute_max_dist([p], anchors)
        if got < (1 - eps) * best - 1e-9:
            violations += 1

    mono_ok = True
    for trial in range(5):
        inst = random_instance(rng, rows_max=10, max_join=300, decimals=1)
        n_uniq = len(np.unique(BruteOracle(inst).points, axis=0))
        k = min(5, n_uniq)
        picks = gonzalez_approx(inst, k, eps, seed=trial)
        dists = [brute_max_dist([picks[i]], picks[:i]) for i in range(1, len(picks))]
        if any(a < b - 1e-12 for a, b in zip(dists, dists[1:])):
            mono_ok = False
    ok = successes >= 0.99 * runs and violations == 0 and mono_ok
    report(
        9,
        "farthest point (1-eps) + Gonzalez monotone",
        ok,
        f"({successes}/{runs} successes, {violations} violations, monotone={mono_ok})",
    )


# -- 10: scaling smoke test --------------------------------------------------------------


def _timed_median(fn, repeats=3):
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return sorted(out)[len(out) // 2]


def test_acceptance_10_scaling():
    rng = np.random.default_rng(110)
    times = {}
    for rows in (10_000, 20_000):
        half = rows // 2
        b1 = (np.arange(rows) % half).astype(float)
        r1 = np.column_stack([np.round(rng.random(rows) * 100, 3), b1])
        r2 = np.column_stack([b1, np.round(rng.random(rows) * 100, 3)])
        from conftest import make_instance

        inst = make_instance(
            {"R1": (["A", "B"], r1), "R2": (["B", "C"], r2)}, [("R1", "R2")]
        )
        box = Box((10.0, 0.0, 10.0), (90.0, float(rows), 90.0))
        t_count = _timed_median(lambda: count_rect(inst, box))

        def fresh_inactive():
            tree = RbbdTree(inst, 0.3, seed=3)
            tree.inactive((50.0, half / 2.0, 50.0), 20.0)

        t_inact = _timed_median(fresh_inactive)
        times[rows] = (t_count, t_inact)
    count_ratio = times[20_000][0] / times[10_000][0]
    inact_ratio = times[20_000][1] / times[10_000][1]
    ok = count_ratio <= 3.0 and inact_ratio <= 3.0
    report(
        10,
        "linear scaling (N -> 2N)",
        ok,
        f"(count x{count_ratio:.2f}, inactive x{inact_ratio:.2f})",
    )


# -- 11: determinism -----------------------------------------------------------------------


def test_acceptance_11_determinism(tmp_path, capsys):
    files = {
        "r1.csv": "A,B\n0,1\n1,1\n5,2\n5.5,2\n9,3\n",
        "r2.csv": "B,C\n1,4\n2,4.5\n2,8\n3,0\n",
    }
    for name, text in files.items():
        (tmp_path / name).write_text(text)
    cfg = tmp_path / "config.json"
    cfg.write_text(
        json.dumps(
            {
                "relations": [
                    {"name": "R1", "file": "r1.csv", "attrs": ["A", "B"]},
                    {"name": "R2", "file": "r2.csv", "attrs": ["B", "C"]},
                ],
                "join_tree_edges": [["R1", "R2"]],
                "projection": None,
            }
        )
    )
    ok = True
    for args in (
        ["cluster", "--config", str(cfg), "--objective", "kcenter-refined",
         "-k", "2", "--epsilon", "0.3", "--seed", "17"],
        ["cluster", "--config", str(cfg), "--objective", "kmeans",
         "-k", "2", "--epsilon", "0.5", "--seed", "23"],
        ["diversity", "--config", str(cfg), "--objective", "rrt",
         "-k", "3", "--epsilon", "0.25", "--seed", "5"],
    ):
        assert cli_main(args) == 0
        out1 = capsys.readouterr().out
        assert cli_main(args) == 0
        out2 = capsys.readouterr().out
        if out1 != out2:
            ok = False
    report(11, "byte-identical reruns (CLI)", ok)
