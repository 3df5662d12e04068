"""Command-line front end: ingest, cluster, query, diversity, verify, bench.

Exit codes: 0 success, 2 configuration/usage error, 3 verification failure.
All randomized subcommands echo their seed; identical config plus seed
yields byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .boxes import parse_box_literal
from .bruteforce import BruteOracle, brute_cost, chi_square_uniformity, twin_track
from .clustering import kcenter_constant, kcenter_refined, kmeans_constant, _sig12
from .errors import RelClusterError
from .gonzalez import diversity_solve
from .ingest import load_instance
from .oracles import count_rect, report_rect, repr_rect, sample_rect
from .relational import count_join, semi_join_reduce
from .tree import RbbdTree

FULL_BRUTE_CAP = 100_000


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _load(args) -> tuple:
    inst = load_instance(args.config)
    red = semi_join_reduce(inst)
    return inst, red


def cmd_ingest(args) -> int:
    inst, red = _load(args)
    payload = {
        "spec": "1",
        "command": "ingest",
        "relations": {
            r.name: {"rows": r.nrows, "rows_reduced": rr.nrows}
            for r, rr in zip(inst.relations, red.relations)
        },
        "join_size": count_join(red),
        "clustering_attrs": list(red.clustering_attrs),
    }
    _emit(payload, args.output)
    return 0


def cmd_cluster(args) -> int:
    _, red = _load(args)
    runners = {
        "kcenter": lambda: kcenter_constant(red, args.k, args.epsilon, args.seed),
        "kcenter-refined": lambda: kcenter_refined(red, args.k, args.epsilon, args.seed),
        "kmeans": lambda: kmeans_constant(red, args.k, args.epsilon, 2, args.seed),
        "kmedian": lambda: kmeans_constant(red, args.k, args.epsilon, 1, args.seed),
    }
    sol = runners[args.objective]()
    payload = sol.to_json_dict()
    payload["command"] = "cluster"
    payload["objective"] = args.objective
    _emit(payload, args.output)
    return 0


def cmd_query(args) -> int:
    _, red = _load(args)
    box = parse_box_literal(args.box, red.clustering_attrs) if args.box else None
    payload = {"spec": "1", "command": "query", "kind": args.kind, "box": args.box}
    if args.kind == "count":
        payload["count"] = count_rect(red, box)
    elif args.kind == "repr":
        rep = repr_rect(red, box)
        payload["repr"] = list(rep) if rep is not None else None
    elif args.kind == "report":
        payload["tuples"] = [list(t) for t in report_rect(red, box)]
    elif args.kind == "sample":
        payload["seed"] = args.seed
        payload["samples"] = [
            list(t) for t in sample_rect(red, box, args.samples, args.seed)
        ]
    _emit(payload, args.output)
    return 0


def cmd_diversity(args) -> int:
    _, red = _load(args)
    S, value, exact = diversity_solve(red, args.k, args.objective, args.epsilon, args.seed)
    payload = {
        "spec": "1",
        "command": "diversity",
        "objective": args.objective,
        "k": args.k,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "centers": [list(p) for p in S],
        "value": _sig12(value),
        "exact": exact,
    }
    _emit(payload, args.output)
    return 0


def _verify_checks(red, level: str, k: int, epsilon: float, seed: int) -> list[str]:
    """Acceptance-style invariants on the given instance; returns violations."""
    bad: list[str] = []
    oracle = BruteOracle(red)
    pts = oracle.points
    n = oracle.size

    sol = kcenter_refined(red, k, epsilon, seed)
    if brute_cost(pts, sol.centers, "kcenter") > sol.cost_estimate * (1 + 1e-12):
        bad.append("k-center cost exceeds its certified bound r_S")
    solm = kmeans_constant(red, k, epsilon, 2, seed)
    if brute_cost(pts, solm.centers, "kmeans") > solm.cost_estimate * (1 + 1e-12) + 1e-12:
        bad.append("k-means cost exceeds its certified bound r_S")
    if level != "full-brute":
        return bad

    rng = np.random.default_rng(seed)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    from .boxes import Box

    for i in range(25):
        a = lo + rng.random(red.dim) * span
        b = lo + rng.random(red.dim) * span
        box = Box(tuple(np.minimum(a, b)), tuple(np.maximum(a, b)))
        want = int(box.mask_of(pts).sum())
        if count_rect(red, box) != want:
            bad.append(f"count_rect mismatch on random box {i}")
        got = sorted(report_rect(red, box))
        if got != sorted(map(tuple, pts[box.mask_of(pts)].tolist())):
            bad.append(f"report_rect mismatch on random box {i}")
        rep = repr_rect(red, box)
        if (rep is None) != (want == 0) or (rep is not None and not box.contains_point(rep)):
            bad.append(f"repr_rect mismatch on random box {i}")

    tree = RbbdTree(red, 0.25, np.random.default_rng(seed + 1), instrument=True)
    tracker = twin_track(oracle, tree.trace)
    for i in range(12):
        x = lo + rng.random(red.dim) * span
        r = float(rng.random()) * float(span.max())
        canon = tree.canonical_nodes(x, r)
        covered = np.zeros(n, dtype=bool)
        for u in canon:
            covered |= u.region.mask_of(pts)
        tracker.replay(tree.trace)
        active = tracker.mask
        sq = np.sum((pts - x) ** 2, axis=1)
        if np.any(active & (sq <= r * r) & ~covered):
            bad.append(f"ball {i}: active point within r left uncovered")
        rr = (1 + tree.epsilon) * r
        if np.any(covered & active & (sq > rr * rr)):
            bad.append(f"ball {i}: covered active point beyond (1+eps)r")
        tree.inactive(x, r)
        tracker.replay(tree.trace)
        for u in tree.active_nodes():
            if u.count != tracker.count_in_region(u.region):
                bad.append(f"ball {i}: node count diverged from twin tracker")
                break
    if sorted(tree.report()) != sorted(tracker.active_tuples()):
        bad.append("report() diverged from twin tracker")

    if 2 <= n <= 64:
        support = sorted(set(map(tuple, pts.tolist())))
        if len(support) >= 2:
            fresh = RbbdTree(red, 0.25, np.random.default_rng(seed + 2))
            draws = fresh.sample(400 * len(support))
            _, ok = chi_square_uniformity(draws, support)
            if not ok:
                bad.append("tree sampling failed chi-square uniformity")
    return bad


def cmd_verify(args) -> int:
    _, red = _load(args)
    n = count_join(red)
    if args.level == "off":
        _emit({"spec": "1", "command": "verify", "level": "off", "join_size": n}, args.output)
        return 0
    if n > FULL_BRUTE_CAP:
        sys.stderr.write(
            f"verify: join has {n} results; levels beyond 'off' are capped at {FULL_BRUTE_CAP}\n"
        )
        return 2
    violations = _verify_checks(red, args.level, args.k, args.epsilon, args.seed)
    payload = {
        "spec": "1",
        "command": "verify",
        "level": args.level,
        "join_size": n,
        "seed": args.seed,
        "violations": violations,
    }
    _emit(payload, args.output)
    if violations:
        sys.stderr.write("verify: FAILED\n" + "\n".join(f"  - {v}" for v in violations) + "\n")
        return 3
    return 0


def _bench_instance(rows: int):
    from .relational import build_instance

    rng = np.random.default_rng(12345)
    a = np.arange(rows, dtype=np.float64) % (rows // 2)
    r1 = np.column_stack([rng.random(rows) * 100, a])
    r2 = np.column_stack([a, rng.random(rows) * 100])
    inst = build_instance({"R1": (["A", "B"], r1), "R2": (["B", "C"], r2)}, [("R1", "R2")])
    return semi_join_reduce(inst)


def _median_time(fn, repeats: int = 3) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def cmd_bench(args) -> int:
    from .boxes import Box

    results = {}
    for rows in (args.rows, 2 * args.rows):
        red = _bench_instance(rows)
        box = Box((0.0, 0.0, 0.0), (75.0, float(rows), 75.0))
        t_count = _median_time(lambda: count_rect(red, box))
        tree = RbbdTree(red, 0.3, np.random.default_rng(7))
        center = (50.0, rows / 4.0, 50.0)

        def one_inactive():
            tok = tree.snapshot()
            tree.inactive(center, 30.0)
            tree.restore(tok)

        t_inactive = _median_time(one_inactive)
        results[str(rows)] = {"count_rect_s": t_count, "inactive_s": t_inactive}
    lo, hi = str(args.rows), str(2 * args.rows)
    payload = {
        "spec": "1",
        "command": "bench",
        "rows": args.rows,
        "timings": results,
        "count_ratio": results[hi]["count_rect_s"] / max(results[lo]["count_rect_s"], 1e-9),
        "inactive_ratio": results[hi]["inactive_s"] / max(results[lo]["inactive_s"], 1e-9),
    }
    _emit(payload, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relcluster",
        description="Clustering and diversity selection over acyclic join queries",
    )
    p.add_argument("--version", action="version", version=f"relcluster {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="instance config JSON")
        sp.add_argument("--output", help="also write the JSON payload to this file")

    sp = sub.add_parser("ingest", help="validate, reduce, and report the join size")
    common(sp)
    sp.set_defaults(fn=cmd_ingest)

    sp = sub.add_parser("cluster", help="run a clustering objective")
    common(sp)
    sp.add_argument(
        "--objective",
        required=True,
        choices=["kcenter", "kcenter-refined", "kmeans", "kmedian"],
    )
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--epsilon", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_cluster)

    sp = sub.add_parser("query", help="box oracles over the join")
    common(sp)
    sp.add_argument("--kind", required=True, choices=["count", "sample", "report", "repr"])
    sp.add_argument("--box", help='box literal, e.g. "A:0..4,B:1..2" (closed intervals)')
    sp.add_argument("--samples", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_query)

    sp = sub.add_parser("diversity", help="diverse k-subset selection")
    common(sp)
    sp.add_argument("--objective", required=True, choices=["rre", "rrt", "rrc", "rrp", "rrm"])
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--epsilon", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_diversity)

    sp = sub.add_parser("verify", help="run correctness checks on the instance")
    common(sp)
    sp.add_argument("--level", choices=["off", "sandwich", "full-brute"], default="full-brute")
    sp.add_argument("-k", type=int, default=2)
    sp.add_argument("--epsilon", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("bench", help="linear-scaling smoke timings (rows vs 2x rows)")
    common(sp, config=False)
    sp.add_argument("--rows", type=int, default=10_000)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "epsilon", None) is not None and not 0 < args.epsilon < 1:
        sys.stderr.write(f"error: epsilon must be in (0,1), got {args.epsilon}\n")
        return 2
    try:
        return args.fn(args)
    except RelClusterError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
