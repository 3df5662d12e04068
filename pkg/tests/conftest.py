"""Shared helpers: canned instances and a random acyclic-instance generator."""

import numpy as np
import pytest

from relcluster import (
    BruteOracle,
    DatabaseInstance,
    build_instance,
    build_join_tree,
    count_join,
    semi_join_reduce,
)
from relcluster.relational import Relation


def make_instance(relations, edges, projection=None, reduce=True):
    inst = build_instance(relations, edges)
    if projection is not None:
        inst = DatabaseInstance(inst.relations, inst.join_tree, projection=projection)
    return semi_join_reduce(inst) if reduce else inst


def points_instance(points, projection=None):
    """Single-relation instance over a (n, d) coordinate array."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    attrs = [f"x{i}" for i in range(pts.shape[1])]
    return make_instance({"P": (attrs, pts)}, [], projection=projection)


@pytest.fixture
def e1():
    """Two-relation running example: R1(A,B) join R2(B,C), 3 results."""
    return make_instance(
        {
            "R1": (["A", "B"], [(1, 1), (1, 2), (3, 3)]),
            "R2": (["B", "C"], [(1, 10), (2, 10), (2, 20), (4, 30)]),
        },
        [("R1", "R2")],
    )


E1_RESULTS = [(1.0, 1.0, 10.0), (1.0, 2.0, 10.0), (1.0, 2.0, 20.0)]


def random_instance(
    rng,
    m_max=3,
    d_max=5,
    rows_max=30,
    value_range=6,
    max_join=10_000,
    min_join=1,
    projection_prob=0.25,
    decimals=None,
):
    """Random acyclic instance: random join tree, 1-2 fresh shared attributes
    per edge, private attributes up to d_max, small integer-ish values so
    joins actually match.  Retries until the join size lands in range."""
    for _ in range(200):
        m = int(rng.integers(1, m_max + 1))
        names = [f"R{i}" for i in range(m)]
        edges = [(names[int(rng.integers(0, i))], names[i]) for i in range(1, m)]
        rel_attrs = {n: [] for n in names}
        counter = 0

        def fresh():
            nonlocal counter
            counter += 1
            return f"a{counter - 1}"

        budget = d_max
        for a, b in edges:
            n_shared = int(rng.integers(1, 3)) if budget > len(edges) else 1
            n_shared = min(n_shared, budget)
            for _s in range(n_shared):
                at = fresh()
                rel_attrs[a].append(at)
                rel_attrs[b].append(at)
                budget -= 1
        for n in names:
            if not rel_attrs[n] and budget > 0:
                rel_attrs[n].append(fresh())
                budget -= 1
        while budget > 0 and rng.random() < 0.6:
            rel_attrs[names[int(rng.integers(0, m))]].append(fresh())
            budget -= 1
        if any(not v for v in rel_attrs.values()):
            continue

        rels = {}
        for n in names:
            k = int(rng.integers(1, rows_max + 1))
            vals = rng.integers(0, value_range, size=(k, len(rel_attrs[n]))).astype(float)
            if decimals is not None:
                vals += np.round(rng.random(vals.shape), decimals)
            rels[n] = (rel_attrs[n], vals)
        inst = make_instance(rels, edges)
        n_join = count_join(inst)
        if not (min_join <= n_join <= max_join):
            continue
        if rng.random() < projection_prob:
            attrs = list(inst.attr_names)
            size = int(rng.integers(1, len(attrs) + 1))
            proj = [attrs[i] for i in sorted(rng.choice(len(attrs), size=size, replace=False))]
            inst = semi_join_reduce(
                DatabaseInstance(inst.relations, inst.join_tree, projection=proj)
            )
        return inst
    raise RuntimeError("random_instance failed to produce an instance in range")


def join_pair_instance(rng, rows, key_range, value_scale=10.0):
    """Two-relation instance R1(A,B) join R2(B,C) with join size about
    rows^2 / key_range; continuous A and C coordinates."""
    b1 = rng.integers(0, key_range, rows).astype(float)
    b2 = rng.integers(0, key_range, rows).astype(float)
    r1 = np.column_stack([np.round(rng.random(rows) * value_scale, 3), b1])
    r2 = np.column_stack([b2, np.round(rng.random(rows) * value_scale, 3)])
    return make_instance({"R1": (["A", "B"], r1), "R2": (["B", "C"], r2)}, [("R1", "R2")])


def random_box(rng, oracle: BruteOracle, dim: int):
    """Random closed box roughly spanning the data, sometimes degenerate."""
    from relcluster import Box

    pts = oracle.points
    lo = pts.min(axis=0) if len(pts) else np.zeros(dim)
    hi = pts.max(axis=0) if len(pts) else np.ones(dim)
    span = np.where(hi > lo, hi - lo, 1.0)
    a = lo + rng.random(dim) * span * 1.2 - 0.1 * span
    b = lo + rng.random(dim) * span * 1.2 - 0.1 * span
    if len(pts) and rng.random() < 0.15:  # degenerate box on an actual point
        p = pts[int(rng.integers(len(pts)))]
        return Box(tuple(p), tuple(p))
    return Box(tuple(np.minimum(a, b)), tuple(np.maximum(a, b)))
