import numpy as np
import pytest

from relcluster import (
    BruteOracle,
    DomainError,
    ForeignSampleError,
    TooLargeError,
    brute_cost,
    brute_opt,
    chi_square_uniformity,
    count_join,
    enumerate_join,
    gonzalez_cost,
)

from conftest import E1_RESULTS, random_instance


def test_materialize_matches_enumerate(e1):
    oracle = BruteOracle(e1)
    assert sorted(oracle.tuples()) == sorted(enumerate_join(e1)) == E1_RESULTS


def test_materialize_matches_enumerate_random():
    rng = np.random.default_rng(31)
    for _ in range(25):
        inst = random_instance(rng, rows_max=12, max_join=2000, min_join=0)
        oracle = BruteOracle(inst)
        assert sorted(oracle.tuples()) == sorted(enumerate_join(inst))
        assert oracle.size == count_join(inst)


def test_brute_cost_examples():
    pts = [(0.0,), (1.0,), (10.0,)]
    assert brute_cost(pts, [(0.0,), (10.0,)], "kcenter") == 1.0
    assert brute_cost(pts, pts, "kcenter") == 0.0
    assert brute_cost(pts, pts, "kmeans") == 0.0
    assert brute_cost([(0.0,), (3.0,)], [(0.0,)], "kmeans") == 9.0
    assert brute_cost([(0.0,), (3.0,)], [(0.0,)], "kmedian") == 3.0
    with pytest.raises(DomainError):
        brute_cost(pts, [], "kcenter")
    with pytest.raises(DomainError):
        brute_cost(pts, [(0.0,)], "bogus")


def test_brute_opt_examples():
    _, v = brute_opt([(0.0,), (1.0,), (10.0,)], 2, "kcenter")
    assert v == 1.0
    _, v = brute_opt([(0.0,), (0.1,), (5.0,), (5.1,)], 2, "kmeans")
    assert v == pytest.approx(0.02)
    _, v = brute_opt([(0.0,), (1.0,)], 2, "kcenter")
    assert v == 0.0
    with pytest.raises(TooLargeError):
        brute_opt(np.arange(40.0).reshape(-1, 1), 2, "kcenter")
    centers, v = brute_opt(np.arange(40.0).reshape(-1, 1), 1, "kmedian")
    assert len(centers) == 1  # k=1 scans any n


def test_brute_opt_k1_matches_direct_scan():
    rng = np.random.default_rng(33)
    pts = rng.random((30, 2))
    _, v = brute_opt(pts, 1, "kcenter")
    direct = min(brute_cost(pts, pts[i : i + 1], "kcenter") for i in range(len(pts)))
    assert v == direct


def test_gonzalez_cost_upper_bounds_opt():
    rng = np.random.default_rng(34)
    pts = np.round(rng.random((14, 2)) * 10, 2)
    for k in (1, 2, 3):
        _, opt = brute_opt(pts, k, "kcenter")
        assert gonzalez_cost(pts, k) >= opt - 1e-12


def test_chi_square():
    rng = np.random.default_rng(35)
    support = [(float(i),) for i in range(8)]
    fair = [support[i] for i in rng.integers(0, 8, 4000)]
    stat, ok = chi_square_uniformity(fair, support)
    assert ok
    stat, ok = chi_square_uniformity([support[0]] * 4000, support)
    assert not ok
    with pytest.raises(DomainError):
        chi_square_uniformity(fair, [support[0]])
    with pytest.raises(ForeignSampleError):
        chi_square_uniformity([(99.0,)], support)


def test_tracker_replay(e1):
    from relcluster import RbbdTree, twin_track

    tree = RbbdTree(e1, 0.3, seed=1, instrument=True)
    oracle = BruteOracle(e1)
    tok = tree.snapshot()
    tree.inactive((1.0, 2.0, 20.0), 0.5)
    tracker = twin_track(oracle, tree.trace)
    assert sorted(tracker.active_tuples()) == sorted(tree.report())
    tree.restore(tok)
    tracker.replay(tree.trace)
    assert sorted(tracker.active_tuples()) == E1_RESULTS
