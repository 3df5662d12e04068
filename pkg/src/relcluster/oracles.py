"""Linear-time counting / sampling / reporting / representative oracles over
join results restricted to a box, and their box-with-hole variants.

Every oracle makes one O(total rows) pass: filter each relation's rows by the
box (only clustering attributes constrain anything), run the bottom-up count
pass, then answer from the per-row weights.  Sampling draws independent
root-to-leaf walks weighted by the exact subtree counts, so it is uniform
with replacement over the surviving join results.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Optional, Sequence

import numpy as np

from .boxes import Box, Region
from .errors import BoxArityError, EmptyRangeError
from .relational import DatabaseInstance


def _box_masks(instance: DatabaseInstance, box: Optional[Box]) -> list[np.ndarray]:
    if box is not None and box.dim != instance.dim:
        raise BoxArityError(
            f"box has {box.dim} dimensions, clustering attributes have {instance.dim}"
        )
    cattrs = instance.clustering_attrs
    masks = []
    for rel in instance.relations:
        mask = np.ones(rel.nrows, dtype=bool)
        if box is not None:
            for pos, a in enumerate(rel.attrs):
                if a in cattrs:
                    i = cattrs.index(a)
                    col = rel.data[:, pos]
                    mask &= (col >= box.lo[i]) if box.lo_closed[i] else (col > box.lo[i])
                    mask &= (col <= box.hi[i]) if box.hi_closed[i] else (col < box.hi[i])
        masks.append(mask)
    return masks


def filter_by_box(instance: DatabaseInstance, box: Box) -> DatabaseInstance:
    """Sub-instance containing exactly the rows whose clustering-attribute
    values fall inside the box; its join equals q(D) restricted to the box."""
    return instance.with_rows(_box_masks(instance, box))


class _BoxStats:
    """Weights bundle for one (instance, box) restriction, reused by oracles."""

    def __init__(self, instance: DatabaseInstance, box: Optional[Box]):
        self.instance = instance
        self.masks = _box_masks(instance, box)
        self.weights, self.total = instance.subtree_weights(self.masks)

    def representative(self) -> Optional[tuple[float, ...]]:
        """First-by-traversal-order member of the restricted join."""
        if self.total == 0:
            return None
        inst = self.instance
        order = inst.join_tree.order
        cattrs = inst.clustering_attrs
        coords = [0.0] * len(cattrs)
        chosen: dict[str, int] = {}
        for name in order:
            idx = inst._rel_index[name]
            w = self.weights[name]
            parent = inst.join_tree.parent[name]
            if parent is None:
                j = next(j for j, wj in enumerate(w) if wj)
            else:
                pcols, ccols = inst.edge_cols(name)
                pidx = inst._rel_index[parent]
                pkey = inst.row_keys(pidx, pcols)[chosen[parent]]
                ckeys = inst.row_keys(idx, ccols)
                j = next(j for j, wj in enumerate(w) if wj and ckeys[j] == pkey)
            chosen[name] = j
            row = inst.relations[idx].data[j]
            for pos, a in enumerate(inst.relations[idx].attrs):
                if a in cattrs:
                    coords[cattrs.index(a)] = float(row[pos])
        return tuple(coords)

    def sample(self, z: int, rng: np.random.Generator) -> list[tuple[float, ...]]:
        """z independent uniform draws with replacement from the restricted join."""
        if z == 0:
            return []
        if self.total == 0:
            raise EmptyRangeError("cannot sample from an empty range")
        inst = self.instance
        order = inst.join_tree.order
        cattrs = inst.clustering_attrs

        # root rows: cumulative weights over surviving rows
        root = order[0]
        ridx = inst._rel_index[root]
        rrows = [j for j, wj in enumerate(self.weights[root]) if wj]
        rcum = np.cumsum([float(self.weights[root][j]) for j in rrows])
        u = rng.random(z) * rcum[-1]
        hit = np.minimum(np.searchsorted(rcum, u, side="right"), len(rrows) - 1)
        picks = {root: np.array(rrows, dtype=np.intp)[hit]}

        # per child: key -> (row indices, cumulative weights); draws grouped later
        for name in order[1:]:
            idx = inst._rel_index[name]
            pcols, ccols = inst.edge_cols(name)
            parent = inst.join_tree.parent[name]
            pidx = inst._rel_index[parent]
            ckeys = inst.row_keys(idx, ccols)
            groups: dict[tuple, tuple[list[int], list[float]]] = {}
            for j, wj in enumerate(self.weights[name]):
                if wj:
                    rows_, cums_ = groups.setdefault(ckeys[j], ([], []))
                    rows_.append(j)
                    cums_.append((cums_[-1] if cums_ else 0.0) + float(wj))
            pkeys = inst.row_keys(pidx, pcols)
            parent_rows = picks[parent]
            u = rng.random(z)
            sel = np.empty(z, dtype=np.intp)
            for t in range(z):
                rows_, cums_ = groups[pkeys[parent_rows[t]]]
                if len(rows_) == 1:
                    sel[t] = rows_[0]
                else:
                    sel[t] = rows_[min(bisect_right(cums_, u[t] * cums_[-1]), len(rows_) - 1)]
            picks[name] = sel

        out = np.zeros((z, len(cattrs)), dtype=np.float64)
        for name in order:
            rel = inst.relation(name)
            sel = picks[name]
            for pos, a in enumerate(rel.attrs):
                if a in cattrs:
                    out[:, cattrs.index(a)] = rel.data[sel, pos]
        return [tuple(row) for row in out.tolist()]


def count_rect(instance: DatabaseInstance, box: Optional[Box]) -> int:
    """Exact |q(D) ∩ box|."""
    return _BoxStats(instance, box).total


def repr_rect(instance: DatabaseInstance, box: Optional[Box]) -> Optional[tuple[float, ...]]:
    """Some member of q(D) ∩ box, or None when empty; deterministic."""
    return _BoxStats(instance, box).representative()


def report_rect(instance: DatabaseInstance, box: Optional[Box]) -> list[tuple[float, ...]]:
    """All of q(D) ∩ box (a bag under projection)."""
    from .relational import enumerate_join

    masks = _box_masks(instance, box)
    return enumerate_join(instance.with_rows(masks))


def sample_rect(
    instance: DatabaseInstance,
    box: Optional[Box],
    z: int,
    seed: int | np.random.Generator = 0,
) -> list[tuple[float, ...]]:
    """z uniform-with-replacement draws from q(D) ∩ box; deterministic per seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _BoxStats(instance, box).sample(z, rng)


# -- box-with-hole variants ----------------------------------------------


def region_count(instance: DatabaseInstance, region: Region) -> int:
    return sum(_BoxStats(instance, b).total for b in region.pieces())


def region_count_and_repr(
    instance: DatabaseInstance, region: Region
) -> tuple[int, Optional[tuple[float, ...]]]:
    """One pass per decomposition piece; repr comes from the first non-empty piece."""
    total = 0
    rep = None
    for b in region.pieces():
        st = _BoxStats(instance, b)
        total += st.total
        if rep is None and st.total:
            rep = st.representative()
    return total, rep


def region_repr(instance: DatabaseInstance, region: Region) -> Optional[tuple[float, ...]]:
    return region_count_and_repr(instance, region)[1]


def region_report(instance: DatabaseInstance, region: Region) -> list[tuple[float, ...]]:
    out: list[tuple[float, ...]] = []
    for b in region.pieces():
        out.extend(report_rect(instance, b))
    return out


def region_sample(
    instance: DatabaseInstance,
    region: Region,
    z: int,
    seed: int | np.random.Generator = 0,
) -> list[tuple[float, ...]]:
    """Uniform sampling from a box-with-hole region.

    Each draw first selects a decomposition piece with probability
    C_i / sum(C), then samples uniformly inside it, which composes to exact
    uniformity over the region.  Piece draws are batched; results are
    returned in draw order.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if z == 0:
        return []
    stats = [_BoxStats(instance, b) for b in region.pieces()]
    counts = np.array([float(s.total) for s in stats])
    total = counts.sum()
    if total == 0:
        raise EmptyRangeError("cannot sample from an empty region")
    cum = np.cumsum(counts)
    choice = np.minimum(np.searchsorted(cum, rng.random(z) * total, side="right"), len(stats) - 1)
    out: list[Optional[tuple[float, ...]]] = [None] * z
    for i, st in enumerate(stats):
        idxs = np.nonzero(choice == i)[0]
        if len(idxs) == 0:
            continue
        draws = st.sample(len(idxs), rng)
        for t, drawn in zip(idxs, draws):
            out[t] = drawn
    return out  # type: ignore[return-value]


def region_query(kind: str, instance: DatabaseInstance, region: Region, **kwargs):
    """Dispatch by kind: count | sample | report | repr."""
    if kind == "count":
        return region_count(instance, region)
    if kind == "repr":
        return region_repr(instance, region)
    if kind == "report":
        return region_report(instance, region)
    if kind == "sample":
        return region_sample(instance, region, **kwargs)
    raise ValueError(f"unknown region query kind {kind!r}")
