"""Schema, join-tree validation, semi-join reduction and exact join counting.

A database instance is a set of named relations over numeric attributes plus
a join tree.  All downstream oracles assume the join query is acyclic: for
every attribute, the relations containing it must induce a connected subtree
of the join tree (checked at construction, rejected otherwise).

Counting and enumeration follow the classic two-phase scheme: a bottom-up
pass computes, for every base tuple, the number of join results it roots in
its subtree; the root weights then sum to the exact join size, and top-down
walks over the same weights drive representative picking, enumeration and
uniform sampling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CyclicQueryError, NotATreeError, SchemaError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttributeId:
    """Position and name of an attribute in the global attribute list."""

    index: int
    name: str


class Relation:
    """A named relation: ordered attributes and a float64 row matrix.

    Rows are kept with set semantics; duplicates are dropped at construction
    with a warning.
    """

    def __init__(self, name: str, attrs: Sequence[str], rows: np.ndarray):
        if len(set(attrs)) != len(attrs):
            raise SchemaError(f"relation {name!r} declares duplicate attributes")
        rows = np.asarray(rows, dtype=np.float64)
        if rows.size == 0:
            rows = rows.reshape(0, len(attrs))
        if rows.ndim != 2 or rows.shape[1] != len(attrs):
            raise SchemaError(
                f"relation {name!r}: rows have width {rows.shape[1] if rows.ndim == 2 else '?'}, "
                f"expected {len(attrs)}"
            )
        if not np.all(np.isfinite(rows)):
            raise SchemaError(f"relation {name!r} contains non-finite values")
        if len(rows):
            deduped = np.unique(rows, axis=0)
            if len(deduped) < len(rows):
                logger.warning(
                    "relation %s: dropped %d duplicate rows (set semantics)",
                    name,
                    len(rows) - len(deduped),
                )
            rows = deduped
        self.name = name
        self.attrs = tuple(attrs)
        self.data = rows
        self.data.setflags(write=False)

    @property
    def nrows(self) -> int:
        return len(self.data)

    def col(self, attr: str) -> np.ndarray:
        return self.data[:, self.attrs.index(attr)]

    def __repr__(self):
        return f"Relation({self.name!r}, attrs={list(self.attrs)}, nrows={self.nrows})"


class JoinTree:
    """Tree over relations witnessing acyclicity of the join query."""

    def __init__(self, relation_names: Sequence[str], edges: Sequence[tuple[str, str]], root: str):
        self.names = tuple(relation_names)
        self.edges = tuple((a, b) for a, b in edges)
        self.root = root
        self._adj: dict[str, list[str]] = {n: [] for n in self.names}
        for a, b in self.edges:
            self._adj[a].append(b)
            self._adj[b].append(a)
        # BFS orientation from the root
        self.parent: dict[str, Optional[str]] = {root: None}
        self.order: list[str] = [root]
        seen = {root}
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self._adj[u]:
                    if v not in seen:
                        seen.add(v)
                        self.parent[v] = u
                        self.order.append(v)
                        nxt.append(v)
            frontier = nxt
        self.children: dict[str, list[str]] = {n: [] for n in self.names}
        for v, u in self.parent.items():
            if u is not None:
                self.children[u].append(v)

    def neighbors(self, name: str) -> list[str]:
        return self._adj[name]


def build_join_tree(
    relations: Sequence[Relation], edge_spec: Sequence[tuple[str, str]], root: Optional[str] = None
) -> JoinTree:
    """Validate the tree property and per-attribute connectivity.

    Raises NotATreeError when the edges do not form a single spanning tree and
    CyclicQueryError when some attribute's relations are disconnected in it
    (the signature of a cyclic query).
    """
    names = [r.name for r in relations]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate relation names")
    name_set = set(names)
    for a, b in edge_spec:
        if a not in name_set or b not in name_set:
            raise SchemaError(f"join edge ({a!r}, {b!r}) references an undeclared relation")
        if a == b:
            raise NotATreeError(f"self-loop on relation {a!r}")
    if len(edge_spec) != len(names) - 1:
        raise NotATreeError(
            f"{len(edge_spec)} edges cannot form a tree over {len(names)} relations"
        )
    tree = JoinTree(names, edge_spec, root or names[0])
    if len(tree.order) != len(names):
        raise NotATreeError("join edges do not connect all relations")
    # n-1 edges + connected => tree; still reject duplicated edges explicitly
    if len({frozenset(e) for e in edge_spec}) != len(edge_spec):
        raise NotATreeError("duplicate join edge")

    by_name = {r.name: r for r in relations}
    for attr in _global_attrs(relations):
        holders = {r.name for r in relations if attr in r.attrs}
        start = next(iter(holders))
        reach = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in tree.neighbors(u):
                if v in holders and v not in reach:
                    reach.add(v)
                    stack.append(v)
        if reach != holders:
            raise CyclicQueryError(
                f"attribute {attr!r} appears in relations {sorted(holders)} which are not "
                "connected in the join tree; the query is cyclic"
            )
    return tree


def _global_attrs(relations: Sequence[Relation]) -> list[str]:
    out: list[str] = []
    for r in relations:
        for a in r.attrs:
            if a not in out:
                out.append(a)
    return out


class DatabaseInstance:
    """Relations + validated join tree; the data source for every oracle.

    ``projection``, when set, names the clustering attributes: all geometric
    operations see join results projected onto them, with duplicates kept
    (bag semantics).  Instances are immutable after construction.
    """

    def __init__(
        self,
        relations: Sequence[Relation],
        join_tree: JoinTree,
        reduced: bool = False,
        projection: Optional[Sequence[str]] = None,
    ):
        self.relations = tuple(relations)
        self.join_tree = join_tree
        self.reduced = reduced
        names = _global_attrs(relations)
        self.attributes = tuple(AttributeId(i, n) for i, n in enumerate(names))
        self.attr_names = tuple(names)
        if projection is not None:
            projection = tuple(projection)
            if not projection:
                raise SchemaError("projection must be non-empty when given")
            unknown = [a for a in projection if a not in self.attr_names]
            if unknown:
                raise SchemaError(f"projection names unknown attributes {unknown}")
            if len(set(projection)) != len(projection):
                raise SchemaError("projection contains duplicate attributes")
        self.projection = projection
        self._rel_index = {r.name: i for i, r in enumerate(self.relations)}
        self._key_cache: dict[tuple[int, tuple[int, ...]], list[tuple]] = {}

    # -- basic accessors -------------------------------------------------

    @property
    def clustering_attrs(self) -> tuple[str, ...]:
        return self.projection if self.projection is not None else self.attr_names

    @property
    def dim(self) -> int:
        return len(self.clustering_attrs)

    def relation(self, name: str) -> Relation:
        return self.relations[self._rel_index[name]]

    def total_rows(self) -> int:
        return sum(r.nrows for r in self.relations)

    def max_relation_rows(self) -> int:
        return max((r.nrows for r in self.relations), default=0)

    def row_keys(self, rel_idx: int, cols: tuple[int, ...]) -> list[tuple]:
        """Per-row join keys of a relation, cached per column set."""
        ck = (rel_idx, cols)
        got = self._key_cache.get(ck)
        if got is None:
            data = self.relations[rel_idx].data
            got = list(zip(*(data[:, c].tolist() for c in cols))) if len(data) else []
            self._key_cache[ck] = got
        return got

    def with_rows(self, keep: Sequence[np.ndarray], reduced: bool = False) -> "DatabaseInstance":
        """New instance restricted to the given per-relation row masks."""
        rels = [
            _RestrictedRelation(r.name, r.attrs, r.data[mask])
            for r, mask in zip(self.relations, keep)
        ]
        return DatabaseInstance(rels, self.join_tree, reduced=reduced, projection=self.projection)

    # -- join machinery ---------------------------------------------------

    def edge_cols(self, child: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(parent columns, child columns) of the attributes shared on the tree edge."""
        parent = self.join_tree.parent[child]
        rp = self.relation(parent)
        rc = self.relation(child)
        shared = [a for a in rc.attrs if a in rp.attrs]
        return (
            tuple(rp.attrs.index(a) for a in shared),
            tuple(rc.attrs.index(a) for a in shared),
        )

    def subtree_weights(self, masks: Optional[Sequence[np.ndarray]] = None):
        """Bottom-up per-row join-result counts.

        Returns (weights, total) where weights[i][j] is the exact number of
        join results of the subtree rooted at relation i that use row j
        (0 for masked-out rows).  Python ints: no overflow.
        """
        if masks is None:
            masks = [np.ones(r.nrows, dtype=bool) for r in self.relations]
        order = self.join_tree.order
        weights: dict[str, list[int]] = {}
        for name in reversed(order):
            idx = self._rel_index[name]
            rel = self.relations[idx]
            mask = masks[idx]
            w = [1 if mask[j] else 0 for j in range(rel.nrows)]
            for child in self.join_tree.children[name]:
                pcols, ccols = self.edge_cols(child)
                cidx = self._rel_index[child]
                ckeys = self.row_keys(cidx, ccols)
                cw = weights[child]
                groups: dict[tuple, int] = {}
                for j, wj in enumerate(cw):
                    if wj:
                        k = ckeys[j]
                        groups[k] = groups.get(k, 0) + wj
                pkeys = self.row_keys(idx, pcols)
                for j in range(rel.nrows):
                    if w[j]:
                        w[j] *= groups.get(pkeys[j], 0)
            weights[name] = w
        total = sum(weights[order[0]])
        return weights, total

    def __repr__(self):
        return (
            f"DatabaseInstance({[r.name for r in self.relations]}, reduced={self.reduced}, "
            f"projection={list(self.projection) if self.projection else None})"
        )


class _RestrictedRelation(Relation):
    """Relation built from already-validated rows; skips dedup/validation."""

    def __init__(self, name: str, attrs: Sequence[str], rows: np.ndarray):
        self.name = name
        self.attrs = tuple(attrs)
        self.data = np.ascontiguousarray(rows, dtype=np.float64)
        self.data.setflags(write=False)


def build_instance(
    relations: dict[str, tuple[Sequence[str], Iterable[Sequence[float]]]],
    edges: Sequence[tuple[str, str]],
    projection: Optional[Sequence[str]] = None,
) -> DatabaseInstance:
    """Programmatic constructor: {name: (attrs, rows)} plus join edges."""
    rels = [Relation(name, attrs, np.array(list(rows), dtype=np.float64)) for name, (attrs, rows) in relations.items()]
    tree = build_join_tree(rels, edges)
    return DatabaseInstance(rels, tree)


def semi_join_reduce(instance: DatabaseInstance) -> DatabaseInstance:
    """Remove all dangling tuples with two semi-join passes (leaves-to-root,
    then root-to-leaves). The join result is unchanged; idempotent."""
    order = instance.join_tree.order
    masks = [np.ones(r.nrows, dtype=bool) for r in instance.relations]

    def key_set(rel_name: str, cols: tuple[int, ...]) -> set:
        idx = instance._rel_index[rel_name]
        keys = instance.row_keys(idx, cols)
        mask = masks[idx]
        return {keys[j] for j in range(len(keys)) if mask[j]}

    # leaves -> root: parent := parent semijoin child
    for name in reversed(order):
        idx = instance._rel_index[name]
        for child in instance.join_tree.children[name]:
            pcols, ccols = instance.edge_cols(child)
            live = key_set(child, ccols)
            pkeys = instance.row_keys(idx, pcols)
            m = masks[idx]
            for j in range(len(pkeys)):
                if m[j] and pkeys[j] not in live:
                    m[j] = False
    # root -> leaves: child := child semijoin parent
    for name in order:
        idx = instance._rel_index[name]
        for child in instance.join_tree.children[name]:
            pcols, ccols = instance.edge_cols(child)
            live = key_set(name, pcols)
            cidx = instance._rel_index[child]
            ckeys = instance.row_keys(cidx, ccols)
            m = masks[cidx]
            for j in range(len(ckeys)):
                if m[j] and ckeys[j] not in live:
                    m[j] = False
    return instance.with_rows(masks, reduced=True)


def count_join(instance: DatabaseInstance) -> int:
    """Exact |q(D)| by bottom-up count aggregation along the join tree."""
    _, total = instance.subtree_weights()
    return total


def enumerate_join(instance: DatabaseInstance, limit: Optional[int] = None) -> list[tuple[float, ...]]:
    """All join results as clustering-attribute coordinate tuples.

    Under a projection this is a bag: duplicates are preserved.  Stops after
    ``limit`` tuples when given.
    """
    weights, total = instance.subtree_weights()
    if total == 0 or (limit is not None and limit <= 0):
        return []
    order = instance.join_tree.order
    cattrs = instance.clustering_attrs
    # per relation: clustering columns and their positions in the output
    out_cols = []
    for name in order:
        rel = instance.relation(name)
        cols = [(rel.attrs.index(a), cattrs.index(a)) for a in rel.attrs if a in cattrs]
        out_cols.append(cols)
    # per position: parent position, parent-side keys, key -> surviving child rows
    parent_pos = [None] + [order.index(instance.join_tree.parent[n]) for n in order[1:]]
    parent_keys: list[Optional[list[tuple]]] = [None]
    child_groups: list[Optional[dict[tuple, list[int]]]] = [None]
    for name in order[1:]:
        idx = instance._rel_index[name]
        pcols, ccols = instance.edge_cols(name)
        pidx = instance._rel_index[instance.join_tree.parent[name]]
        parent_keys.append(instance.row_keys(pidx, pcols))
        keys = instance.row_keys(idx, ccols)
        w = weights[name]
        groups: dict[tuple, list[int]] = {}
        for j, wj in enumerate(w):
            if wj:
                groups.setdefault(keys[j], []).append(j)
        child_groups.append(groups)

    results: list[tuple[float, ...]] = []
    coords = [0.0] * len(cattrs)
    rows = [0] * len(order)
    datas = [instance.relation(n).data for n in order]
    root_cand = [j for j, wj in enumerate(weights[order[0]]) if wj]

    def rec(pos: int) -> bool:
        if pos == len(order):
            results.append(tuple(coords))
            return limit is not None and len(results) >= limit
        if pos == 0:
            cand = root_cand
        else:
            pkey = parent_keys[pos][rows[parent_pos[pos]]]
            cand = child_groups[pos].get(pkey, [])
        for j in cand:
            rows[pos] = j
            row = datas[pos][j]
            for src, dst in out_cols[pos]:
                coords[dst] = float(row[src])
            if rec(pos + 1):
                return True
        return False

    rec(0)
    return results
