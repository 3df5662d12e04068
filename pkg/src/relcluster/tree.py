"""Lazily expanded randomized balanced-box-decomposition tree over join results.

The tree is never built upfront.  It starts as a single root node whose box
is the (normalized) bounding box of the join results, and grows only along
the paths that ball queries actually visit.  Node expansion alternates
between two rules:

* fair split: bisect the outer box through its center, orthogonal to its
  longest side;
* randomized centroid shrink: draw an eps-sample of the node's points via
  the relational sampling oracle, locate a midpoint box holding between one
  and two thirds of the sample, and carve it out (a 2-child subtree, or a
  6-node subtree when the node's hole escapes the carved box).

Every constructed node stores its region, an active flag, the number of
active join results in the region, and a representative.  Five oracles run
on the partially built tree: make-ball-inactive, approximate ball count,
global representative, report-all-active, and uniform sampling from the
active set.  All counting/sampling inside unexpanded frontier regions is
delegated to the linear-time relational oracles.

Geometry is exact: box endpoints are dyadic subdivisions of the root box
held as integer (depth, offset) pairs per dimension, so child boxes
partition their parent bit-for-bit and a fair split can never cut a node's
hole.  Coordinates closer than 2**-52 of the root side are not separable;
such nodes become unit leaves and are treated as single locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .boxes import Box, Region
from .errors import (
    DomainError,
    EmptyActiveSetError,
    EmptyJoinError,
    ExpandOnLeafError,
    InternalGeometryError,
    TokenError,
)
from .oracles import region_count_and_repr, region_report, region_sample
from .relational import DatabaseInstance, count_join, semi_join_reduce

MAX_SPLIT_DEPTH = 52  # exactness cap for float64 dyadic subdivision


def _ceil_log2(x: float) -> int:
    k = math.ceil(math.log2(x))
    if 2.0**k < x:  # guard against log2 rounding
        k += 1
    return k


class Frame:
    """Dyadic frame: anchor and power-of-two side per dimension.

    Sides are padded up to the next power of two (with a floor of 2**-20 of
    the largest side) so every midpoint split lands on an exactly
    representable boundary down to depth 52.
    """

    def __init__(self, mins: Sequence[float], maxs: Sequence[float]):
        self.anchors = tuple(float(v) for v in mins)
        exts = [float(b) - float(a) for a, b in zip(mins, maxs)]
        maxext = max(exts) if exts else 0.0
        if maxext <= 0:
            self.logsides = tuple(0 for _ in exts)  # degenerate data: unit sides
            return
        kmax = _ceil_log2(maxext)
        floor_exp = kmax - 20
        logs = []
        for e in exts:
            logs.append(max(_ceil_log2(e), floor_exp) if e > 0 else floor_exp)
        self.logsides = tuple(logs)

    @property
    def dim(self) -> int:
        return len(self.anchors)

    def boundary(self, dim: int, depth: int, off: int) -> float:
        return self.anchors[dim] + off * 2.0 ** (self.logsides[dim] - depth)


@dataclass(frozen=True)
class MidpointBox:
    """A dyadic descendant of the root box: per-dimension (depth, offset)."""

    frame: Frame
    depth: tuple[int, ...]
    off: tuple[int, ...]

    def lo(self, i: int) -> float:
        return self.frame.boundary(i, self.depth[i], self.off[i])

    def hi(self, i: int) -> float:
        return self.frame.boundary(i, self.depth[i], self.off[i] + 1)

    def hi_closed(self, i: int) -> bool:
        return self.off[i] == (1 << self.depth[i]) - 1

    def side(self, i: int) -> float:
        return 2.0 ** (self.frame.logsides[i] - self.depth[i])

    def longest_dim(self) -> int:
        sides = [self.side(i) for i in range(self.frame.dim)]
        return sides.index(max(sides))

    def can_split(self) -> bool:
        return self.depth[self.longest_dim()] < MAX_SPLIT_DEPTH

    def split(self) -> tuple["MidpointBox", "MidpointBox", int, float]:
        """Halve the longest side (ties: lowest dimension).

        Returns (lower child, upper child, split dim, boundary value); the
        children partition the box as [lo, b) and [b, hi].
        """
        i = self.longest_dim()
        d = list(self.depth)
        d[i] += 1
        o0 = list(self.off)
        o0[i] *= 2
        o1 = list(o0)
        o1[i] += 1
        c0 = MidpointBox(self.frame, tuple(d), tuple(o0))
        c1 = MidpointBox(self.frame, tuple(d), tuple(o1))
        return c0, c1, i, c1.lo(i)

    def contains_dyadic(self, other: "MidpointBox") -> bool:
        for i in range(self.frame.dim):
            dd = other.depth[i] - self.depth[i]
            if dd < 0 or (other.off[i] >> dd) != self.off[i]:
                return False
        return True

    def to_box(self) -> Box:
        d = self.frame.dim
        return Box(
            tuple(self.lo(i) for i in range(d)),
            tuple(self.hi(i) for i in range(d)),
            (True,) * d,
            tuple(self.hi_closed(i) for i in range(d)),
        )

    def mask_of(self, pts: np.ndarray) -> np.ndarray:
        return self.to_box().mask_of(pts)


def smallest_midpoint_box(
    pts: np.ndarray, must_contain: Optional[MidpointBox], within: MidpointBox
) -> MidpointBox:
    """Minimal dyadic descendant of ``within`` containing all points (and
    ``must_contain``, when given); found by descending while one child holds
    everything."""
    if len(pts) == 0 and must_contain is None:
        raise DomainError("smallest_midpoint_box needs points or a box to contain")
    cur = within
    if must_contain is not None and must_contain.depth == cur.depth:
        return cur
    while cur.can_split():
        c0, c1, dim, b = cur.split()
        col = pts[:, dim] if len(pts) else np.empty(0)
        in0 = bool(np.all(col < b)) if len(pts) else True
        in1 = bool(np.all(col >= b)) if len(pts) else True
        if must_contain is not None:
            if c0.contains_dyadic(must_contain):
                target, ok = c0, in0
            elif c1.contains_dyadic(must_contain):
                target, ok = c1, in1
            else:
                break  # must_contain equals cur at this resolution
            if not ok:
                break
            cur = target
        else:
            if in0:
                cur = c0
            elif in1:
                cur = c1
            else:
                break
        if must_contain is not None and must_contain.depth == cur.depth:
            break
    return cur


class RbbdNode:
    __slots__ = (
        "index",
        "outer",
        "hole",
        "region",
        "gen_kind",
        "tree_depth",
        "parent",
        "children",
        "active",
        "count",
        "rep",
        "base_active",
        "base_count",
        "base_rep",
        "unit_leaf",
        "point",
    )

    def __init__(self, index, outer, hole, gen_kind, tree_depth, parent, count, rep):
        self.index = index
        self.outer: MidpointBox = outer
        self.hole: Optional[MidpointBox] = hole
        self.region = Region(outer.to_box(), hole.to_box() if hole is not None else None)
        self.gen_kind = gen_kind  # expansion rule this node will use
        self.tree_depth = tree_depth
        self.parent: Optional[RbbdNode] = parent
        self.children: list[RbbdNode] = []
        self.active = count > 0
        self.count = count
        self.rep = rep
        self.base_active = self.active
        self.base_count = count
        self.base_rep = rep
        self.unit_leaf = False
        # exact location when every join result in the region coincides
        self.point: Optional[tuple[float, ...]] = rep if count == 1 else None

    def decided_point(self) -> Optional[tuple[float, ...]]:
        """Location deciding ball membership exactly, when the node is
        (effectively) a single location: unit leaf or one active point."""
        if self.unit_leaf:
            return self.point if self.point is not None else self.rep
        if self.count == 1:
            return self.rep
        return None

    def __repr__(self):
        kind = "box+hole" if self.hole is not None else "box"
        return (
            f"RbbdNode(#{self.index} d={self.tree_depth} {kind} active={self.active} "
            f"c={self.count} gen={self.gen_kind})"
        )


@dataclass(frozen=True)
class SamplePolicy:
    """Size of the random sample driving a centroid shrink.

    sample_size = max(floor, ceil(constant * eps^-2 * ln(N^exponent))) with
    N the largest relation size and exponent m+4 by default.
    """

    epsilon: float
    constant: float = 1.0
    exponent: int = 0  # filled from the instance when 0
    floor: int = 8

    def size(self, n_rows: int, n_relations: int) -> int:
        expo = self.exponent if self.exponent > 0 else n_relations + 4
        n = max(n_rows, 2)
        lam = math.ceil(self.constant * self.epsilon**-2 * expo * math.log(n))
        return max(self.floor, lam)


@dataclass
class _Spec:
    outer: MidpointBox
    hole: Optional[MidpointBox]
    children: list


@dataclass
class ShrinkPlan:
    """Outcome of a randomized centroid shrink before attaching nodes."""

    specs: list  # top-level _Spec list (empty when demoting)
    reported: Optional[MidpointBox]  # box whose balance the stop rule certified
    demote_point: Optional[tuple[float, ...]] = None
    demoted: bool = False


class RbbdTree:
    """Partially constructed decomposition tree plus its five oracles."""

    def __init__(
        self,
        instance: DatabaseInstance,
        epsilon: float,
        seed: int | np.random.Generator = 0,
        sample_policy: Optional[SamplePolicy] = None,
        instrument: bool = False,
    ):
        if not (0 < epsilon < 1):
            raise DomainError(f"epsilon must be in (0,1), got {epsilon}")
        if not instance.reduced:
            instance = semi_join_reduce(instance)
        n = count_join(instance)
        if n == 0:
            raise EmptyJoinError("cannot build a tree over an empty join")
        self.instance = instance
        self.epsilon = float(epsilon)
        # The query slack epsilon (annulus width) and the shrink-balance
        # epsilon (sample accuracy) are independent: balance only shapes the
        # tree, so a tiny query epsilon need not inflate shrink samples.
        self.policy = sample_policy or SamplePolicy(max(epsilon, 0.15))
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.nodes: list[RbbdNode] = []
        self.trace: Optional[list] = [] if instrument else None
        self._token_seq = 0

        mins, maxs = [], []
        for a in instance.clustering_attrs:
            cols = [r.col(a) for r in instance.relations if a in r.attrs and r.nrows]
            mins.append(min(float(c.min()) for c in cols))
            maxs.append(max(float(c.max()) for c in cols))
        self.frame = Frame(mins, maxs)
        d = self.frame.dim
        root_box = MidpointBox(self.frame, (0,) * d, (0,) * d)
        rep = self._region_stats(root_box, None)[1]
        self.root = self._new_node(root_box, None, "fair", 0, None, n, rep)

    # -- construction ------------------------------------------------------

    @property
    def sample_size(self) -> int:
        return self.policy.size(self.instance.max_relation_rows(), len(self.instance.relations))

    def _region_stats(self, outer: MidpointBox, hole: Optional[MidpointBox]):
        region = Region(outer.to_box(), hole.to_box() if hole is not None else None)
        return region_count_and_repr(self.instance, region)

    def _new_node(self, outer, hole, gen_kind, tree_depth, parent, count, rep) -> RbbdNode:
        node = RbbdNode(len(self.nodes), outer, hole, gen_kind, tree_depth, parent, count, rep)
        self.nodes.append(node)
        return node

    def expand(self, node: RbbdNode) -> list[RbbdNode]:
        """Construct the node's children by its generation rule."""
        if node.unit_leaf:
            raise ExpandOnLeafError(f"cannot expand unit leaf {node!r}")
        if node.children:
            raise DomainError("node already has children")
        if not node.active:
            raise DomainError("cannot expand an inactive node")
        self._expand(node)
        return node.children

    def _expand(self, node: RbbdNode) -> None:
        if node.children or node.unit_leaf:
            return
        if node.gen_kind == "fair":
            self._fair_split(node)
        else:
            self._shrink(node)

    def _demote(self, node: RbbdNode, point: Optional[tuple[float, ...]]) -> None:
        node.unit_leaf = True
        node.point = point if point is not None else node.rep

    def _attach(self, node: RbbdNode, specs: list, gen_kind: str) -> None:
        for spec in specs:
            count, rep = self._region_stats(spec.outer, spec.hole)
            child = self._new_node(
                spec.outer, spec.hole, gen_kind, node.tree_depth + 1, node, count, rep
            )
            node.children.append(child)
            if spec.children:
                self._attach(child, spec.children, gen_kind)

    def fair_split(self, node: RbbdNode) -> list[RbbdNode]:
        self._fair_split(node)
        return node.children

    def _fair_split(self, node: RbbdNode) -> None:
        outer = node.outer
        if not outer.can_split():
            self._demote(node, node.rep)
            return
        c0, c1, _, _ = outer.split()
        if node.hole is not None:
            if c0.contains_dyadic(node.hole):
                specs = [_Spec(c0, node.hole, []), _Spec(c1, None, [])]
            elif c1.contains_dyadic(node.hole):
                specs = [_Spec(c0, None, []), _Spec(c1, node.hole, [])]
            else:
                raise InternalGeometryError("fair split hyperplane intersects the hole")
        else:
            specs = [_Spec(c0, None, []), _Spec(c1, None, [])]
        self._attach(node, specs, "shrink")

    def randomized_centroid_shrink(self, node: RbbdNode) -> list[RbbdNode]:
        self._shrink(node)
        return node.children

    def _shrink(self, node: RbbdNode) -> None:
        plan = self.shrink_plan(node)
        if plan.demoted:
            self._demote(node, plan.demote_point)
            return
        self._attach(node, plan.specs, "fair")

    def shrink_plan(self, node: RbbdNode, rng: Optional[np.random.Generator] = None) -> ShrinkPlan:
        """Compute a centroid-shrink plan without attaching children.

        Draws the eps-sample from the node's region via the relational
        sampling oracle.  When the sample collapses to a single location the
        plan is recomputed from the exact point multiset of the region
        (reported once, O(N + output)), so degenerate samples cannot produce
        an unbalanced or bogus split.
        """
        rng = rng or self.rng
        lam = self.sample_size
        samples = np.asarray(
            region_sample(self.instance, node.region, lam, rng), dtype=np.float64
        )
        pts, wts = np.unique(samples, axis=0, return_counts=True)
        if len(pts) < 2:
            exact = np.asarray(region_report(self.instance, node.region), dtype=np.float64)
            pts, wts = np.unique(exact, axis=0, return_counts=True)
            if len(pts) < 2:
                point = tuple(float(v) for v in pts[0]) if len(pts) else None
                return ShrinkPlan([], None, demote_point=point, demoted=True)
        return self._shrink_from_points(node, pts, wts.astype(np.int64))

    def _shrink_from_points(self, node: RbbdNode, pts: np.ndarray, wts: np.ndarray) -> ShrinkPlan:
        total = int(wts.sum())
        limit = (2.0 / 3.0) * total
        outer, hole = node.outer, node.hole
        mask = np.ones(len(pts), dtype=bool)

        if hole is None:
            rho = outer
            while True:
                rho_p = smallest_midpoint_box(pts[mask], None, rho)
                if not rho_p.can_split():
                    if rho_p.depth == outer.depth:
                        return ShrinkPlan([], None, demote_point=node.rep, demoted=True)
                    rho_star = rho_p
                    break
                c0, c1, dim, b = rho_p.split()
                low = mask & (pts[:, dim] < b)
                w0 = int(wts[low].sum())
                w1 = int(wts[mask].sum()) - w0
                rho_hat, w_hat, keep = (c0, w0, low) if w0 >= w1 else (c1, w1, mask & ~low)
                if w_hat <= limit:
                    rho_star = rho_hat
                    break
                rho, mask = rho_hat, keep
            return ShrinkPlan(
                [_Spec(rho_star, None, []), _Spec(outer, rho_star, [])], rho_star
            )

        # box-with-hole: carve while the candidate still contains the hole;
        # on escape, build the 6-node subtree
        rho = outer
        while True:
            rho_p = smallest_midpoint_box(pts[mask], hole, rho)
            if not rho_p.can_split() or rho_p.depth == hole.depth:
                return ShrinkPlan([], None, demote_point=node.rep, demoted=True)
            c0, c1, dim, b = rho_p.split()
            if c0.contains_dyadic(hole):
                hc, far, far_mask = c0, c1, mask & (pts[:, dim] >= b)
            elif c1.contains_dyadic(hole):
                hc, far, far_mask = c1, c0, mask & (pts[:, dim] < b)
            else:
                raise InternalGeometryError("midpoint split cut the hole")
            w_far = int(wts[far_mask].sum())
            w_hc = int(wts[mask].sum()) - w_far
            if w_hc >= w_far:
                if w_hc > limit:
                    rho, mask = hc, mask & ~far_mask
                    continue
                # inner child keeps the hole; outer child's hole is the carved box
                return ShrinkPlan([_Spec(hc, hole, []), _Spec(outer, hc, [])], hc)
            # escape: majority half no longer contains the hole
            reported = far if w_far <= limit else None
            v1_children: list[_Spec] = []
            rho2, mask2 = far, far_mask
            while int(wts[mask2].sum()) > limit:
                rho2_p = smallest_midpoint_box(pts[mask2], None, rho2)
                if not rho2_p.can_split():
                    if reported is None:
                        reported = rho2_p
                    break
                d0, d1, dim2, b2 = rho2_p.split()
                low2 = mask2 & (pts[:, dim2] < b2)
                w0 = int(wts[low2].sum())
                w1 = int(wts[mask2].sum()) - w0
                rho2_hat, w2_hat, keep2 = (d0, w0, low2) if w0 >= w1 else (d1, w1, mask2 & ~low2)
                if w2_hat <= limit:
                    v1_children = [_Spec(rho2_hat, None, []), _Spec(far, rho2_hat, [])]
                    if reported is None:
                        reported = rho2_hat
                    break
                rho2, mask2 = rho2_hat, keep2
            v_spec = _Spec(
                rho_p,
                hole,
                [_Spec(hc, hole, []), _Spec(far, None, v1_children)],
            )
            return ShrinkPlan([_Spec(outer, rho_p, []), v_spec], reported)

    # -- ball queries -------------------------------------------------------

    def canonical_nodes(self, x: Sequence[float], r: float) -> list[RbbdNode]:
        """Disjoint constructed regions covering the active points of B(x, r)
        and nothing active outside B(x, (1+eps)r); expands nodes on demand."""
        if r < 0:
            raise DomainError(f"radius must be non-negative, got {r}")
        x = tuple(float(v) for v in x)
        if len(x) != self.frame.dim:
            raise DomainError("query point dimension mismatch")
        rsq = r * r
        rr = (1.0 + self.epsilon) * r
        rrsq = rr * rr
        out: list[RbbdNode] = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            if not u.active:
                continue
            p = u.decided_point()
            if p is not None:
                if _sqdist(p, x) <= rsq:
                    out.append(u)
                continue
            if u.region.min_sqdist(x) > rsq:
                continue
            if u.region.max_sqdist(x) <= rrsq:
                out.append(u)
                continue
            if not u.children:
                self._expand(u)
                if not u.children:  # expansion demoted the node to a leaf
                    p = u.decided_point()
                    if p is not None and _sqdist(p, x) <= rsq:
                        out.append(u)
                    continue
            stack.extend(reversed(u.children))
        return out

    def inactive(self, x: Sequence[float], r: float) -> None:
        """Make every active point in B(x, r) inactive (possibly some in the
        (1+eps)r annulus too), then repair ancestor counts/representatives."""
        canon = self.canonical_nodes(x, r)
        if self.trace is not None:
            self.trace.append(("inactive", tuple(x), r, [u.region for u in canon]))
        if not canon:
            return
        ancestors: dict[int, RbbdNode] = {}
        for u in canon:
            u.active = False
            v = u.parent
            while v is not None and v.index not in ancestors:
                ancestors[v.index] = v
                v = v.parent
        for v in sorted(ancestors.values(), key=lambda n: -n.tree_depth):
            live = [c for c in v.children if c.active]
            if not live:
                v.active = False
                v.count = 0
                v.rep = None
            else:
                v.count = sum(c.count for c in live)
                v.rep = live[0].rep

    def count(self, x: Sequence[float], r: float) -> int:
        """Between |B(x,r) ∩ Q'| and |B(x,(1+eps)r) ∩ Q'|; no state change."""
        return sum(u.count for u in self.canonical_nodes(x, r))

    def rep(self) -> Optional[tuple[float, ...]]:
        """Any active point, or None when the active set is empty. O(1)."""
        return self.root.rep if self.root.active else None

    def report(self) -> list[tuple[float, ...]]:
        """The exact current active set (a bag under projection)."""
        out: list[tuple[float, ...]] = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            if not u.active:
                continue
            if u.children:
                stack.extend(reversed(u.children))
            else:
                out.extend(region_report(self.instance, u.region))
        return out

    def sample(self, z: int, rng: Optional[np.random.Generator] = None) -> list[tuple[float, ...]]:
        """z uniform-with-replacement draws from the active set.

        Each draw walks root-to-frontier choosing children proportionally to
        their active counts, then delegates to the relational sampler inside
        the frontier region; frontier draws are batched.
        """
        if z == 0:
            return []
        if not self.root.active:
            raise EmptyActiveSetError("all points are inactive")
        rng = rng or self.rng
        frontier_of: list[RbbdNode] = []
        for _ in range(z):
            u = self.root
            while u.children:
                live = [c for c in u.children if c.active]
                if len(live) == 1:
                    u = live[0]
                else:
                    a, b = live
                    u = a if rng.random() * (a.count + b.count) < a.count else b
            frontier_of.append(u)
        per_node: dict[int, list[int]] = {}
        order: list[RbbdNode] = []
        for t, u in enumerate(frontier_of):
            if u.index not in per_node:
                per_node[u.index] = []
                order.append(u)
            per_node[u.index].append(t)
        out: list[Optional[tuple[float, ...]]] = [None] * z
        for u in order:
            slots = per_node[u.index]
            if u.count == 1:
                draws = [u.rep] * len(slots)
            else:
                draws = region_sample(self.instance, u.region, len(slots), rng)
            for t, drawn in zip(slots, draws):
                out[t] = drawn
        return out  # type: ignore[return-value]

    # -- snapshots -----------------------------------------------------------

    def snapshot(self):
        """Copy of the oracle-visible state (activity, counts, reps)."""
        self._token_seq += 1
        token = _Snapshot(
            id(self),
            self._token_seq,
            {u.index: (u.active, u.count, u.rep) for u in self.nodes},
        )
        if self.trace is not None:
            self.trace.append(("snapshot", token.seq))
        return token

    def restore(self, token) -> None:
        """Return to the snapshotted oracle state.

        Nodes constructed after the snapshot keep their creation-time values:
        expansion never changes oracle answers, and a fresh node's count/rep
        equal its full-join values, which are correct for any earlier state.
        """
        if not isinstance(token, _Snapshot) or token.tree_id != id(self):
            raise TokenError("snapshot token belongs to a different tree")
        for u in self.nodes:
            state = token.states.get(u.index)
            if state is None:
                u.active, u.count, u.rep = u.base_active, u.base_count, u.base_rep
            else:
                u.active, u.count, u.rep = state
        if self.trace is not None:
            self.trace.append(("restore", token.seq))

    # -- diagnostics ----------------------------------------------------------

    def active_nodes(self) -> list[RbbdNode]:
        """Constructed nodes with no inactive ancestor (themselves included)."""
        out = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            if not u.active:
                continue
            out.append(u)
            stack.extend(u.children)
        return out

    def dump(self) -> str:
        """One line per constructed node, for golden-file comparisons."""
        lines = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            kind = "hole" if u.hole is not None else "box"
            box = _fmt_box(u.outer)
            holes = f" hole={_fmt_box(u.hole)}" if u.hole is not None else ""
            lines.append(
                f"{u.tree_depth}, {kind}, outer={box}{holes}, active={int(u.active)}, "
                f"count={u.count}, genKind={u.gen_kind}"
            )
            stack.extend(reversed(u.children))
        return "\n".join(lines)


@dataclass(frozen=True)
class _Snapshot:
    tree_id: int
    seq: int
    states: dict


def _fmt_box(b: MidpointBox) -> str:
    d = b.frame.dim
    return "x".join(f"[{b.lo(i):.17g},{b.hi(i):.17g}{']' if b.hi_closed(i) else ')'}" for i in range(d))


def _sqdist(p: Sequence[float], q: Sequence[float]) -> float:
    return sum((a - b) ** 2 for a, b in zip(p, q))


def build_root(instance: DatabaseInstance, epsilon: float, seed=0, **kwargs) -> RbbdTree:
    """Tree consisting of just the root node over the join's bounding box."""
    return RbbdTree(instance, epsilon, seed, **kwargs)
