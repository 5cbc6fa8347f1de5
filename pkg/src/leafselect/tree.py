"""Plane trees with marked leaves, and the structure the selector works on.

The functions in this module are the readable reference route: they build
Python objects (contracted tree, labels, spines, components) straight from
the node and component rules.  ``selector`` runs the same pipeline through the array
kernels; the test-suite checks that both routes agree.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels


class InvalidInstanceError(ValueError):
    """Raised when an operation needs a valid marked tree and gets another."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(f"invalid marked tree: {report.summary()}")


class DegenerateTreeError(ValueError):
    """The contracted tree has fewer than two internal nodes (m <= 3)."""


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlaneTree:
    """Unrooted tree with a rotation system.

    ``nbrs[v, :deg[v]]`` lists the neighbours of ``v`` counterclockwise.
    """

    nbrs: np.ndarray
    deg: np.ndarray

    @classmethod
    def from_rotations(cls, rotations: Sequence[Sequence[int]]) -> "PlaneTree":
        width = max([3] + [len(r) for r in rotations])
        nbrs = np.full((len(rotations), width), -1, dtype=np.int64)
        deg = np.zeros(len(rotations), dtype=np.int64)
        for v, rot in enumerate(rotations):
            deg[v] = len(rot)
            nbrs[v, : len(rot)] = rot
        return cls(nbrs, deg)

    @property
    def n_nodes(self) -> int:
        return int(self.deg.shape[0])

    @cached_property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.deg == 1)

    @property
    def n_leaves(self) -> int:
        return int(self.leaves.shape[0])

    def rotation(self, v: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.nbrs[v, : self.deg[v]])

    def rotations(self) -> list[tuple[int, ...]]:
        return [self.rotation(v) for v in range(self.n_nodes)]

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v in range(self.n_nodes) for w in self.rotation(v) if v < w]


@dataclass(frozen=True, eq=False)
class MarkedTree:
    """A plane tree, its marked leaves and one neighbourhood per marked leaf.

    The neighbourhood of ``marked[k]`` is ``nh_nodes[nh_ptr[k]:nh_ptr[k+1]]``
    (sorted, no duplicates).  ``marked`` itself may be in any order.
    """

    tree: PlaneTree
    marked: np.ndarray
    nh_ptr: np.ndarray
    nh_nodes: np.ndarray

    @classmethod
    def from_neighborhoods(cls, tree: PlaneTree,
                           neighborhoods: Mapping[int, Iterable[int]]) -> "MarkedTree":
        marked = np.array(sorted(int(k) for k in neighborhoods), dtype=np.int64)
        sets = [np.unique(np.asarray(list(neighborhoods[int(k)]), dtype=np.int64)) for k in marked]
        ptr = np.zeros(len(marked) + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(s) for s in sets])
        nodes = np.concatenate(sets) if sets else np.empty(0, dtype=np.int64)
        return cls(tree, marked, ptr, nodes.astype(np.int64))

    @property
    def n(self) -> int:
        return self.tree.n_leaves

    @property
    def m(self) -> int:
        return int(self.marked.shape[0])

    @property
    def r(self) -> int:
        return self.n - self.m

    @cached_property
    def marked_index(self) -> np.ndarray:
        idx = np.full(self.tree.n_nodes, -1, dtype=np.int64)
        ok = (self.marked >= 0) & (self.marked < self.tree.n_nodes)
        idx[self.marked[ok]] = np.flatnonzero(ok)
        return idx

    @cached_property
    def is_marked(self) -> np.ndarray:
        mask = np.zeros(self.tree.n_nodes, dtype=np.bool_)
        ok = (self.marked >= 0) & (self.marked < self.tree.n_nodes)
        mask[self.marked[ok]] = True
        return mask

    def neighborhood(self, leaf: int) -> np.ndarray:
        k = int(self.marked_index[leaf])
        if k < 0:
            raise KeyError(f"{leaf} is not a marked leaf")
        return self.nh_nodes[self.nh_ptr[k]: self.nh_ptr[k + 1]]

    @property
    def neighborhoods(self) -> dict[int, frozenset[int]]:
        return {int(l): frozenset(int(x) for x in self.neighborhood(int(l))) for l in self.marked}

    @cached_property
    def order(self) -> "LeafOrder":
        return leaf_order(self)

    def canonical(self) -> tuple:
        """Hashable form of the data model (used for round-trip equality)."""
        return (
            tuple(self.tree.rotations()),
            tuple(sorted(int(x) for x in self.marked)),
            tuple(sorted((l, tuple(sorted(s))) for l, s in self.neighborhoods.items())),
        )


@dataclass(frozen=True)
class LeafOrder:
    order: tuple[int, ...]
    marked_order: tuple[int, ...] = ()

    @cached_property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}

    @cached_property
    def marked_position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.marked_order)}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple[int, ...]
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "nodes": list(self.nodes), "detail": self.detail}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, *nodes: int, detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(int(x) for x in nodes), detail))

    def summary(self) -> str:
        if self.ok:
            return "ok"
        shown = "; ".join(f"{v.kind}{list(v.nodes)}" for v in self.violations[:5])
        more = len(self.violations) - 5
        return shown + (f"; ... {more} more" if more > 0 else "")

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.as_dict() for v in self.violations]}


def _validate_plane_tree(t: PlaneTree, report: ValidationReport) -> bool:
    N = t.n_nodes
    if N >= 2 and t.nbrs.ndim == 2 and t.nbrs.shape[1] >= 3 and kernels.tree_ok(t.nbrs, t.deg):
        return True
    # slow path, only taken to describe what is wrong
    if N < 2:
        report.add("too-small", detail=f"{N} node(s)")
        return False
    nbrs, deg = t.nbrs, t.deg
    for v in np.flatnonzero((deg != 1) & (deg != 3)):
        kind = "degree-2-node" if deg[v] == 2 else "bad-degree"
        report.add(kind, v, detail=f"degree {int(deg[v])}")
    width = nbrs.shape[1]
    slots = np.arange(width)[None, :] < deg[:, None]
    src = np.repeat(np.arange(N), width).reshape(N, width)[slots]
    dst = nbrs[slots]
    bad = (dst < 0) | (dst >= N)
    for v, w in zip(src[bad], dst[bad]):
        report.add("unknown-node", v, w)
    src, dst = src[~bad], dst[~bad]
    for v in src[src == dst]:
        report.add("self-loop", v)
    pairs = set(zip(src.tolist(), dst.tolist()))
    seen_dup = set()
    for v in range(N):
        rot = t.rotation(v)
        if len(set(rot)) != len(rot) and v not in seen_dup:
            seen_dup.add(v)
            report.add("duplicate-neighbor", v)
    for v, w in sorted(pairs):
        if (w, v) not in pairs:
            report.add("asymmetric-adjacency", v, w)
    if not report.ok:
        return False
    n_edges = len(pairs) // 2
    reached = np.zeros(N, dtype=bool)
    stack = [0]
    reached[0] = True
    while stack:
        v = stack.pop()
        for w in t.rotation(v):
            if not reached[w]:
                reached[w] = True
                stack.append(w)
    if not reached.all():
        report.add("disconnected", *np.flatnonzero(~reached)[:10])
    if n_edges != N - 1:
        report.add("cycle", detail=f"{n_edges} edges on {N} nodes")
    return report.ok


def validate(mt: MarkedTree) -> ValidationReport:
    """Check every plane-tree and marked-tree invariant; never raises."""
    report = ValidationReport()
    t = mt.tree
    if not _validate_plane_tree(t, report):
        return report
    N = t.n_nodes
    m = mt.m
    if m < 1:
        report.add("no-marked-leaves")
        return report
    marked = mt.marked
    if len(np.unique(marked)) != m:
        report.add("duplicate-marked")
        return report
    structural = True
    for leaf in marked:
        if leaf < 0 or leaf >= N:
            report.add("unknown-node", leaf)
            structural = False
        elif t.deg[leaf] != 1:
            report.add("marked-not-leaf", leaf)
            structural = False
    nodes = mt.nh_nodes
    if nodes.size and (nodes.min() < 0 or nodes.max() >= N):
        for k in range(m):
            s = mt.nh_nodes[mt.nh_ptr[k]: mt.nh_ptr[k + 1]]
            for x in s[(s < 0) | (s >= N)]:
                report.add("unknown-node", marked[k], x, detail="in neighborhood")
        structural = False
    if not structural:
        return report
    order = mt.order
    cyc = mt.marked_index[np.asarray(order.marked_order, dtype=np.int64)]
    has_leaf, connected, deg2, overlap = kernels.check_neighborhoods(
        t.nbrs, t.deg, marked, mt.nh_ptr, mt.nh_nodes, cyc)
    for k in range(m):
        if not has_leaf[k]:
            report.add("neighborhood-missing-leaf", marked[k])
        if not connected[k]:
            report.add("disconnected-neighborhood", marked[k])
        if deg2[k] >= 0:
            report.add("non-proper-neighborhood", marked[k], deg2[k])
    for i in np.flatnonzero(overlap >= 0):
        a = order.marked_order[i]
        b = order.marked_order[(i + 1) % m]
        report.add("consecutive-overlap", a, b, overlap[i])
    return report


def ensure_valid(mt: MarkedTree) -> None:
    report = validate(mt)
    if not report.ok:
        raise InvalidInstanceError(report)


# ---------------------------------------------------------------------------
# leaf order and intervals
# ---------------------------------------------------------------------------

def leaf_order(t: PlaneTree | MarkedTree) -> LeafOrder:
    """Counterclockwise cyclic leaf order by the canonical face walk."""
    tree = t.tree if isinstance(t, MarkedTree) else t
    order, _ = kernels.face_walk(tree.nbrs, tree.deg)
    seq = tuple(int(x) for x in order)
    if isinstance(t, MarkedTree):
        mask = t.is_marked
        return LeafOrder(seq, tuple(v for v in seq if mask[v]))
    return LeafOrder(seq)


@dataclass(frozen=True)
class IntervalPartition:
    """Unmarked leaves between each cyclically consecutive marked pair.

    ``intervals[i]`` sits between ``bounds[i]`` and the next marked leaf.
    """

    bounds: tuple[tuple[int, int], ...]
    intervals: tuple[tuple[int, ...], ...]
    tree: PlaneTree = field(repr=False, compare=False, default=None)

    def sizes(self) -> list[int]:
        return [len(iv) for iv in self.intervals]

    def interval_tree(self, i: int) -> frozenset[int]:
        """Minimal subtree containing both bounds and the interval's leaves."""
        a, b = self.bounds[i]
        return steiner_nodes(self.tree, {a, b, *self.intervals[i]})


def interval_partition(mt: MarkedTree, order: LeafOrder | None = None) -> IntervalPartition:
    order = order or mt.order
    mo = order.marked_order
    m = len(mo)
    mask = mt.is_marked
    seq = order.order
    start = order.position[mo[0]]
    n = len(seq)
    bounds, intervals = [], []
    cur: list[int] = []
    left = mo[0]
    for t in range(1, n + 1):
        v = seq[(start + t) % n]
        if mask[v]:
            bounds.append((left, v))
            intervals.append(tuple(cur))
            cur = []
            left = v
        else:
            cur.append(v)
    assert len(intervals) == m
    return IntervalPartition(tuple(bounds), tuple(intervals), mt.tree)


def steiner_nodes(t: PlaneTree, terminals: Iterable[int]) -> frozenset[int]:
    """Node set of the minimal subtree spanning ``terminals``."""
    terminals = set(int(x) for x in terminals)
    if len(terminals) <= 1:
        return frozenset(terminals)
    alive = set(range(t.n_nodes))
    d = {v: int(t.deg[v]) for v in alive}
    stack = [v for v in alive if d[v] == 1 and v not in terminals]
    while stack:
        v = stack.pop()
        alive.discard(v)
        for w in t.rotation(v):
            if w in alive:
                d[w] -= 1
                if d[w] == 1 and w not in terminals:
                    stack.append(w)
    return frozenset(alive)


# ---------------------------------------------------------------------------
# contraction and labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ContractedTree:
    """The tree T_u: smoothing of the subtree spanning the marked leaves.

    ``tree`` uses its own dense ids; ``to_original[i]`` is the node of the
    source tree.  ``path_edges[(i, j)]`` (``i < j``) is the path of original
    nodes from ``to_original[i]`` to ``to_original[j]``.
    """

    tree: PlaneTree
    to_original: tuple[int, ...]
    path_edges: dict[tuple[int, int], tuple[int, ...]]

    @cached_property
    def from_original(self) -> dict[int, int]:
        return {o: i for i, o in enumerate(self.to_original)}

    def path(self, i: int, j: int) -> tuple[int, ...]:
        if i < j:
            return self.path_edges[(i, j)]
        return tuple(reversed(self.path_edges[(j, i)]))


def contract(mt: MarkedTree) -> ContractedTree:
    if mt.m < 2:
        raise DegenerateTreeError("contraction needs at least two marked leaves")
    t = mt.tree
    keep = steiner_nodes(t, (int(x) for x in mt.marked))
    sdeg = {v: sum(1 for w in t.rotation(v) if w in keep) for v in keep}
    tu_nodes = sorted(v for v in keep if sdeg[v] != 2)
    new_id = {v: i for i, v in enumerate(tu_nodes)}
    rotations: list[list[int]] = []
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for v in tu_nodes:
        rot = []
        for y in t.rotation(v):
            if y not in keep:
                continue
            path = [v]
            prev, cur = v, y
            while sdeg[cur] == 2:
                path.append(cur)
                prev, cur = cur, next(w for w in t.rotation(cur) if w != prev and w in keep)
            path.append(cur)
            rot.append(new_id[cur])
            a, b = new_id[v], new_id[cur]
            if a < b:
                paths[(a, b)] = tuple(path)
        rotations.append(rot)
    return ContractedTree(PlaneTree.from_rotations(rotations), tuple(tu_nodes), paths)


class NodeLabel(str, enum.Enum):
    L = "L"
    C = "C"
    J = "J"
    UNLABELED = "unlabeled"


@dataclass(frozen=True)
class Labeling:
    """Labels of the original nodes; unlisted nodes are unlabeled."""

    labels: dict[int, NodeLabel]
    labeling_leaves: dict[int, tuple[int, ...]]

    def label(self, v: int) -> NodeLabel:
        return self.labels.get(int(v), NodeLabel.UNLABELED)

    def nodes(self, lab: NodeLabel) -> list[int]:
        return sorted(v for v, x in self.labels.items() if x == lab)


def classify(ct: ContractedTree) -> Labeling:
    t = ct.tree
    internal = [v for v in range(t.n_nodes) if t.deg[v] > 1]
    if len(internal) < 2:
        raise DegenerateTreeError(
            f"contracted tree has {len(internal)} internal node(s); labels need at least two")
    labels, leaves = {}, {}
    by_leaf_count = {2: NodeLabel.L, 1: NodeLabel.C, 0: NodeLabel.J}
    for v in internal:
        adj = [w for w in t.rotation(v) if t.deg[w] == 1]
        o = ct.to_original[v]
        labels[o] = by_leaf_count[len(adj)]
        if adj:
            leaves[o] = tuple(ct.to_original[w] for w in adj)
    return Labeling(labels, leaves)


# ---------------------------------------------------------------------------
# spines and components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spine:
    """C-nodes in order from ``delimiters[0]`` (the smaller-id delimiter).

    ``sides[i]`` is 0 when the leaf of ``c_nodes[i]`` follows the anchor-side
    neighbour in its rotation and 1 otherwise.
    """

    c_nodes: tuple[int, ...]
    delimiters: tuple[int, int]
    sides: tuple[int, ...]
    leaves: tuple[int, ...]
    toward_anchor: tuple[int, ...]
    toward_far: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.c_nodes)


def find_spines(lab: Labeling, ct: ContractedTree) -> list[Spine]:
    t = ct.tree
    ids = ct.from_original
    is_c = {ids[v] for v in lab.nodes(NodeLabel.C)}

    def inner(v):
        return [w for w in t.rotation(v) if t.deg[w] > 1]

    spines, done = [], set()
    for v0 in sorted(is_c):
        if v0 in done:
            continue
        run = [v0]
        ends = []
        for direction in inner(v0):
            prev, cur, part = v0, direction, []
            while cur in is_c:
                part.append(cur)
                prev, cur = cur, next(w for w in inner(cur) if w != prev)
            ends.append((part, cur))
        (left, d_left), (right, d_right) = ends
        run = list(reversed(left)) + run + right
        a, b = ct.to_original[d_left], ct.to_original[d_right]
        if a > b:
            run.reverse()
            d_left, d_right = d_right, d_left
        done.update(run)
        sides, leaves, back, fwd = [], [], [], []
        for i, c in enumerate(run):
            before = d_left if i == 0 else run[i - 1]
            after = d_right if i == len(run) - 1 else run[i + 1]
            rot = t.rotation(c)
            leaf = next(w for w in rot if t.deg[w] == 1)
            sides.append(0 if rot[(rot.index(before) + 1) % 3] == leaf else 1)
            leaves.append(ct.to_original[leaf])
            back.append(ct.path(c, before)[1])
            fwd.append(ct.path(c, after)[1])
        spines.append(Spine(
            tuple(ct.to_original[c] for c in run),
            (ct.to_original[d_left], ct.to_original[d_right]),
            tuple(sides), tuple(leaves), tuple(back), tuple(fwd)))
    spines.sort(key=lambda s: (s.delimiters, s.c_nodes))
    return spines


class ComponentKind(str, enum.Enum):
    L = "L"
    FIVE = "five"


@dataclass(frozen=True, eq=False)
class Component:
    """An L-component or a 5-component of the labelled tree.

    ``delimiter_leaves[i]`` is the marked leaf whose C-node (5-component) or
    sibling leaf (L-component) is selected when ``delimiting_nodes[i]`` is
    reached.  ``cut_edges`` separate the component from the rest of the tree.
    """

    kind: ComponentKind
    defining_nodes: tuple[int, ...]
    marked_leaves: tuple[int, ...]
    sides: tuple[int, ...]
    representative: int
    delimiting_nodes: tuple[int, ...]
    delimiter_leaves: tuple[int, ...]
    cut_edges: tuple[tuple[int, int], ...]
    tree: PlaneTree = field(repr=False)

    @property
    def extreme_nodes(self) -> tuple[int, int] | None:
        if self.kind is ComponentKind.FIVE:
            return self.defining_nodes[0], self.defining_nodes[-1]
        return None

    @property
    def defining_node(self) -> int | None:
        return self.defining_nodes[0] if self.kind is ComponentKind.L else None

    @cached_property
    def members(self) -> frozenset[int]:
        cut = {frozenset(e) for e in self.cut_edges}
        start = self.defining_nodes[0]
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.tree.rotation(v):
                if w not in seen and frozenset((v, w)) not in cut:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)


def representative_and_delimiters(K: Component, order: LeafOrder) -> tuple[int, tuple[int, ...]]:
    """Representative leaf and delimiting nodes of a component.

    L-component: the earlier of its two leaves in the marked order, and its
    L-node.  5-component: on the side holding at least three leaves, the
    middle one of the first three (anchor-side first), delimited by the
    C-nodes of the outer two.
    """
    if K.kind is ComponentKind.L:
        a, b = K.marked_leaves
        pos = order.marked_position
        return (a if pos[a] < pos[b] else b), (K.defining_nodes[0],)
    count0 = K.sides.count(0)
    want = 0 if count0 >= 3 else 1
    picked = [i for i, s in enumerate(K.sides) if s == want][:3]
    q, mid, t = picked
    return K.marked_leaves[mid], (K.defining_nodes[q], K.defining_nodes[t])


def build_components(mt: MarkedTree, lab: Labeling, spines: Sequence[Spine],
                     ct: ContractedTree | None = None
                     ) -> tuple[list[Component], list[int]]:
    ct = ct or contract(mt)
    order = mt.order
    ids = ct.from_original
    comps: list[Component] = []
    for s in lab.nodes(NodeLabel.L):
        leaves = lab.labeling_leaves[s]
        sv = ids[s]
        out = next(w for w in ct.tree.rotation(sv) if ct.tree.deg[w] > 1)
        cut = ((s, ct.path(sv, out)[1]),)
        K = Component(ComponentKind.L, (s,), tuple(leaves), (), -1, (), (), cut, mt.tree)
        rep, delims = representative_and_delimiters(K, order)
        other = leaves[1] if rep == leaves[0] else leaves[0]
        comps.append(_with_rep(K, rep, delims, (other,)))
    ungrouped: list[int] = []
    for sp in spines:
        n_groups = len(sp) // 5
        for g in range(n_groups):
            sl = slice(5 * g, 5 * g + 5)
            nodes = sp.c_nodes[sl]
            cut = ((nodes[0], sp.toward_anchor[5 * g]), (nodes[4], sp.toward_far[5 * g + 4]))
            K = Component(ComponentKind.FIVE, nodes, sp.leaves[sl], sp.sides[sl], -1, (), (),
                          cut, mt.tree)
            rep, delims = representative_and_delimiters(K, order)
            leaf_of = dict(zip(nodes, sp.leaves[sl]))
            comps.append(_with_rep(K, rep, delims, tuple(leaf_of[d] for d in delims)))
        ungrouped.extend(sp.c_nodes[5 * n_groups:])
    return comps, ungrouped


def _with_rep(K: Component, rep: int, delims, dleaves) -> Component:
    return Component(K.kind, K.defining_nodes, K.marked_leaves, K.sides, rep,
                     tuple(delims), tuple(dleaves), K.cut_edges, K.tree)


def delta_K(mt: MarkedTree, K: Component, order: LeafOrder | None = None) -> int:
    """Longest run of consecutive unmarked leaves of ``order`` lying in ``K``."""
    order = order or mt.order
    members = K.members
    mask = mt.is_marked
    seq = order.order
    n = len(seq)
    start = next(i for i, v in enumerate(seq) if mask[v])
    best = run = 0
    for t in range(1, n + 1):
        v = seq[(start + t) % n]
        if mask[v] or v not in members:
            run = 0
        else:
            run += 1
            best = max(best, run)
    return best


@dataclass(frozen=True)
class Structure:
    """Everything the reference route derives from a marked tree."""

    contracted: ContractedTree
    labeling: Labeling
    spines: list[Spine]
    components: list[Component]
    ungrouped: list[int]

    def count(self, kind: ComponentKind) -> int:
        return sum(1 for K in self.components if K.kind is kind)


def analyze(mt: MarkedTree) -> Structure:
    ct = contract(mt)
    lab = classify(ct)
    spines = find_spines(lab, ct)
    comps, ungrouped = build_components(mt, lab, spines, ct)
    return Structure(ct, lab, spines, comps, ungrouped)
