"""Budgeted leaf selection on marked trees.

``select_leaves`` runs the whole pipeline on arrays: leaf order, contraction,
labels, spines, components, then one budgeted depth-first traversal per
component.  Every phase reports how much work it did, and the sum is the
``total_steps`` figure used to certify linear running time.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from . import kernels
from .tree import DegenerateTreeError, MarkedTree, ensure_valid


class ParameterError(ValueError):
    """Raised for a trade-off parameter outside (0, 1) or a bad leaf count."""


def parse_p(p) -> Fraction:
    """Exact trade-off parameter from a Fraction, an int pair string or a tuple.

    Floats and decimal strings are rejected so the yield bound stays exact.
    """
    if isinstance(p, bool) or isinstance(p, float):
        raise ParameterError(f"p must be an exact rational, got {p!r}")
    if isinstance(p, tuple):
        p = Fraction(*p)
    elif isinstance(p, str):
        text = p.strip()
        if "/" not in text or "." in text or "e" in text.lower():
            raise ParameterError(f"p must be written as num/den, got {p!r}")
        num, _, den = text.partition("/")
        try:
            p = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse p={text!r}") from exc
    elif not isinstance(p, (Fraction, int)):
        raise ParameterError(f"unsupported p {p!r}")
    p = Fraction(p)
    if not 0 < p < 1:
        raise ParameterError(f"p must lie strictly between 0 and 1, got {p}")
    return p


@dataclass(frozen=True)
class Budget:
    c: int
    z: int
    p: Fraction

    @property
    def l_budget(self) -> int:
        return 4 * self.z

    @property
    def five_budget(self) -> int:
        return 10 * self.z


def compute_budget(r: int, m: int, p) -> Budget:
    """``c = max(1, ceil(r/m))`` and ``z = ceil(10c/(1-p)) - 1``, exactly."""
    if m < 1:
        raise ParameterError("no marked leaves")
    if r < 0:
        raise ParameterError(f"negative unmarked-leaf count {r}")
    p = parse_p(p)
    c = max(1, -(-r // m))
    z = math.ceil(Fraction(10 * c) / (1 - p)) - 1
    return Budget(c, z, p)


class Outcome(str, enum.Enum):
    COMPLETED = "completed"
    DELIMITER_HIT = "delimiterHit"
    EXHAUSTED = "exhausted"


_OUTCOMES = {kernels.COMPLETED: Outcome.COMPLETED,
             kernels.DELIMITER_HIT: Outcome.DELIMITER_HIT,
             kernels.EXHAUSTED: Outcome.EXHAUSTED}


@dataclass(frozen=True)
class TraversalOutcome:
    kind: Outcome
    steps: int
    node: int | None = None


def budgeted_traverse(mt: MarkedTree, leaf: int, delimiters: Iterable[int], budget: int,
                      member: Callable[[int], bool] | None = None) -> TraversalOutcome:
    """Depth-first walk of ``nh(leaf)`` for at most ``budget`` first visits.

    ``member`` replaces the stored neighbourhood by an arbitrary membership
    test, for clients that only know neighbourhoods implicitly.
    """
    if budget < 1:
        raise ParameterError("budget must be at least 1")
    delims = [int(d) for d in delimiters]
    if len(delims) > 2:
        raise ValueError("at most two delimiting nodes")
    d0, d1 = (delims + [-1, -1])[:2]
    t = mt.tree
    if member is None:
        k = int(mt.marked_index[leaf])
        if k < 0:
            raise ValueError(f"{leaf} is not a marked leaf")
        lo, hi = int(mt.nh_ptr[k]), int(mt.nh_ptr[k + 1])
        nh = mt.nh_nodes
        if not kernels._member(nh, lo, hi, leaf):
            raise ValueError(f"neighborhood of {leaf} does not contain it")
        N = t.n_nodes
        out, hit, steps = kernels.traverse(
            t.nbrs, t.deg, int(leaf), nh, lo, hi, d0, d1, int(budget),
            np.full(N, -1, np.int64), 0, np.empty(N, np.int64),
            np.empty(N, np.int64), np.empty(N, np.int64))
        return TraversalOutcome(_OUTCOMES[int(out)], int(steps), int(hit) if hit >= 0 else None)
    if not member(leaf):
        raise ValueError(f"neighborhood of {leaf} does not contain it")
    return _traverse_python(t, int(leaf), member, set(delims), int(budget))


def _traverse_python(t, leaf, member, delims, budget) -> TraversalOutcome:
    steps = 1
    if leaf in delims:
        return TraversalOutcome(Outcome.DELIMITER_HIT, steps, leaf)
    seen = {leaf}
    # stack of (node, neighbour iterator in rotation order after the arrival edge)
    stack = [iter(t.rotation(leaf))]
    nodes = [leaf]
    while stack:
        w = next(stack[-1], None)
        if w is None:
            stack.pop()
            nodes.pop()
            continue
        if w in seen or not member(w):
            continue
        if steps == budget:
            return TraversalOutcome(Outcome.EXHAUSTED, steps)
        steps += 1
        seen.add(w)
        if w in delims:
            return TraversalOutcome(Outcome.DELIMITER_HIT, steps, w)
        rot = t.rotation(w)
        a = rot.index(nodes[-1])
        stack.append(iter(rot[a + 1:] + rot[:a]))
        nodes.append(w)
    return TraversalOutcome(Outcome.COMPLETED, steps)


# ---------------------------------------------------------------------------
# array pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Pipeline:
    """Array form of the labelled structure of one marked tree.

    Component rows list the L-components first (by L-node id), then the
    5-components spine by spine.  ``work`` is the preprocessing step count.
    """

    mt: MarkedTree
    order: np.ndarray
    mpos: np.ndarray
    label: np.ndarray
    lab_leaf: np.ndarray
    degenerate: bool
    spine_ptr: np.ndarray
    spine_nodes: np.ndarray
    spine_delim: np.ndarray
    side: np.ndarray
    kind: np.ndarray
    core: np.ndarray
    far: np.ndarray
    rep: np.ndarray
    delim: np.ndarray
    dleaf: np.ndarray
    cut: np.ndarray
    n_ungrouped: int
    work: int

    @property
    def n_components(self) -> int:
        return int(self.kind.shape[0])

    @property
    def n_l(self) -> int:
        return int(np.count_nonzero(self.kind == kernels.KIND_L))

    @property
    def n_five(self) -> int:
        return int(np.count_nonzero(self.kind == kernels.KIND_FIVE))

    @cached_property
    def component_of(self) -> np.ndarray:
        """Component index of every node, -1 outside all components."""
        t = self.mt.tree
        return kernels.flood_components(t.nbrs, t.deg, self.core, self.cut)

    @cached_property
    def deltas(self) -> np.ndarray:
        return kernels.component_deltas(self.order, self.mt.is_marked,
                                        self.component_of, self.n_components)

    def marked_leaves(self, k: int) -> tuple[int, ...]:
        if self.kind[k] == kernels.KIND_L:
            return tuple(int(x) for x in self.lab_leaf[self.core[k]])
        lo = self.spine_start(k)
        return tuple(int(self.lab_leaf[c, 0]) for c in self.spine_nodes[lo: lo + 5])

    def defining_nodes(self, k: int) -> tuple[int, ...]:
        if self.kind[k] == kernels.KIND_L:
            return (int(self.core[k]),)
        lo = self.spine_start(k)
        return tuple(int(c) for c in self.spine_nodes[lo: lo + 5])

    def spine_start(self, k: int) -> int:
        return int(self._spine_index[int(self.core[k])])

    @cached_property
    def _spine_index(self) -> np.ndarray:
        idx = np.full(self.label.shape[0], -1, np.int64)
        idx[self.spine_nodes] = np.arange(self.spine_nodes.shape[0])
        return idx

    def ungrouped_nodes(self) -> list[int]:
        out = []
        for s in range(self.spine_ptr.shape[0] - 1):
            lo, hi = int(self.spine_ptr[s]), int(self.spine_ptr[s + 1])
            out.extend(int(c) for c in self.spine_nodes[lo + 5 * ((hi - lo) // 5): hi])
        return out


def _marked_positions(mt: MarkedTree, order: np.ndarray) -> np.ndarray:
    mpos = np.full(mt.tree.n_nodes, -1, np.int64)
    mo = order[mt.is_marked[order]]
    mpos[mo] = np.arange(mo.shape[0])
    return mpos


def build_pipeline(mt: MarkedTree) -> Pipeline:
    """Labels, spines and components of ``mt`` on the array route.

    Raises ``DegenerateTreeError`` when the contracted tree cannot be labelled.
    """
    t = mt.tree
    order, work = kernels.face_walk(t.nbrs, t.deg)
    if mt.m < 2:
        raise DegenerateTreeError("labels need at least two marked leaves")
    mpos = _marked_positions(mt, order)
    is_marked = mt.is_marked
    _, is_tu, tu_nbr, tu_first, tu_deg, w2 = kernels.steiner_contract(t.nbrs, t.deg, is_marked)
    label, lab_leaf, _, degenerate = kernels.classify_nodes(is_tu, tu_nbr, tu_deg, is_marked)
    if degenerate:
        raise DegenerateTreeError("contracted tree has fewer than two internal nodes "
                                  "or a node next to three marked leaves")
    sp_ptr, sp_nodes, sp_delim, side, c_prev, c_next, w3 = kernels.find_spines(
        label, lab_leaf, tu_nbr, tu_first, is_marked)
    kind, core, far, rep, delim, dleaf, cut, ungrouped = kernels.build_components(
        label, lab_leaf, tu_nbr, tu_first, is_marked, mpos, sp_ptr, sp_nodes, side,
        c_prev, c_next)
    total = int(work) + int(w2) + int(w3) + int(kind.shape[0])
    return Pipeline(mt, order, mpos, label, lab_leaf, bool(degenerate), sp_ptr, sp_nodes,
                    sp_delim, side, kind, core, far, rep, delim, dleaf, cut,
                    int(ungrouped), total)


# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComponentRecord:
    kind: str
    representative: int
    delimiters: tuple[int, ...]
    outcome: Outcome
    steps: int
    hit: int | None
    selected: int | None


@dataclass(frozen=True, eq=False)
class Selection:
    """Selected leaves plus the per-component bookkeeping behind them."""

    leaves: tuple[int, ...]
    total_steps: int
    budget: Budget
    fallback: bool
    n_l: int = 0
    n_five: int = 0
    n_ungrouped: int = 0
    kind: np.ndarray | None = None
    rep: np.ndarray | None = None
    delim: np.ndarray | None = None
    outcome: np.ndarray | None = None
    hit: np.ndarray | None = None
    steps: np.ndarray | None = None
    chosen: np.ndarray | None = None
    n_marked: int = 0

    def __len__(self) -> int:
        return len(self.leaves)

    def outcome_counts(self) -> dict[str, int]:
        counts = {o.value: 0 for o in Outcome}
        if self.outcome is not None:
            for code, o in _OUTCOMES.items():
                counts[o.value] = int(np.count_nonzero(self.outcome == code))
        return counts

    @cached_property
    def per_component(self) -> list[ComponentRecord]:
        if self.kind is None:
            return []
        out = []
        for k in range(self.kind.shape[0]):
            is_l = self.kind[k] == kernels.KIND_L
            delims = tuple(int(d) for d in self.delim[k] if d >= 0)
            out.append(ComponentRecord(
                "L" if is_l else "five", int(self.rep[k]), delims,
                _OUTCOMES[int(self.outcome[k])], int(self.steps[k]),
                int(self.hit[k]) if self.hit[k] >= 0 else None,
                int(self.chosen[k]) if self.chosen[k] >= 0 else None))
        return out

    def meets_yield(self) -> bool:
        return 10 * len(self.leaves) >= self.budget.p * self.n_marked


def _fallback_leaf(mt: MarkedTree) -> tuple[int, int]:
    k, work = kernels.isolated_leaf(mt.nh_ptr, mt.nh_nodes, mt.tree.n_nodes)
    if k < 0:
        # any single leaf is trivially pairwise disjoint and bridge-free
        k = int(mt.marked_index[mt.order.marked_order[0]])
    return int(mt.marked[k]), int(work)


def select_leaves(mt: MarkedTree, p, validate: bool = True, fallback: bool = True) -> Selection:
    """Select marked leaves with pairwise disjoint, bridge-free neighbourhoods.

    With ``fallback`` (default) instances with ``m <= 10`` or an unlabelable
    contracted tree return one directly checked leaf.  Without it the full
    pipeline runs and a degenerate tree raises ``DegenerateTreeError``.
    """
    budget = compute_budget(mt.r, mt.m, p)
    if validate:
        ensure_valid(mt)
    t = mt.tree
    if fallback and mt.m <= 10:
        leaf, work = _fallback_leaf(mt)
        return Selection((leaf,), work, budget, True, n_marked=mt.m)
    try:
        pl = build_pipeline(mt)
    except DegenerateTreeError:
        if not fallback:
            raise
        leaf, work = _fallback_leaf(mt)
        return Selection((leaf,), work, budget, True, n_marked=mt.m)
    outcome, hit, steps, chosen = kernels.select_components(
        t.nbrs, t.deg, mt.marked_index, mt.nh_ptr, mt.nh_nodes, pl.kind, pl.rep,
        pl.delim, pl.dleaf, budget.z)
    leaves = tuple(sorted(int(x) for x in chosen if x >= 0))
    total = pl.work + int(steps.sum())
    return Selection(leaves, total, budget, False, pl.n_l, pl.n_five, pl.n_ungrouped,
                     pl.kind, pl.rep, pl.delim, outcome, hit, steps, chosen, n_marked=mt.m)
