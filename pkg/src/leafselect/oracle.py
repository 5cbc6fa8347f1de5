"""Ground truth: selection verifier, exact optimum, and checks of the combinatorial bounds.

Nothing here is used by the selector.  The optimum is an exhaustive search
(branch and bound on bitmasks), so it is capped at ``ORACLE_LIMIT`` marked
leaves.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .selector import Pipeline
from .tree import MarkedTree

ORACLE_LIMIT = 24


class OracleLimitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    overlaps: list[tuple[int, int, int]] = field(default_factory=list)
    bridging_edges: list[tuple[tuple[int, int], int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.overlaps and not self.bridging_edges

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "overlaps": [list(o) for o in self.overlaps],
            "bridgingEdges": [[list(e), a, b] for e, a, b in self.bridging_edges],
        }


def verify_selection(mt: MarkedTree, leaves: Iterable[int]) -> VerificationReport:
    """Pairwise overlaps (one witness per pair) and every bridging tree edge."""
    leaves = sorted({int(x) for x in leaves})
    idx = mt.marked_index
    for leaf in leaves:
        if not 0 <= leaf < idx.shape[0] or idx[leaf] < 0:
            raise ValueError(f"{leaf} is not a marked leaf")
    sel = np.array([idx[x] for x in leaves], dtype=np.int64)
    t = mt.tree
    shared, bridges = kernels.count_conflicts(t.nbrs, t.deg, mt.nh_ptr, mt.nh_nodes, sel)
    report = VerificationReport()
    if shared == 0 and bridges == 0:
        return report
    owners: dict[int, list[int]] = {}
    for leaf in leaves:
        for x in mt.neighborhood(leaf):
            owners.setdefault(int(x), []).append(leaf)
    witness: dict[tuple[int, int], int] = {}
    for x in sorted(owners):
        own = owners[x]
        for i, a in enumerate(own):
            for b in own[i + 1:]:
                witness.setdefault((a, b), x)
    report.overlaps = [(a, b, w) for (a, b), w in sorted(witness.items())]
    bridging = set()
    for u, own_u in owners.items():
        for v in t.rotation(u):
            if v <= u or v not in owners:
                continue
            for a in own_u:
                for b in owners[v]:
                    if a != b:
                        bridging.add(((u, v), a, b))
    report.bridging_edges = sorted(bridging)
    return report


# ---------------------------------------------------------------------------
# exact optimum
# ---------------------------------------------------------------------------

def conflict_masks(mt: MarkedTree, bridge_free: bool = True) -> tuple[list[int], list[int]]:
    """Marked leaves in id order and a bitmask of conflicting leaves for each."""
    leaves = sorted(int(x) for x in mt.marked)
    t = mt.tree
    sets = [set(int(x) for x in mt.neighborhood(l)) for l in leaves]
    if bridge_free:
        reach = [s | {w for x in s for w in t.rotation(x)} for s in sets]
    else:
        reach = sets
    masks = [0] * len(leaves)
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            if not sets[i].isdisjoint(reach[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return leaves, masks


def _max_independent(masks: list[int]) -> int:
    """Largest independent set as a bitmask; ties go to the lexicographically first."""
    best = [0, 0]

    def grow(chosen: int, size: int, cand: int) -> None:
        if cand == 0:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + bin(cand).count("1") <= best[0]:
            return
        v = (cand & -cand).bit_length() - 1
        bit = 1 << v
        grow(chosen | bit, size + 1, cand & ~bit & ~masks[v])
        grow(chosen, size, cand & ~bit)

    grow(0, 0, (1 << len(masks)) - 1)
    return best[1]


def max_disjoint_set(mt: MarkedTree, bridge_free: bool = True) -> tuple[int, frozenset[int]]:
    """Exact maximum set of marked leaves with disjoint (and bridge-free) neighbourhoods."""
    if mt.m > ORACLE_LIMIT:
        raise OracleLimitError(f"exhaustive search is limited to m <= {ORACLE_LIMIT}, got {mt.m}")
    leaves, masks = conflict_masks(mt, bridge_free)
    chosen = _max_independent(masks)
    witness = frozenset(leaves[i] for i in range(len(leaves)) if chosen >> i & 1)
    return len(witness), witness


@dataclass(frozen=True)
class OracleReport:
    optimum: int
    witness: frozenset[int]
    disjoint_optimum: int
    floor: int

    @property
    def meets_floor(self) -> bool:
        return self.optimum >= self.floor


def oracle_report(mt: MarkedTree) -> OracleReport:
    size, witness = max_disjoint_set(mt, bridge_free=True)
    loose, _ = max_disjoint_set(mt, bridge_free=False)
    return OracleReport(size, witness, loose, existence_floor(mt.m))


def existence_floor(m: int) -> int:
    return -(-m // 10)


# ---------------------------------------------------------------------------
# bound checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PigeonholeInstance:
    """Unmarked leaves spread over containers: ``counts[i]`` items in container i."""

    counts: tuple[int, ...]
    m: int
    x: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if len(self.counts) < self.m:
            raise ValueError("need at least m containers")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative container load")
        if not 0 <= self.x <= self.r:
            raise ValueError("x must lie in [0, r]")

    @property
    def r(self) -> int:
        return sum(self.counts)

    @property
    def c(self) -> int:
        return -(-self.r // self.m)

    @property
    def k_x(self) -> int:
        return sum(1 for c in self.counts if c > self.x)

    @property
    def bound(self) -> Fraction:
        return Fraction(self.c * self.m, self.x + 1)


def check_pigeonhole(inst: PigeonholeInstance) -> bool:
    """Containers loaded above ``x`` number at most ``c*m/(x+1)``."""
    return inst.k_x <= inst.bound


def tight_pigeonhole(m: int, x: int, j: int = 1) -> PigeonholeInstance:
    """Instance meeting the bound with equality: ``m*j`` containers of load ``x+1``."""
    return PigeonholeInstance((x + 1,) * (m * j), m, x)


def check_counting(n_l: int, n_ungrouped: int) -> bool:
    """Eight times the L-components cover the ungrouped C-nodes."""
    return 8 * n_l >= n_ungrouped


@dataclass(frozen=True)
class ConfinedNeighborhood:
    leaf: int
    component: int
    kind: str
    size: int
    delta: int
    strict: bool

    @property
    def guarded_bound(self) -> int:
        return max(1, (4 if self.kind == "L" else 10) * self.delta)

    @property
    def literal_bound(self) -> int:
        return (4 if self.kind == "L" else 10) * self.delta


@dataclass
class SizeBoundReport:
    confined: list[ConfinedNeighborhood] = field(default_factory=list)

    @property
    def violations(self) -> list[ConfinedNeighborhood]:
        return [c for c in self.confined if c.size > c.guarded_bound]

    @property
    def literal_violations(self) -> list[ConfinedNeighborhood]:
        return [c for c in self.confined if c.size > c.literal_bound]

    @property
    def ok(self) -> bool:
        return not self.violations


def _forbidden_nodes(pl: Pipeline, k: int) -> tuple[int, ...]:
    if pl.kind[k] == kernels.KIND_L:
        return (int(pl.core[k]),)
    return int(pl.core[k]), int(pl.far[k])


def confined_neighborhoods(mt: MarkedTree, pl: Pipeline) -> list[ConfinedNeighborhood]:
    """Every marked neighbourhood lying inside the members of one component.

    ``strict`` additionally excludes the L-node / extreme C-nodes.
    """
    comp = pl.component_of
    deltas = pl.deltas
    out = []
    for i in range(mt.m):
        leaf = int(mt.marked[i])
        k = int(comp[leaf])
        if k < 0:
            continue
        nh = mt.nh_nodes[mt.nh_ptr[i]: mt.nh_ptr[i + 1]]
        if not np.all(comp[nh] == k):
            continue
        strict = not np.isin(_forbidden_nodes(pl, k), nh).any()
        kind = "L" if pl.kind[k] == kernels.KIND_L else "five"
        out.append(ConfinedNeighborhood(leaf, k, kind, int(nh.shape[0]), int(deltas[k]), strict))
    return out


def check_size_bounds_report(mt: MarkedTree, pl: Pipeline) -> SizeBoundReport:
    return SizeBoundReport(confined_neighborhoods(mt, pl))


def check_size_bounds(mt: MarkedTree, pl: Pipeline) -> bool:
    """Confined neighbourhoods have at most max(1, 4δ) (L) or max(1, 10δ) (five) nodes."""
    return check_size_bounds_report(mt, pl).ok


def check_existence_per_component(mt: MarkedTree, pl: Pipeline) -> bool:
    """Each component owns a marked leaf whose neighbourhood stays inside it
    and avoids its L-node and extreme C-nodes."""
    good = np.zeros(pl.n_components, dtype=bool)
    for c in confined_neighborhoods(mt, pl):
        if c.strict:
            good[c.component] = True
    return bool(good.all())


def yield_ok(n_selected: int, m: int, p: Fraction) -> bool:
    return 10 * n_selected >= Fraction(p) * m


def side_runs_consecutive(mt: MarkedTree, pl: Pipeline) -> bool:
    """Leaves hanging on one side of a spine are consecutive in the marked order."""
    m = mt.m
    for s in range(pl.spine_ptr.shape[0] - 1):
        nodes = pl.spine_nodes[pl.spine_ptr[s]: pl.spine_ptr[s + 1]]
        for want in (0, 1):
            pos = sorted(int(pl.mpos[pl.lab_leaf[c, 0]]) for c in nodes if pl.side[c] == want)
            if len(pos) <= 1:
                continue
            gaps = sum(1 for a, b in zip(pos, pos[1:] + [pos[0] + m]) if b - a != 1)
            if gaps > 1:
                return False
    return True
