"""Shared fixtures and instance families for the test-suite."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from leafselect import GenConfig, generate, select_leaves, validate
from leafselect.oracle import check_counting, verify_selection
from leafselect.tree import MarkedTree, PlaneTree

P_VALUES = (Fraction(1, 2), Fraction(3, 4), Fraction(9, 10))
SHAPES = ("random", "caterpillar", "balanced", "longspine")

# An instance on which one 5-component runs out of budget even at p = 9/10.
ADVERSARIAL = GenConfig(4096, 2048, seed=27, shape="caterpillar", marking="clustered",
                        burst=512, nh_growth=1000)


def double_star(nh: dict[int, list[int]] | None = None) -> MarkedTree:
    """F1: internal nodes u=0, v=1; leaves a=2, b=3 on u and c=4, d=5 on v."""
    tree = PlaneTree.from_rotations([[2, 3, 1], [0, 4, 5], [0], [0], [1], [1]])
    nh = nh or {x: [x] for x in (2, 3, 4, 5)}
    return MarkedTree.from_neighborhoods(tree, nh)


F1_A, F1_B, F1_C, F1_D, F1_U, F1_V = 2, 3, 4, 5, 0, 1


def caterpillar(k: int = 7, unmarked: tuple[int, ...] = (), nh=None,
                flipped: tuple[int, ...] = ()) -> MarkedTree:
    """Path v1..vk (ids 0..k-1); v1 and vk carry two leaves, the others one each.

    Spine leaves hang on the same side unless their path index is in
    ``flipped``.  Leaf ids: v1 -> k, k+1; v_i -> k+i; vk -> 2k, 2k+1.
    With k = 7 this is the F2 fixture.
    """
    rot = {0: [k, k + 1, 1], k - 1: [k - 2, 2 * k, 2 * k + 1]}
    for i in range(1, k - 1):
        leaf = k + i + 1
        rot[i] = [i - 1, i + 1, leaf] if (i + 1) in flipped else [i - 1, leaf, i + 1]
        rot[leaf] = [i]
    for x in (k, k + 1):
        rot[x] = [0]
    for x in (2 * k, 2 * k + 1):
        rot[x] = [k - 1]
    tree = PlaneTree.from_rotations([rot[v] for v in range(2 * k + 2)])
    marked = [x for x in range(k, 2 * k + 2) if x not in unmarked]
    nh = nh or {x: [x] for x in marked}
    return MarkedTree.from_neighborhoods(tree, nh)


def spine_leaf(i: int, k: int = 7) -> int:
    """Leaf id of path node v_i (2 <= i <= k-1) in ``caterpillar(k)``."""
    return k + i


# ---------------------------------------------------------------------------
# soak family
# ---------------------------------------------------------------------------

# instances per leaf count; small trees are cheap, so they get most of the budget
SOAK_COUNTS = {
    2 ** 4: 2500, 2 ** 5: 2000, 2 ** 6: 1600, 2 ** 7: 1200, 2 ** 8: 900, 2 ** 9: 650,
    2 ** 10: 450, 2 ** 11: 300, 2 ** 12: 200, 2 ** 13: 110, 2 ** 14: 55, 2 ** 15: 25,
    2 ** 16: 9,
}
M_RATIOS = (Fraction(1, 20), Fraction(3, 10), Fraction(7, 10), Fraction(1))
GROWTHS = (1, 2, 3, 5, 8)


def soak_configs() -> list[GenConfig]:
    """10,000 configurations: the size schedule above, plus the adversarial one."""
    cfgs = []
    i = 0
    for n, count in SOAK_COUNTS.items():
        for _ in range(count):
            ratio = M_RATIOS[i % 4]
            m = max(1, min(n, int(ratio * n)))
            shape = SHAPES[(i // 4) % 4]
            clustered = (i // 16) % 3 == 2
            burst = min(m, 1 + (i % 7)) if clustered else 1
            cfgs.append(GenConfig(n, m, seed=i, shape=shape,
                                  marking="clustered" if clustered else "uniform",
                                  burst=burst, nh_growth=GROWTHS[(i // 3) % 5]))
            i += 1
    cfgs.append(ADVERSARIAL)
    return cfgs


@dataclass
class SoakResult:
    instances: int = 0
    runs: int = 0
    invalid: list = field(default_factory=list)
    yield_failures: list = field(default_factory=list)
    verify_failures: list = field(default_factory=list)
    counting_failures: list = field(default_factory=list)
    counting_checked: int = 0
    outcomes: dict = field(default_factory=lambda: {"completed": 0, "delimiterHit": 0,
                                                    "exhausted": 0})
    kinds: dict = field(default_factory=lambda: {"L": 0, "five": 0})
    sizes: set = field(default_factory=set)
    ratios: set = field(default_factory=set)


def run_soak(cfgs) -> SoakResult:
    res = SoakResult()
    for cfg in cfgs:
        mt = generate(cfg)
        res.instances += 1
        res.sizes.add(cfg.n)
        res.ratios.add(Fraction(cfg.m, cfg.n))
        report = validate(mt)
        if not report.ok:
            res.invalid.append((cfg, report.summary()))
            continue
        counted = False
        for p in P_VALUES:
            sel = select_leaves(mt, p, validate=False)
            res.runs += 1
            if not 10 * len(sel.leaves) >= p * mt.m:
                res.yield_failures.append((cfg, p, len(sel.leaves)))
            if not verify_selection(mt, sel.leaves).ok:
                res.verify_failures.append((cfg, p))
            for key, value in sel.outcome_counts().items():
                res.outcomes[key] += value
            if not sel.fallback and not counted:
                counted = True
                res.counting_checked += 1
                res.kinds["L"] += sel.n_l
                res.kinds["five"] += sel.n_five
                if not check_counting(sel.n_l, sel.n_ungrouped):
                    res.counting_failures.append((cfg, sel.n_l, sel.n_ungrouped))
    return res


def random_pigeonhole(rng: np.random.Generator):
    """Random (counts, m, x) triple with at least m containers."""
    m = int(rng.integers(1, 40))
    k = m + int(rng.integers(0, 40))
    r = int(rng.integers(0, 400))
    if rng.random() < 0.5:
        counts = rng.multinomial(r, np.ones(k) / k)
    else:
        weights = rng.pareto(1.0, size=k) + 1e-9
        counts = rng.multinomial(r, weights / weights.sum())
    x = int(rng.integers(0, r + 1))
    return tuple(int(c) for c in counts), m, x
