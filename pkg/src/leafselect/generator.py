"""Seeded generators of valid marked trees.

All randomness is drawn up front from numpy generators seeded with
``[seed, 0]`` (tree shape) and ``[seed, 1]`` (marking and neighbourhoods);
the kernels only consume the drawn arrays, so the compiled and the pure
Python paths build identical instances.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .tree import MarkedTree, PlaneTree

log = logging.getLogger(__name__)

SHAPES = ("random", "caterpillar", "balanced", "longspine")
MARKINGS = ("uniform", "clustered")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    """Generator parameters.

    ``burst`` is the run length of consecutive marked leaves for clustered
    marking; ``nh_growth`` is the mean neighbourhood size in nodes
    (1 gives singleton neighbourhoods).
    """

    n: int
    m: int
    seed: int = 0
    shape: str = "random"
    marking: str = "uniform"
    burst: int = 1
    nh_growth: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"need at least 2 leaves, got n={self.n}")
        if not 1 <= self.m <= self.n:
            raise ConfigError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown shape {self.shape!r}")
        if self.marking not in MARKINGS:
            raise ConfigError(f"unknown marking {self.marking!r}")
        if not 1 <= self.burst <= self.m:
            raise ConfigError(f"need 1 <= burst <= m, got burst={self.burst}")
        if self.nh_growth < 1:
            raise ConfigError("nh_growth must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def _star_or_edge(n: int):
    N = 2 * n - 2
    nbrs = np.full((N, 3), -1, np.int64)
    deg = np.zeros(N, np.int64)
    ea = np.empty(max(N - 1, 1), np.int64)
    eb = np.empty(max(N - 1, 1), np.int64)
    if n == 2:
        nbrs[0, 0], nbrs[1, 0] = 1, 0
        deg[:2] = 1
        ea[0], eb[0] = 0, 1
        return nbrs, deg, ea, eb, 1, 2
    nbrs[0] = (1, 2, 3)
    deg[0] = 3
    for leaf in (1, 2, 3):
        nbrs[leaf, 0] = 0
        deg[leaf] = 1
        ea[leaf - 1], eb[leaf - 1] = 0, leaf
    return nbrs, deg, ea, eb, 3, 4


def gen_tree(cfg: GenConfig) -> PlaneTree:
    """A proper plane binary tree with exactly ``cfg.n`` leaves."""
    n = cfg.n
    rng = np.random.default_rng([cfg.seed, 0])
    if cfg.shape == "balanced" or n <= 3:
        if n == 2 or cfg.shape != "balanced":
            nbrs, deg, *_ = _star_or_edge(n)
        else:
            nbrs, deg = kernels.balanced(n)
        return PlaneTree(nbrs, deg)
    if cfg.shape == "random":
        nbrs, deg, ea, eb, ne, nxt = _star_or_edge(n)
        extra = n - 3
        lo = 0
    else:
        k = n - 2 if cfg.shape == "caterpillar" else max(2, -(-n // 4))
        sides = np.zeros(k, np.int64)
        if cfg.shape == "longspine":
            sides = (rng.random(k) < 0.5).astype(np.int64)
        nbrs, deg, ea, eb, ne, nxt = kernels.caterpillar(n, k, sides)
        extra = n - (k + 2)
        # keep the spine path intact: only pendant edges get subdivided
        lo = k - 1
    u_edge = rng.random(extra)
    u_flip = rng.random(extra)
    kernels.subdivide_edges(nbrs, deg, ea, eb, ne, nxt, lo, u_edge, u_flip)
    return PlaneTree(nbrs, deg)


def _clustered_positions(n: int, m: int, burst: int, rng) -> np.ndarray:
    runs = -(-m // burst)
    r = n - m
    cuts = np.sort(rng.integers(0, r + 1, size=runs - 1))
    gaps = np.diff(np.concatenate(([0], cuts, [r])))
    offset = int(rng.integers(0, n))
    pos = []
    p = offset
    left = m
    for g in gaps:
        take = min(burst, left)
        pos.extend((p + i) % n for i in range(take))
        left -= take
        p += take + int(g)
    return np.sort(np.asarray(pos, np.int64))


def mark_and_grow(t: PlaneTree, cfg: GenConfig) -> MarkedTree:
    """Mark ``cfg.m`` leaves and grow one proper neighbourhood per marked leaf.

    Cyclically consecutive neighbourhoods come out disjoint (including the
    wrap-around pair); other pairs may overlap.
    """
    n, m = cfg.n, cfg.m
    if t.n_leaves != n:
        raise ConfigError(f"tree has {t.n_leaves} leaves, config says {n}")
    rng = np.random.default_rng([cfg.seed, 1])
    order, _ = kernels.face_walk(t.nbrs, t.deg)
    if cfg.marking == "uniform":
        pos = np.sort(rng.choice(n, size=m, replace=False))
    else:
        pos = _clustered_positions(n, m, cfg.burst, rng)
    morder = order[pos].astype(np.int64)
    g = cfg.nh_growth
    if g == 1:
        targets = np.ones(m, np.int64)
    else:
        targets = rng.integers(1, 2 * g, size=m).astype(np.int64)
    rand = rng.random(int(targets.sum()) + m + 16)
    nh_ptr, nh_nodes = kernels.grow_neighborhoods(t.nbrs, t.deg, morder, targets, rand)
    mt = MarkedTree(t, morder, nh_ptr, nh_nodes)
    if not _neighborhoods_ok(mt):
        log.warning("neighbourhood growth broke an invariant; using singleton neighbourhoods")
        return singleton_neighborhoods(mt)
    return mt


def _neighborhoods_ok(mt: MarkedTree) -> bool:
    if mt.m == 0:
        return True
    cyc = np.arange(mt.m, dtype=np.int64)
    has_leaf, connected, deg2, overlap = kernels.check_neighborhoods(
        mt.tree.nbrs, mt.tree.deg, mt.marked, mt.nh_ptr, mt.nh_nodes, cyc)
    return bool(has_leaf.all() and connected.all() and (deg2 < 0).all() and (overlap < 0).all())


def singleton_neighborhoods(mt: MarkedTree) -> MarkedTree:
    """Same tree and marking, every neighbourhood reduced to its own leaf."""
    return MarkedTree(mt.tree, mt.marked.copy(), np.arange(mt.m + 1, dtype=np.int64),
                      mt.marked.copy())


def generate(cfg: GenConfig) -> MarkedTree:
    return mark_and_grow(gen_tree(cfg), cfg)
