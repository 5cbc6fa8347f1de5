"""DOT and SVG drawings of a marked tree, its labels and components.

Node classes get distinct shapes: L-nodes as boxes, C-nodes as circles,
J-nodes as filled squares, marked leaves as double circles.
Components become shaded clusters, and the neighbourhoods of selected
leaves are filled.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from . import kernels
from .selector import build_pipeline
from .tree import DegenerateTreeError, MarkedTree

_LABEL_CLASS = {kernels.L_NODE: "L", kernels.C_NODE: "C", kernels.J_NODE: "J"}

_DOT_STYLE = {
    "L": 'shape=box',
    "C": 'shape=circle',
    "J": 'shape=square,style=filled,fillcolor=black,fontcolor=white',
    "unlabeled": 'shape=point,width=0.08',
    "marked": 'shape=doublecircle',
    "unmarked": 'shape=circle,width=0.15,fixedsize=true,label=""',
}


def node_classes(mt: MarkedTree):
    """Class name per node plus component index per node (-1 for none).

    Degenerate trees (nothing to label) get leaf classes only.
    """
    t = mt.tree
    classes = ["unlabeled"] * t.n_nodes
    comp = np.full(t.n_nodes, -1, np.int64)
    kinds: list[str] = []
    try:
        pl = build_pipeline(mt)
    except DegenerateTreeError:
        pl = None
    if pl is not None:
        for v in np.flatnonzero(pl.label):
            classes[v] = _LABEL_CLASS[int(pl.label[v])]
        comp = pl.component_of
        kinds = ["L" if k == kernels.KIND_L else "five" for k in pl.kind]
    for v in t.leaves:
        classes[v] = "marked" if mt.is_marked[v] else "unmarked"
    return classes, comp, kinds


def _highlighted(mt: MarkedTree, selected: Iterable[int]) -> dict[int, int]:
    owner = {}
    for leaf in sorted(int(x) for x in selected):
        for x in mt.neighborhood(leaf):
            owner.setdefault(int(x), leaf)
    return owner


def to_dot(mt: MarkedTree, selected: Iterable[int] = ()) -> str:
    selected = sorted(int(x) for x in selected)
    t = mt.tree
    classes, comp, kinds = node_classes(mt)
    owner = _highlighted(mt, selected)
    chosen = set(selected)

    def node_line(v: int) -> str:
        attrs = [_DOT_STYLE[classes[v]]]
        if v in owner and classes[v] != "J":
            attrs.append("style=filled,fillcolor=gold")
        if v in chosen:
            attrs.append("penwidth=3,color=red")
        return f'  n{v} [{",".join(attrs)},xlabel="{v}"];'

    lines = ["graph marked_tree {", "  graph [overlap=false,splines=true];",
             "  node [fontsize=10];"]
    placed = set()
    for k, kind in enumerate(kinds):
        members = np.flatnonzero(comp == k)
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="{kind} {k}"; style=filled; fillcolor=gray90;')
        for v in members:
            lines.append("  " + node_line(int(v)))
            placed.add(int(v))
        lines.append("  }")
    for v in range(t.n_nodes):
        if v not in placed:
            lines.append(node_line(v))
    for a, b in t.edges():
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def radial_layout(mt: MarkedTree, radius: int = 400) -> dict[int, tuple[int, int]]:
    """Integer coordinates: leaves on a circle in rotation order, inner nodes inside.

    The tree is rooted at node 0; children are visited counterclockwise after
    the parent edge, so the drawing keeps the embedding.
    """
    t = mt.tree
    n = t.n_leaves

    def children(v: int, parent: int) -> list[int]:
        rot = list(t.rotation(v))
        if parent < 0:
            return rot
        a = rot.index(parent)
        return rot[a + 1:] + rot[:a]

    parent = {0: -1}
    depth = {0: 0}
    kids: dict[int, list[int]] = {}
    preorder = []
    stack = [0]
    while stack:
        v = stack.pop()
        preorder.append(v)
        kids[v] = children(v, parent[v])
        for w in reversed(kids[v]):
            parent[w] = v
            depth[w] = depth[v] + 1
            stack.append(w)
    span: dict[int, tuple[float, float]] = {}
    rank = 0
    for v in preorder:
        if t.deg[v] == 1:
            ang = 2 * math.pi * rank / n
            span[v] = (ang, ang)
            rank += 1
    for v in reversed(preorder):
        if v not in span:
            span[v] = (span[kids[v][0]][0], span[kids[v][-1]][1])
    max_depth = max(depth.values())
    pos = {}
    for v in range(t.n_nodes):
        lo, hi = span[v]
        ang = (lo + hi) / 2
        r = radius if t.deg[v] == 1 else radius * depth[v] / (max_depth + 1)
        pos[v] = (int(round(r * math.cos(ang))), int(round(-r * math.sin(ang))))
    return pos


def to_svg(mt: MarkedTree, selected: Iterable[int] = (), radius: int = 400) -> str:
    selected = sorted(int(x) for x in selected)
    t = mt.tree
    classes, comp, kinds = node_classes(mt)
    owner = _highlighted(mt, selected)
    pos = radial_layout(mt, radius)
    pad = 30
    size = 2 * (radius + pad)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="{-radius - pad} {-radius - pad} {size} {size}">']
    palette = ["#dde8f6", "#f6e3dd", "#e0f2dc", "#efe0f4", "#f7f1d5", "#dcf1f1"]
    for a, b in t.edges():
        (x1, y1), (x2, y2) = pos[a], pos[b]
        ka, kb = int(comp[a]), int(comp[b])
        colour = "#888888" if ka < 0 or ka != kb else "#3060a0"
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" stroke-width="1"/>')
    for v in range(t.n_nodes):
        x, y = pos[v]
        cls = classes[v]
        k = int(comp[v])
        fill = "gold" if v in owner else (palette[k % len(palette)] if k >= 0 else "white")
        stroke = "red" if v in selected else "black"
        width = 3 if v in selected else 1
        if cls == "L":
            out.append(f'<rect x="{x - 5}" y="{y - 5}" width="10" height="10" fill="{fill}" '
                       f'stroke="{stroke}" stroke-width="{width}"/>')
        elif cls == "J":
            out.append(f'<rect x="{x - 5}" y="{y - 5}" width="10" height="10" fill="black" '
                       f'stroke="{stroke}" stroke-width="{width}"/>')
        elif cls == "C":
            out.append(f'<circle cx="{x}" cy="{y}" r="5" fill="{fill}" stroke="{stroke}" '
                       f'stroke-width="{width}"/>')
        elif cls == "marked":
            out.append(f'<circle cx="{x}" cy="{y}" r="6" fill="{fill}" stroke="{stroke}" '
                       f'stroke-width="{width}"/>')
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="none" stroke="{stroke}"/>')
        elif cls == "unmarked":
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{fill}" stroke="#666666"/>')
        else:
            out.append(f'<circle cx="{x}" cy="{y}" r="2" fill="{"gold" if v in owner else "#444444"}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
