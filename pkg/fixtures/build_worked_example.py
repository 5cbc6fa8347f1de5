"""Build fixtures/worked-example.json, the hand-made regression instance.

Shape: a J-node ``hub`` joins three arms.

* arm A: L-node ``a0`` - C-nodes ``c1..c6`` - hub.  An unlabeled node sits
  between c2 and c3 (one unmarked leaf) and another between c5 and c6
  (a cherry of two unmarked leaves).  c4's leaf hangs on the other side.
* arm B: hub - C-nodes ``d5..d1`` - L-node ``b0``.
* arm C: hub - unlabeled node (one unmarked leaf) - L-node ``e0``.

Expected structure: 3 L-components, 2 five-components, 1 ungrouped C-node
(c6), and the spine c1..c6 delimited by the L-node a0 and the J-node hub.

Run from the repository root:  python3 fixtures/build_worked_example.py
"""
from pathlib import Path

from leafselect.io import instance_to_json
from leafselect.tree import MarkedTree, PlaneTree

A0, C1, C2, C3, C4, C5, C6 = 0, 1, 2, 3, 4, 5, 6
W, W2, HUB = 7, 8, 9
D1, D2, D3, D4, D5 = 10, 11, 12, 13, 14
B0, E0, U, CHERRY = 15, 16, 17, 18


def build() -> MarkedTree:
    rot: dict[int, list[int]] = {}
    next_leaf = [19]
    marked: list[int] = []

    def leaf(parent: int, is_marked: bool = True) -> int:
        x = next_leaf[0]
        next_leaf[0] += 1
        rot[x] = [parent]
        if is_marked:
            marked.append(x)
        return x

    # rotations list (towards a0 / hub side first, then the rest counterclockwise)
    rot[A0] = [C1, leaf(A0), leaf(A0)]
    rot[C1] = [A0, leaf(C1), C2]
    rot[C2] = [C1, leaf(C2), W]
    rot[W] = [C2, leaf(W, False), C3]
    rot[C3] = [W, leaf(C3), C4]
    rot[C4] = [C3, C5, leaf(C4)]
    rot[C5] = [C4, leaf(C5), W2]
    rot[W2] = [C5, CHERRY, C6]
    rot[CHERRY] = [W2, leaf(CHERRY, False), leaf(CHERRY, False)]
    rot[C6] = [W2, leaf(C6), HUB]
    rot[HUB] = [C6, D5, U]
    rot[D5] = [HUB, leaf(D5), D4]
    rot[D4] = [D5, leaf(D4), D3]
    rot[D3] = [D4, leaf(D3), D2]
    rot[D2] = [D3, leaf(D2), D1]
    rot[D1] = [D2, leaf(D1), B0]
    rot[B0] = [D1, leaf(B0), leaf(B0)]
    rot[U] = [HUB, leaf(U, False), E0]
    rot[E0] = [U, leaf(E0), leaf(E0)]
    tree = PlaneTree.from_rotations([rot[v] for v in range(len(rot))])
    return MarkedTree.from_neighborhoods(tree, {x: [x] for x in marked})


if __name__ == "__main__":
    out = Path(__file__).with_name("worked-example.json")
    out.write_text(instance_to_json(build()), encoding="utf-8")
    print(out)
