"""DOT and SVG output."""
import re

from support import F1_A, F1_C, double_star
from leafselect import PlaneTree
from leafselect.render import node_classes, radial_layout, to_dot, to_svg
from leafselect.tree import MarkedTree


def test_double_star_dot_shapes():
    dot = to_dot(double_star())
    assert dot.count("shape=box") == 2
    assert dot.count("shape=doublecircle") == 4
    assert dot.count(" -- ") == 5


def test_worked_example_clusters(worked_example):
    dot = to_dot(worked_example)
    labels = re.findall(r'label="(L|five) \d+"', dot)
    assert labels.count("L") == 3 and labels.count("five") == 2
    assert dot.count("fillcolor=black") == 1   # the single J-node


def test_selection_is_highlighted():
    mt = double_star()
    plain = to_dot(mt)
    marked = to_dot(mt, [F1_A, F1_C])
    assert "penwidth=3" not in plain
    assert marked.count("penwidth=3") == 2
    assert marked.count("fillcolor=gold") == 2


def test_degenerate_tree_still_renders():
    t = PlaneTree.from_rotations([[1, 2, 3], [0], [0], [0]])
    mt = MarkedTree.from_neighborhoods(t, {1: [1], 2: [2]})
    classes, comp, kinds = node_classes(mt)
    assert kinds == [] and classes.count("marked") == 2
    assert "cluster" not in to_dot(mt)


def test_radial_layout_is_integer_and_leaves_on_circle(worked_example):
    pos = radial_layout(worked_example, radius=400)
    t = worked_example.tree
    for v, (x, y) in pos.items():
        assert isinstance(x, int) and isinstance(y, int)
        if t.deg[v] == 1:
            assert abs((x * x + y * y) ** 0.5 - 400) <= 1


def test_svg_is_deterministic(worked_example):
    a = to_svg(worked_example, [19, 22])
    assert a == to_svg(worked_example, [22, 19])
    assert a.count("<line") == worked_example.tree.n_nodes - 1
