"""Instance and selection files (compact, deterministic JSON)."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .selector import Selection
from .tree import MarkedTree, PlaneTree

FORMAT_VERSION = 1


class FormatError(ValueError):
    """The file is not a well-formed instance or selection document."""


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file next to ``path``, then rename it over."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def instance_to_dict(mt: MarkedTree) -> dict:
    t = mt.tree
    nodes = [{"id": v, "nbrs": [int(x) for x in t.nbrs[v, : t.deg[v]]]} for v in range(t.n_nodes)]
    marked = sorted(int(x) for x in mt.marked)
    nh = {str(l): sorted(int(x) for x in mt.neighborhood(l)) for l in marked}
    return {"version": FORMAT_VERSION, "nodes": nodes, "marked": marked, "neighborhoods": nh}


def instance_to_json(mt: MarkedTree) -> str:
    return dumps(instance_to_dict(mt))


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{what} must be an integer, got {x!r}")
    return x


def _int_list(x, what: str) -> list[int]:
    if not isinstance(x, list):
        raise FormatError(f"{what} must be a list")
    return [_int(v, what) for v in x]


def instance_from_dict(doc) -> MarkedTree:
    if not isinstance(doc, dict):
        raise FormatError("instance must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version {doc.get('version')!r}")
    for key in ("nodes", "marked", "neighborhoods"):
        if key not in doc:
            raise FormatError(f"missing key {key!r}")
    nodes = doc["nodes"]
    if not isinstance(nodes, list) or not nodes:
        raise FormatError("'nodes' must be a non-empty list")
    rotations: list[list[int] | None] = [None] * len(nodes)
    for entry in nodes:
        if not isinstance(entry, dict) or "id" not in entry or "nbrs" not in entry:
            raise FormatError("each node needs 'id' and 'nbrs'")
        v = _int(entry["id"], "node id")
        if not 0 <= v < len(nodes) or rotations[v] is not None:
            raise FormatError(f"node ids must be unique and dense in [0, {len(nodes)}), got {v}")
        rotations[v] = _int_list(entry["nbrs"], "neighbor id")
    tree = PlaneTree.from_rotations(rotations)
    marked = _int_list(doc["marked"], "marked leaf")
    if len(set(marked)) != len(marked):
        raise FormatError("duplicate marked leaf")
    nh_doc = doc["neighborhoods"]
    if not isinstance(nh_doc, dict):
        raise FormatError("'neighborhoods' must be an object")
    neighborhoods = {}
    for key, value in nh_doc.items():
        try:
            leaf = int(key)
        except ValueError:
            raise FormatError(f"neighborhood key {key!r} is not an integer") from None
        if str(leaf) != key:
            raise FormatError(f"neighborhood key {key!r} is not canonical")
        neighborhoods[leaf] = _int_list(value, "neighborhood node")
    if set(neighborhoods) != set(marked):
        raise FormatError("neighborhood keys must be exactly the marked leaves")
    return MarkedTree.from_neighborhoods(tree, neighborhoods)


def instance_from_json(text: str) -> MarkedTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def read_instance(path: str | os.PathLike) -> MarkedTree:
    return instance_from_json(Path(path).read_text(encoding="utf-8"))


def write_instance(path: str | os.PathLike, mt: MarkedTree) -> None:
    atomic_write(path, instance_to_json(mt))


def selection_to_dict(sel: Selection) -> dict:
    counts = sel.outcome_counts()
    return {
        "selected": [int(x) for x in sel.leaves],
        "steps": int(sel.total_steps),
        "components": {"L": sel.n_l, "five": sel.n_five, "ungrouped": sel.n_ungrouped},
        "outcomes": {"completed": counts["completed"], "delimiterHit": counts["delimiterHit"],
                     "exhausted": counts["exhausted"]},
    }


def stats_to_dict(mt: MarkedTree, sel: Selection) -> dict:
    b = sel.budget
    return {
        "n": mt.n,
        "m": mt.m,
        "r": mt.r,
        "p": f"{b.p.numerator}/{b.p.denominator}",
        "c": b.c,
        "z": b.z,
        "fallback": sel.fallback,
        "selected": len(sel.leaves),
        "steps": int(sel.total_steps),
        "perComponent": [
            {"kind": rec.kind, "representative": rec.representative,
             "delimiters": list(rec.delimiters), "outcome": rec.outcome.value,
             "steps": rec.steps, "hit": rec.hit, "selected": rec.selected}
            for rec in sel.per_component
        ],
    }


def selected_from_json(text: str) -> list[int]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if isinstance(doc, list):
        return _int_list(doc, "selected leaf")
    if not isinstance(doc, dict) or "selected" not in doc:
        raise FormatError("selection must be an object with a 'selected' list")
    return _int_list(doc["selected"], "selected leaf")


def read_selected(path: str | os.PathLike) -> list[int]:
    return selected_from_json(Path(path).read_text(encoding="utf-8"))
