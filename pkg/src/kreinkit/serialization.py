"""JSON wire formats for matrices, spaces, groups, representations, functions.

Complex matrices travel as ``{"rows": m, "cols": n, "data": [[re, im], ...]}``
with the data flattened in row-major order.
"""

from __future__ import annotations

import numpy as np

from .fixpoint import GroupRep
from .groups import FiniteGroup
from .qpd import GroupFunction
from .spaces import IndefiniteSpace

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "space_to_json",
    "space_from_json",
    "group_to_json",
    "group_from_json",
    "rep_to_json",
    "rep_from_json",
    "group_function_to_json",
    "group_function_from_json",
]


def matrix_to_json(m) -> dict:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    rows, cols = arr.shape
    flat = arr.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise ValueError(
            f"matrix JSON claims {rows}x{cols} but carries {len(data)} entries"
        )
    out = np.empty(rows * cols, dtype=complex)
    for i, entry in enumerate(data):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ValueError("matrix JSON entries must be [re, im] pairs")
        out[i] = complex(float(entry[0]), float(entry[1]))
    return out.reshape(rows, cols)


def space_to_json(space: IndefiniteSpace) -> dict:
    return {"n_minus": space.n_minus, "n_plus": space.n_plus}


def space_from_json(obj) -> IndefiniteSpace:
    try:
        return IndefiniteSpace(int(obj["n_minus"]), int(obj["n_plus"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed space JSON: {exc}") from exc


def group_to_json(group: FiniteGroup) -> dict:
    return {
        "order": group.order,
        "elements": list(group.elements),
        "table": group.table.tolist(),
        "identity": group.identity,
    }


def group_from_json(obj) -> FiniteGroup:
    try:
        elements = obj["elements"]
        table = obj["table"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed group JSON: {exc}") from exc
    if "order" in obj and int(obj["order"]) != len(elements):
        raise ValueError("group JSON order disagrees with the element list")
    group = FiniteGroup.from_table(elements, table)
    if "identity" in obj and int(obj["identity"]) != group.identity:
        raise ValueError("group JSON identity index disagrees with the table")
    return group


def rep_to_json(rep: GroupRep) -> dict:
    return {
        "space": space_to_json(rep.space),
        "matrices": [matrix_to_json(m) for m in rep.matrices],
    }


def rep_from_json(group: FiniteGroup, obj) -> GroupRep:
    try:
        space = space_from_json(obj["space"])
        mats = [matrix_from_json(m) for m in obj["matrices"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed representation JSON: {exc}") from exc
    if len(mats) != group.order:
        raise ValueError(
            f"representation carries {len(mats)} matrices for a group of order {group.order}"
        )
    return GroupRep(group, space, np.array(mats))


def group_function_to_json(phi: GroupFunction) -> dict:
    return {
        "values": [[float(z.real), float(z.imag)] for z in phi.values],
    }


def group_function_from_json(group: FiniteGroup, obj) -> GroupFunction:
    try:
        values = obj["values"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed group-function JSON: {exc}") from exc
    vals = np.array(
        [complex(float(v[0]), float(v[1])) for v in values], dtype=complex
    )
    return GroupFunction(group, vals)
