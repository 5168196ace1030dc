"""JSON wire formats.

Point        {"x": [...], "y": [...], "z": number}
Line         {"xt": [...], "yt": [...]}
Measure      {"dim": n, "atoms": [{"x": [...], "y": [...], "z": v, "w": v}]}
Plan         {"p": v, "cost_p": v, "distance": v, "plan": [{"i": a, "j": b, "m": v}]}
Plane map    [{"from": [... 2n floats], "to": [... 2n floats]}]

Measures are serialized in canonical atom order, so dump -> load -> dump is a
byte-stable round trip.  Readers reject non-finite numbers and nonpositive weights.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .geometry import HeisenbergPoint, VerticalLine
from .measures import DiscreteMeasure, make_measure

__all__ = [
    "dumps",
    "point_to_obj",
    "point_from_obj",
    "line_to_obj",
    "line_from_obj",
    "measure_to_obj",
    "measure_from_obj",
    "transport_result_to_obj",
    "plane_map_pairs_to_obj",
    "plane_map_pairs_from_obj",
    "load_measure",
    "load_line",
]


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, no whitespace variation."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _float_list(values, name: str) -> list[float]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ValueError(f"{name} must be a non-empty list of numbers")
    out = []
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"{name} contains a non-finite entry")
        out.append(v)
    return out


def point_to_obj(pt: HeisenbergPoint) -> dict:
    return {"x": pt.x.tolist(), "y": pt.y.tolist(), "z": pt.z}


def point_from_obj(obj: dict) -> HeisenbergPoint:
    if not isinstance(obj, dict):
        raise ValueError("point JSON must be an object")
    x = _float_list(obj.get("x"), "x")
    y = _float_list(obj.get("y"), "y")
    z = float(obj.get("z", math.nan))
    if not math.isfinite(z):
        raise ValueError("z must be a finite number")
    return HeisenbergPoint(x, y, z)


def line_to_obj(line: VerticalLine) -> dict:
    return {"xt": line.x_tilde.tolist(), "yt": line.y_tilde.tolist()}


def line_from_obj(obj: dict) -> VerticalLine:
    if not isinstance(obj, dict):
        raise ValueError("line JSON must be an object")
    return VerticalLine(_float_list(obj.get("xt"), "xt"), _float_list(obj.get("yt"), "yt"))


def measure_to_obj(mu: DiscreteMeasure) -> dict:
    atoms = [
        {"x": mu.xs[i].tolist(), "y": mu.ys[i].tolist(), "z": float(mu.zs[i]), "w": float(mu.ws[i])}
        for i in range(mu.num_atoms)
    ]
    return {"dim": mu.dim, "atoms": atoms}


def measure_from_obj(obj: dict) -> DiscreteMeasure:
    if not isinstance(obj, dict):
        raise ValueError("measure JSON must be an object")
    dim = obj.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim!r}")
    raw_atoms = obj.get("atoms")
    if not isinstance(raw_atoms, list) or not raw_atoms:
        raise ValueError("atoms must be a non-empty list")
    pairs = []
    for entry in raw_atoms:
        if not isinstance(entry, dict):
            raise ValueError("each atom must be an object")
        pt = point_from_obj({"x": entry.get("x"), "y": entry.get("y"), "z": entry.get("z")})
        if pt.dim != dim:
            raise ValueError(f"atom dimension {pt.dim} does not match dim={dim}")
        w = float(entry.get("w", math.nan))
        if not math.isfinite(w) or w <= 0.0:
            raise ValueError(f"atom weight must be positive and finite, got {w!r}")
        pairs.append((pt, w))
    return make_measure(pairs)


def transport_result_to_obj(result) -> dict:
    mass = result.coupling.mass
    plan = [
        {"i": int(i), "j": int(j), "m": float(mass[i, j])}
        for i, j in np.argwhere(mass > 0.0)
    ]
    return {
        "p": result.p,
        "cost_p": result.cost_p,
        "distance": result.distance,
        "plan": plan,
    }


def plane_map_pairs_to_obj(pairs) -> list:
    return [
        {"from": np.asarray(src, dtype=float).tolist(), "to": np.asarray(dst, dtype=float).tolist()}
        for src, dst in pairs
    ]


def plane_map_pairs_from_obj(obj) -> list[tuple[np.ndarray, np.ndarray]]:
    if not isinstance(obj, list) or not obj:
        raise ValueError("plane map JSON must be a non-empty list")
    pairs = []
    for entry in obj:
        if not isinstance(entry, dict):
            raise ValueError("each plane map entry must be an object")
        src = np.array(_float_list(entry.get("from"), "from"))
        dst = np.array(_float_list(entry.get("to"), "to"))
        if src.size != dst.size or src.size % 2 != 0:
            raise ValueError("plane map entries must pair vectors of equal even length")
        pairs.append((src, dst))
    return pairs


def load_measure(path: str) -> DiscreteMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return measure_from_obj(json.load(fh))


def load_line(path: str) -> VerticalLine:
    with open(path, "r", encoding="utf-8") as fh:
        return line_from_obj(json.load(fh))
