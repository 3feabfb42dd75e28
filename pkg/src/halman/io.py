"""JSON instance format.

Rationals are written as reduced ``"p/q"`` (or ``"p"``) strings; integers
are accepted on input, binary floats are not. :func:`dumps` is canonical, so
``dumps(loads(dumps(x))) == dumps(x)`` byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import HalmanError, MalformedInput
from .geometry import Box, Instance, Interval, PointRecord, to_rational

__all__ = ["FORMAT_VERSION", "instance_to_json", "instance_from_json", "dumps", "loads", "load_instance", "save_instance"]

FORMAT_VERSION = "halman-instance/1"


def _q(x: Fraction) -> str:
    return str(x)


def instance_to_json(inst: Instance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "dimension": inst.dimension,
        "families": [
            [[[_q(s.lo), _q(s.hi)] for s in b.sides] for b in fam] for fam in inst.families
        ],
        "points": [
            {"coords": [_q(c) for c in p.coords], "multiplicity": p.multiplicity} for p in inst.points
        ],
    }


def _rat(x, where: str) -> Fraction:
    if isinstance(x, float):
        raise MalformedInput(f"{where}: binary float {x!r}; write rationals as strings")
    try:
        return to_rational(x)
    except HalmanError as exc:
        raise MalformedInput(f"{where}: {exc}") from None


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict):
        raise MalformedInput("instance must be a JSON object")
    version = obj.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise MalformedInput(f"unsupported version {version!r}")
    d = obj.get("dimension")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise MalformedInput("dimension must be a positive integer")
    fams = obj.get("families")
    if not isinstance(fams, list) or not fams:
        raise MalformedInput("families must be a nonempty array")
    families = []
    try:
        for j, fam in enumerate(fams):
            if not isinstance(fam, list) or not fam:
                raise MalformedInput(f"family {j} must be a nonempty array")
            boxes = []
            for b, box in enumerate(fam):
                if not isinstance(box, list) or len(box) != d:
                    raise MalformedInput(f"box {j}/{b} must have {d} sides")
                sides = []
                for a, side in enumerate(box):
                    if not isinstance(side, list) or len(side) != 2:
                        raise MalformedInput(f"box {j}/{b} side {a} must be [lo, hi]")
                    where = f"box {j}/{b} axis {a}"
                    sides.append(Interval(_rat(side[0], where), _rat(side[1], where)))
                boxes.append(Box(tuple(sides)))
            families.append(tuple(boxes))
        pts = obj.get("points", [])
        if not isinstance(pts, list):
            raise MalformedInput("points must be an array")
        points = []
        for i, p in enumerate(pts):
            if not isinstance(p, dict) or not isinstance(p.get("coords"), list):
                raise MalformedInput(f"point {i} must be an object with coords")
            mult = p.get("multiplicity", 1)
            if not isinstance(mult, int) or isinstance(mult, bool):
                raise MalformedInput(f"point {i}: multiplicity must be an integer")
            coords = tuple(_rat(c, f"point {i}") for c in p["coords"])
            points.append(PointRecord(coords, mult))
        return Instance(d, tuple(families), tuple(points))
    except MalformedInput:
        raise
    except HalmanError as exc:
        raise MalformedInput(str(exc)) from None


def dumps(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), sort_keys=True, indent=1) + "\n"


def loads(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
    return instance_from_json(obj)


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from None
    return loads(text)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))
