"""Exact interval, box and point primitives.

All coordinates are :class:`fractions.Fraction`; nothing here ever touches a
float. Axes, families, boxes and points are indexed from 0.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import cached_property, total_ordering
from numbers import Rational
from typing import Iterable, Iterator, Sequence

from .errors import UsageError

__all__ = [
    "Interval",
    "Box",
    "PointRecord",
    "Instance",
    "EndpointKind",
    "TieBreakKey",
    "to_rational",
    "project",
    "box_chain_intersect",
    "box_contains",
    "extremal_endpoint",
    "LEFT_MAX",
    "RIGHT_MIN",
]

LEFT_MAX = "left-max"
RIGHT_MIN = "right-min"


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise UsageError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise UsageError(f"not an exact rational string: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a rational: {value!r}") from exc
    raise UsageError(f"not a rational: {value!r} ({type(value).__name__})")


@dataclass(frozen=True)
class Interval:
    """Closed segment ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo > self.hi:
            raise UsageError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Box:
    """Axis-parallel closed box, one :class:`Interval` per axis."""

    sides: tuple[Interval, ...]

    def __post_init__(self):
        sides = tuple(s if isinstance(s, Interval) else Interval(*s) for s in self.sides)
        if not sides:
            raise UsageError("a box needs at least one side")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def from_bounds(cls, *bounds) -> Box:
        """``Box.from_bounds((lo0, hi0), (lo1, hi1), ...)``."""
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @property
    def dimension(self) -> int:
        return len(self.sides)

    def contains(self, coords: Sequence[Fraction]) -> bool:
        return all(s.lo <= c <= s.hi for s, c in zip(self.sides, coords))

    def intersects(self, other: Box) -> bool:
        return all(a.intersects(b) for a, b in zip(self.sides, other.sides))

    def vertices(self) -> Iterator[tuple[Fraction, ...]]:
        return itertools.product(*((s.lo, s.hi) for s in self.sides))

    def __str__(self) -> str:
        return "x".join(str(s) for s in self.sides)


@dataclass(frozen=True)
class PointRecord:
    """A point of the multiset P together with its multiplicity."""

    coords: tuple[Fraction, ...]
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_rational(c) for c in self.coords))
        if not self.coords:
            raise UsageError("a point needs at least one coordinate")
        if not isinstance(self.multiplicity, int) or self.multiplicity < 1:
            raise UsageError(f"multiplicity must be a positive int, got {self.multiplicity!r}")

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Instance:
    """Families of boxes plus a weighted point multiset in R^d.

    A point of multiplicity ``m`` owns ``m`` consecutive *copy ids*; copy ids
    are the ground set of every trace and every multitransversal.
    """

    dimension: int
    families: tuple[tuple[Box, ...], ...]
    points: tuple[PointRecord, ...] = ()
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = self.dimension
        if not isinstance(d, int) or d < 1:
            raise UsageError(f"dimension must be a positive int, got {d!r}")
        fams = tuple(tuple(f) for f in self.families)
        if not fams:
            raise UsageError("an instance needs at least one family")
        for j, fam in enumerate(fams):
            if not fam:
                raise UsageError(f"family {j} is empty")
            for b in fam:
                if b.dimension != d:
                    raise UsageError(f"box {b} in family {j} has arity {b.dimension}, expected {d}")
        pts = tuple(self.points)
        for p in pts:
            if p.dimension != d:
                raise UsageError(f"point {p.coords} has arity {p.dimension}, expected {d}")
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "points", pts)
        offsets = [0]
        for p in pts:
            offsets.append(offsets[-1] + p.multiplicity)
        object.__setattr__(self, "_offsets", tuple(offsets))

    @property
    def n_copies(self) -> int:
        return self._offsets[-1]

    def copies_of(self, point_index: int) -> range:
        return range(self._offsets[point_index], self._offsets[point_index + 1])

    def copy_owner(self, copy_id: int) -> int:
        """Index of the point a copy id belongs to."""
        if not 0 <= copy_id < self.n_copies:
            raise UsageError(f"copy id {copy_id} out of range")
        return bisect.bisect_right(self._offsets, copy_id) - 1

    def copy_coords(self, copy_id: int) -> tuple[Fraction, ...]:
        return self.points[self.copy_owner(copy_id)].coords

    @cached_property
    def point_masks(self) -> tuple[int, ...]:
        """Bitmask of the copy ids of each point."""
        return tuple(((1 << p.multiplicity) - 1) << off for p, off in zip(self.points, self._offsets))

    def box(self, family: int, index: int) -> Box:
        return self.families[family][index]

    def replace(self, families=None, points=None) -> Instance:
        return Instance(
            self.dimension,
            self.families if families is None else families,
            self.points if points is None else points,
        )


def project(b: Box, axis: int) -> Interval:
    if not 0 <= axis < b.dimension:
        raise UsageError(f"axis {axis} out of range for a box in R^{b.dimension}")
    return b.sides[axis]


def box_chain_intersect(boxes: Iterable[Box]) -> Box | None:
    """Intersection of a nonempty collection of boxes, or ``None`` if empty."""
    boxes = list(boxes)
    if not boxes:
        raise UsageError("box_chain_intersect needs at least one box")
    d = boxes[0].dimension
    if any(b.dimension != d for b in boxes):
        raise UsageError("arity mismatch")
    sides = []
    for axis in range(d):
        lo = max(b.sides[axis].lo for b in boxes)
        hi = min(b.sides[axis].hi for b in boxes)
        if lo > hi:
            return None
        sides.append(Interval(lo, hi))
    return Box(tuple(sides))


def box_contains(b: Box, p: PointRecord | Sequence) -> bool:
    coords = p.coords if isinstance(p, PointRecord) else tuple(to_rational(c) for c in p)
    if len(coords) != b.dimension:
        raise UsageError("arity mismatch")
    return b.contains(coords)


class EndpointKind(IntEnum):
    # order at equal value: closed boxes touching a point or each other keep touching
    BOX_LEFT = 0
    POINT = 1
    BOX_RIGHT = 2


@total_ordering
@dataclass(frozen=True)
class TieBreakKey:
    """Symbolically perturbed coordinate.

    Left endpoints move outward by ``eps * (1 + rank * eta)``, right endpoints
    likewise, points stay put (copies ordered by id at second order). The
    perturbation never changes a containment or an intersection, so it is
    safe to use for selection order; certificates are still validated on the
    unperturbed coordinates.
    """

    value: Fraction
    kind: EndpointKind
    family: int = 0
    index: int = 0

    def _key(self):
        rank = (self.family, self.index)
        if self.kind is EndpointKind.BOX_LEFT:
            rank = (-self.family, -self.index)
        return (self.value, int(self.kind), rank)

    def __lt__(self, other: TieBreakKey) -> bool:
        return self._key() < other._key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, TieBreakKey):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


def left_key(b: Box, axis: int, family: int = 0, index: int = 0) -> TieBreakKey:
    return TieBreakKey(b.sides[axis].lo, EndpointKind.BOX_LEFT, family, index)


def right_key(b: Box, axis: int, family: int = 0, index: int = 0) -> TieBreakKey:
    return TieBreakKey(b.sides[axis].hi, EndpointKind.BOX_RIGHT, family, index)


def extremal_endpoint(family: Sequence[Box], axis: int, side: str, family_index: int = 0) -> tuple[Fraction, int]:
    """Largest left endpoint (``"left-max"``) or smallest right endpoint
    (``"right-min"``) of the family's projections on ``axis``, with the index
    of the box achieving it."""
    if not family:
        raise UsageError("extremal_endpoint needs a nonempty family")
    for b in family:
        project(b, axis)
    if side == LEFT_MAX:
        k = max(range(len(family)), key=lambda i: left_key(family[i], axis, family_index, i))
        return family[k].sides[axis].lo, k
    if side == RIGHT_MIN:
        k = min(range(len(family)), key=lambda i: right_key(family[i], axis, family_index, i))
        return family[k].sides[axis].hi, k
    raise UsageError(f"side must be {LEFT_MAX!r} or {RIGHT_MIN!r}, got {side!r}")
