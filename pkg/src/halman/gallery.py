"""Explicit and random instances.

The explicit generators check their own defining properties by brute force
before returning and raise :class:`SelfCheckFailed` otherwise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import GenerationFailed, SelfCheckFailed, UsageError
from .geometry import Box, Instance, Interval, PointRecord, box_chain_intersect, to_rational
from .solver import tau
from .traces import (
    check_colorful_n_intersecting,
    check_pq_property,
    check_subfamily_n_intersecting,
    family_traces,
)

__all__ = [
    "GenParams",
    "q_table",
    "gen_colorful_lower",
    "gen_mono_lower",
    "gen_pq_lower",
    "gen_random_colorful",
    "gen_random_mono",
]


@dataclass(frozen=True)
class GenParams:
    d: int
    n: int = 1
    N: Fraction | None = None
    delta: Fraction = Fraction(1, 2)
    seed: int = 0
    sizes: tuple[int, ...] | None = None
    coord_range: int = 20

    def __post_init__(self):
        if self.N is None:
            object.__setattr__(self, "N", Fraction(2 * self.d))
        object.__setattr__(self, "N", to_rational(self.N))
        object.__setattr__(self, "delta", to_rational(self.delta))


def q_table(d: int, i: int, j: int, k: int) -> int:
    """Half-width on axis ``k`` of box ``j`` (1 or 2) of the ``i``-th extra
    family; all three indices 1-based. Row 2 at ``k = d`` is taken as ``d``."""
    if not (1 <= i <= d - 1 and j in (1, 2) and 1 <= k <= d):
        raise UsageError(f"q_table index out of range: d={d}, i={i}, j={j}, k={k}")
    if j == 1:
        return 1 if k == d - i + 1 else d
    return d - i if k <= d - i else d


def gen_colorful_lower(d: int, n: int = 1, N=None, delta=Fraction(1, 2)) -> Instance:
    """``2d-1`` families of two boxes each; every transversal holds exactly
    ``n`` copies while every family needs ``2n``.

    Families ``0..d-1`` are pairs of slabs split at ``x_i = 0``; families
    ``d..2d-2`` are centred boxes from :func:`q_table`; P is ``n`` copies of
    every vertex of every intersection of one box per centred family.
    """
    if d < 2 or n < 1:
        raise UsageError("need d >= 2 and n >= 1")
    N = Fraction(2 * d) if N is None else to_rational(N)
    delta = to_rational(delta)
    if N < 2 * d or not 0 < delta < 1:
        raise UsageError("need N >= 2d and 0 < delta < 1")

    families: list[tuple[Box, ...]] = []
    for axis in range(d):
        pair = []
        for lo, hi in ((-N, -delta), (delta, N)):
            sides = [Interval(-N, N)] * d
            sides[axis] = Interval(lo, hi)
            pair.append(Box(tuple(sides)))
        families.append(tuple(pair))
    for i in range(1, d):
        families.append(tuple(
            Box(tuple(Interval(-q_table(d, i, j, k), q_table(d, i, j, k)) for k in range(1, d + 1)))
            for j in (1, 2)
        ))

    vertices: dict[tuple[Fraction, ...], None] = {}
    for s in itertools.product((1, 2), repeat=d - 1):
        half = [min(q_table(d, i, s[i - 1], k) for i in range(1, d)) for k in range(1, d + 1)]
        for eps in itertools.product((1, -1), repeat=d):
            v = tuple(Fraction(e * h) for e, h in zip(eps, half))
            vertices.setdefault(v, None)
    inst = Instance(d, tuple(families), tuple(PointRecord(v, n) for v in vertices))
    _self_check_colorful_lower(inst, d, n)
    return inst


def _self_check_colorful_lower(inst: Instance, d: int, n: int) -> None:
    extra = inst.families[d:]
    for s in itertools.product((0, 1), repeat=d - 1):
        core = box_chain_intersect(fam[si] for fam, si in zip(extra, s))
        if core is None:
            raise SelfCheckFailed(f"centred boxes {s} do not intersect")
        for v in core.vertices():
            for i, fam in enumerate(extra):
                if fam[1 - s[i]].contains(v):
                    raise SelfCheckFailed(f"vertex {v} of {s} lies in the other box of extra family {i}")
    report = check_colorful_n_intersecting(inst, n)
    if not report.holds or set(report.detail["count_histogram"]) != {n}:
        raise SelfCheckFailed(f"transversal counts are not all exactly {n}: {report}")


def gen_mono_lower(d: int, n: int = 1) -> Instance:
    """One family of ``2d`` half cubes of ``[-1, 1]^d``.

    Box ``2a`` has side ``[-1, 0]`` on axis ``a`` and misses ``+e_a``; box
    ``2a+1`` has ``[0, 1]`` and misses ``-e_a``. Each of the ``2d`` points
    ``+-e_a`` carries multiplicity ``n``, so any ``2d-1`` boxes share exactly
    ``n`` copies.
    """
    if d < 1 or n < 1:
        raise UsageError("need d >= 1 and n >= 1")
    boxes, points = [], []
    for axis in range(d):
        for lo, hi, sign in ((-1, 0, 1), (0, 1, -1)):
            sides = [Interval(-1, 1)] * d
            sides[axis] = Interval(lo, hi)
            boxes.append(Box(tuple(sides)))
            coords = [Fraction(0)] * d
            coords[axis] = Fraction(sign)
            points.append(PointRecord(tuple(coords), n))
    inst = Instance(d, (tuple(boxes),), tuple(points))
    rep = check_subfamily_n_intersecting(family_traces(inst, 0), 2 * d - 1, n)
    if not rep.holds:
        raise SelfCheckFailed(f"a (2d-1)-subfamily misses n copies: {rep}")
    return inst


# Found once by exhaustive search over boxes with integer corners on [0, 8]^2
# around nine points in general position; the traces are pairwise
# intersecting and no two points pierce all nine boxes.
PQ_POINTS = ((0, 1), (1, 5), (2, 6), (3, 0), (4, 8), (5, 4), (6, 7), (7, 2), (8, 3))
PQ_BOXES = (
    ((0, 4), (1, 8)),
    ((0, 8), (0, 3)),
    ((0, 8), (2, 5)),
    ((1, 3), (0, 6)),
    ((0, 5), (0, 4)),
    ((2, 7), (1, 7)),
    ((0, 2), (0, 6)),
    ((0, 5), (1, 5)),
    ((0, 7), (0, 2)),
)


def gen_pq_lower(d: int = 2) -> Instance:
    """Nine boxes, nine points in the plane (lifted to R^d): every two
    traces meet, yet three points are needed to pierce them all."""
    if d < 2:
        raise UsageError("need d >= 2")
    pad = [Interval(-1, 1)] * (d - 2)
    boxes = tuple(Box(tuple(Interval(*s) for s in b) + tuple(pad)) for b in PQ_BOXES)
    points = tuple(PointRecord(tuple(p) + (0,) * (d - 2)) for p in PQ_POINTS)
    inst = Instance(d, (boxes,), points)
    traces = family_traces(inst, 0)
    if not check_pq_property(traces, 2, 2).holds:
        raise SelfCheckFailed("traces are not pairwise intersecting")
    res = tau(inst, 0, 1)
    if res.optimum != 3:
        raise SelfCheckFailed(f"piercing number is {res.optimum}, expected 3")
    return inst


def _rng(seed) -> random.Random:
    return random.Random(seed)


def _random_interval(rng: random.Random, R: int) -> list[Fraction]:
    c = rng.randint(-R, R)
    w = rng.randint(1, R)
    return [Fraction(c - w), Fraction(c + w)]


def _interior_value(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    if lo == hi:
        return lo
    q = rng.randint(2, 9)
    return lo + (hi - lo) * Fraction(rng.randint(1, q - 1), q)


def _repair(rng, sides, fam_of, max_rounds=200) -> None:
    """Stretch boxes until every cross-family pair meets on every axis.

    ``sides[b][a]`` is a mutable ``[lo, hi]``; ``fam_of[b]`` is the family
    of box ``b`` (``None`` makes every pair cross-family)."""
    nbox = len(sides)
    d = len(sides[0]) if sides else 0
    for _ in range(max_rounds):
        changed = False
        for a in range(d):
            for x, y in itertools.combinations(range(nbox), 2):
                if fam_of[x] == fam_of[y] and fam_of[x] is not None:
                    continue
                sx, sy = sides[x][a], sides[y][a]
                if sx[1] < sy[0]:
                    left, right = x, y
                elif sy[1] < sx[0]:
                    left, right = y, x
                else:
                    continue
                slack = rng.randint(0, 2)
                if rng.random() < 0.5:
                    sides[left][a][1] = sides[right][a][0] + slack
                else:
                    sides[right][a][0] = sides[left][a][1] - slack
                changed = True
        if not changed:
            return
    raise GenerationFailed("box repair did not converge")


def _add_point(rng, points: dict, region: Box, multiplicity: int) -> None:
    coords = tuple(_interior_value(rng, s.lo, s.hi) for s in region.sides)
    points[coords] = points.get(coords, 0) + multiplicity


def _seed_points(rng, d, points: dict, regions: Sequence[Box], n: int) -> None:
    """Top up every region to at least ``n`` copies."""
    for region in regions:
        have = sum(m for c, m in points.items() if region.contains(c))
        while have < n:
            m = rng.randint(1, n - have)
            _add_point(rng, points, region, m)
            have += m


def _noise(rng, d, points: dict, R: int, count: int) -> None:
    for _ in range(count):
        region = Box(tuple(Interval(-R, R) for _ in range(d)))
        _add_point(rng, points, region, rng.randint(1, 2))


def _warp(rng, inst: Instance) -> Instance:
    """Apply a random strictly increasing map to every axis; all order
    relations, hence all traces, are preserved."""
    d = inst.dimension
    maps = []
    for a in range(d):
        vals = {p.coords[a] for p in inst.points}
        for fam in inst.families:
            for b in fam:
                vals.update((b.sides[a].lo, b.sides[a].hi))
        cur = Fraction(-rng.randint(0, 20))
        m = {}
        for v in sorted(vals):
            cur += Fraction(rng.randint(1, 6), rng.randint(1, 3))
            m[v] = cur
        maps.append(m)
    families = tuple(
        tuple(Box(tuple(Interval(maps[a][s.lo], maps[a][s.hi]) for a, s in enumerate(b.sides))) for b in fam)
        for fam in inst.families
    )
    points = tuple(PointRecord(tuple(maps[a][c] for a, c in enumerate(p.coords)), p.multiplicity) for p in inst.points)
    return Instance(d, families, points)


def _structured_colorful(rng, d: int, n: int, sizes, noise) -> Instance:
    """The lower-bound template with random extras: enlarged copies of boxes
    (never crossing a split), spare multiplicity, a few stray points, and a
    random monotone warp of each axis."""
    N = Fraction(2 * d + rng.randint(0, 3))
    delta = rng.choice((Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)))
    base = gen_colorful_lower(d, 1, N, delta)
    families = []
    for f, fam in enumerate(base.families):
        extra = rng.randint(0, 1) if sizes is None else sizes[f] - 2
        boxes = list(fam)
        for _ in range(extra):
            src = rng.choice(fam)
            sides = []
            for a, s in enumerate(src.sides):
                lo = s.lo - Fraction(rng.randint(0, 2), 2)
                hi = s.hi + Fraction(rng.randint(0, 2), 2)
                if f < d and a == f:
                    # keep the split at zero
                    lo, hi = (lo, s.hi) if s.hi < 0 else (s.lo, hi)
                sides.append(Interval(lo, hi))
            boxes.append(Box(tuple(sides)))
        rng.shuffle(boxes)
        families.append(tuple(boxes))
    points = {p.coords: n + (rng.random() < 0.3) for p in base.points}
    count = rng.randint(0, 2) if noise is None else noise
    for _ in range(count):
        c = tuple(Fraction(rng.randint(-2 * int(N), 2 * int(N)), 2) for _ in range(d))
        points[c] = points.get(c, 0) + 1
    # points in the gap of one split axis and in every centred box; with
    # multiplicity g <= (n-1) // (d 2^(d-1)) per site the cores stay below n
    g = rng.randint(0, (n - 1) // (d * 2 ** (d - 1)))
    if g:
        for axis in range(d):
            for signs in itertools.product((-1, 1), repeat=d - 1):
                if rng.random() < 0.2:
                    continue
                it = iter(signs)
                c = tuple(Fraction(0) if a == axis else next(it) * rng.choice((delta, Fraction(1)))
                          for a in range(d))
                points[c] = points.get(c, 0) + g
    inst = Instance(d, tuple(families), tuple(PointRecord(c, m) for c, m in points.items()))
    return _warp(rng, inst)


def gen_random_colorful(
    d: int,
    n: int = 1,
    sizes: Sequence[int] | None = None,
    seed=0,
    structured: bool = False,
    coord_range: int = 20,
    noise: int | None = None,
) -> Instance:
    """Random families whose every transversal holds at least ``n`` copies.

    Boxes are sampled, then stretched until every cross-family pair meets;
    afterwards each transversal's intersection box is topped up with points
    strictly inside it.

    With ``structured`` the lower-bound construction is randomized instead
    (see :func:`_structured_colorful`); such instances have split families and
    sparse cores, so they reach the averaged branch of the witness builder.
    ``sizes`` then must be at least 2 per family. Deterministic in ``seed``.
    """
    if d < 2 or n < 1:
        raise UsageError("need d >= 2 and n >= 1")
    if sizes is not None:
        sizes = tuple(sizes)
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise UsageError("family sizes must be positive")
    rng = _rng(seed)
    if structured:
        if sizes is not None and (len(sizes) != 2 * d - 1 or min(sizes) < 2):
            raise UsageError("structured instances need 2d-1 families of size >= 2")
        inst = _structured_colorful(rng, d, n, sizes, noise)
    else:
        sizes = sizes if sizes is not None else (2,) * (2 * d - 1)
        inst = _sampled_colorful(rng, d, n, sizes, coord_range, noise)
    if not check_colorful_n_intersecting(inst, n).holds:
        raise GenerationFailed("generated instance fails the colorful hypothesis")
    return inst


def _sampled_colorful(rng, d: int, n: int, sizes, R: int, noise) -> Instance:
    sides: list[list[list[Fraction]]] = []
    fam_of: list[int] = []
    for f, size in enumerate(sizes):
        for _ in range(size):
            sides.append([_random_interval(rng, R) for _ in range(d)])
            fam_of.append(f)
    _repair(rng, sides, fam_of)

    families: list[list[Box]] = [[] for _ in sizes]
    for box, f in zip(sides, fam_of):
        families[f].append(Box(tuple(Interval(lo, hi) for lo, hi in box)))

    points: dict[tuple[Fraction, ...], int] = {}
    _noise(rng, d, points, R, rng.randint(0, 2 * n) if noise is None else noise)
    regions = []
    for t in itertools.product(*(range(s) for s in sizes)):
        region = box_chain_intersect(families[f][k] for f, k in enumerate(t))
        if region is None:
            raise GenerationFailed(f"transversal {t} is empty after repair")
        regions.append(region)
    rng.shuffle(regions)
    _seed_points(rng, d, points, regions, n)
    return Instance(d, tuple(tuple(f) for f in families),
                    tuple(PointRecord(c, m) for c, m in points.items()))


def gen_random_mono(
    d: int,
    n: int = 1,
    size: int | None = None,
    seed=0,
    k: int | None = None,
    coord_range: int = 20,
    noise: int | None = None,
) -> Instance:
    """One random family whose every ``k``-subfamily (default ``2d-1``)
    holds at least ``n`` copies."""
    if d < 1 or n < 1:
        raise UsageError("need d >= 1 and n >= 1")
    k = 2 * d - 1 if k is None else k
    size = 2 * d + 1 if size is None else size
    rng = _rng(seed)
    R = coord_range
    sides = [[_random_interval(rng, R) for _ in range(d)] for _ in range(size)]
    _repair(rng, sides, [None] * size)
    boxes = tuple(Box(tuple(Interval(lo, hi) for lo, hi in b)) for b in sides)
    points: dict[tuple[Fraction, ...], int] = {}
    _noise(rng, d, points, R, rng.randint(0, 2 * n) if noise is None else noise)
    regions = []
    for combo in itertools.combinations(range(size), min(k, size)):
        region = box_chain_intersect(boxes[i] for i in combo)
        if region is None:
            raise GenerationFailed(f"subfamily {combo} is empty after repair")
        regions.append(region)
    rng.shuffle(regions)
    _seed_points(rng, d, points, regions, n)
    inst = Instance(d, (boxes,), tuple(PointRecord(c, m) for c, m in points.items()))
    if not check_subfamily_n_intersecting(family_traces(inst, 0), k, n).holds:
        raise GenerationFailed("generated family fails the subfamily hypothesis")
    return inst
