"""Certified small multitransversals for 2d-1 colorful box families.

Given families ``B_0..B_{2d-2}`` of boxes in R^d whose every transversal
holds at least ``n`` copies of P, :func:`witness_colorful` finds a family
``j`` and a set ``S`` of at most ``2n + (n-1) // (d * 2**(d-1))`` copies such
that every box of ``B_j`` holds ``n`` copies of ``S``.

The construction is driven by *axis sequences* ``m``: ``d-1`` distinct axes,
each tagged ``L`` or ``R``. For each ``m`` we pick ``2d-2`` extremal boxes
from distinct families (the *bag*); the one family left over, ``j(m)``, is
then covered by a one-dimensional argument along the omitted axis ``i(m)``.

Every certificate is re-validated with :func:`halman.solver.verify_cover` on
the caller's original instance before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import HypothesisViolated, StructureViolated, UsageError
from .geometry import (
    LEFT_MAX,
    RIGHT_MIN,
    Box,
    Instance,
    Interval,
    PointRecord,
    box_chain_intersect,
    extremal_endpoint,
    left_key,
    right_key,
    to_rational,
)
from .solver import CoverProblem, family_problem, verify_cover
from .traces import CheckReport, Verdict, box_mask, transversal_count

__all__ = [
    "L",
    "R",
    "AxisSeq",
    "ExtremalSelection",
    "WitnessCertificate",
    "Relabeling",
    "EarlyExit",
    "colorful_bound",
    "enumerate_M",
    "build_Mprime",
    "select_extremal",
    "lemma_bound_transversal",
    "relabel",
    "verify_counting_inequality",
    "witness_colorful",
    "witness_monochromatic",
]

L = "L"
R = "R"

GAP_EMPTY = "gap-empty"
RICH_CORE = "rich-core"
AVERAGED = "averaged"


def colorful_bound(d: int, n: int) -> int:
    return 2 * n + (n - 1) // (d * 2 ** (d - 1))


@dataclass(frozen=True, order=True)
class AxisSeq:
    """``d-1`` pairs ``(axis, direction)`` with distinct axes."""

    pairs: tuple[tuple[int, str], ...]
    d: int

    def __post_init__(self):
        axes = [a for a, _ in self.pairs]
        if len(self.pairs) != self.d - 1:
            raise UsageError(f"an axis sequence in R^{self.d} has {self.d - 1} pairs")
        if len(set(axes)) != len(axes) or not all(0 <= a < self.d for a in axes):
            raise UsageError(f"axes must be distinct and in range: {self.pairs}")
        if any(e not in (L, R) for _, e in self.pairs):
            raise UsageError("directions must be 'L' or 'R'")

    @property
    def omitted_axis(self) -> int:
        """``i(m)``, the one axis that does not appear."""
        used = {a for a, _ in self.pairs}
        return next(a for a in range(self.d) if a not in used)

    @property
    def underlying(self) -> frozenset[tuple[int, str]]:
        return frozenset(self.pairs)

    def __str__(self) -> str:
        return "(" + ",".join(f"{a}{e}" for a, e in self.pairs) + ")"

    def to_json(self) -> list:
        return [[a, e] for a, e in self.pairs]


def enumerate_M(d: int) -> list[AxisSeq]:
    """All ``d! * 2**(d-1)`` axis sequences, in a fixed order."""
    if d < 2:
        raise UsageError("axis sequences need d >= 2")
    out = []
    for axes in itertools.permutations(range(d), d - 1):
        for dirs in itertools.product((L, R), repeat=d - 1):
            out.append(AxisSeq(tuple(zip(axes, dirs)), d))
    return out


def _carry(seq: Sequence[tuple[int, str]], axes: Sequence[int], flip: Sequence[bool]) -> tuple[tuple[int, str], ...]:
    # canonical axis k -> axes[k]; a reflected axis swaps L and R
    return tuple((axes[a], (R if e == L else L) if flip[a] else e) for a, e in seq)


def build_Mprime(d: int) -> list[AxisSeq]:
    """``d(d-1) * 2**(d-1)`` sequences: for every underlying set ``T`` the
    ``d-1`` cyclic shifts of the all-``L`` canonical set carried onto ``T``."""
    if d < 2:
        raise UsageError("axis sequences need d >= 2")
    k = d - 1
    canonical = [tuple(((s + i) % k, L) for s in range(k)) for i in range(k)]
    out = []
    for omitted in range(d):
        axes = [a for a in range(d) if a != omitted]
        for dirs in itertools.product((L, R), repeat=k):
            flip = [e == R for e in dirs]
            for seq in canonical:
                out.append(AxisSeq(_carry(seq, axes, flip), d))
    return out


@dataclass(frozen=True)
class ExtremalSelection:
    m: AxisSeq
    u: tuple[tuple[int, int], ...]   # (family, box) per step
    v: tuple[tuple[int, int], ...]
    j: int
    left: Fraction                   # largest left endpoint of family j on axis i(m)
    right: Fraction                  # smallest right endpoint
    left_box: int
    right_box: int

    @property
    def bag(self) -> tuple[tuple[int, int], ...]:
        return self.u + self.v

    @property
    def axis(self) -> int:
        return self.m.omitted_axis

    @property
    def gap_empty(self) -> bool:
        return self.left <= self.right

    def in_gap(self, value: Fraction) -> bool:
        return self.right < value < self.left

    def transversal_with(self, box: int) -> tuple[int, ...]:
        """Box-index tuple of the transversal ``bag + {box of family j}``."""
        t = [0] * (len(self.bag) + 1)
        for f, k in self.bag:
            t[f] = k
        t[self.j] = box
        return tuple(t)


def select_extremal(instance: Instance, m: AxisSeq) -> ExtremalSelection:
    d = instance.dimension
    nfam = len(instance.families)
    if nfam != 2 * d - 1:
        raise UsageError(f"need exactly {2 * d - 1} families in R^{d}, got {nfam}")
    if m.d != d:
        raise UsageError("axis sequence has the wrong dimension")
    remaining = list(range(nfam))

    def pick(axis: int, largest_left: bool) -> tuple[int, int]:
        cands = [(f, k) for f in remaining for k in range(len(instance.families[f]))]
        if largest_left:
            return max(cands, key=lambda fk: left_key(instance.families[fk[0]][fk[1]], axis, *fk))
        return min(cands, key=lambda fk: right_key(instance.families[fk[0]][fk[1]], axis, *fk))

    u = []
    for axis, eps in m.pairs:
        fk = pick(axis, eps == L)
        u.append(fk)
        remaining.remove(fk[0])
    v = []
    for axis, eps in m.pairs:
        fk = pick(axis, eps == R)
        v.append(fk)
        remaining.remove(fk[0])
    (j,) = remaining
    axis = m.omitted_axis
    left, left_box = extremal_endpoint(instance.families[j], axis, LEFT_MAX, j)
    right, right_box = extremal_endpoint(instance.families[j], axis, RIGHT_MIN, j)
    return ExtremalSelection(m, tuple(u), tuple(v), j, left, right, left_box, right_box)


@dataclass(frozen=True)
class WitnessCertificate:
    """A family index and a set of copy ids that gives each of its boxes
    ``n`` copies, with the per-box hit counts that prove it."""

    family: int
    copies: tuple[int, ...]
    n: int
    bound: int
    hit_counts: tuple[int, ...]
    branch: str
    m: AxisSeq | None = None
    bag: tuple[tuple[int, int], ...] = ()
    left: Fraction | None = None
    right: Fraction | None = None
    gap_count: int = 0

    @property
    def size(self) -> int:
        return len(self.copies)

    def problem(self, instance: Instance) -> CoverProblem:
        return family_problem(instance, self.family, self.n)

    def validate(self, instance: Instance) -> bool:
        return self.size <= self.bound and verify_cover(self.problem(instance), self.copies)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "size": self.size,
            "bound": self.bound,
            "branch": self.branch,
            "copies": list(self.copies),
            "hit_counts": list(self.hit_counts),
            "m": self.m.to_json() if self.m else None,
            "bag": [list(fk) for fk in self.bag],
            "left": None if self.left is None else str(self.left),
            "right": None if self.right is None else str(self.right),
            "gap_count": self.gap_count,
        }


def _core_mask(instance: Instance, boxes: Iterable[Box]) -> int:
    mask = (1 << instance.n_copies) - 1
    for b in boxes:
        mask &= box_mask(instance, b)
    return mask


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _hit_counts(instance: Instance, family: int, copies: Sequence[int]) -> tuple[int, ...]:
    chosen = 0
    for c in copies:
        chosen |= 1 << c
    return tuple((box_mask(instance, b) & chosen).bit_count() for b in instance.families[family])


def gap_count(instance: Instance, sel: ExtremalSelection) -> int:
    """Copies of P in the bag's intersection whose ``i(m)`` coordinate lies
    strictly inside ``(r(m), l(m))``."""
    if sel.gap_empty:
        return 0
    core = _core_mask(instance, (instance.box(f, k) for f, k in sel.bag))
    count = 0
    for c in _bits(core):
        if sel.in_gap(instance.copy_coords(c)[sel.axis]):
            count += 1
    return count


def lemma_bound_transversal(instance: Instance, m: AxisSeq | ExtremalSelection, n: int) -> WitnessCertificate:
    """Cover family ``j(m)`` with at most ``2n + gap_count`` copies.

    Projects the bag's core onto axis ``i(m)`` and keeps the ``n`` largest
    values ``<= r(m)``, the ``n`` smallest ``>= l(m)`` and everything strictly
    in between. Raises :class:`HypothesisViolated` if some box of ``j(m)``
    ends up with fewer than ``n`` copies; the attached transversal (bag plus
    that box) then holds fewer than ``n`` copies.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    sel = m if isinstance(m, ExtremalSelection) else select_extremal(instance, m)
    axis = sel.axis
    core = _core_mask(instance, (instance.box(f, k) for f, k in sel.bag))
    proj = sorted((instance.copy_coords(c)[axis], c) for c in _bits(core))
    below = [c for x, c in proj if x <= sel.right][-n:]
    above = [c for x, c in proj if x >= sel.left][:n]
    gap = [c for x, c in proj if sel.in_gap(x)]
    copies = tuple(sorted(set(below) | set(above) | set(gap)))
    hits = _hit_counts(instance, sel.j, copies)
    for k, h in enumerate(hits):
        if h < n:
            t = sel.transversal_with(k)
            count = transversal_count(instance, t)
            if count >= n:
                raise AssertionError(f"box {k} of family {sel.j} under-covered although {t} holds {count} copies")
            raise HypothesisViolated(
                f"transversal {t} holds {count} < {n} copies", t, count
            )
    return WitnessCertificate(
        family=sel.j,
        copies=copies,
        n=n,
        bound=2 * n + len(gap),
        hit_counts=hits,
        branch=GAP_EMPTY if sel.gap_empty else AVERAGED,
        m=sel.m,
        bag=sel.bag,
        left=sel.left,
        right=sel.right,
        gap_count=len(gap),
    )


@dataclass(frozen=True)
class Relabeling:
    """``families[new] = original[family_perm[new]]``; new axis ``a`` reads
    original axis ``axis_perm[a]``, negated when ``reflect[a]``."""

    family_perm: tuple[int, ...]
    axis_perm: tuple[int, ...]
    reflect: tuple[bool, ...]

    @classmethod
    def identity(cls, nfam: int, d: int) -> Relabeling:
        return cls(tuple(range(nfam)), tuple(range(d)), (False,) * d)

    def __post_init__(self):
        if sorted(self.family_perm) != list(range(len(self.family_perm))):
            raise UsageError("family_perm is not a permutation")
        if sorted(self.axis_perm) != list(range(len(self.axis_perm))):
            raise UsageError("axis_perm is not a permutation")
        if len(self.reflect) != len(self.axis_perm):
            raise UsageError("one reflection flag per axis")

    def _box(self, b: Box) -> Box:
        sides = []
        for a, src in enumerate(self.axis_perm):
            s = b.sides[src]
            sides.append(Interval(-s.hi, -s.lo) if self.reflect[a] else s)
        return Box(tuple(sides))

    def _coords(self, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(-coords[src] if self.reflect[a] else coords[src] for a, src in enumerate(self.axis_perm))

    def apply(self, instance: Instance) -> Instance:
        fams = tuple(tuple(self._box(b) for b in instance.families[src]) for src in self.family_perm)
        pts = tuple(PointRecord(self._coords(p.coords), p.multiplicity) for p in instance.points)
        return Instance(instance.dimension, fams, pts)

    def apply_point(self, coords: Sequence) -> tuple[Fraction, ...]:
        return self._coords([to_rational(c) for c in coords])

    def inverse(self) -> Relabeling:
        fam = [0] * len(self.family_perm)
        for new, src in enumerate(self.family_perm):
            fam[src] = new
        ax = [0] * len(self.axis_perm)
        refl = [False] * len(self.axis_perm)
        for new, src in enumerate(self.axis_perm):
            ax[src] = new
            refl[src] = self.reflect[new]
        return Relabeling(tuple(fam), tuple(ax), tuple(refl))

    def original_family(self, new: int) -> int:
        return self.family_perm[new]

    def original_transversal(self, t: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(t)
        for new, k in enumerate(t):
            out[self.family_perm[new]] = k
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "family_perm": list(self.family_perm),
            "axis_perm": list(self.axis_perm),
            "reflect": list(self.reflect),
        }


@dataclass(frozen=True)
class EarlyExit:
    certificate: WitnessCertificate


def _projection_empty(instance: Instance, family: int, axis: int) -> bool:
    fam = instance.families[family]
    return max(b.sides[axis].lo for b in fam) > min(b.sides[axis].hi for b in fam)


def _disjoint_cross_pair(instance: Instance) -> tuple[int, ...] | None:
    """A transversal containing two geometrically disjoint boxes, if any."""
    fams = instance.families
    for f, g in itertools.combinations(range(len(fams)), 2):
        for a, b1 in enumerate(fams[f]):
            for c, b2 in enumerate(fams[g]):
                if not b1.intersects(b2):
                    t = [0] * len(fams)
                    t[f], t[g] = a, c
                    return tuple(t)
    return None


def _structure_violation(instance: Instance, message: str) -> StructureViolated:
    t = _disjoint_cross_pair(instance)
    if t is None:
        raise AssertionError(f"{message}, yet all cross-family boxes intersect")
    return StructureViolated(f"{message}; transversal {t} is empty", t, transversal_count(instance, t))


def relabel(instance: Instance, n: int) -> Relabeling | EarlyExit:
    """Either a certificate with ``|S| <= 2n`` from a sequence whose gap is
    empty, or the family permutation putting the unique family with empty
    ``i``-projection intersection at index ``i`` for every axis ``i``."""
    d = instance.dimension
    nfam = len(instance.families)
    if d < 2 or nfam != 2 * d - 1:
        raise UsageError(f"need d >= 2 and exactly 2d-1 families, got d={d}, {nfam} families")
    for m in enumerate_M(d):
        sel = select_extremal(instance, m)
        if sel.gap_empty:
            return EarlyExit(lemma_bound_transversal(instance, sel, n))
    split: list[int] = []
    for axis in range(d):
        empty = [j for j in range(nfam) if _projection_empty(instance, j, axis)]
        if len(empty) != 1:
            raise _structure_violation(instance, f"axis {axis} has {len(empty)} families with empty projection")
        split.append(empty[0])
    if len(set(split)) != d:
        raise _structure_violation(instance, f"one family is split on two axes ({split})")
    rest = [j for j in range(nfam) if j not in split]
    return Relabeling(tuple(split + rest), tuple(range(d)), (False,) * d)


def _region(instance: Instance, sel: ExtremalSelection) -> Box | None:
    return box_chain_intersect(instance.box(f, k) for f, k in sel.bag)


def verify_counting_inequality(
    instance: Instance,
    Mprime: Sequence[AxisSeq],
    relabeling: Relabeling,
    probes: Iterable[Sequence] = (),
) -> CheckReport:
    """Check, at every point of P and every probe, that the number of
    sequences of ``Mprime`` whose bag-and-gap region holds the point is at
    most the number of families ``j >= d`` whose intersection holds it, and
    that the holding sequences share one underlying set.

    ``instance`` is in original labels; probes are in original coordinates.
    """
    R_ = relabeling.apply(instance)
    d = R_.dimension
    sels = [select_extremal(R_, m) for m in Mprime]
    for sel in sels:
        axes = [a for a, _ in sel.m.pairs]
        if [f for f, _ in sel.u] != axes or sel.j != sel.axis:
            return CheckReport(Verdict.FAILS, witness=(str(sel.m),), flags=("relabel-structure",))
    regions = [(_region(R_, s) if not s.gap_empty else None, s) for s in sels]
    cores = [box_chain_intersect(R_.families[j]) for j in range(d, 2 * d - 1)]

    pts = [p.coords for p in R_.points]
    pts += [relabeling.apply_point(q) for q in probes]
    work = 0
    max_lhs = 0
    for p in pts:
        work += 1
        hit = [s for reg, s in regions if reg is not None and reg.contains(p) and s.in_gap(p[s.axis])]
        rhs = sum(1 for c in cores if c is not None and c.contains(p))
        max_lhs = max(max_lhs, len(hit))
        if len(hit) > rhs:
            return CheckReport(Verdict.FAILS, witness=(tuple(str(x) for x in p), tuple(str(s.m) for s in hit)),
                               work=work, flags=("counting",))
        if len({s.m.underlying for s in hit}) > 1:
            return CheckReport(Verdict.FAILS, witness=(tuple(str(x) for x in p), tuple(str(s.m) for s in hit)),
                               work=work, flags=("disjointness",))
    return CheckReport(Verdict.HOLDS, work=work, detail={"max_lhs": max_lhs})


def _finish(instance: Instance, cert: WitnessCertificate) -> WitnessCertificate:
    if not cert.validate(instance):
        raise AssertionError(f"certificate failed validation: {cert}")
    return cert


def _relabel_cert(cert: WitnessCertificate, rl: Relabeling, original: Instance, branch: str, bound: int) -> WitnessCertificate:
    fam = rl.original_family(cert.family)
    bag = tuple((rl.original_family(f), k) for f, k in cert.bag)
    return WitnessCertificate(
        family=fam,
        copies=cert.copies,
        n=cert.n,
        bound=bound,
        hit_counts=_hit_counts(original, fam, cert.copies),
        branch=branch,
        m=cert.m,
        bag=bag,
        left=cert.left,
        right=cert.right,
        gap_count=cert.gap_count,
    )


def witness_colorful(instance: Instance, n: int) -> WitnessCertificate:
    """Certified ``n``-multitransversal of size at most
    ``2n + (n-1) // (d * 2**(d-1))`` for one of the ``2d-1`` families."""
    d = instance.dimension
    if n < 1:
        raise UsageError("n must be >= 1")
    res = relabel(instance, n)
    if isinstance(res, EarlyExit):
        return _finish(instance, res.certificate)

    rl = res
    R_ = rl.apply(instance)
    cores = []
    for j in range(d, 2 * d - 1):
        core = _core_mask(R_, R_.families[j])
        cores.append(core.bit_count())
        if core.bit_count() >= n:
            copies = tuple(_bits(core)[:n])
            cert = WitnessCertificate(
                family=rl.original_family(j),
                copies=copies,
                n=n,
                bound=n,
                hit_counts=_hit_counts(instance, rl.original_family(j), copies),
                branch=RICH_CORE,
            )
            return _finish(instance, cert)

    best: tuple[int, tuple, ExtremalSelection] | None = None
    total = 0
    for m in build_Mprime(d):
        sel = select_extremal(R_, m)
        axes = [a for a, _ in m.pairs]
        if [f for f, _ in sel.u] != axes or sel.j != sel.axis:
            raise _structure_violation(instance, f"extremal boxes for {m} do not follow the split structure")
        g = gap_count(R_, sel)
        total += g
        key = (g, m.pairs)
        if best is None or key < best[:2]:
            best = (g, m.pairs, sel)
    if total > sum(cores):
        raise _structure_violation(instance, f"gap total {total} exceeds core total {sum(cores)}")
    assert best is not None
    bound = colorful_bound(d, n)
    try:
        cert = lemma_bound_transversal(R_, best[2], n)
    except HypothesisViolated as exc:
        t = rl.original_transversal(exc.transversal)
        raise HypothesisViolated(str(exc), t, exc.count) from None
    if cert.size > bound:
        raise AssertionError(f"averaged certificate of size {cert.size} exceeds {bound}")
    return _finish(instance, _relabel_cert(cert, rl, instance, AVERAGED, bound))


def witness_monochromatic(family: Sequence[Box], points: Sequence[PointRecord], n: int, d: int | None = None) -> WitnessCertificate:
    """Certified ``n``-multitransversal of size at most ``2n`` for a family
    whose every ``(2d-1)``-subfamily holds ``n`` copies.

    Violations raise :class:`HypothesisViolated` whose ``transversal`` is a
    tuple of distinct box indices of ``family``.
    """
    family = tuple(family)
    if d is None:
        d = family[0].dimension
    if d < 2:
        raise UsageError("the monochromatic witness needs d >= 2")
    if n < 1:
        raise UsageError("n must be >= 1")
    inst = Instance(d, (family,) * (2 * d - 1), tuple(points))
    sel = select_extremal(inst, enumerate_M(d)[0])
    if not sel.gap_empty:
        pair = tuple(sorted({sel.left_box, sel.right_box}))
        raise HypothesisViolated(f"boxes {pair} are disjoint on axis {sel.axis}", pair, 0)
    try:
        cert = lemma_bound_transversal(inst, sel, n)
    except HypothesisViolated as exc:
        sub = tuple(sorted(set(exc.transversal)))
        raise HypothesisViolated(f"subfamily {sub} holds {exc.count} < {n} copies", sub, exc.count) from None
    single = Instance(d, (family,), tuple(points))
    cert = WitnessCertificate(
        family=0,
        copies=cert.copies,
        n=n,
        bound=2 * n,
        hit_counts=cert.hit_counts,
        branch=GAP_EMPTY,
        m=cert.m,
        bag=tuple((0, k) for _, k in cert.bag),
        left=cert.left,
        right=cert.right,
    )
    return _finish(single, cert)
