"""Traces of box families on a point multiset, and hypothesis checkers.

Traces are kept both as frozensets of copy ids and as int bitmasks; the
checkers work on the bitmasks (``&`` then ``int.bit_count``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterator, Sequence

from .geometry import Box, Instance
from .errors import UsageError

__all__ = [
    "DEFAULT_BUDGET",
    "Verdict",
    "CheckReport",
    "TraceSet",
    "trace",
    "family_traces",
    "box_mask",
    "transversals",
    "transversal_count",
    "check_colorful_n_intersecting",
    "check_subfamily_n_intersecting",
    "check_pq_property",
]

DEFAULT_BUDGET = 10**7


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class CheckReport:
    verdict: Verdict
    witness: tuple | None = None
    work: int = 0
    flags: tuple[str, ...] = ()
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "work": self.work}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.flags:
            out["flags"] = list(self.flags)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class TraceSet:
    family: int
    box: int
    hits: frozenset[int]

    @cached_property
    def mask(self) -> int:
        m = 0
        for c in self.hits:
            m |= 1 << c
        return m

    def __len__(self) -> int:
        return len(self.hits)


def box_mask(instance: Instance, b: Box) -> int:
    """Bitmask of the copies of ``instance``'s points lying in ``b``."""
    m = 0
    for p, pm in zip(instance.points, instance.point_masks):
        if b.contains(p.coords):
            m |= pm
    return m


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def family_traces(instance: Instance, family: int) -> list[TraceSet]:
    return [
        TraceSet(family, k, _mask_to_set(box_mask(instance, b)))
        for k, b in enumerate(instance.families[family])
    ]


def trace(instance: Instance) -> list[TraceSet]:
    """One :class:`TraceSet` per box, family-major order."""
    out: list[TraceSet] = []
    for j in range(len(instance.families)):
        out.extend(family_traces(instance, j))
    return out


def family_masks(instance: Instance) -> list[list[int]]:
    return [[box_mask(instance, b) for b in fam] for fam in instance.families]


def transversals(instance: Instance) -> Iterator[tuple[int, ...]]:
    """Lexicographic stream of box-index tuples, one index per family."""
    return itertools.product(*(range(len(f)) for f in instance.families))


def transversal_count(instance: Instance, transversal: Sequence[int]) -> int:
    """Number of copies in the trace intersection of one transversal."""
    if len(transversal) != len(instance.families):
        raise UsageError("transversal must pick one box per family")
    mask = (1 << instance.n_copies) - 1
    for fam, k in zip(instance.families, transversal):
        mask &= box_mask(instance, fam[k])
    return mask.bit_count()


def _masks_of(traces: Sequence) -> list[int]:
    out = []
    for t in traces:
        if isinstance(t, TraceSet):
            out.append(t.mask)
        elif isinstance(t, int):
            out.append(t)
        else:
            m = 0
            for c in t:
                m |= 1 << c
            out.append(m)
    return out


def check_colorful_n_intersecting(instance: Instance, n: int, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Does every transversal's trace intersection hold at least ``n`` copies?

    Enumerates transversals depth-first in lexicographic order, pruning a
    prefix as soon as its running intersection drops below ``n``; the first
    violating tuple in lexicographic order is reported.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    sizes = [len(f) for f in instance.families]
    total = math.prod(sizes)
    if total > budget:
        return CheckReport(Verdict.BUDGET_EXCEEDED, work=0, detail={"transversals": total})
    masks = family_masks(instance)
    full = (1 << instance.n_copies) - 1
    nfam = len(masks)
    work = 0
    counts: dict[int, int] = {}
    min_count = None

    # explicit stack pops prefixes in lexicographic order, so the first
    # undersized prefix met is the start of the first violating tuple
    stack: list[tuple[int, int, tuple[int, ...]]] = [(0, full, ())]
    while stack:
        depth, mask, prefix = stack.pop()
        work += 1
        c = mask.bit_count()
        if c < n:
            witness = prefix + (0,) * (nfam - depth)
            return CheckReport(Verdict.FAILS, witness=witness, work=work,
                               detail={"count": transversal_count(instance, witness)})
        if depth == nfam:
            counts[c] = counts.get(c, 0) + 1
            min_count = c if min_count is None else min(min_count, c)
            continue
        for k in reversed(range(sizes[depth])):
            stack.append((depth + 1, mask & masks[depth][k], prefix + (k,)))
    return CheckReport(Verdict.HOLDS, work=work, detail={"min_count": min_count, "count_histogram": counts})


def check_subfamily_n_intersecting(
    traces: Sequence,
    k: int,
    n: int,
    budget: int = DEFAULT_BUDGET,
    at_most: bool = False,
) -> CheckReport:
    """Is every ``k``-subfamily (every subfamily of size <= ``k`` when
    ``at_most``) of the traces ``n``-intersecting?

    A family smaller than ``k`` is checked on subsets of size ``len(traces)``.
    The witness is the tuple of positions of the first failing subset.
    """
    if k < 1 or n < 1:
        raise UsageError("k and n must be >= 1")
    masks = _masks_of(traces)
    if not masks:
        return CheckReport(Verdict.HOLDS)
    size = min(k, len(masks))
    sizes = range(1, size + 1) if at_most else [size]
    total = sum(math.comb(len(masks), s) for s in sizes)
    if total > budget:
        return CheckReport(Verdict.BUDGET_EXCEEDED, detail={"subsets": total})
    work = 0
    for s in sizes:
        for combo in itertools.combinations(range(len(masks)), s):
            work += 1
            m = -1
            for i in combo:
                m &= masks[i]
            if m.bit_count() < n:
                return CheckReport(Verdict.FAILS, witness=combo, work=work, detail={"count": m.bit_count()})
    return CheckReport(Verdict.HOLDS, work=work)


def check_pq_property(traces: Sequence, p: int, q: int, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Does every ``p``-subset of the traces contain ``q`` sets with a common copy?

    Conventions: subsets have size ``min(p, len(traces))`` and the inner
    search size is capped the same way. Any empty trace fails the check with
    flag ``"empty-trace"`` (an empty trace cannot meet anything).
    """
    if not p >= q >= 1:
        raise UsageError("need p >= q >= 1")
    masks = _masks_of(traces)
    for i, m in enumerate(masks):
        if m == 0:
            return CheckReport(Verdict.FAILS, witness=(i,), flags=("empty-trace",))
    outer = min(p, len(masks))
    inner = min(q, outer)
    total = math.comb(len(masks), outer)
    if total > budget:
        return CheckReport(Verdict.BUDGET_EXCEEDED, detail={"subsets": total})

    work = 0
    intersecting_cache: dict[tuple[int, ...], bool] = {}
    for combo in itertools.combinations(range(len(masks)), outer):
        work += 1
        found = False
        for sub in itertools.combinations(combo, inner):
            hit = intersecting_cache.get(sub)
            if hit is None:
                m = -1
                for i in sub:
                    m &= masks[i]
                hit = m != 0
                intersecting_cache[sub] = hit
            if hit:
                found = True
                break
        if not found:
            return CheckReport(Verdict.FAILS, witness=combo, work=work)
    return CheckReport(Verdict.HOLDS, work=work)
