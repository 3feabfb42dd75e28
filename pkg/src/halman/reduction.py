"""Dimension reduction for colorful families.

Eliminating an axis consumes two families: one supplies the box with the
largest left endpoint on that axis, another the box with the smallest right
endpoint. Points outside both are dropped, the axis is deleted, and every
remaining family is projected. The reduced families keep the colorful
``n``-intersecting property, and any ``n``-multitransversal of a reduced
family lifts to one of the original family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import HypothesisViolated, UsageError
from .geometry import Box, Instance, PointRecord, left_key, right_key
from .solver import tau
from .traces import DEFAULT_BUDGET, Verdict, check_subfamily_n_intersecting, family_traces, transversal_count
from .traces import check_colorful_n_intersecting

__all__ = ["SELECTION_RULE", "Reduction", "reduce", "corollary_pipeline"]

SELECTION_RULE = "per-axis greedy: axes ascending, largest-left family then smallest-right family"


@dataclass(frozen=True)
class Reduction:
    eliminated_axes: tuple[int, ...]
    clamps: tuple[tuple[tuple[int, int], tuple[int, int]], ...]  # per axis: (family, box) pairs
    surviving: tuple[int, ...]          # original indices of the reduced families, in order
    surviving_axes: tuple[int, ...]
    point_map: tuple[int, ...]          # reduced point index -> original point index
    selection_rule: str = SELECTION_RULE

    def lift_copies(self, original: Instance, reduced: Instance, copies: Sequence[int]) -> tuple[int, ...]:
        """Map reduced copy ids back to copy ids of the original instance."""
        out = []
        for c in copies:
            k = reduced.copy_owner(c)
            offset = c - reduced.copies_of(k).start
            out.append(original.copies_of(self.point_map[k]).start + offset)
        return tuple(sorted(out))

    def lift_transversal(self, t: Sequence[int], nfam: int) -> tuple[int, ...]:
        full = [0] * nfam
        for pair in self.clamps:
            for f, k in pair:
                full[f] = k
        for new, k in enumerate(t):
            full[self.surviving[new]] = k
        return tuple(full)

    def to_json(self) -> dict:
        return {
            "eliminated_axes": list(self.eliminated_axes),
            "clamps": [[list(a), list(b)] for a, b in self.clamps],
            "surviving": list(self.surviving),
            "surviving_axes": list(self.surviving_axes),
            "point_map": list(self.point_map),
            "selection_rule": self.selection_rule,
        }


def reduce(
    instance: Instance,
    n: int,
    t: int,
    check: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> tuple[Instance, Reduction]:
    """Eliminate the first ``t`` axes, consuming ``2t`` families.

    With ``check`` the reduced instance is re-verified to be colorful
    ``n``-intersecting; a failure lifts to a violating transversal of the
    input and raises :class:`HypothesisViolated`.
    """
    d = instance.dimension
    s = len(instance.families)
    if t < 0 or n < 1:
        raise UsageError("need t >= 0 and n >= 1")
    if t == 0:
        red = Reduction((), (), tuple(range(s)), tuple(range(d)), tuple(range(len(instance.points))))
        return instance, red
    if s < 3 or d - t < 1 or s - 2 * t < 1:
        raise UsageError(f"need s >= 3, d - t >= 1 and s - 2t >= 1 (s={s}, d={d}, t={t})")

    fams = instance.families
    remaining = list(range(s))
    clamps = []
    for axis in range(t):
        cands = [(f, k) for f in remaining for k in range(len(fams[f]))]
        lm = max(cands, key=lambda fk: left_key(fams[fk[0]][fk[1]], axis, *fk))
        remaining.remove(lm[0])
        cands = [(f, k) for f in remaining for k in range(len(fams[f]))]
        rm = min(cands, key=lambda fk: right_key(fams[fk[0]][fk[1]], axis, *fk))
        remaining.remove(rm[0])
        clamps.append((lm, rm))

    clamp_boxes = [fams[f][k] for pair in clamps for f, k in pair]
    keep_axes = tuple(range(t, d))
    point_map = []
    points = []
    for i, p in enumerate(instance.points):
        if all(b.contains(p.coords) for b in clamp_boxes):
            point_map.append(i)
            points.append(PointRecord(tuple(p.coords[a] for a in keep_axes), p.multiplicity))
    families = tuple(
        tuple(Box(tuple(b.sides[a] for a in keep_axes)) for b in fams[j]) for j in remaining
    )
    reduced = Instance(d - t, families, tuple(points))
    red = Reduction(tuple(range(t)), tuple(clamps), tuple(remaining), keep_axes, tuple(point_map))

    if check:
        rep = check_colorful_n_intersecting(reduced, n, budget)
        if rep.verdict is Verdict.FAILS:
            full = red.lift_transversal(rep.witness, s)
            count = transversal_count(instance, full)
            raise HypothesisViolated(f"transversal {full} holds {count} < {n} copies", full, count)
    return reduced, red


def corollary_pipeline(family: Sequence[Box], points: Sequence[PointRecord], d: int, k: int,
                       budget: int = DEFAULT_BUDGET) -> dict:
    """Reduce a family whose every ``(2d-k)``-subfamily has intersecting
    trace, and compare exact piercing numbers before and after.

    The piercing bound of the reduced problem is a (p,q)-type constant that
    is reported as a symbol, never evaluated.
    """
    s = 2 * d - k
    if k < 1 or s < 2:
        raise UsageError("need k >= 1 and 2d - k >= 2")
    family = tuple(family)
    points = tuple(points)
    single = Instance(d, (family,), points)
    rep = check_subfamily_n_intersecting(family_traces(single, 0), s, 1, budget, at_most=True)
    if rep.verdict is Verdict.FAILS:
        raise HypothesisViolated(f"subfamily {rep.witness} has empty trace", rep.witness, 0)
    t = (2 * d - k - 2) // 2
    colorful = Instance(d, (family,) * s, points)
    reduced, red = reduce(colorful, 1, t, budget=budget)
    tau_orig = tau(single, 0).optimum
    tau_red = tau(reduced, 0).optimum
    if tau_orig is None or tau_red is None or tau_orig > tau_red:
        raise AssertionError(f"reduction inequality failed: {tau_orig} > {tau_red}")
    width = s - 2 * t
    symbol = f"N({width},{width},{d - t})"
    identical = all(f == reduced.families[0] for f in reduced.families)
    return {
        "d": d,
        "k": k,
        "s": s,
        "t": t,
        "reduced_dimension": d - t,
        "reduced_families": width,
        "tau_original": tau_orig,
        "tau_reduced": tau_red,
        "identical_families": identical,
        "bound_symbol": symbol,
        "reduction": red.to_json(),
    }
