"""Brute-force reference computations.

Nothing here imports the solver or the trace engine: membership is plain
tuple comparison and optima come from exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from collections import Counter


def inside(bounds, coords) -> bool:
    """``bounds`` is a sequence of ``(lo, hi)`` pairs."""
    return all(lo <= c <= hi for (lo, hi), c in zip(bounds, coords))


def copy_edges(families_bounds, points):
    """Edges (frozensets of copy ids) per family; ``points`` are
    ``(coords, multiplicity)`` pairs, copy ids assigned in order."""
    ids, nxt = [], 0
    for _, m in points:
        ids.append(range(nxt, nxt + m))
        nxt += m
    out = []
    for fam in families_bounds:
        edges = []
        for b in fam:
            hit = set()
            for (coords, _), r in zip(points, ids):
                if inside(b, coords):
                    hit.update(r)
            edges.append(frozenset(hit))
        out.append(edges)
    return out, nxt


def instance_bounds(inst):
    fams = [[[(s.lo, s.hi) for s in b.sides] for b in fam] for fam in inst.families]
    pts = [(p.coords, p.multiplicity) for p in inst.points]
    return fams, pts


def brute_cover(edges, k, cap, universe):
    """Smallest multiset (each copy used at most ``cap`` times) meeting every
    edge ``k`` times; ``None`` if impossible. Enumerates by size."""
    edges = [frozenset(e) for e in edges]
    if any(len(e) * cap < k for e in edges):
        return None
    if not edges:
        return 0
    copies = sorted(set().union(*edges))
    assert all(0 <= c < universe for c in copies)
    for size in range(0, cap * len(copies) + 1):
        picks = (itertools.combinations(copies, size) if cap == 1
                 else itertools.combinations_with_replacement(copies, size))
        for pick in picks:
            cnt = Counter(pick)
            if cnt and max(cnt.values()) > cap:
                continue
            if all(sum(cnt[c] for c in e) >= k for e in edges):
                return size
    return None


def mono_lower_optimum(inst, n):
    """Exact tau'_n of the half-cube family, exploiting only the symmetry that
    every box misses exactly one point site and distinct boxes miss distinct
    sites (asserted here, not assumed)."""
    fams, pts = instance_bounds(inst)
    (family,) = fams
    sites = len(pts)
    missed = []
    for b in family:
        out = [i for i, (c, _) in enumerate(pts) if not inside(b, c)]
        assert len(out) == 1
        missed.append(out[0])
    assert sorted(missed) == list(range(sites))
    assert all(m == n for _, m in pts)
    best = None
    # the constraint set is symmetric in the sites, so sorted vectors suffice
    for x in itertools.combinations_with_replacement(range(n + 1), sites):
        total = sum(x)
        if all(total - xi >= n for xi in x):
            best = total if best is None else min(best, total)
    return best
