"""Exact k-multitransversal / k-cover numbers of a trace hypergraph.

Copies with the same edge membership are interchangeable, so the search runs
over membership classes with integer usage counts rather than over copies.
The search is a plain depth-first branch and bound:

* branch on the most constrained unsatisfied edge; child ``i`` adds one unit
  of the ``i``-th candidate class and freezes candidates ``0..i-1``, which
  partitions the completions without overlap;
* prune on residual capacity, on a packing lower bound (edges sharing no
  open class need separate units) and on a per-unit coverage bound;
* states ``(x, frozen)`` already explored with a subset of ``frozen`` are
  skipped.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import UsageError
from .geometry import Instance
from .traces import family_traces

__all__ = [
    "MULTITRANSVERSAL",
    "K_COVER",
    "CoverProblem",
    "SolveResult",
    "solve_exact",
    "greedy_upper",
    "verify_cover",
    "family_problem",
    "tau",
]

MULTITRANSVERSAL = "multi"
K_COVER = "cover"


@dataclass(frozen=True)
class CoverProblem:
    """Every edge must receive ``k`` chosen copies; a copy may be chosen up
    to ``cap`` times (1 for multitransversals, ``k`` for k-covers)."""

    edges: tuple[frozenset[int], ...]
    k: int = 1
    cap: int = 1
    universe: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(frozenset(e) for e in self.edges))
        if self.k < 1:
            raise UsageError("demand k must be >= 1")
        if self.cap < 1:
            raise UsageError("cap must be >= 1")
        if self.universe is not None:
            for e in self.edges:
                if any(not 0 <= c < self.universe for c in e):
                    raise UsageError("edge mentions a copy outside the universe")

    @classmethod
    def multitransversal(cls, edges: Iterable[Iterable[int]], k: int = 1, universe: int | None = None) -> CoverProblem:
        return cls(tuple(frozenset(e) for e in edges), k, 1, universe)

    @classmethod
    def k_cover(cls, edges: Iterable[Iterable[int]], k: int = 1, universe: int | None = None) -> CoverProblem:
        return cls(tuple(frozenset(e) for e in edges), k, k, universe)

    @property
    def feasible(self) -> bool:
        return all(len(e) * self.cap >= self.k for e in self.edges)


@dataclass(frozen=True)
class SolveResult:
    optimum: int | None
    witness: tuple[int, ...] = ()
    nodes: int = 0
    lower_bound: int = 0

    @property
    def feasible(self) -> bool:
        return self.optimum is not None

    def to_json(self) -> dict:
        return {
            "optimum": self.optimum,
            "feasible": self.feasible,
            "witness": list(self.witness),
            "nodes": self.nodes,
        }


def family_problem(instance: Instance, family: int, k: int, mode: str = MULTITRANSVERSAL) -> CoverProblem:
    """Cover problem whose edges are the traces of one family."""
    if mode not in (MULTITRANSVERSAL, K_COVER):
        raise UsageError(f"unknown cap mode {mode!r}")
    edges = tuple(t.hits for t in family_traces(instance, family))
    cap = 1 if mode == MULTITRANSVERSAL else k
    return CoverProblem(edges, k, cap, instance.n_copies)


@dataclass
class _Classes:
    members: list[list[int]]      # copy ids per class, ascending
    edges_of: list[tuple[int, ...]]
    capacity: list[int]
    classes_of_edge: list[list[int]]


def _classes(problem: CoverProblem) -> _Classes:
    sig: dict[int, list[int]] = {}
    for ei, e in enumerate(problem.edges):
        for c in e:
            sig.setdefault(c, []).append(ei)
    groups: dict[tuple[int, ...], list[int]] = {}
    for c in sorted(sig):
        groups.setdefault(tuple(sig[c]), []).append(c)
    # classes ordered by their smallest copy id, so witnesses are deterministic
    ordered = sorted(groups.items(), key=lambda kv: kv[1][0])
    members = [m for _, m in ordered]
    edges_of = [s for s, _ in ordered]
    capacity = [len(m) * problem.cap for m in members]
    classes_of_edge: list[list[int]] = [[] for _ in problem.edges]
    for ci, es in enumerate(edges_of):
        for e in es:
            classes_of_edge[e].append(ci)
    return _Classes(members, edges_of, capacity, classes_of_edge)


def _expand(cls: _Classes, x: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for ci, units in enumerate(x):
        mem = cls.members[ci]
        out.extend(mem[i % len(mem)] for i in range(units))
    return tuple(sorted(out))


def _greedy_units(problem: CoverProblem, cls: _Classes) -> list[int] | None:
    k = problem.k
    resid = [k] * len(problem.edges)
    x = [0] * len(cls.members)
    while True:
        best, best_gain = -1, 0
        for ci, es in enumerate(cls.edges_of):
            if x[ci] >= cls.capacity[ci]:
                continue
            gain = sum(1 for e in es if resid[e] > 0)
            if gain > best_gain:
                best, best_gain = ci, gain
        if best_gain == 0:
            break
        x[best] += 1
        for e in cls.edges_of[best]:
            resid[e] -= 1
    if any(r > 0 for r in resid):
        return None
    # drop units that are not needed, largest classes last
    for ci in sorted(range(len(x)), key=lambda c: len(cls.edges_of[c])):
        while x[ci] and all(resid[e] < 0 for e in cls.edges_of[ci]):
            x[ci] -= 1
            for e in cls.edges_of[ci]:
                resid[e] += 1
    return x


def greedy_upper(problem: CoverProblem) -> tuple[int, ...] | None:
    """A valid (not necessarily optimal) cover, or ``None`` when infeasible."""
    if not problem.feasible:
        return None
    cls = _classes(problem)
    x = _greedy_units(problem, cls)
    return None if x is None else _expand(cls, x)


def _lower_bound(resid: list[int], open_classes: list[list[int]], cls: _Classes) -> int:
    active = [e for e, r in enumerate(resid) if r > 0]
    if not active:
        return 0
    best = max(resid[e] for e in active)
    # packing: edges with pairwise disjoint open classes need separate units
    used: set[int] = set()
    pack = 0
    for e in sorted(active, key=lambda e: (-resid[e], len(open_classes[e]))):
        oc = open_classes[e]
        if used.isdisjoint(oc):
            used.update(oc)
            pack += resid[e]
    best = max(best, pack)
    # one unit of class c lowers total residual by at most its active degree
    total = sum(resid[e] for e in active)
    max_deg = 0
    seen: set[int] = set()
    for e in active:
        for c in open_classes[e]:
            if c not in seen:
                seen.add(c)
                dc = sum(1 for f in cls.edges_of[c] if resid[f] > 0)
                max_deg = max(max_deg, dc)
    if max_deg:
        best = max(best, -(-total // max_deg))
    return best


def solve_exact(problem: CoverProblem, node_limit: int | None = None) -> SolveResult:
    """Minimum size of a cover with its witness (copy ids, sorted, with
    repetition in k-cover mode). ``optimum is None`` means infeasible."""
    if not problem.feasible:
        return SolveResult(None)
    if not problem.edges:
        return SolveResult(0)
    cls = _classes(problem)
    ncls = len(cls.members)
    k = problem.k

    x0 = _greedy_units(problem, cls)
    assert x0 is not None
    best_x = list(x0)
    best = sum(x0)

    resid = [k] * len(problem.edges)
    x = [0] * ncls
    frozen = 0  # bitmask of classes that may not grow in this subtree
    nodes = 0
    seen: dict[tuple[int, ...], list[int]] = {}

    def open_classes_of(e: int) -> list[int]:
        return [c for c in cls.classes_of_edge[e] if not frozen >> c & 1 and x[c] < cls.capacity[c]]

    root_lb = None

    def dfs(cost: int) -> None:
        nonlocal best, best_x, frozen, nodes, root_lb
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _NodeLimit
        key = tuple(x)
        prev = seen.get(key)
        if prev is not None:
            for mask in prev:
                if mask & frozen == mask:
                    return
            prev.append(frozen)
        else:
            seen[key] = [frozen]

        open_cls = [open_classes_of(e) for e in range(len(resid))]
        branch_edge = -1
        for e, r in enumerate(resid):
            if r <= 0:
                continue
            avail = sum(cls.capacity[c] - x[c] for c in open_cls[e])
            if avail < r:
                return
            if branch_edge < 0 or (len(open_cls[e]), -r) < (len(open_cls[branch_edge]), -resid[branch_edge]):
                branch_edge = e
        if branch_edge < 0:
            if cost < best:
                best, best_x = cost, list(x)
            return
        lb = _lower_bound(resid, open_cls, cls)
        if root_lb is None:
            root_lb = lb
        if cost + lb >= best:
            return

        cands = sorted(
            open_cls[branch_edge],
            key=lambda c: (-sum(1 for f in cls.edges_of[c] if resid[f] > 0), c),
        )
        saved = frozen
        for c in cands:
            x[c] += 1
            for f in cls.edges_of[c]:
                resid[f] -= 1
            dfs(cost + 1)
            x[c] -= 1
            for f in cls.edges_of[c]:
                resid[f] += 1
            frozen |= 1 << c
        frozen = saved

    try:
        dfs(0)
    except _NodeLimit:
        raise RuntimeError(f"node limit {node_limit} exceeded") from None
    witness = _expand(cls, best_x)
    return SolveResult(best, witness, nodes, root_lb or 0)


class _NodeLimit(Exception):
    pass


def verify_cover(problem: CoverProblem, witness: Iterable[int]) -> bool:
    """Certificate check, independent of the solver's data structures."""
    counts = Counter(witness)
    for copy, used in counts.items():
        if not isinstance(copy, int) or copy < 0:
            return False
        if problem.universe is not None and copy >= problem.universe:
            return False
        if used > problem.cap:
            return False
    for edge in problem.edges:
        if sum(counts[c] for c in edge) < problem.k:
            return False
    return True


def tau(instance: Instance, family: int, k: int = 1, mode: str = MULTITRANSVERSAL) -> SolveResult:
    """Exact tau'_k (or tau_k in k-cover mode) of one family's trace."""
    return solve_exact(family_problem(instance, family, k, mode))
