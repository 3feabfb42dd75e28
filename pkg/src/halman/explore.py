"""Randomized search for counterexamples to two conjectured bounds.

``colorful-2n``: colorful ``n``-intersecting families ``B_1..B_{2d-1}``; is some
family's ``tau'_n`` at most ``2n``? Each trial records the smallest
``tau'_n`` over the families.

``planar-pairwise``: one planar family whose traces are nonempty and pairwise
intersecting; is ``tau`` at most 3?

Nothing here proves anything. Trials run in parallel when
``HALMAN_WORKERS`` is above 1; results are merged in trial order, so the
report does not depend on the worker count. The short labels ``P4.1`` and
``P4.2`` are accepted as aliases of the two problem names.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor

from .errors import UsageError
from .gallery import gen_random_colorful, gen_random_mono
from .io import instance_to_json
from .solver import family_problem, solve_exact, verify_cover
from .traces import check_colorful_n_intersecting, check_subfamily_n_intersecting, family_traces

__all__ = ["COLORFUL", "PLANAR", "PROBLEMS", "ALIASES", "canonical_problem", "WORKERS_ENV", "worker_count", "run_trial", "explore"]

COLORFUL = "colorful-2n"
PLANAR = "planar-pairwise"
PROBLEMS = (COLORFUL, PLANAR)
ALIASES = {"P4.1": COLORFUL, "P4.2": PLANAR}
WORKERS_ENV = "HALMAN_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, w)


def canonical_problem(problem: str) -> str:
    name = ALIASES.get(problem, problem)
    if name not in PROBLEMS:
        raise UsageError(f"unknown problem {problem!r}; choose from {PROBLEMS + tuple(ALIASES)}")
    return name


def conjectured_bound(problem: str, n: int) -> int:
    return 2 * n if canonical_problem(problem) == COLORFUL else 3


def _trial_seed(problem: str, seed: int, i: int) -> str:
    return f"{problem}:{seed}:{i}"


def run_trial(problem: str, seed: int, i: int, d: int, n: int) -> dict:
    problem = canonical_problem(problem)
    rng = random.Random(_trial_seed(problem, seed, i))
    if problem == COLORFUL:
        inst = gen_random_colorful(d, n, seed=rng.randrange(2**32), structured=rng.random() < 0.5)
        rep = check_colorful_n_intersecting(inst, n)
        assert rep.holds, "generator broke its own hypothesis"
        k = n
        families = range(len(inst.families))
    else:
        size = rng.randint(3, 9)
        inst = gen_random_mono(2, 1, size=size, seed=rng.randrange(2**32), k=2)
        rep = check_subfamily_n_intersecting(family_traces(inst, 0), 2, 1, at_most=True)
        assert rep.holds, "generator broke its own hypothesis"
        k = 1
        families = range(1)
    results = []
    for j in families:
        prob = family_problem(inst, j, k)
        res = solve_exact(prob)
        assert res.optimum is not None and verify_cover(prob, res.witness)
        results.append({"family": j, **res.to_json()})
    value = min(r["optimum"] for r in results)
    out = {"trial": i, "value": value}
    if value > conjectured_bound(problem, n):
        out["instance"] = instance_to_json(inst)
        out["certificates"] = results
    return out


def _run_star(args):
    return run_trial(*args)


def explore(problem: str, trials: int, seed: int = 0, d: int = 2, n: int = 1, workers: int | None = None) -> dict:
    """Run ``trials`` random trials and summarize them.

    The report lists the largest value seen, a histogram of values and
    every instance above the conjectured bound, with its solver
    certificates.
    """
    problem = canonical_problem(problem)
    if trials < 0:
        raise UsageError("trials must be >= 0")
    if problem == PLANAR:
        d, n = 2, 1
    elif d < 2 or n < 1:
        raise UsageError(f"{COLORFUL} needs d >= 2 and n >= 1")
    workers = worker_count() if workers is None else workers
    jobs = [(problem, seed, i, d, n) for i in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_star, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        rows = [_run_star(j) for j in jobs]

    hist: dict[int, int] = {}
    for r in rows:
        hist[r["value"]] = hist.get(r["value"], 0) + 1
    return {
        "problem": problem,
        "d": d,
        "n": n,
        "trials": trials,
        "seed": seed,
        "measure": "min over families of tau'_n" if problem == COLORFUL else "tau",
        "conjectured_bound": conjectured_bound(problem, n),
        "max_observed": max(hist) if hist else None,
        "histogram": {str(v): hist[v] for v in sorted(hist)},
        "candidates": [r for r in rows if "instance" in r],
    }
