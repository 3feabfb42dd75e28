"""Command line front end.

Exit codes: 0 the property holds (or the command succeeded), 1 it fails,
2 the enumeration budget ran out, 3 malformed input or bad arguments.

Every report embeds its instance and parameters, so ``halman verify
report.json`` can recompute it and re-validate each certificate.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import gallery
from .errors import HalmanError, HypothesisViolated, MalformedInput, UsageError
from .explore import ALIASES, COLORFUL, PROBLEMS, explore
from .geometry import Instance
from .io import dumps, instance_from_json, instance_to_json, load_instance
from .reduction import corollary_pipeline, reduce
from .solver import K_COVER, MULTITRANSVERSAL, family_problem, solve_exact, verify_cover
from .traces import (
    DEFAULT_BUDGET,
    Verdict,
    check_colorful_n_intersecting,
    check_pq_property,
    check_subfamily_n_intersecting,
    family_masks,
    family_traces,
    transversal_count,
)
from .witness import witness_colorful, witness_monochromatic

__all__ = ["main", "build_parser", "execute", "validate_certificate", "verify_report"]

EXIT_OK, EXIT_FAILS, EXIT_BUDGET, EXIT_MALFORMED = 0, 1, 2, 3
REPORT_VERSION = "halman-report/1"

_VERDICT_CODE = {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_FAILS, Verdict.BUDGET_EXCEEDED: EXIT_BUDGET}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


# certificates ---------------------------------------------------------------

def _cover_cert(family: int, k: int, mode: str, copies, bound=None) -> dict:
    return {"kind": "multitransversal" if mode == MULTITRANSVERSAL else "k-cover",
            "family": family, "k": k, "mode": mode, "copies": list(copies), "bound": bound}


def _subset_count(inst: Instance, family: int, boxes) -> int:
    masks = family_masks(inst)[family]
    m = (1 << inst.n_copies) - 1
    for b in boxes:
        m &= masks[b]
    return m.bit_count()


def validate_certificate(inst: Instance, cert: dict) -> bool:
    """Check one report certificate against the instance from scratch."""
    kind = cert.get("kind")
    if kind in ("multitransversal", "k-cover"):
        prob = family_problem(inst, cert["family"], cert["k"], cert["mode"])
        bound = cert.get("bound")
        return verify_cover(prob, cert["copies"]) and (bound is None or len(cert["copies"]) <= bound)
    if kind == "violation":
        c = transversal_count(inst, cert["transversal"])
        return c == cert["count"] and c < cert["n"]
    if kind == "subfamily-violation":
        boxes = cert["boxes"]
        c = _subset_count(inst, cert["family"], boxes)
        return c == cert["count"] and c < cert["n"] and len(set(boxes)) == len(boxes)
    if kind == "pq-violation":
        traces = family_traces(inst, cert["family"])
        sub = [traces[b] for b in cert["boxes"]]
        if "empty-trace" in cert.get("flags", []):
            return len(sub[0]) == 0
        rep = check_pq_property(sub, len(sub), min(cert["q"], len(sub)))
        return rep.verdict is Verdict.FAILS
    return False


# commands -------------------------------------------------------------------

def _check(inst: Instance, p: dict) -> tuple[dict, int]:
    mode, budget = p["mode"], p["budget"]
    certs = []
    if mode == "colorful":
        rep = check_colorful_n_intersecting(inst, p["n"], budget)
        if rep.verdict is Verdict.FAILS:
            certs.append({"kind": "violation", "transversal": list(rep.witness),
                          "count": rep.detail["count"], "n": p["n"]})
    elif mode == "subfamily":
        rep = check_subfamily_n_intersecting(family_traces(inst, p["family"]), p["k"], p["n"], budget, p["at_most"])
        if rep.verdict is Verdict.FAILS:
            certs.append({"kind": "subfamily-violation", "family": p["family"], "boxes": list(rep.witness),
                          "count": rep.detail["count"], "n": p["n"]})
    else:
        rep = check_pq_property(family_traces(inst, p["family"]), p["p"], p["q"], budget)
        if rep.verdict is Verdict.FAILS:
            certs.append({"kind": "pq-violation", "family": p["family"], "boxes": list(rep.witness),
                          "q": p["q"], "flags": list(rep.flags)})
    verdict = rep.to_json()
    verdict["detail"] = {k: v for k, v in verdict.get("detail", {}).items() if k != "count_histogram"}
    if not verdict["detail"]:
        del verdict["detail"]
    return {"verdicts": [verdict], "certificates": certs, "optima": []}, _VERDICT_CODE[rep.verdict]


def _families(inst: Instance, sel) -> list[int]:
    if sel in (None, "all"):
        return list(range(len(inst.families)))
    j = int(sel)
    if not 0 <= j < len(inst.families):
        raise UsageError(f"family {j} out of range")
    return [j]


def _solve(inst: Instance, p: dict) -> tuple[dict, int]:
    optima, certs = [], []
    for j in _families(inst, p["family"]):
        res = solve_exact(family_problem(inst, j, p["k"], p["mode"]))
        optima.append({"family": j, "k": p["k"], "mode": p["mode"], "optimum": res.optimum, "nodes": res.nodes})
        if res.feasible:
            certs.append(_cover_cert(j, p["k"], p["mode"], res.witness))
    return {"verdicts": [], "certificates": certs, "optima": optima}, EXIT_OK


def _witness(inst: Instance, p: dict) -> tuple[dict, int]:
    n = p["n"]
    try:
        if p["variant"] == "colorful":
            cert = witness_colorful(inst, n)
        else:
            f = int(p["family"] or 0)
            cert = witness_monochromatic(inst.families[f], inst.points, n, inst.dimension)
            cert = dataclasses.replace(cert, family=f)
    except HypothesisViolated as exc:
        if p["variant"] == "colorful":
            c = {"kind": "violation", "transversal": list(exc.transversal), "count": exc.count, "n": n}
        else:
            f = int(p["family"] or 0)
            c = {"kind": "subfamily-violation", "family": f, "boxes": list(exc.transversal),
                 "count": _subset_count(inst, f, exc.transversal), "n": n}
        return {"verdicts": [{"verdict": "fails", "error": str(exc)}], "certificates": [c], "optima": []}, EXIT_FAILS
    out = cert.to_json()
    c = _cover_cert(cert.family, n, MULTITRANSVERSAL, cert.copies, cert.bound)
    return {"verdicts": [{"verdict": "holds"}], "certificates": [c], "optima": [], "witness": out}, EXIT_OK


def _reduce(inst: Instance, p: dict) -> tuple[dict, int]:
    n, budget = p["n"], p["budget"]
    if p["variant"] == "corollary":
        try:
            res = corollary_pipeline(inst.families[0], inst.points, inst.dimension, p["k"], budget)
        except HypothesisViolated as exc:
            c = {"kind": "subfamily-violation", "family": 0, "boxes": list(exc.transversal),
                 "count": _subset_count(inst, 0, exc.transversal), "n": 1}
            return {"verdicts": [{"verdict": "fails", "error": str(exc)}], "certificates": [c], "optima": []}, EXIT_FAILS
        return {"verdicts": [{"verdict": "holds"}], "certificates": [], "optima": [], "corollary": res}, EXIT_OK
    try:
        reduced, red = reduce(inst, n, p["t"], budget=budget)
    except HypothesisViolated as exc:
        c = {"kind": "violation", "transversal": list(exc.transversal), "count": exc.count, "n": n}
        return {"verdicts": [{"verdict": "fails", "error": str(exc)}], "certificates": [c], "optima": []}, EXIT_FAILS
    optima, certs, verdicts = [], [], []
    for new, j in enumerate(red.surviving):
        before = solve_exact(family_problem(inst, j, n))
        after = solve_exact(family_problem(reduced, new, n))
        optima.append({"family": j, "reduced_family": new, "before": before.optimum, "after": after.optimum})
        if before.feasible:
            certs.append(_cover_cert(j, n, MULTITRANSVERSAL, before.witness))
        if after.feasible:
            lifted = red.lift_copies(inst, reduced, after.witness)
            certs.append(_cover_cert(j, n, MULTITRANSVERSAL, lifted))
        ok = before.feasible and (not after.feasible or before.optimum <= after.optimum)
        verdicts.append({"verdict": "holds" if ok else "fails", "family": j})
    code = EXIT_OK if all(v["verdict"] == "holds" for v in verdicts) else EXIT_FAILS
    body = {"verdicts": verdicts, "certificates": certs, "optima": optima,
            "reduction": red.to_json(), "reduced_instance": instance_to_json(reduced)}
    return body, code


def _explore(p: dict) -> tuple[dict, int]:
    res = explore(p["problem"], p["trials"], p["seed"], p["d"], p["n"])
    certs = []
    for cand in res["candidates"]:
        k = res["n"] if res["problem"] == COLORFUL else 1
        for r in cand["certificates"]:
            certs.append({**_cover_cert(r["family"], k, MULTITRANSVERSAL, r["witness"]), "trial": cand["trial"]})
    return {"verdicts": [], "certificates": certs, "optima": [], "explore": res}, EXIT_OK


def execute(command: str, params: dict, inst: Instance | None) -> tuple[dict, int]:
    """Run one command; returns the reproducible part of the report and the exit code."""
    if command == "check":
        return _check(inst, params)
    if command == "solve":
        return _solve(inst, params)
    if command == "witness":
        return _witness(inst, params)
    if command == "reduce":
        return _reduce(inst, params)
    if command == "explore":
        return _explore(params)
    raise UsageError(f"command {command!r} has no report")


def _certificate_instance(report: dict, cert: dict) -> Instance:
    if "trial" in cert:
        cand = next(c for c in report["explore"]["candidates"] if c["trial"] == cert["trial"])
        return instance_from_json(cand["instance"])
    return instance_from_json(report["instance"])


def verify_report(report: dict) -> list[str]:
    """Problems found when re-running a report; empty means it reproduces."""
    if not isinstance(report, dict) or report.get("version") != REPORT_VERSION:
        raise MalformedInput("not a report file")
    try:
        command, params = report["command"], report["params"]
        inst = instance_from_json(report["instance"]) if report.get("instance") is not None else None
    except KeyError as exc:
        raise MalformedInput(f"report lacks {exc}") from None
    problems = []
    for i, cert in enumerate(report.get("certificates", [])):
        if not validate_certificate(_certificate_instance(report, cert), cert):
            problems.append(f"certificate {i} does not validate")
    body, code = execute(command, params, inst)
    body = json.loads(json.dumps(body))
    for key, value in body.items():
        if report.get(key) != value:
            problems.append(f"field {key!r} differs on re-run")
    if report.get("exit_code") != code:
        problems.append(f"exit code {report.get('exit_code')} differs from re-run {code}")
    return problems


# argument handling ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="halman", description="Exact piercing and multitransversal tools for boxes on point sets.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subsets/transversals to enumerate")
        p.add_argument("--out", help="write the JSON report here (default: stdout)")

    p = sub.add_parser("check", help="test an intersection hypothesis")
    common(p)
    p.add_argument("--mode", choices=("colorful", "subfamily", "pq"), default="colorful")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--family", type=int, default=0)
    p.add_argument("--at-most", action="store_true", help="subfamily mode: all sizes up to k")

    p = sub.add_parser("solve", help="exact multitransversal / k-cover numbers")
    common(p)
    p.add_argument("--family", default="all", help="family index or 'all'")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--mode", choices=(MULTITRANSVERSAL, K_COVER), default=MULTITRANSVERSAL)

    p = sub.add_parser("witness", help="certified small multitransversal")
    common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--variant", choices=("colorful", "mono"), default="colorful")
    p.add_argument("--family", type=int, default=None, help="mono variant: which family (default 0)")

    p = sub.add_parser("reduce", help="dimension reduction")
    common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="corollary variant: subfamily size is 2d-k")
    p.add_argument("--variant", choices=("colorful", "corollary"), default="colorful")
    p.add_argument("--reduced", help="also write the reduced instance here")

    p = sub.add_parser("generate", help="write a generated instance")
    p.add_argument("kind", choices=("colorful-lower", "mono-lower", "pq-lower", "random-colorful", "random-mono"))
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--N", type=int, default=None, help="colorful-lower: grid size")
    p.add_argument("--delta", default="1/2", help="colorful-lower: rational offset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--structured", action="store_true")
    p.add_argument("--size", type=int, default=None, help="random-mono: number of boxes")
    p.add_argument("--k", type=int, default=None, help="random-mono: subfamily size")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("explore", help="random search for counterexamples")
    p.add_argument("--problem", choices=PROBLEMS + tuple(ALIASES), required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="re-run a report and re-validate its certificates")
    p.add_argument("report")
    return ap


def _params(args) -> dict:
    skip = {"command", "instance", "out", "reduced"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _generate(args) -> int:
    if args.kind == "colorful-lower":
        inst = gallery.gen_colorful_lower(args.d, args.n, args.N, Fraction(args.delta))
    elif args.kind == "mono-lower":
        inst = gallery.gen_mono_lower(args.d, args.n)
    elif args.kind == "pq-lower":
        inst = gallery.gen_pq_lower(args.d)
    elif args.kind == "random-colorful":
        inst = gallery.gen_random_colorful(args.d, args.n, seed=args.seed, structured=args.structured)
    else:
        inst = gallery.gen_random_mono(args.d, args.n, size=args.size, seed=args.seed, k=args.k)
    _emit(dumps(inst), args.out)
    return EXIT_OK


def _run(args) -> int:
    if args.command == "generate":
        return _generate(args)
    if args.command == "verify":
        try:
            report = json.loads(Path(args.report).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read report: {exc}") from None
        problems = verify_report(report)
        for msg in problems:
            print(msg, file=sys.stderr)
        print("reproduced" if not problems else f"{len(problems)} problem(s)")
        return EXIT_OK if not problems else EXIT_FAILS

    if args.command == "reduce" and args.variant == "corollary" and args.k is None:
        raise UsageError("the corollary variant needs --k")
    inst = None if args.command == "explore" else load_instance(args.instance)
    params = _params(args)
    start = time.perf_counter()
    body, code = execute(args.command, params, inst)
    elapsed = time.perf_counter() - start
    report = {
        "version": REPORT_VERSION,
        "command": args.command,
        "params": params,
        "seed": params.get("seed"),
        "instance": None if inst is None else instance_to_json(inst),
        **body,
        "exit_code": code,
        "timing": {"seconds": round(elapsed, 6)},
    }
    if args.command == "reduce" and args.reduced and "reduced_instance" in body:
        Path(args.reduced).write_text(dumps(instance_from_json(body["reduced_instance"])))
    _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", args.out)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (MalformedInput, UsageError) as exc:
        print(f"halman: error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except HalmanError as exc:
        print(f"halman: error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
