"""Command line entry point: ``lndkit run|paper-suite|fmt``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from typing import List, Optional, Sequence

from .report import PASS, Report
from .scenario import Scenario, ScenarioError, format_scenario, parse_scenario, run_check


def load_builtin(name: str) -> str:
    return resources.files("lndkit").joinpath("scenarios", name).read_text(encoding="utf-8")


def paper_suite_source(extend_m: Sequence[int] = ()) -> str:
    src = load_builtin("paper_suite.scn")
    extra = "".join(f"check construction phi_trivialization m={m}\n" for m in extend_m)
    return src + extra


def _worker(args) -> Report:
    src, path, degree_bound, index, pairs, terms = args
    s = parse_scenario(src, path, degree_bound)
    return run_check(s.checks[index], pairs, terms)


def run_scenario(s: Scenario, max_pairs: Optional[int] = None, max_terms: Optional[int] = None,
                 jobs: int = 1, degree_bound: int = 4) -> List[Report]:
    """One report per check, in declaration order."""
    if jobs <= 1 or len(s.checks) <= 1:
        return [run_check(c, max_pairs, max_terms) for c in s.checks]
    work = [(s.source, s.path, degree_bound, i, max_pairs, max_terms) for i in range(len(s.checks))]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_worker, work))


def paper_suite(max_pairs: Optional[int] = None, max_terms: Optional[int] = None, jobs: int = 1,
                extend_m: Sequence[int] = ()) -> List[Report]:
    s = parse_scenario(paper_suite_source(extend_m), "<paper-suite>")
    return run_scenario(s, max_pairs, max_terms, jobs)


def reports_json(reports: Sequence[Report], timing: bool = True) -> str:
    doc = {
        "reports": [r.to_dict(timing) for r in reports],
        "summary": {
            "total": len(reports),
            "passed": sum(r.status == PASS for r in reports),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lndkit", description="Exact verification of derivation scenarios.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-pairs", type=int, default=None, metavar="N",
                        help="cap on S-pairs per Groebner computation")
    common.add_argument("--budget-terms", type=int, default=None, metavar="N",
                        help="cap on terms in any intermediate polynomial")
    common.add_argument("--degree-bound", type=int, default=4, metavar="D",
                        help="default kernel search bound (default 4)")
    common.add_argument("--json", metavar="PATH", help="write machine-readable reports ('-' for stdout)")
    common.add_argument("--no-timing", action="store_true", help="omit timings from JSON output")
    common.add_argument("--jobs", type=int, default=1, metavar="K", help="run checks in K processes")
    common.add_argument("-q", "--quiet", action="store_true", help="only print failing checks")
    sub = p.add_subparsers(dest="verb", required=True)
    run = sub.add_parser("run", parents=[common], help="run a scenario file")
    run.add_argument("file")
    suite = sub.add_parser("paper-suite", parents=[common], help="run the built-in corpus")
    suite.add_argument("--extend-m", type=int, action="append", default=[], metavar="M",
                       help="also check the trivialization for this m (repeatable)")
    fmt = sub.add_parser("fmt", help="print a scenario in canonical form")
    fmt.add_argument("file")
    fmt.add_argument("--check", action="store_true", help="exit 1 if the file is not canonical")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(reports: Sequence[Report], args) -> int:
    for r in reports:
        if not (args.quiet and r.ok):
            print(r.summary())
    passed = sum(r.ok for r in reports)
    print(f"{passed}/{len(reports)} checks passed")
    if args.json:
        text = reports_json(reports, timing=not args.no_timing)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0 if passed == len(reports) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.verb == "fmt":
            src = _read(args.file)
            out = format_scenario(parse_scenario(src, args.file))
            if args.check:
                return 0 if out == src else 1
            sys.stdout.write(out)
            return 0
        if args.verb == "run":
            s = parse_scenario(_read(args.file), args.file, args.degree_bound)
        else:
            s = parse_scenario(paper_suite_source(args.extend_m), "<paper-suite>", args.degree_bound)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    reports = run_scenario(s, args.budget_pairs, args.budget_terms, args.jobs, args.degree_bound)
    return _emit(reports, args)


if __name__ == "__main__":
    sys.exit(main())
