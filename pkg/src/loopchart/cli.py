"""Command-line front end, the two theorem verifiers, and corpus enumeration."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from . import bisim, charts, lee, semantics
from .charts import Chart, EntryBodyLabeling, SchemaError
from .syntax import (
    Act, One, ParseError, Prod, Star, StarExpr, Sum, Zero, parse_star_expr,
    project, render,
)


@dataclass
class VerifyReport:
    expression: str
    property: str  # "p1" | "p2"
    passed: bool
    statistics: dict = field(default_factory=dict)
    failure: Optional[dict] = None

    def to_json(self) -> str:
        doc = {"expression": self.expression, "property": self.property,
               "passed": self.passed, "statistics": self.statistics}
        if self.failure is not None:
            doc["failure"] = self.failure
        return json.dumps(doc)


def verify_p1(e: StarExpr) -> VerifyReport:
    """The projection is a functional bisimulation from the reachable part
    of the induced chart of the 1-chart interpretation onto the chart
    interpretation."""
    chart, chart_exprs = semantics.chart_of_with_exprs(e)
    chart_ids = {expr: vid for vid, expr in chart_exprs.items()}
    onechart, stacked_exprs = semantics.onechart_of_with_exprs(e)
    induced = charts.reachable(charts.induced_of(onechart))
    stats = {
        "onechart_vertices": len(onechart.vertices),
        "one_transitions": len(onechart.one_transitions),
        "induced_vertices": len(induced.vertices),
        "chart_vertices": len(chart.vertices),
    }
    mapping: dict[int, int] = {}
    for vid in induced.vertices:
        image = project(stacked_exprs[vid])
        if image not in chart_ids:
            return VerifyReport(render(e), "p1", False, stats, {
                "kind": "projection-misses-chart",
                "vertex": vid, "projected": render(image)})
        mapping[vid] = chart_ids[image]
    report = bisim.check_functional_bisim(induced, chart, mapping)
    if not report.ok:
        return VerifyReport(render(e), "p1", False, stats, {
            "kind": "not-a-functional-bisimulation",
            "clause": report.clause, "pair": report.pair})
    return VerifyReport(render(e), "p1", True, stats)


def verify_p2(e: StarExpr) -> VerifyReport:
    """The marked 1-chart interpretation is a layered entry/body witness,
    per both validators."""
    try:
        labeling = semantics.labeled_onechart_of(e)
    except semantics.AmbiguousMarking as err:
        return VerifyReport(render(e), "p2", False, {},
                            {"kind": "ambiguous-marking", "detail": str(err)})
    direct = lee.validate_llee(labeling)
    alt = lee.validate_llee_alt(labeling)
    stats = {
        "onechart_vertices": len(labeling.chart.vertices),
        "one_transitions": len(labeling.chart.one_transitions),
        "entries": len(lee.entries_of(labeling)),
    }
    if not (direct.valid and alt.valid):
        return VerifyReport(render(e), "p2", False, stats, {
            "kind": "witness-invalid",
            "direct": direct.violations, "alt": alt.violations})
    return VerifyReport(render(e), "p2", True, stats)


# ---------------------------------------------------------------------------
# corpus enumeration

def enumerate_exprs(alphabet: Sequence[str], max_size: int) -> Iterator[StarExpr]:
    """All star expressions with at most max_size AST nodes, smallest first;
    deterministic order within a size."""
    assert max_size >= 1
    by_size: list[list[StarExpr]] = [[]]
    atoms: list[StarExpr] = [Zero(), One()] + [Act(a) for a in sorted(alphabet)]
    for size in range(1, max_size + 1):
        bucket: list[StarExpr] = []
        if size == 1:
            bucket.extend(atoms)
        else:
            bucket.extend(Star(e) for e in by_size[size - 1])
            for left_size in range(1, size - 1):
                for left in by_size[left_size]:
                    for right in by_size[size - 1 - left_size]:
                        bucket.append(Sum(left, right))
            for left_size in range(1, size - 1):
                for left in by_size[left_size]:
                    for right in by_size[size - 1 - left_size]:
                        bucket.append(Prod(left, right))
        by_size.append(bucket)
        yield from bucket


def sample_exprs(alphabet: Sequence[str], count: int, max_size: int,
                 seed: int) -> list[StarExpr]:
    """`count` seeded random expressions with size uniform in 1..max_size."""
    rng = random.Random(seed)
    atoms = [Zero(), One()] + [Act(a) for a in sorted(alphabet)]

    def gen(size: int) -> StarExpr:
        if size == 1:
            return rng.choice(atoms)
        ops = ["star"] if size == 2 else ["star", "sum", "prod"]
        op = rng.choice(ops)
        if op == "star":
            return Star(gen(size - 1))
        left_size = rng.randint(1, size - 2)
        left, right = gen(left_size), gen(size - 1 - left_size)
        return Sum(left, right) if op == "sum" else Prod(left, right)

    return [gen(rng.randint(1, max_size)) for _ in range(count)]


DEFAULT_ALPHABET = ("a", "b")
DEFAULT_MAX_SIZE = 6
DEFAULT_RANDOM_COUNT = 500
DEFAULT_RANDOM_MAX_SIZE = 12
DEFAULT_SEED = 1729


def default_corpus(alphabet: Sequence[str] = DEFAULT_ALPHABET,
                   max_size: int = DEFAULT_MAX_SIZE,
                   random_count: int = DEFAULT_RANDOM_COUNT,
                   random_max_size: int = DEFAULT_RANDOM_MAX_SIZE,
                   seed: int = DEFAULT_SEED) -> list[StarExpr]:
    corpus = list(enumerate_exprs(alphabet, max_size))
    corpus.extend(sample_exprs(alphabet, random_count, random_max_size, seed))
    return corpus


# ---------------------------------------------------------------------------
# command-line interface

def _load_chart_arg(text: str) -> Union[Chart, EntryBodyLabeling]:
    """FILE (chart JSON) or EXPR; files let non-interpretable charts in."""
    if text.endswith(".json") or os.path.exists(text):
        with open(text, "r", encoding="utf-8") as handle:
            return charts.from_json(handle.read())
    return semantics.chart_of(parse_star_expr(text))


def _strip(obj: Union[Chart, EntryBodyLabeling]) -> Chart:
    return obj.chart if isinstance(obj, EntryBodyLabeling) else obj


def _emit(obj, fmt: str, text_line: str) -> None:
    if fmt == "json":
        print(charts.to_json(obj))
    elif fmt == "dot":
        print(charts.to_dot(obj))
    else:
        print(text_line)


def _chart_summary(c: Chart) -> str:
    ones = len(c.one_transitions)
    extra = f", {ones} empty" if ones else ""
    return (f"{len(c.vertices)} vertices, {len(c.transitions)} transitions"
            f"{extra}, {len(c.terminating)} terminating")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopchart",
        description="Process semantics of star expressions: charts, "
                    "1-charts, loop elimination, and witness checking.")
    parser.add_argument("--format", choices=["json", "dot", "text"],
                        default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("chart", "onechart", "induced"):
        p = sub.add_parser(name)
        p.add_argument("expr")
    sub.add_parser("collapse").add_argument("input", metavar="EXPR|FILE")
    sub.add_parser("lee").add_argument("input", metavar="EXPR|FILE")
    sub.add_parser("llee-check").add_argument("file")
    p = sub.add_parser("bisim")
    p.add_argument("left", metavar="A")
    p.add_argument("right", metavar="B")
    p = sub.add_parser("verify")
    p.add_argument("expr")
    p.add_argument("--property", choices=["p1", "p2", "all"], default="all")
    p = sub.add_parser("corpus")
    p.add_argument("--alphabet", default=",".join(DEFAULT_ALPHABET))
    p.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE)
    p.add_argument("--random", type=int, default=DEFAULT_RANDOM_COUNT)
    p.add_argument("--random-max-size", type=int, default=DEFAULT_RANDOM_MAX_SIZE)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--property", choices=["p1", "p2", "all"], default="all")
    return parser


def _run_verify(e: StarExpr, which: str, fmt: str) -> int:
    reports = []
    if which in ("p1", "all"):
        reports.append(verify_p1(e))
    if which in ("p2", "all"):
        reports.append(verify_p2(e))
    for report in reports:
        if fmt == "json":
            print(report.to_json())
        else:
            print(f"{report.property.upper()}: "
                  f"{'pass' if report.passed else 'fail'}")
    return 0 if all(r.passed for r in reports) else 1


def run_cli(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    fmt = args.format
    try:
        if args.command == "chart":
            c = semantics.chart_of(parse_star_expr(args.expr))
            _emit(c, fmt, f"chart: {_chart_summary(c)}")
        elif args.command == "onechart":
            labeling = semantics.labeled_onechart_of(parse_star_expr(args.expr))
            _emit(labeling, fmt, f"1-chart: {_chart_summary(labeling.chart)}")
        elif args.command == "induced":
            c = charts.induced_of(
                semantics.onechart_of(parse_star_expr(args.expr)))
            _emit(c, fmt, f"induced chart: {_chart_summary(c)}")
        elif args.command == "collapse":
            collapsed, _ = bisim.collapse(_strip(_load_chart_arg(args.input)))
            _emit(collapsed, fmt, f"collapse: {_chart_summary(collapsed)}")
        elif args.command == "lee":
            result = lee.decide_lee(_strip(_load_chart_arg(args.input)))
            if fmt == "json":
                print(json.dumps({
                    "holds": result.holds,
                    "trace": (json.loads(result.trace.to_json())
                              if result.trace else None)}))
            else:
                print("LEE: holds" if result.holds else "LEE: fails")
            return 0 if result.holds else 1
        elif args.command == "llee-check":
            loaded = _load_chart_arg(args.file)
            if not isinstance(loaded, EntryBodyLabeling):
                print("error: file carries no markings", file=sys.stderr)
                return 2
            direct = lee.validate_llee(loaded)
            alt = lee.validate_llee_alt(loaded)
            valid = direct.valid and alt.valid
            if fmt == "json":
                print(json.dumps({"valid": valid,
                                  "direct": direct.violations,
                                  "alt": alt.violations}))
            else:
                print("LLEE-witness: valid" if valid else "LLEE-witness: invalid")
            return 0 if valid else 1
        elif args.command == "bisim":
            left = _strip(_load_chart_arg(args.left))
            right = _strip(_load_chart_arg(args.right))
            relation = bisim.bisimilar(left, right)
            if fmt == "json":
                print(json.dumps({
                    "bisimilar": relation is not None,
                    "relation": sorted(map(list, relation)) if relation else None}))
            else:
                print("bisimilar" if relation is not None else "not bisimilar")
            return 0 if relation is not None else 1
        elif args.command == "verify":
            return _run_verify(parse_star_expr(args.expr), args.property, fmt)
        elif args.command == "corpus":
            alphabet = [x for x in args.alphabet.split(",") if x]
            corpus = default_corpus(alphabet, args.max_size, args.random,
                                    args.random_max_size, args.seed)
            failures = 0
            for e in corpus:
                reports = []
                if args.property in ("p1", "all"):
                    reports.append(verify_p1(e))
                if args.property in ("p2", "all"):
                    reports.append(verify_p2(e))
                for report in reports:
                    if not report.passed:
                        failures += 1
                        if fmt == "json":
                            print(report.to_json())
                        else:
                            print(f"fail {report.property}: {report.expression}")
            summary = {"expressions": len(corpus), "failures": failures}
            print(json.dumps(summary) if fmt == "json"
                  else f"corpus: {len(corpus)} expressions, {failures} failures")
            return 0 if failures == 0 else 1
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 2
    except lee.SearchBudgetExceeded as err:
        print(f"search budget exceeded: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
