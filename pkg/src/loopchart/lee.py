"""Loop charts, loop-subchart elimination, the LEE decision, and
layered entry/body witness validation (two independent validators)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .charts import (
    EMPTY, Chart, EntryBodyLabeling, Transition, UnknownVertex, canonical_key,
    find_cycle, has_infinite_path, reachable,
)

DEFAULT_BUDGET = 200_000
BUDGET_ENV = "LOOPCHART_BUDGET"


class EmptyEntrySet(Exception):
    pass


class NotALoopSubchart(Exception):
    def __init__(self, report: "LoopReport"):
        super().__init__("; ".join(v["condition"] for v in report.violations))
        self.report = report


class TraceReplayError(Exception):
    def __init__(self, step_index: int, reason: str):
        super().__init__(f"step {step_index}: {reason}")
        self.step_index = step_index


class SearchBudgetExceeded(Exception):
    pass


@dataclass
class LoopReport:
    ok: bool
    violations: list[dict] = field(default_factory=list)


@dataclass
class EliminationStep:
    vertex: int
    entry_set: frozenset[Transition]

    def __post_init__(self):
        if not self.entry_set:
            raise EmptyEntrySet(self.vertex)
        assert all(t[0] == self.vertex for t in self.entry_set)


@dataclass
class EliminationTrace:
    steps: list[EliminationStep]

    def to_json(self) -> str:
        return json.dumps([
            {"vertex": s.vertex, "entries": sorted(list(t) for t in s.entry_set)}
            for s in self.steps
        ])


@dataclass
class LeeResult:
    holds: bool
    trace: Optional[EliminationTrace] = None


@dataclass
class WitnessReport:
    valid: bool
    violations: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"valid": self.valid, "violations": self.violations})


# ---------------------------------------------------------------------------
# loop charts

def check_loop_chart(c: Chart) -> LoopReport:
    """L1: some infinite path from the start; L2: every infinite path
    returns to the start; L3: termination only at the start."""
    r = reachable(c)
    violations = []
    if not has_infinite_path(r):
        violations.append({"condition": "L1",
                           "detail": "no cycle reachable from the start"})
    cycle = find_cycle(r, r.vertices - {r.start})
    if cycle is not None:
        violations.append({"condition": "L2", "cycle": cycle,
                           "detail": "cycle avoiding the start vertex"})
    for v in sorted(r.terminating - {r.start}):
        violations.append({"condition": "L3", "vertex": v,
                           "detail": "non-start vertex permits termination"})
    return LoopReport(not violations, violations)


def loop_subchart_generated(c: Chart, v: int,
                            entry_set: frozenset[Transition]) -> Chart:
    """The subchart traced by paths that begin with an entry-set transition
    from v and continue until v is first reached again.  Not guaranteed to
    be a loop chart."""
    if v not in c.vertices:
        raise UnknownVertex(v)
    if not entry_set:
        raise EmptyEntrySet(v)
    for t in entry_set:
        if t not in c.transitions or t[0] != v:
            raise UnknownVertex(t)
    vertices = {v}
    transitions = set(entry_set)
    queue = [w for _, _, w in entry_set if w != v]
    vertices.update(w for _, _, w in entry_set)
    seen = set(queue)
    while queue:
        x = queue.pop()
        for t in c.out(x):
            _, _, w = t
            transitions.add(t)
            vertices.add(w)
            if w != v and w not in seen:
                seen.add(w)
                queue.append(w)
    return Chart(
        alphabet=c.alphabet,
        start=v,
        vertices=frozenset(vertices),
        transitions=frozenset(transitions),
        terminating=c.terminating & vertices,
        annotations={x: a for x, a in c.annotations.items() if x in vertices},
    )


def eliminate_loop(c: Chart, v: int, entry_set: frozenset[Transition]) -> Chart:
    """Remove the entry transitions, then garbage-collect from the start."""
    report = check_loop_chart(loop_subchart_generated(c, v, entry_set))
    if not report.ok:
        raise NotALoopSubchart(report)
    return reachable(Chart(
        alphabet=c.alphabet,
        start=c.start,
        vertices=c.vertices,
        transitions=c.transitions - entry_set,
        terminating=c.terminating,
        annotations=dict(c.annotations),
    ))


# ---------------------------------------------------------------------------
# the LEE decision

def _budget_default() -> int:
    value = os.environ.get(BUDGET_ENV)
    return int(value) if value else DEFAULT_BUDGET


def decide_lee(c: Chart, budget: Optional[int] = None) -> LeeResult:
    """Complete backtracking search for an elimination sequence ending in a
    chart without infinite paths.  Empty-step labels, if present, are
    treated as ordinary labels."""
    if budget is None:
        budget = _budget_default()
    failed: set = set()
    nodes = 0

    def search(current: Chart) -> Optional[list[EliminationStep]]:
        nonlocal nodes
        if not has_infinite_path(current):
            return []
        key = canonical_key(current)
        if key in failed:
            return None
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"more than {budget} search nodes")
        for v in sorted(current.vertices):
            outs = current.out(v)
            # largest candidate entry sets first
            for size in range(len(outs), 0, -1):
                for subset in combinations(outs, size):
                    entry_set = frozenset(subset)
                    sub = loop_subchart_generated(current, v, entry_set)
                    if not check_loop_chart(sub).ok:
                        continue
                    rest = search(eliminate_loop(current, v, entry_set))
                    if rest is not None:
                        return [EliminationStep(v, entry_set)] + rest
        failed.add(key)
        return None

    steps = search(reachable(c))
    if steps is None:
        return LeeResult(False)
    return LeeResult(True, EliminationTrace(steps))


def recording_labeling(c: Chart, trace: EliminationTrace) -> EntryBodyLabeling:
    """Replay the trace on c; transitions removed at step k are marked k,
    everything else is body."""
    marking = {t: 0 for t in c.transitions}
    current = reachable(c)
    for index, step in enumerate(trace.steps, start=1):
        missing = step.entry_set - current.transitions
        if missing:
            raise TraceReplayError(index, f"transitions no longer present: {sorted(missing)}")
        try:
            current = eliminate_loop(current, step.vertex, step.entry_set)
        except NotALoopSubchart as err:
            raise TraceReplayError(index, str(err)) from err
        for t in step.entry_set:
            marking[t] = index
    return EntryBodyLabeling(c, marking)


# ---------------------------------------------------------------------------
# witness validation

def entries_of(labeling: EntryBodyLabeling) -> set[tuple[int, int]]:
    """All (vertex, level) with an entry transition of that level departing."""
    return {(t[0], m) for t, m in labeling.marking.items() if m >= 1}


def _entry_loop_chart(labeling: EntryBodyLabeling, v: int, level: int) -> Chart:
    """The structure generated by (v, level): a level entry from v, then body
    transitions only, halting when v is revisited."""
    c = labeling.chart
    entry_set = frozenset(t for t, m in labeling.marking.items()
                          if t[0] == v and m == level)
    body_out: dict[int, list[Transition]] = {}
    for t, m in labeling.marking.items():
        if m == 0:
            body_out.setdefault(t[0], []).append(t)
    vertices = {v}
    transitions = set(entry_set)
    vertices.update(w for _, _, w in entry_set)
    queue = [w for _, _, w in entry_set if w != v]
    seen = set(queue)
    while queue:
        x = queue.pop()
        for t in body_out.get(x, ()):
            _, _, w = t
            transitions.add(t)
            vertices.add(w)
            if w != v and w not in seen:
                seen.add(w)
                queue.append(w)
    return Chart(
        alphabet=c.alphabet,
        start=v,
        vertices=frozenset(vertices),
        transitions=frozenset(transitions),
        terminating=c.terminating & vertices,
        annotations={},
    )


def validate_llee(labeling: EntryBodyLabeling) -> WitnessReport:
    """The direct witness conditions: W1 body-step termination, W2 each
    entry identifier generates a loop chart, W3 layeredness.  Empty-step
    transitions participate through their markings."""
    c = reachable(labeling.chart)
    marking = {t: m for t, m in labeling.marking.items() if t in c.transitions}
    violations = []

    body = Chart(c.alphabet, c.start, c.vertices,
                 frozenset(t for t, m in marking.items() if m == 0),
                 c.terminating, {})
    cycle = find_cycle(body, body.vertices)
    if cycle is not None:
        violations.append({"condition": "W1", "cycle": cycle,
                           "detail": "infinite body-step path"})

    restricted = EntryBodyLabeling(c, marking)
    for v, level in sorted(entries_of(restricted)):
        generated = _entry_loop_chart(restricted, v, level)
        inner = check_loop_chart(generated)
        if not inner.ok:
            violations.append({"condition": "W2", "entry": [v, level],
                               "detail": [x["condition"] for x in inner.violations]})
        for w in sorted(generated.vertices - {v}):
            for t in c.out(w):
                if marking[t] >= level:
                    violations.append({
                        "condition": "W3", "entry": [v, level],
                        "transition": list(t), "level": marking[t],
                        "detail": "inner entry level not below the outer level"})
    return WitnessReport(not violations, violations)


def validate_llee_alt(labeling: EntryBodyLabeling) -> WitnessReport:
    """The four equivalent path-based conditions, checked independently:
    (1) each entry identifier admits an entry that loops back to its source
        through body steps;
    (2) body steps terminate from every vertex;
    (3) vertices reached by an entry then body steps, avoiding the source
        as a target, never permit termination;
    (4) entries departing from such vertices have strictly smaller level."""
    c = reachable(labeling.chart)
    marking = {t: m for t, m in labeling.marking.items() if t in c.transitions}
    violations = []

    body_succ: dict[int, set[int]] = {}
    for t, m in marking.items():
        if m == 0:
            body_succ.setdefault(t[0], set()).add(t[2])

    def body_reach(start: int) -> set[int]:
        seen = {start}
        queue = [start]
        while queue:
            x = queue.pop()
            for y in body_succ.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    body = Chart(c.alphabet, c.start, c.vertices,
                 frozenset(t for t, m in marking.items() if m == 0),
                 c.terminating, {})
    if find_cycle(body, body.vertices) is not None:
        violations.append({"condition": "LLEE2",
                           "detail": "body steps do not terminate"})

    # (1) whenever (source, level) has entries, some level entry followed by
    # body steps leads back to the source
    for source, level in sorted({(t[0], m) for t, m in marking.items() if m >= 1}):
        firsts = [t[2] for t, m in marking.items()
                  if t[0] == source and m == level]
        if not any(source in body_reach(first) for first in firsts):
            violations.append({"condition": "LLEE1", "entry": [source, level],
                               "detail": "no entry loops back to the source "
                                         "through body steps"})

    for t, level in sorted(marking.items()):
        if level == 0:
            continue
        source, _, first = t

        # vertices reachable from the entry by body steps avoiding the
        # source as a target
        avoiding: set[int] = set()
        if first != source:
            avoiding.add(first)
            queue = [first]
            while queue:
                x = queue.pop()
                for y in body_succ.get(x, ()):
                    if y != source and y not in avoiding:
                        avoiding.add(y)
                        queue.append(y)
        for w in sorted(avoiding):
            if w in c.terminating:
                violations.append({"condition": "LLEE3", "transition": list(t),
                                   "vertex": w,
                                   "detail": "termination strictly inside the loop"})
            for t2, m2 in sorted(marking.items()):
                if t2[0] == w and m2 >= level:
                    violations.append({"condition": "LLEE4", "transition": list(t),
                                       "inner": list(t2), "level": m2,
                                       "detail": "inner entry level not below the outer level"})
    return WitnessReport(not violations, violations)
