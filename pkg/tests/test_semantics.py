"""The step systems, normedness, markings, and the interpretation builders."""

import pytest

from loopchart import semantics
from loopchart.charts import EMPTY
from loopchart.semantics import (
    chart_of, labeled_onechart_of, labeled_steps_stacked, normedness,
    onechart_of, steps_stacked, steps_star, terminates_stacked,
    terminates_star,
)
from loopchart.syntax import (
    Act, One, Plain, Prod, SStack, Star, Sum, Zero, parse_star_expr, render,
)


def test_terminates_star():
    assert terminates_star(One())
    assert not terminates_star(Zero())
    assert not terminates_star(Act("a"))
    assert terminates_star(parse_star_expr("(a.b)*"))
    assert terminates_star(parse_star_expr("0 + 1"))
    assert not terminates_star(parse_star_expr("1.0"))


def test_steps_star():
    assert steps_star(Act("a")) == {("a", One())}
    assert steps_star(Zero()) == frozenset()
    e = parse_star_expr("(a*.b*)*")
    e1 = parse_star_expr("((1.a*).b*).(a*.b*)*")
    e2 = parse_star_expr("(1.b*).(a*.b*)*")
    assert steps_star(e) == {("a", e1), ("b", e2)}


def test_chart_of_one():
    c = chart_of(One())
    assert len(c.vertices) == 1
    assert c.terminating == frozenset({0})
    assert not c.transitions


def test_chart_of_g0(chart_g0):
    assert len(chart_g0.vertices) == 3
    assert len(chart_g0.transitions) == 5
    assert not chart_g0.terminating
    assert chart_g0.transitions == frozenset(
        {(0, "a", 1), (1, "a", 2), (1, "c", 0), (2, "b", 0), (2, "b", 1)})


def test_chart_of_f(chart_f):
    assert len(chart_f.vertices) == 5
    assert len(chart_f.transitions) == 15
    assert not chart_f.terminating


def test_terminates_stacked():
    assert terminates_stacked(Plain(parse_star_expr("(a*.b*)*")))
    assert not terminates_stacked(SStack(Plain(One()), Star(Act("a"))))
    assert not terminates_stacked(Plain(parse_star_expr("1.0")))


def test_steps_stacked_sstack_one_rule():
    E = SStack(Plain(One()), Star(Act("a")))
    assert steps_stacked(E) == {(EMPTY, Plain(Star(Act("a"))))}


def test_onechart_of_e(e_expr):
    c = onechart_of(e_expr)
    assert len(c.vertices) == 5
    assert len(c.transitions) == 9
    assert len(c.one_transitions) == 4
    assert c.terminating == frozenset({0})  # only e itself


def test_onechart_of_f(f_expr):
    c = onechart_of(f_expr)
    assert len(c.vertices) == 5
    assert len(c.transitions) == 9
    assert len(c.one_transitions) == 3
    assert not c.terminating


def test_onechart_of_atom():
    c = onechart_of(Act("a"))
    assert len(c.vertices) == 2
    assert c.transitions == frozenset({(0, "a", 1)})
    assert c.terminating == frozenset({1})


def test_normedness():
    assert normedness(Plain(Act("a"))) == {"normed": True, "normed_plus": True}
    assert normedness(Plain(One())) == {"normed": True, "normed_plus": False}
    assert normedness(Plain(parse_star_expr("a*.b*"))) == {
        "normed": True, "normed_plus": True}
    assert normedness(Plain(Zero())) == {"normed": False, "normed_plus": False}
    # 0* terminates but has no transitions at all
    assert normedness(Plain(parse_star_expr("0*"))) == {
        "normed": True, "normed_plus": False}


def test_labeled_steps_star_entry(e_expr):
    steps = labeled_steps_stacked(Plain(e_expr))
    assert {(label, m) for label, m, _ in steps} == {("a", 2), ("b", 2)}


def test_labeled_steps_zero_star():
    assert labeled_steps_stacked(Plain(parse_star_expr("0*"))) == frozenset()


def test_labeled_steps_of_E1(e_expr):
    E1 = SStack(Plain(parse_star_expr("a*.b*")), e_expr)
    by_label = {(label, m) for label, m, _ in labeled_steps_stacked(E1)}
    assert by_label == {(EMPTY, 0), ("a", 1), ("b", 0)}


def test_labeled_onechart_of_e(e_expr):
    labeling = labeled_onechart_of(e_expr)
    levels = sorted(m for m in labeling.marking.values() if m)
    assert levels == [1, 1, 2, 2]
    for t in labeling.chart.one_transitions:
        assert labeling.marking[t] == 0


def test_labeled_onechart_of_f(f_expr):
    labeling = labeled_onechart_of(f_expr)
    entries = {t for t, m in labeling.marking.items() if m}
    assert len(entries) == 3
    assert all(t[0] == labeling.chart.start for t in entries)
    assert all(m == 1 for t, m in labeling.marking.items() if t in entries)


def test_closure_soundness(chart_g0, g0):
    """Outgoing transitions of each vertex match the step relation of its
    expression."""
    chart, exprs = semantics.chart_of_with_exprs(g0)
    for vid, expr in exprs.items():
        expected = {(label, render(target)) for label, target in steps_star(expr)}
        actual = {(label, chart.annotations[w])
                  for v, label, w in chart.transitions if v == vid}
        assert actual == expected


def test_state_explosion_cap():
    with pytest.raises(semantics.StateExplosion):
        chart_of(parse_star_expr("(a.a.a.a)*.(b.b.b.b)*"), cap=2)


def test_normed_plus_iff_step_to_normed(e_expr, f_expr):
    """normed+ holds exactly when some step reaches a normed expression."""
    for root in (Plain(e_expr), Plain(f_expr)):
        _, exprs = semantics.onechart_of_with_exprs(root.expr)
        for E in exprs.values():
            viastep = any(normedness(G)["normed"] for _, G in steps_stacked(E))
            assert normedness(E)["normed_plus"] == viastep
