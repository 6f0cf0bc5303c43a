"""Stratum bookkeeping: rewriting, unit inference, elimination, soundness."""

import pytest

from arcjet.algebra import Field, Polynomial, QQ, parse_poly, var
from arcjet.hasse import JetSystem
from arcjet.strata import (
    EngineError,
    Stratum,
    add_equation,
    check_elimination_soundness,
    eliminate_tail,
    find_pivot,
    force_vanish,
    forced_vanishing,
    generic_point,
    next_nontrivial,
    nonvanishing_evidence,
    restricted_chart,
    rewrite,
    rewrite_rules_for,
    root_stratum,
    rule_instance,
    split,
)


def P(text, field=QQ):
    return parse_poly(text, field)


# -- rewriting --------------------------------------------------------------


def test_rewrite_linear_rule():
    rules = rewrite_rules_for((P("z1 - x1*y1"),))
    assert rewrite(P("z1^2 + z1 + x1"), rules) == P("x1^2*y1^2 + x1*y1 + x1")


def test_rewrite_power_rule():
    # no linear constant-coefficient term: fall back to the pure power z1^2
    rules = rewrite_rules_for((P("z1^2 + x1^3"),))
    assert rewrite(P("z1^3"), rules) == P("-x1^3*z1")
    assert rewrite(P("z1"), rules) == P("z1")  # below the power: untouched


def test_rewrite_no_usable_lead():
    # every term has multiple variables: the equation contributes no rule
    assert rewrite_rules_for((P("x1*y1 + x2*y2"),)) == ()


def test_stratum_simplify_combines_zeros_and_rules():
    s = Stratum(
        zero_vars=frozenset({var("x", 0)}),
        equations=(P("z2 - y1^2"),),
    )
    assert s.simplify(P("x0*y3 + z2*y1")) == P("y1^3")


# -- unit inference ---------------------------------------------------------


def test_unit_vars_closure():
    s = Stratum(
        zero_vars=frozenset(),
        equations=(P("z1 - 2*x1"), P("y2 - 3*z1^2")),
        units=(P("x1"),),
    )
    # x1 declared; z1 = 2*x1 is then a unit; y2 = 3*z1^2 makes y2 one too
    assert s.unit_vars() == frozenset({var("x", 1), var("z", 1), var("y", 2)})
    # a two-variable lead monomial does not license inference
    s2 = Stratum(zero_vars=frozenset(), equations=(P("y2*x1 - z1^3"),), units=(P("x1"), P("z1")))
    assert var("y", 2) not in s2.unit_vars()
    assert s.is_unit_monomial(P("3*x1*z1^2"))
    assert not s.is_unit_monomial(P("x1 + z1"))
    assert not s.is_unit_monomial(P("x2"))


def test_split_and_force_vanish():
    s = root_stratum(QQ)
    op, cl = split(s, var("x", 1), 1, QQ)
    assert P("x1") in op.units
    assert var("x", 1) in cl.zero_vars
    s2 = force_vanish(s, var("z", 1), 2, "test")
    assert var("z", 1) in s2.zero_vars and s2.consumed == 2


# -- elimination on the quadric cone ----------------------------------------


def quadric_chart():
    sys = JetSystem(P("z^2 + x*y"))
    s = root_stratum(QQ)
    found = next_nontrivial(sys, s, 10)
    assert found is not None
    n, r = found
    assert n == 2 and r == P("z1^2 + x1*y1")
    op, _ = split(s, var("x", 1), n, QQ)
    pivot = find_pivot(op, r)
    assert pivot is not None
    assert pivot.v == var("y", 1) and pivot.coeff == P("x1")
    return sys, eliminate_tail(sys, op, n, r, pivot)


def test_eliminate_tail_builds_rule():
    sys, chart = quadric_chart()
    (rule,) = chart.rules
    # linear pivot: the rule applies from the discovery level itself
    assert (rule.family, rule.offset, rule.start_level) == ("y", 1, 2)
    w, c, num = rule_instance(sys, chart, rule, 4)
    assert w == var("y", 3) and c == P("x1")
    assert num == P("-x2*y2 - x3*y1 - 2*z1*z3 - z2^2")


def test_generic_point_and_soundness():
    sys, chart = quadric_chart()
    point = generic_point(sys, chart, 8)
    assert var("y", 2) in point and var("y", 1) in point
    assert check_elimination_soundness(sys, chart, 10) == []


def test_quadratic_pivot_keeps_equation():
    # a quadratic pivot keeps the discovery-level equation and starts the
    # rule one level later, with the partial as stable coefficient
    sys = JetSystem(P("z^2 + x*y"))
    s = root_stratum(QQ)
    n, r = next_nontrivial(sys, s, 10)
    op, _ = split(s, var("z", 1), n, QQ)
    pivot = find_pivot(op, r, prefer=[var("z", 1)])
    assert pivot is not None and pivot.v == var("z", 1)
    chart = eliminate_tail(sys, op, n, r, pivot)
    assert r in chart.equations
    (rule,) = chart.rules
    assert (rule.family, rule.offset, rule.start_level) == ("z", 1, 3)
    assert rule.coeff == P("2*z1")
    assert check_elimination_soundness(sys, chart, 10) == []


def test_soundness_flags_wrong_rule():
    # negative control: a rule solving the wrong coordinate offset does not
    # kill the tower, and every checked level is reported bad
    sys, chart = quadric_chart()
    from dataclasses import replace

    wrong = replace(chart, rules=(replace(chart.rules[0], offset=2, start_level=3),))
    assert check_elimination_soundness(sys, wrong, 8) == [3, 4, 5, 6, 7, 8]


# -- forced vanishing and evidence ------------------------------------------


def test_forced_vanishing_on_quadric():
    sys, chart = quadric_chart()
    # on the chart, y1 = -z1^2/x1; restricting z1 to 0 forces y1 to 0
    assert forced_vanishing(sys, chart, {var("z", 1)}, var("y", 1))
    # and transitively y2 (its numerator involves z-terms and y1 only)
    assert forced_vanishing(sys, chart, {var("z", 1), var("z", 2)}, var("y", 2))
    # but z2 is free on this chart: nothing forces it
    assert not forced_vanishing(sys, chart, {var("z", 1)}, var("z", 2))


def test_restricted_chart_keeps_units():
    sys, chart = quadric_chart()
    rc = restricted_chart(chart, {var("z", 1), var("x", 1)})
    assert var("z", 1) in rc.zero_vars
    # x1 is a unit on the chart: the restriction silently skips it
    assert var("x", 1) not in rc.zero_vars


def test_nonvanishing_evidence():
    sys, chart = quadric_chart()
    assert nonvanishing_evidence(sys, chart, var("x", 1)) == "unit"
    assert nonvanishing_evidence(sys, chart, var("z", 2)) == "free"
    assert nonvanishing_evidence(sys, chart, var("y", 2)) == "eliminated-nonzero"
    broken = force_vanish(chart, var("z", 3), 0)
    assert nonvanishing_evidence(sys, broken, var("z", 3)) is None


def test_add_equation_tracks_consumed():
    s = root_stratum(QQ)
    s2 = add_equation(s, P("z2 - y1^2"), 4)
    assert s2.consumed == 4
    assert s2.trace[-1].kind == "add_equation"
