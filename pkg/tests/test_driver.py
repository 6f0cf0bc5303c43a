"""Stratification driver: splits, covers, factor charts, residual absorption."""

import pytest

from arcjet.algebra import Field, QQ, parse_poly, var
from arcjet.driver import (
    AUTO_SCRIPT,
    CoverDirective,
    Script,
    _square_split,
    run_driver,
)
from arcjet.hasse import JetSystem
from arcjet.strata import Stratum, check_elimination_soundness, root_stratum


def P(text, field=QQ):
    return parse_poly(text, field)


# -- quadric cone, fully automatic ------------------------------------------


def test_quadric_cone_auto():
    # without a terminal directive the driver descends the whole ladder:
    # a fresh two-chart component every two levels
    sys = JetSystem(P("z^2 + x*y"))
    tree = run_driver(sys, max_level=10)
    assert [c.emergence for c in tree.components] == [2, 4, 6, 8, 10]
    for comp in tree.components:
        assert len(comp.chart_nodes) == 2
        for nid in comp.chart_nodes:
            chart = tree.node(nid).stratum
            assert check_elimination_soundness(sys, chart, 10) == []


def test_quadric_cone_terminal_script():
    # the terminal cover collapses the ladder to a single component
    from arcjet.catalog import components, preset

    pr = preset("A", n=1, char=0)
    tree = components(pr)
    assert len(tree.components) == 1
    assert tree.components[0].emergence == 2


def test_cusp_like_curve_single_component():
    tree = run_driver(JetSystem(P("z^2 + x^3 + y^5")), max_level=20)
    # one component per rank-8 chart tower is not expected here without a
    # script; just check the run terminates and yields sound charts
    sys = JetSystem(P("z^2 + x^3 + y^5"))
    for n in tree.charts():
        assert check_elimination_soundness(sys, n.stratum, 12) == []


# -- square splitting --------------------------------------------------------


def test_square_split_detects_difference_of_squares():
    Fi = Field(0, i_adjoined=True)
    s = Stratum(zero_vars=frozenset(), units=(P("y1", Fi),))
    q = P("z2^2 + y1^4", Fi)
    got = _square_split(s, q)
    assert got is not None
    a, b = got
    assert a * b == q
    assert {str(a), str(b)} == {"z2 - i*y1^2", "z2 + i*y1^2"}


def test_square_split_needs_square_root():
    # over the plain rationals -1 has no square root: no split
    s = Stratum(zero_vars=frozenset(), units=(P("y1"),))
    assert _square_split(s, P("z2^2 + y1^4")) is None
    # but a genuine difference of squares splits rationally
    got = _square_split(s, P("z2^2 - 4*y1^4"))
    assert got is not None
    a, b = got
    assert a * b == P("z2^2 - 4*y1^4")


def test_square_split_requires_unit_cofactor():
    # y1 not a unit: the factorization would not separate components
    s = Stratum(zero_vars=frozenset())
    assert _square_split(s, P("z2^2 - 4*y1^4")) is None
    # three terms never split this way
    s2 = Stratum(zero_vars=frozenset(), units=(P("y1"),))
    assert _square_split(s2, P("z2^2 - y1^4 + x1^2")) is None


def test_split_cover_creates_one_component_per_factor():
    # z^2 - y^4 factors as (z - y^2)(z + y^2) wherever y is a unit; the
    # first cover level sees z2^2 - y1^4 and must emit one component per
    # linear factor
    sys = JetSystem(P("z^2 - y^4"))
    script = Script({2: CoverDirective(unit_sets=((var("y", 1),),), terminal=True)})
    tree = run_driver(sys, script, max_level=10)
    first = [
        c
        for c in tree.components
        if c.emergence == 4 and tree.chart_of(c).note.startswith("factor ")
    ]
    assert len(first) == 2
    eqs = sorted(
        str(e) for c in first for e in tree.chart_of(c).stratum.equations
    )
    assert eqs == ["z2 + y1^2", "z2 - y1^2"] or eqs == sorted(
        ["z2 + y1^2", "z2 - y1^2"]
    )
    for c in first:
        chart = tree.chart_of(c).stratum
        assert check_elimination_soundness(sys, chart, 10) == []


# -- cover and residual semantics -------------------------------------------


def test_cover_charts_share_component():
    # rank-2 cone: the degree-3 tower needs a two-chart cover at its level
    sys = JetSystem(P("z^3 + x*y"))
    tree = run_driver(sys, max_level=14)
    for comp in tree.components:
        levels = {tree.node(nid).level for nid in comp.chart_nodes}
        assert len(levels) == 1  # all charts of a component sit at one level


def test_terminal_residual_absorbed():
    from arcjet.catalog import components, preset

    pr = preset("E8", char=0)
    tree = components(pr)
    residuals = tree.residuals()
    assert residuals, "terminal cover must leave a residual node"
    for r in residuals:
        assert r.absorbed_into is not None
        target = tree.components[r.absorbed_into]
        assert target.emergence <= r.level


def test_max_level_bound_respected():
    tree = run_driver(JetSystem(P("z^2 + x*y")), max_level=6)
    for n in tree.nodes:
        assert n.level <= 6
