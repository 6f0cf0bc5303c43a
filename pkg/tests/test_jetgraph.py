"""Level-by-level component graph: construction, chain detection, export."""

import pytest

from arcjet.catalog import preset
from arcjet.hasse import JetSystem
from arcjet.jetgraph import (
    SCHEMA,
    build_graph,
    descriptor_contains,
    export,
    import_json,
    restrict_descriptor,
    simple_branch_check,
    truncate,
)
from arcjet.strata import root_stratum


def graph_for(kind, char=0, M=10, **kw):
    pr = preset(kind, char=char, **kw)
    return build_graph(JetSystem(pr.equation), pr.script, M)


def test_rank_one_single_chain():
    g = graph_for("A", n=1, M=10)
    assert g.schema == SCHEMA
    check = simple_branch_check(g)
    assert check["ok"]
    assert check["chain_count"] == 1
    assert check["threshold"] == 1  # nothing ever branches
    assert not g.flags


def test_rank_three_chains():
    g = graph_for("A", n=3, M=12)
    check = simple_branch_check(g)
    assert check["ok"] and check["chain_count"] == 3
    # chains are genuinely simple past the threshold: one child each
    for v in g.vertices:
        if v.level >= check["threshold"] and v.level < g.max_level:
            assert len(g.children(v.vid)) == 1


def test_every_vertex_connected():
    g = graph_for("D", n=2, char=2, M=12)
    levels = sorted({v.level for v in g.vertices})
    for v in g.vertices:
        if v.level > levels[0]:
            assert g.parents(v.vid), v
        if v.level < g.max_level and v.level in levels[:-1]:
            nxt = levels[levels.index(v.level) + 1]
            if nxt == v.level + 1:
                assert g.children(v.vid), v


def test_component_ids_propagate_to_window_top():
    g = graph_for("A", n=2, M=8)
    top = g.at_level(8)
    ids = sorted(i for v in top for i in v.component_ids)
    assert ids == [0, 1]


def test_descriptor_restriction_and_containment():
    pr = preset("A", n=1, char=0)
    sys = JetSystem(pr.equation)
    s = root_stratum(sys.field)
    d6 = truncate(sys, s, 6)
    d3 = restrict_descriptor(d6, 3)
    assert d3.level == 3
    assert all(v[1] <= 3 for v in d3.zero_vars)
    # the deeper descriptor lies inside (the closure of) the shallow one
    assert descriptor_contains(d3, d3)


def test_export_json_round_trip():
    g = graph_for("A", n=2, M=8)
    text = export(g, "json")
    again = import_json(text)
    assert export(again, "json") == text
    assert export(again, "dot") == export(g, "dot")


def test_export_deterministic():
    a = export(graph_for("A", n=2, M=8), "json")
    b = export(graph_for("A", n=2, M=8), "json")
    assert a == b


def test_dot_output_shape():
    g = graph_for("A", n=1, M=4)
    dot = export(g, "dot")
    assert dot.startswith("digraph jet_components {")
    assert "->" in dot
    assert dot.endswith("}\n")


def test_bad_format_rejected():
    g = graph_for("A", n=1, M=4)
    with pytest.raises(ValueError):
        export(g, "svg")
