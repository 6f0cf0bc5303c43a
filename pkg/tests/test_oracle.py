"""Brute-force finite-field fiber enumeration and cover/partition audits."""

from itertools import product

import pytest

from arcjet.algebra import Field, parse_poly, var
from arcjet.catalog import preset
from arcjet.driver import run_driver
from arcjet.hasse import JetSystem
from arcjet.oracle import (
    OracleError,
    coverage_check,
    enumerate_fiber,
    exclusive_cover_check,
    probe_field,
    split_partition_check,
    stratum_membership,
    truncate_stratum,
    truncated_leaves,
)


def brute_points(f, p, m):
    """Independent reference enumerator: plug a generic truncated curve into
    the original equation over F_p and keep the tuples killing every
    coefficient.  Shares nothing with the module under test."""
    field = Field(p)
    fp = f if f.field.char == p else None
    assert fp is not None or f.field.char == p
    out = []
    names = [(fam, k) for k in range(1, m + 1) for fam in ("x", "y", "z")]
    for vals in product(range(p), repeat=3 * m):
        assign = dict(zip(names, vals))
        # evaluate sum over terms of f with each coordinate expanded as a
        # polynomial in t, truncated at degree m
        series = [0] * (m + 1)  # coefficients of t^0..t^m of f(arc)
        for mono, c in f.terms.items():
            # expand the monomial: product of family series
            cur = [c % p] + [0] * m
            for (fam, _), e in mono:
                famser = [0] + [assign[(fam, k)] for k in range(1, m + 1)]
                for _ in range(e):
                    nxt = [0] * (m + 1)
                    for a in range(m + 1):
                        if not cur[a]:
                            continue
                        for b in range(m + 1 - a):
                            nxt[a + b] = (nxt[a + b] + cur[a] * famser[b]) % p
                    cur = nxt
            for k in range(m + 1):
                series[k] = (series[k] + cur[k]) % p
        if not any(series):
            out.append(
                tuple(assign[(fam, k)] for k in range(1, m + 1) for fam in ("x", "y", "z"))
            )
    return out


def test_pinned_smallest_fiber():
    f = parse_poly("z^2 + x*y", Field(2))
    pts = enumerate_fiber(f, 2, 2)
    assert len(pts) == 32
    assert sorted(pts) == sorted(brute_points(f, 2, 2))


def test_enumerate_matches_reference_elsewhere():
    f3 = parse_poly("z^2 + x^2*y + x*y^2", Field(3))
    assert sorted(enumerate_fiber(f3, 3, 2)) == sorted(brute_points(f3, 3, 2))
    f2 = parse_poly("z^2 + x^3 + y^5", Field(2))
    assert sorted(enumerate_fiber(f2, 2, 3)) == sorted(brute_points(f2, 2, 3))


def test_budget_guard():
    f = parse_poly("z^2 + x*y", Field(3))
    with pytest.raises(OracleError):
        enumerate_fiber(f, 3, 6, budget=1000)


def test_probe_field_carries_extension():
    pr = preset("E6", char=0)
    target = probe_field(pr.equation.field, 3)
    assert target.char == 3 and target.i_adjoined


AUDIT_CASES = [
    ("A", 1, 2, 3),
    ("A", 1, 3, 3),
    ("A", 2, 2, 3),
    ("A", 2, 3, 3),
    ("D", 2, 2, 3),
    ("D", 2, 3, 3),
    ("E8", 8, 2, 3),
    ("E8", 8, 3, 3),
]


def audit(pr, p, m):
    sys = JetSystem(pr.equation)
    pts = enumerate_fiber(pr.equation, p, m)
    tree = run_driver(sys, pr.script, max_level=m)
    target = probe_field(pr.equation.field, p)
    leaves = truncated_leaves(sys, tree, m, target)
    missing = coverage_check(pts, [T for _, T in leaves])
    excl = exclusive_cover_check(pts, tree, leaves)
    part = split_partition_check(sys, tree, pts, m, target)
    return pts, missing, excl, part


@pytest.mark.parametrize("kind,n,p,m", AUDIT_CASES)
def test_driver_run_covers_and_partitions(kind, n, p, m):
    pr = preset(kind, n=n, char=p)
    pts, missing, excl, part = audit(pr, p, m)
    assert pts  # the fiber over the singular point is never empty
    assert missing == []
    assert excl["ok"], (excl["uncovered"], excl["overlapping"])
    assert part["ok"]


def test_char_zero_preset_audited_at_probe_prime():
    pr = preset("A", n=2, char=0)
    sys = JetSystem(pr.equation)
    pts = enumerate_fiber(pr.equation, 5, 2)
    tree = run_driver(sys, pr.script, max_level=2)
    target = probe_field(pr.equation.field, 5)
    leaves = truncated_leaves(sys, tree, 2, target)
    assert coverage_check(pts, [T for _, T in leaves]) == []


def test_negative_control_dropped_leaf():
    pr = preset("A", n=1, char=2)
    sys = JetSystem(pr.equation)
    pts = enumerate_fiber(pr.equation, 2, 2)
    tree = run_driver(sys, pr.script, max_level=2)
    target = probe_field(pr.equation.field, 2)
    leaves = truncated_leaves(sys, tree, 2, target)
    assert coverage_check(pts, [T for _, T in leaves]) == []
    # deleting a leaf must surface uncovered points
    assert coverage_check(pts, [T for _, T in leaves[:-1]]) != []


def test_stratum_membership_basics():
    pr = preset("A", n=1, char=2)
    sys = JetSystem(pr.equation)
    tree = run_driver(sys, pr.script, max_level=2)
    target = probe_field(pr.equation.field, 2)
    leaves = truncated_leaves(sys, tree, 2, target)
    pts = enumerate_fiber(pr.equation, 2, 2)
    hits = {pt: sum(1 for _, T in leaves if stratum_membership(pt, T)) for pt in pts}
    assert all(c >= 1 for c in hits.values())
