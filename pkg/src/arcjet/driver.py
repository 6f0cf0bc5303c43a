"""Recursive stratification of the arc fiber over the singular point.

The driver walks levels upward.  At each level the surviving reduction of
the derivative dictates one of a small set of moves: force a coordinate to
vanish (radical of a power), split into an open/closed pair along a
coordinate, record a relation, or open one or more elimination charts
(optionally after localizing).  Chart leaves are the component candidates;
closed complements of final covers are terminal residuals absorbed into a
previously built component's closure.

Scripts pin the few genuinely global choices (which coordinates to invert
at a cover level, the pivot preference, where the process terminates); all
remaining moves are canonical and recomputed from the equation itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Optional, Sequence

from .algebra import (
    Polynomial,
    Var,
    format_poly,
    mono_from_pairs,
    mono_vars,
    var_key,
    var_name,
)
from .hasse import JetSystem
from .strata import (
    EngineError,
    Move,
    Stratum,
    add_equation,
    eliminate_tail,
    find_pivot,
    force_vanish,
    next_nontrivial,
    rewrite,
    rewrite_rules_for,
    root_stratum,
    split,
    _split_key,
)


@dataclass(frozen=True)
class CoverDirective:
    """Scripted choice at a cover level.

    ``unit_sets`` lists the coordinate sets to invert, one chart per set
    (None = derive them from the equation).  ``pivot_prefer`` orders the
    pivot candidates; the first one whose coefficient is invertible in the
    current characteristic wins.  ``terminal`` marks the closed complement
    as the final residual of the whole stratification.
    """

    unit_sets: Optional[tuple[tuple[Var, ...], ...]] = None
    pivot_prefer: Optional[tuple[Var, ...]] = None
    terminal: bool = False


@dataclass(frozen=True)
class Script:
    covers: dict[int, CoverDirective] = dc_field(default_factory=dict)


AUTO_SCRIPT = Script()


@dataclass
class Node:
    nid: int
    parent: Optional[int]
    level: int  # level of the decision that created this node
    kind: str  # interior | chart | residual | stabilized | empty
    stratum: Stratum
    children: list[int] = dc_field(default_factory=list)
    component: Optional[int] = None
    absorbed_into: Optional[int] = None
    note: str = ""


@dataclass
class Component:
    index: int
    name: str
    emergence: int
    chart_nodes: list[int]


@dataclass
class StratificationTree:
    nodes: list[Node]
    components: list[Component]
    max_level: int

    def node(self, nid: int) -> Node:
        return self.nodes[nid]

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes if not n.children]

    def charts(self) -> list[Node]:
        return [n for n in self.nodes if n.kind == "chart"]

    def residuals(self) -> list[Node]:
        return [n for n in self.nodes if n.kind == "residual"]

    def chart_of(self, comp: Component) -> Node:
        return self.nodes[comp.chart_nodes[0]]

    def path_to_root(self, nid: int) -> list[Node]:
        out = []
        cur: Optional[int] = nid
        while cur is not None:
            out.append(self.nodes[cur])
            cur = self.nodes[cur].parent
        return out


def run_driver(
    sys: JetSystem,
    script: Script = AUTO_SCRIPT,
    max_level: int = 64,
) -> StratificationTree:
    tree = StratificationTree(nodes=[], components=[], max_level=max_level)
    _process(sys, script, tree, root_stratum(sys.field), level=1, parent=None)
    _absorb_residuals(sys, tree)
    return tree


def _new_node(tree: StratificationTree, parent: Optional[int], level: int, s: Stratum) -> Node:
    node = Node(nid=len(tree.nodes), parent=parent, level=level, kind="interior", stratum=s)
    tree.nodes.append(node)
    if parent is not None:
        tree.nodes[parent].children.append(node.nid)
    return node


def _process(
    sys: JetSystem,
    script: Script,
    tree: StratificationTree,
    s: Stratum,
    level: int,
    parent: Optional[int],
) -> Node:
    node = _new_node(tree, parent, level, s)
    field = sys.field
    while True:
        s = _normalize(s)
        node.stratum = s
        found = next_nontrivial(sys, s, tree.max_level)
        if found is None:
            node.kind = "stabilized"
            node.note = f"no surviving equation up to level {tree.max_level}"
            return node
        n, r = found
        content = r.content_monomial()
        unit_vars = s.unit_vars()
        loose = sorted(
            (v for v in mono_vars(content) if v not in unit_vars), key=_split_key
        )
        q = r.divide_monomial(content)
        if len(q.terms) == 1 and not next(iter(q.terms)):
            # r is a single monomial
            if not loose:
                node.kind = "empty"
                node.note = f"level {n} forces a unit to vanish"
                return node
            if len(loose) == 1:
                s = force_vanish(s, loose[0], n, "radical")
                continue
            _do_split(sys, script, tree, node, s, loose[-1], n)
            return node
        # q has at least two terms
        if loose:
            _do_split(sys, script, tree, node, s, loose[-1], n)
            return node
        single = _single_var_power(q)
        if single is not None:
            s = force_vanish(s, single, n, "radical")
            continue
        if mono_vars(content):
            # a unit monomial times a relation: impose the relation
            s = add_equation(s, q, n)
            continue
        directive = script.covers.get(n)
        if directive is None or directive.unit_sets is None:
            pivot = find_pivot(s, q)
            if pivot is not None:
                chart = eliminate_tail(sys, s, n, q, pivot)
                node.stratum = chart
                node.kind = "chart"
                comp = Component(
                    index=len(tree.components),
                    name=f"K{len(tree.components) + 1}",
                    emergence=n,
                    chart_nodes=[node.nid],
                )
                node.component = comp.index
                tree.components.append(comp)
                return node
        _do_cover(sys, script, tree, node, s, n, q, directive)
        return node


def _single_var_power(q: Polynomial) -> Optional[Var]:
    if len(q.terms) != 1:
        return None
    mono = next(iter(q.terms))
    if len(mono) == 1:
        return mono[0][0]
    return None


def _do_split(sys, script, tree, node: Node, s: Stratum, v: Var, n: int) -> None:
    open_part, closed_part = split(s, v, n, sys.field)
    node.note = f"split on {var_name(v)} at level {n}"
    _process(sys, script, tree, open_part, n, node.nid)
    _process(sys, script, tree, closed_part, n, node.nid)


def _square_split(s: Stratum, q: Polynomial) -> Optional[tuple[Polynomial, Polynomial]]:
    """Detect ``q = a*w^2 + b*g^2`` with ``w`` a non-unit coordinate and
    ``g`` a unit monomial, over a field where ``-b/a`` is a square.

    Returns the two monic linear factors ``w - c*g, w + c*g`` (so that
    ``q = a * (w - c*g) * (w + c*g)``), or None when the shape or the
    square root is unavailable.
    """
    if len(q.terms) != 2:
        return None
    field = q.field
    units = s.unit_vars()
    items = q.sorted_terms()
    for (mw, cw), (mg, cg) in (items, items[::-1]):
        if len(mw) != 1 or mw[0][1] != 2 or mw[0][0] in units:
            continue
        if not mg or any(e % 2 for _, e in mg) or any(v not in units for v, _ in mg):
            continue
        c = field.square_root(field.neg(field.mul(cg, field.inv(cw))))
        if c is None:
            continue
        w = Polynomial.variable(field, mw[0][0])
        g = Polynomial.monomial(
            field, mono_from_pairs((v, e // 2) for v, e in mg), c
        )
        return (w - g, w + g)
    return None


def _factor_chart(
    sys: JetSystem,
    s_ch: Stratum,
    n: int,
    lin: Polynomial,
    max_level: int,
    prefer: Optional[tuple[Var, ...]],
) -> Stratum:
    """Build the elimination chart of one linear factor of a split cover."""
    s_f = add_equation(s_ch, lin, n)
    # look a little past a truncated horizon: the factor's follow-up
    # relation sits just above the cover level
    found = next_nontrivial(sys, s_f, max(max_level, n + 4))
    if found is None:
        raise EngineError(f"factor chart at level {n} has no surviving relation")
    n2, r = found
    units = s_f.unit_vars()
    if any(v not in units for v in mono_vars(r.content_monomial())):
        raise EngineError(
            f"factor chart at level {n} has a non-unit content at level {n2}"
        )
    pivot = find_pivot(s_f, r, prefer=prefer)
    if pivot is None:
        raise EngineError(
            f"no invertible pivot on the factor chart at level {n} "
            f"in characteristic {sys.field.char}"
        )
    return eliminate_tail(sys, s_f, n2, r, pivot)


def _do_cover(
    sys: JetSystem,
    script: Script,
    tree: StratificationTree,
    node: Node,
    s: Stratum,
    n: int,
    q: Polynomial,
    directive: Optional[CoverDirective],
) -> None:
    field = sys.field
    if directive is not None and directive.unit_sets is not None:
        unit_sets = directive.unit_sets
    else:
        unit_sets = _auto_cover(s, q)
    prefer = directive.pivot_prefer if directive is not None else None
    terminal = directive.terminal if directive is not None else False
    node.note = (
        f"cover at level {n} localizing "
        + " | ".join(",".join(var_name(v) for v in us) for us in unit_sets)
    )
    comp: Optional[Component] = None
    for uset in unit_sets:
        s_ch = replace(
            s,
            units=s.units + tuple(Polynomial.variable(field, v) for v in uset),
            trace=s.trace
            + (Move("cover_chart", n, ",".join(var_name(v) for v in uset)),),
        )
        factors = _square_split(s_ch, q)
        if factors is not None:
            # The localized relation is a difference of squares, so the
            # chart decomposes into two pieces, one per linear factor;
            # each gets its own component.
            for lin in factors:
                chart = _factor_chart(sys, s_ch, n, lin, tree.max_level, prefer)
                fcomp = Component(
                    index=len(tree.components),
                    name=f"K{len(tree.components) + 1}",
                    emergence=n,
                    chart_nodes=[],
                )
                tree.components.append(fcomp)
                child = _new_node(tree, node.nid, n, chart)
                child.kind = "chart"
                child.note = f"factor {format_poly(lin)}"
                child.component = fcomp.index
                fcomp.chart_nodes.append(child.nid)
            continue
        if comp is None:
            comp = Component(
                index=len(tree.components),
                name=f"K{len(tree.components) + 1}",
                emergence=n,
                chart_nodes=[],
            )
            tree.components.append(comp)
        pivot = find_pivot(s_ch, q, prefer=prefer)
        if pivot is None:
            raise EngineError(
                f"no invertible pivot at level {n} on chart "
                f"{{{','.join(var_name(v) for v in uset)}}} in characteristic {field.char}"
            )
        chart = eliminate_tail(sys, s_ch, n, q, pivot)
        child = _new_node(tree, node.nid, n, chart)
        child.kind = "chart"
        child.component = comp.index
        comp.chart_nodes.append(child.nid)
    # closed complement
    cover_vars = sorted({v for us in unit_sets for v in us}, key=var_key)
    if len(unit_sets) == 1 and len(unit_sets[0]) > 1:
        if not terminal:
            raise EngineError("product localization requires a terminal cover")
        from .algebra import mono_from_pairs

        residual = replace(
            s,
            zero_monomials=s.zero_monomials
            + (mono_from_pairs((v, 1) for v in cover_vars),),
            equations=s.equations + (q,),
            consumed=max(s.consumed, n),
            trace=s.trace + (Move("absorb_residual", n, "product complement"),),
        )
    else:
        # Re-process the cover level on the complement: the relation may
        # stay nontrivial there and demand its own decision.
        residual = replace(
            s,
            zero_vars=s.zero_vars | set(cover_vars),
            equations=s.equations + ((q,) if terminal else ()),
            consumed=max(s.consumed, n if terminal else n - 1),
            trace=s.trace
            + (
                Move(
                    "split_closed", n, ",".join(var_name(v) for v in cover_vars)
                ),
            ),
        )
    if terminal:
        res_node = _new_node(tree, node.nid, n, _normalize(residual))
        res_node.kind = "residual"
        res_node.note = "terminal residual"
    else:
        _process(sys, script, tree, residual, n, node.nid)


def _auto_cover(s: Stratum, q: Polynomial) -> tuple[tuple[Var, ...], ...]:
    """Derive localization sets: any coordinate of a mixed monomial whose
    inversion produces a pivot gets its own chart; for pure-power equations
    a single chart at the highest-exponent workable coordinate suffices."""
    from .algebra import Polynomial as P

    candidates = []
    for v in sorted(q.variables(), key=_split_key, reverse=True):
        probe = replace(s, units=s.units + (P.variable(q.field, v),))
        if find_pivot(probe, q) is not None:
            candidates.append(v)
    if not candidates:
        raise EngineError("no usable localization for cover")
    cross = {
        v
        for mono in q.terms
        for v in mono_vars(mono)
        if len(set(mono_vars(mono))) >= 2
    }
    picked = [v for v in candidates if v in cross]
    if not picked:
        picked = [max(candidates, key=lambda v: (q.degree_in(v), _split_key(v)))]
    return tuple((v,) for v in sorted(picked, key=_split_key, reverse=True))


def _normalize(s: Stratum) -> Stratum:
    """Collapse equations that degenerate after new coordinates vanished:
    a relation reduced to (unit monomial) * v^a just forces v = 0."""
    changed = True
    while changed:
        changed = False
        kept: list[Polynomial] = []
        eqs = list(s.equations)
        for i, eq in enumerate(eqs):
            others = rewrite_rules_for(
                tuple(e.reduce_mod_vars(s.zero_vars) for j, e in enumerate(eqs) if j != i)
            )
            r = rewrite(eq.reduce_mod_vars(s.zero_vars), others)
            if r.is_zero():
                changed = True
                continue
            uv = s.unit_vars()
            content = r.content_monomial()
            body = r.divide_monomial(content)
            loose = [v for v in mono_vars(content) if v not in uv]
            single = _single_var_power(body)
            if len(body.terms) == 1 and not next(iter(body.terms)) and len(loose) == 1:
                s = replace(s, zero_vars=s.zero_vars | {loose[0]})
                s = replace(s, equations=tuple(e for j, e in enumerate(eqs) if j != i))
                changed = True
                break
            if single is not None and not loose and single not in uv:
                s = replace(s, zero_vars=s.zero_vars | {single})
                s = replace(s, equations=tuple(e for j, e in enumerate(eqs) if j != i))
                changed = True
                break
            kept.append(eq)
        else:
            if len(kept) != len(s.equations):
                s = replace(s, equations=tuple(kept))
    return s


def _absorb_residuals(sys: JetSystem, tree: StratificationTree) -> None:
    """Attach each terminal residual to a component whose closure visibly
    contains it (vanishing coordinates refine the chart's, the chart's
    relations vanish on the residual)."""
    for node in tree.residuals():
        target = None
        for comp in reversed(tree.components):
            chart = tree.chart_of(comp)
            if _closure_contains(chart.stratum, node.stratum):
                target = comp.index
                break
        node.absorbed_into = target
        if target is None:
            node.note += " (no absorbing component found)"


def _closure_contains(chart: Stratum, residual: Stratum) -> bool:
    if not chart.zero_vars <= residual.zero_vars:
        return False
    res_rules = rewrite_rules_for(
        tuple(e.reduce_mod_vars(residual.zero_vars) for e in residual.equations)
    )
    for eq in chart.equations:
        if eq in residual.equations:
            continue
        if rewrite(eq.reduce_mod_vars(residual.zero_vars), res_rules):
            return False
    return True
