"""Locally closed strata of jet/arc fibers and their elimination structure.

A stratum is cut out by coordinate vanishing (``zero_vars``), polynomial
relations (``equations``), invertibility conditions (``units``, arbitrary
polynomials declared nonvanishing) and, on chart leaves, triangular
elimination rules expressing one tail of coordinates as rational functions
of the remaining free coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .algebra import (
    Field,
    Mono,
    Polynomial,
    RationalExpression,
    Var,
    format_poly,
    mono_key,
    mono_vars,
    var_key,
    var_name,
)
from .hasse import JetSystem


class EngineError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# rewriting modulo stratum equations


@dataclass(frozen=True)
class RewriteRule:
    """Replace ``v^power`` by ``rhs`` (rhs free of ``v``)."""

    v: Var
    power: int
    rhs: Polynomial


def rewrite_rules_for(equations: Sequence[Polynomial]) -> tuple[RewriteRule, ...]:
    """Extract one rewrite rule per equation when a usable lead term exists.

    Preference: a linear single-variable term with constant coefficient;
    otherwise a pure power ``c*v^d`` with the largest variable.  Equations
    with no such term contribute no rule (they still define the stratum).
    """
    rules = []
    for eq in equations:
        rule = _lead_rule(eq)
        if rule is not None:
            rules.append(rule)
    return tuple(rules)


def _lead_rule(eq: Polynomial) -> Optional[RewriteRule]:
    field = eq.field
    candidates: list[tuple[tuple, Var, int, Polynomial]] = []
    for mono, c in eq.terms.items():
        if len(mono) != 1:
            continue
        (v, e) = mono[0]
        if eq.degree_in(v) != e:
            continue  # not a true lead in v
        rest = Polynomial(field, {m: cc for m, cc in eq.terms.items() if m != mono})
        if any(v in mono_vars(m) for m in rest.terms):
            continue
        rhs = rest.scale(field.neg(field.inv(c)))
        # prefer linear leads, then high variables
        candidates.append(((0 if e == 1 else 1, [-k for k in var_key(v)]), v, e, rhs))
    if not candidates:
        return None
    candidates.sort(key=lambda t: t[0])
    _, v, e, rhs = candidates[0]
    return RewriteRule(v, e, rhs)


def rewrite(p: Polynomial, rules: Sequence[RewriteRule]) -> Polynomial:
    """Reduce every occurrence of each rule's lead power, to a fixpoint."""
    if not rules:
        return p
    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 1000:
            raise EngineError("rewriting did not terminate")
        for rule in rules:
            parts = p.split_by_degree(rule.v)
            if all(d < rule.power for d in parts):
                continue
            field = p.field
            acc = Polynomial.zero(field)
            for d, coeff in parts.items():
                q, r = divmod(d, rule.power)
                term = coeff
                if q:
                    term = term * (rule.rhs ** q)
                    changed = True
                if r:
                    term = term * Polynomial.variable(field, rule.v, r)
                acc = acc + term
            p = acc
    return p


# ---------------------------------------------------------------------------
# stratum data model


@dataclass(frozen=True)
class EliminationRule:
    """Solve the coordinate of order ``m - offset`` (family ``family``) from
    the equation at level ``m``, for every ``m >= start_level``.

    ``coeff`` is the stable unit coefficient of the solved variable; the
    numerator is recomputed per level from the reduced derivative.
    """

    family: str
    offset: int
    start_level: int
    coeff: Polynomial

    def solved_order(self, m: int) -> int:
        return m - self.offset

    def describe(self) -> str:
        return (
            f"{self.family}[m-{self.offset}] = ({format_poly(self.coeff)})^-1 * P_m"
            f"  for m >= {self.start_level}"
        )


@dataclass(frozen=True)
class Move:
    kind: str  # force_vanish | split_open | split_closed | add_equation | cover_chart | eliminate | absorb_residual | stabilize
    level: int
    detail: str


@dataclass(frozen=True)
class Stratum:
    zero_vars: frozenset[Var]
    equations: tuple[Polynomial, ...] = ()
    units: tuple[Polynomial, ...] = ()
    rules: tuple[EliminationRule, ...] = ()
    trace: tuple[Move, ...] = ()
    consumed: int = 0
    # monomials (products of coordinates) forced to vanish without choosing a
    # branch; only used on terminal absorbed residuals of product covers.
    zero_monomials: tuple[Mono, ...] = ()

    # -- derived helpers ----------------------------------------------

    def rewriters(self) -> tuple[RewriteRule, ...]:
        return rewrite_rules_for(self.equations)

    def simplify(self, p: Polynomial) -> Polynomial:
        return rewrite(p.reduce_mod_vars(self.zero_vars), self.rewriters())

    def unit_vars(self) -> frozenset[Var]:
        """Coordinates invertible on the stratum: declared monomial units
        plus those bound to units by a two-term relation."""
        units: set[Var] = set()
        for u in self.units:
            if len(u.terms) == 1:
                units.update(mono_vars(next(iter(u.terms))))
        changed = True
        while changed:
            changed = False
            for eq in self.equations:
                if len(eq.terms) != 2:
                    continue
                monos = list(eq.terms)
                for lead, other in (monos, reversed(monos)):
                    lead_vars = mono_vars(lead)
                    if len(lead_vars) != 1:
                        continue
                    v = lead_vars[0]
                    if v in units:
                        continue
                    if all(w in units for w in mono_vars(other)):
                        units.add(v)
                        changed = True
        return frozenset(units)

    def is_unit_monomial(self, p: Polynomial) -> bool:
        if len(p.terms) != 1:
            return False
        uv = self.unit_vars()
        mono = next(iter(p.terms))
        return all(v in uv for v in mono_vars(mono))

    def describe(self) -> dict:
        return {
            "zero_vars": sorted(var_name(v) for v in sorted(self.zero_vars, key=var_key)),
            "equations": [format_poly(e) for e in self.equations],
            "units": [format_poly(u) for u in self.units],
            "rules": [r.describe() for r in self.rules],
            "zero_monomials": [
                format_poly(Polynomial.monomial(_field_of(self), m)) for m in self.zero_monomials
            ],
            "consumed": self.consumed,
        }


def _field_of(s: Stratum) -> Field:
    for p in s.equations + s.units:
        return p.field
    return Field(0)


def root_stratum(field: Field) -> Stratum:
    origin = frozenset({("x", 0), ("y", 0), ("z", 0)})
    return Stratum(zero_vars=origin, trace=(Move("force_vanish", 0, "origin fiber"),))


# ---------------------------------------------------------------------------
# stratum-level operations


def next_nontrivial(
    sys: JetSystem, s: Stratum, max_level: int
) -> Optional[tuple[int, Polynomial]]:
    """Smallest unconsumed level whose derivative survives reduction, with
    its simplified reduction.  None if everything vanishes up to max_level."""
    for n in range(s.consumed + 1, max_level + 1):
        r = s.simplify(sys.derivative(n))
        if r:
            return n, r
    return None


def split(s: Stratum, v: Var, level: int, field: Field) -> tuple[Stratum, Stratum]:
    """Partition into the open part (v invertible) and closed part (v = 0)."""
    open_part = replace(
        s,
        units=s.units + (Polynomial.variable(field, v),),
        trace=s.trace + (Move("split_open", level, var_name(v)),),
    )
    closed_part = replace(
        s,
        zero_vars=s.zero_vars | {v},
        trace=s.trace + (Move("split_closed", level, var_name(v)),),
    )
    return open_part, closed_part


def force_vanish(s: Stratum, v: Var, level: int, reason: str = "") -> Stratum:
    return replace(
        s,
        zero_vars=s.zero_vars | {v},
        consumed=max(s.consumed, level),
        trace=s.trace + (Move("force_vanish", level, f"{var_name(v)} {reason}".strip()),),
    )


def add_equation(s: Stratum, q: Polynomial, level: int) -> Stratum:
    return replace(
        s,
        equations=s.equations + (q,),
        consumed=max(s.consumed, level),
        trace=s.trace + (Move("add_equation", level, format_poly(q)),),
    )


# -- elimination ------------------------------------------------------------


@dataclass(frozen=True)
class PivotChoice:
    v: Var
    coeff: Polynomial          # full rewritten partial of q
    extra_unit: Optional[Polynomial]  # non-monomial cofactor declared a unit
    monomial_unit: bool


def find_pivot(
    s: Stratum, q: Polynomial, prefer: Optional[Sequence[Var]] = None
) -> Optional[PivotChoice]:
    """Choose a variable of ``q`` whose partial derivative is invertible.

    The stratum is considered with ``q`` already imposed (so unit inference
    sees the new relation).  Monomial-unit coefficients are preferred over
    coefficients of the shape (unit monomial) * (multi-term cofactor); a
    single-variable cofactor never qualifies, since inverting it would
    change the underlying set in an uncontrolled way.
    """
    probe = replace(s, equations=s.equations + (q,))
    uv = probe.unit_vars()
    rewriters = probe.rewriters()
    monomial_picks: list[tuple[tuple, PivotChoice]] = []
    poly_picks: list[tuple[tuple, PivotChoice]] = []
    order = list(prefer) if prefer else sorted(q.variables(), key=_split_key, reverse=True)
    for v in order:
        c = rewrite(q.partial(v).reduce_mod_vars(s.zero_vars), rewriters)
        if c.is_zero():
            continue
        content = c.content_monomial()
        if not all(w in uv for w in mono_vars(content)):
            continue
        cof = c.divide_monomial(content)
        if len(cof.terms) == 1 and not next(iter(cof.terms)):
            choice = PivotChoice(v, c, None, True)
            monomial_picks.append((_split_key(v), choice))
        elif len(cof.terms) >= 2:
            choice = PivotChoice(v, c, cof, False)
            poly_picks.append((_split_key(v), choice))
        # single-variable cofactor: rejected
    if prefer:
        for _, choice in monomial_picks + poly_picks:
            return choice
        return None
    for picks in (monomial_picks, poly_picks):
        if picks:
            picks.sort(key=lambda t: t[0], reverse=True)
            return picks[0][1]
    return None


def _split_key(v: Var) -> tuple[int, int]:
    """Order by jet order, then x before y before z (used to pick split and
    pivot variables deterministically)."""
    fam_rank = {"x": 2, "y": 1, "z": 0}
    return (v[1], fam_rank.get(v[0], -1))


PROBE_DEPTH = 6


def eliminate_tail(
    sys: JetSystem, s: Stratum, n: int, q: Polynomial, pivot: PivotChoice
) -> Stratum:
    """Turn the stratum into a chart leaf eliminating one coordinate tail.

    The chosen pivot variable has order ``o``; for every level
    ``m >= start`` the reduced equation is linear in the coordinate of order
    ``m - (n - o)`` with stable unit coefficient, and is used to solve it.
    """
    linear = q.degree_in(pivot.v) == 1
    s2 = s
    if pivot.extra_unit is not None:
        s2 = replace(s2, units=s2.units + (pivot.extra_unit,))
    if not linear:
        s2 = add_equation(s2, q, n)
    offset = n - pivot.v[1]
    start = n if linear else n + 1
    rule = EliminationRule(pivot.v[0], offset, start, pivot.coeff)
    chart = replace(
        s2,
        rules=s2.rules + (rule,),
        consumed=max(s2.consumed, start),
        trace=s2.trace + (Move("eliminate", n, rule.describe()),),
    )
    _verify_rule(sys, chart, rule, depth=PROBE_DEPTH)
    return chart


def _verify_rule(sys: JetSystem, chart: Stratum, rule: EliminationRule, depth: int) -> None:
    rewriters = chart.rewriters()
    want = rewrite(rule.coeff.reduce_mod_vars(chart.zero_vars), rewriters)
    for m in range(rule.start_level, rule.start_level + depth):
        w, c_m, num = rule_instance(sys, chart, rule, m)
        got = rewrite(c_m.reduce_mod_vars(chart.zero_vars), rewriters)
        if got != want:
            raise EngineError(
                f"unstable elimination coefficient at level {m}: "
                f"{format_poly(got)} != {format_poly(want)}"
            )
        if w in num.variables():
            raise EngineError(f"elimination not well-founded at level {m}")


def rule_instance(
    sys: JetSystem, chart: Stratum, rule: EliminationRule, m: int
) -> tuple[Var, Polynomial, Polynomial]:
    """Return (solved variable, coefficient, numerator) at level ``m``:
    the reduced equation reads ``coeff * w - numerator = 0``."""
    if m < rule.start_level:
        raise ValueError("level below rule start")
    r = chart.simplify(sys.derivative(m))
    w = (rule.family, rule.solved_order(m))
    c_m, rest = r.coefficient_of(w)
    return w, c_m, -rest


# -- generic points and soundness -------------------------------------------


def generic_point(
    sys: JetSystem, chart: Stratum, up_to: int
) -> dict[Var, RationalExpression]:
    """Values of all eliminated coordinates of order <= up_to, triangularly
    substituted so each value involves only free/unit coordinates."""
    field = sys.field
    values: dict[Var, RationalExpression] = {}
    rewriters = chart.rewriters()

    def norm(p: Polynomial) -> Polynomial:
        return rewrite(p, rewriters)

    instances: list[tuple[int, EliminationRule]] = []
    for rule in chart.rules:
        m = rule.start_level
        while rule.solved_order(m) <= up_to:
            instances.append((m, rule))
            m += 1
    instances.sort(key=lambda t: (t[1].solved_order(t[0]), t[0]))
    for m, rule in instances:
        w, c_m, num = rule_instance(sys, chart, rule, m)
        val = evaluate_rational(num, values, norm) * RationalExpression(
            Polynomial.const(field, 1), norm(c_m.reduce_mod_vars(chart.zero_vars))
        )
        val = val.map_polys(norm)
        values[w] = val
    return values


def evaluate_rational(
    p: Polynomial,
    assign: Mapping[Var, RationalExpression],
    norm: Callable[[Polynomial], Polynomial],
) -> RationalExpression:
    """Evaluate a polynomial with some variables assigned rational values."""
    field = p.field
    total = RationalExpression(Polynomial.zero(field))
    for mono, c in p.terms.items():
        plain = Polynomial.const(field, c)
        term: Optional[RationalExpression] = None
        for v, e in mono:
            if v in assign:
                factor = assign[v] ** e
                term = factor if term is None else term * factor
            else:
                plain = plain * Polynomial.variable(field, v, e)
        if term is None:
            term = RationalExpression(plain)
        else:
            term = term * RationalExpression(plain)
        total = total + term
        total = total.map_polys(norm)
    return total


def check_elimination_soundness(
    sys: JetSystem, chart: Stratum, up_to: int
) -> list[int]:
    """Levels ``m <= up_to`` at which substituting the generic point into the
    reduced derivative does not yield 0 (empty list = sound)."""
    rewriters = chart.rewriters()

    def norm(p: Polynomial) -> Polynomial:
        return rewrite(p, rewriters)

    start = min((r.start_level for r in chart.rules), default=up_to + 1)
    point = generic_point(sys, chart, up_to)
    bad = []
    for m in range(start, up_to + 1):
        reduced = norm(sys.derivative(m).reduce_mod_vars(chart.zero_vars))
        val = evaluate_rational(reduced, point, norm)
        if not norm(val.num).is_zero():
            bad.append(m)
    return bad


# -- forced vanishing --------------------------------------------------------


class RestrictionIncompatible(EngineError):
    pass


def forced_vanishing(
    sys: JetSystem,
    chart: Stratum,
    restriction: Iterable[Var],
    target: Var,
    max_level: Optional[int] = None,
    _seen: Optional[frozenset[Var]] = None,
) -> bool:
    """Does the target coordinate vanish identically on (closure of chart)
    intersected with the vanishing of the restriction coordinates?

    Mechanism: the chart's cleared elimination identity ``coeff * target =
    numerator`` holds on the closure; if the numerator restricts to zero
    while the coefficient survives, the target is forced to vanish (the
    restricted chart stays irreducible, which licenses dividing by the
    coefficient).
    """
    rs = frozenset(restriction)
    if target in rs or target in chart.zero_vars:
        return True
    uv = chart.unit_vars()
    if target in uv:
        return False
    rule = _rule_solving(chart, target)
    if rule is None:
        return False  # free coordinate: nothing forces it
    m = target[1] + rule.offset
    if max_level is not None and m > max_level:
        return False
    w, c_m, num = rule_instance(sys, chart, rule, m)
    assert w == target
    if _restricted(c_m, rs, chart).is_zero():
        raise RestrictionIncompatible(
            f"restriction kills the unit coefficient of {var_name(target)}"
        )
    val = _restricted(num, rs, chart)
    if val.is_zero():
        return True
    # terms may involve deeper eliminated coordinates that are themselves
    # forced to vanish under the same restriction
    seen = (_seen or frozenset()) | {target}
    for v in sorted(val.variables(), key=var_key):
        if v in seen:
            continue
        r2 = _rule_solving(chart, v)
        if r2 is not None and forced_vanishing(
            sys, chart, rs, v, max_level=max_level, _seen=seen
        ):
            val = val.reduce_mod_vars({v})
            if val.is_zero():
                return True
    return val.is_zero()


def _rule_solving(chart: Stratum, v: Var) -> Optional[EliminationRule]:
    for rule in chart.rules:
        if rule.family == v[0] and v[1] + rule.offset >= rule.start_level:
            return rule
    return None


def _restricted(p: Polynomial, rs: frozenset[Var], chart: Stratum) -> Polynomial:
    reduced = p.reduce_mod_vars(rs | chart.zero_vars)
    # equations survive on the restricted set in reduced form
    eqs = tuple(
        e.reduce_mod_vars(rs) for e in chart.equations if e.reduce_mod_vars(rs)
    )
    return rewrite(reduced, rewrite_rules_for(eqs))


def restricted_chart(chart: Stratum, restriction: Iterable[Var]) -> Stratum:
    """The by-product of a forced-vanishing check: the chart with the
    restriction imposed on its non-unit coordinates (still a graph-like,
    hence irreducible, set)."""
    uv = chart.unit_vars()
    rs = frozenset(v for v in restriction if v not in uv)
    return replace(
        chart,
        zero_vars=chart.zero_vars | rs,
        trace=chart.trace + (Move("force_vanish", chart.consumed, "restriction"),),
    )


def nonvanishing_evidence(
    sys: JetSystem, chart: Stratum, v: Var
) -> Optional[str]:
    """Why does the coordinate not vanish identically on the chart?

    Returns one of "unit", "relation", "free", "eliminated-nonzero", or
    None when no evidence is found (e.g. the coordinate is zero there).
    """
    if v in chart.zero_vars:
        return None
    if v in chart.unit_vars():
        return "unit"
    uv = chart.unit_vars()
    for eq in chart.equations:
        if v in eq.variables() and len(eq.terms) == 2:
            monos = list(eq.terms)
            for lead, other in (monos, list(reversed(monos))):
                if mono_vars(lead) == (v,) and all(w in uv for w in mono_vars(other)):
                    return "relation"
    rule = _rule_solving(chart, v)
    if rule is None:
        return "free"
    m = v[1] + rule.offset
    _, _, num = rule_instance(sys, chart, rule, m)
    if chart.simplify(num):
        return "eliminated-nonzero"
    return None
