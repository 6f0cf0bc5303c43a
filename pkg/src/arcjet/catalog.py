"""Built-in surface singularity presets and their verification data.

Each preset bundles a defining equation (with its legal extra-term variants
per characteristic), the driver script pinning cover levels, the expected
number of arc components, and golden reduction tables used to cross-check
the level-by-level computation.  Certificates of pairwise non-inclusion
between component candidates are generated and replayed here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional

from .algebra import Field, Polynomial, Var, format_poly, mono_vars, parse_poly, var, var_name
from .hasse import JetSystem
from .driver import (
    CoverDirective,
    Script,
    StratificationTree,
    run_driver,
)
from .strata import (
    RestrictionIncompatible,
    Stratum,
    forced_vanishing,
    nonvanishing_evidence,
    rule_instance,
)

SUPPORTED_CHARS = (0, 2, 3, 5, 7)


class PresetError(ValueError):
    pass


@dataclass(frozen=True)
class SingularityPreset:
    kind: str  # "A" | "D" | "E6" | "E7" | "E8"
    n: int  # A: rank; D: half the rank; E-kinds: fixed
    char: int
    variant: str  # extra term appended to the base equation ("" = none)
    equation: Polynomial
    script: Script
    expected_count: int
    max_level: int

    @property
    def label(self) -> str:
        core = {"A": f"A{self.n}", "D": f"D{2 * self.n}"}.get(self.kind, self.kind)
        h = f"+{self.variant}" if self.variant else ""
        return f"{core}(char {self.char}{h})"

    def system(self) -> JetSystem:
        return JetSystem(self.equation)


def legal_variants(kind: str, n: int, char: int) -> tuple[str, ...]:
    if kind == "A":
        return ("",)
    if kind == "D":
        if char == 2:
            return ("",) + tuple(f"x*y^{n - r}*z" for r in range(1, n - 1))
        return ("",)
    if kind == "E8":
        if char == 2:
            return ("", "x*y^3*z", "x*y^2*z", "y^3*z", "x*y*z")
        if char == 3:
            return ("", "x^2*y^3", "x^2*y^2")
        if char == 5:
            return ("", "x*y^4")
        return ("",)
    if kind in ("E6", "E7"):
        return ("",)
    raise PresetError(f"unknown kind {kind!r}")


def supported_chars(kind: str) -> tuple[int, ...]:
    if kind == "E6":
        # the quartic term degenerates to a non-isolated singularity in char 2
        return (0, 3, 5, 7)
    return SUPPORTED_CHARS


def _base_equation(kind: str, n: int) -> str:
    if kind == "A":
        return f"z^{n + 1} + x*y"
    if kind == "D":
        return f"z^2 + x^2*y + x*y^{n}"
    if kind == "E6":
        return "z^2 + x^3 + y^4"
    if kind == "E7":
        return "z^2 + x^3 + x*y^3"
    if kind == "E8":
        return "z^2 + x^3 + y^5"
    raise PresetError(f"unknown kind {kind!r}")


def _script(kind: str, n: int) -> Script:
    if kind == "A":
        return Script({n + 1: CoverDirective(terminal=True)})
    if kind == "D":
        return Script(
            {
                4 * n - 2: CoverDirective(
                    unit_sets=((var("x", 2 * n - 2),), (var("y", 2),)),
                    terminal=True,
                )
            }
        )
    if kind == "E6":
        return Script({12: CoverDirective(unit_sets=((var("y", 3),),), terminal=True)})
    if kind == "E7":
        return Script({18: CoverDirective(terminal=True)})
    if kind == "E8":
        return Script(
            {
                6: CoverDirective(unit_sets=((var("x", 2),),)),
                10: CoverDirective(unit_sets=((var("y", 2),),)),
                12: CoverDirective(unit_sets=((var("x", 4),),)),
                15: CoverDirective(unit_sets=((var("x", 5),),)),
                18: CoverDirective(unit_sets=((var("x", 6),),)),
                20: CoverDirective(unit_sets=((var("y", 4),),)),
                24: CoverDirective(unit_sets=((var("x", 8),),)),
                30: CoverDirective(
                    unit_sets=((var("z", 15), var("x", 10)),),
                    pivot_prefer=(var("z", 15), var("x", 10)),
                    terminal=True,
                ),
            }
        )
    raise PresetError(f"unknown kind {kind!r}")


def preset(kind: str, n: int = 0, char: int = 0, variant: str = "") -> SingularityPreset:
    if kind == "A" and n < 1:
        raise PresetError("A requires n >= 1")
    if kind == "D" and n < 2:
        raise PresetError("D requires n >= 2 (rank 2n)")
    if kind in ("E6", "E7", "E8"):
        n = int(kind[1])
    if char not in supported_chars(kind):
        raise PresetError(f"characteristic {char} not supported for {kind}")
    legal = legal_variants(kind, n, char)
    if variant not in legal:
        raise PresetError(
            f"variant {variant!r} not in legal list for {kind} char {char}: {legal}"
        )
    # The quartic cone z^2 + y^4 only factors over a field containing a
    # square root of -1, and the E6 fiber genuinely decomposes along that
    # factorization.  Adjoin i whenever the base field lacks it (char 5
    # already has one: 2^2 = -1).
    needs_i = kind == "E6" and (char == 0 or char % 4 == 3)
    field = Field(char, i_adjoined=needs_i)
    text = _base_equation(kind, n)
    if variant:
        text += " + " + variant
    eq = parse_poly(text, field)
    expected = {"A": n, "D": 2 * n, "E6": 6, "E7": 7, "E8": 8}[kind]
    max_level = {
        "A": n + 6,
        "D": 4 * n + 6,
        "E6": 22,
        "E7": 24,
        "E8": 36,
    }[kind]
    return SingularityPreset(
        kind=kind,
        n=n,
        char=char,
        variant=variant,
        equation=eq,
        script=_script(kind, n),
        expected_count=expected,
        max_level=max_level,
    )


def preset_grid(
    a_ranks=(1, 2, 3, 4, 5, 6), d_halves=(2, 3, 4), exceptional=("E6", "E7", "E8")
) -> Iterator[SingularityPreset]:
    for n in a_ranks:
        for p in supported_chars("A"):
            yield preset("A", n, p)
    for n in d_halves:
        for p in supported_chars("D"):
            for h in legal_variants("D", n, p):
                yield preset("D", n, p, h)
    for kind in exceptional:
        for p in supported_chars(kind):
            for h in legal_variants(kind, 0, p):
                yield preset(kind, 0, p, h)


def components(preset: SingularityPreset) -> StratificationTree:
    """Run the stratification and check the component count and residual
    absorption demanded by the preset."""
    tree = run_driver(preset.system(), preset.script, preset.max_level)
    if len(tree.components) != preset.expected_count:
        raise PresetError(
            f"{preset.label}: got {len(tree.components)} components, "
            f"expected {preset.expected_count}"
        )
    for node in tree.residuals():
        if node.absorbed_into is None:
            raise PresetError(
                f"{preset.label}: residual at level {node.level} not absorbed"
            )
    return tree


# -- golden reduction tables -------------------------------------------------


@dataclass(frozen=True)
class CongruenceLine:
    level: int
    zeroed: tuple[Var, ...]
    expected: str
    label: str
    strict: bool = True


def _upto(xi: int, yj: int, zh: int, exclude: tuple[Var, ...] = ()) -> tuple[Var, ...]:
    """All variables x_{<=xi}, y_{<=yj}, z_{<=zh} (order 0 included), minus
    any excluded ones.  Negative bound = none of that family."""
    out = []
    for fam, bound in (("x", xi), ("y", yj), ("z", zh)):
        for k in range(bound + 1):
            v = var(fam, k)
            if v not in exclude:
                out.append(v)
    return tuple(out)


def golden_table(preset: SingularityPreset) -> tuple[CongruenceLine, ...]:
    strict = preset.variant == ""
    n = preset.n
    lines: list[CongruenceLine] = []

    def add(level, zeroed, expected, label, hard=True):
        lines.append(CongruenceLine(level, zeroed, expected, label, strict and hard))

    if preset.kind == "A":
        for i in range(1, n):
            add(i + 1, _upto(i - 1, 0, 0), f"x{i}*y1", f"ladder i={i}")
        add(n + 1, _upto(n - 1, 0, 0), f"z1^{n + 1} + x{n}*y1", "final level")
    elif preset.kind == "D":
        for i in range(1, n - 1):
            add(2 * i, _upto(i - 1, 0, i - 1), f"z{i}^2", f"even ladder i={i}")
            add(2 * i + 1, _upto(i - 1, 0, i), f"x{i}^2*y1", f"odd ladder i={i}")
        add(2 * n - 2, _upto(n - 2, 0, n - 2), f"z{n - 1}^2", "branch-level even")
        add(
            2 * n - 1,
            _upto(n - 2, 0, n - 1),
            f"x{n - 1}^2*y1 + x{n - 1}*y1^{n}",
            "branch-level odd",
        )
        # the context here has y_1 already forced to vanish
        add(2 * n, _upto(n - 1, 1, n - 1), f"z{n}^2", "post-branch even")
        for i in range(n, 2 * n - 2):
            add(2 * i + 1, _upto(i - 1, 1, i), "0", f"upper ladder odd i={i}")
            add(
                2 * i + 2,
                _upto(i - 1, 1, i),
                f"z{i + 1}^2 + x{i}^2*y2",
                f"upper ladder even i={i}",
            )
        add(4 * n - 3, _upto(2 * n - 3, 1, 2 * n - 2), "0", "top odd")
        add(
            4 * n - 2,
            _upto(2 * n - 3, 1, 2 * n - 2),
            f"z{2 * n - 1}^2 + x{2 * n - 2}^2*y2 + x{2 * n - 2}*y2^{n}",
            "top even",
        )
        # pairwise witness lines: the lower component forces y2 to vanish,
        # the higher one keeps it moving
        for i in range(1, 2 * n - 2):
            for j in range(i + 1, 2 * n - 2):
                add(
                    2 * i + 2,
                    _upto(j - 1, 1, j, exclude=(var("x", i),)),
                    f"x{i}^2*y2",
                    f"witness low ({i},{j})",
                )
                add(
                    2 * j + 2,
                    _upto(j - 1, 1, j),
                    f"x{j}^2*y2 + z{j + 1}^2",
                    f"witness high ({i},{j})",
                )
    elif preset.kind == "E8":
        rows = [
            (2, _upto(0, 0, 0), "z1^2"),
            (3, _upto(0, 0, 1), "x1^3"),
            (4, _upto(1, 0, 1), "z2^2"),
            (5, _upto(1, 0, 2), "y1^5"),
            (6, _upto(1, 1, 2), "z3^2 + x2^3"),
            (7, _upto(2, 1, 3), "0"),
            (8, _upto(2, 1, 3), "z4^2"),
            (9, _upto(2, 1, 4), "x3^3"),
            (10, _upto(3, 1, 4), "z5^2 + y2^5"),
            (11, _upto(3, 2, 5), "0"),
            (12, _upto(3, 2, 5), "z6^2 + x4^3"),
            (13, _upto(4, 2, 6), "0"),
            (14, _upto(4, 2, 6), "z7^2"),
            (15, _upto(4, 2, 7), "x5^3 + y3^5"),
            (16, _upto(5, 3, 7), "z8^2"),
            (17, _upto(5, 3, 8), "0"),
            (18, _upto(5, 3, 8), "z9^2 + x6^3"),
            (19, _upto(6, 3, 9), "0"),
            (20, _upto(6, 3, 9), "z10^2 + y4^5"),
            (21, _upto(6, 4, 10), "x7^3"),
            (22, _upto(7, 4, 10), "z11^2"),
            (23, _upto(7, 4, 11), "0"),
            (24, _upto(7, 4, 11), "z12^2 + x8^3"),
            (25, _upto(8, 4, 12), "y5^5"),
            (26, _upto(8, 5, 12), "z13^2"),
            (27, _upto(8, 5, 13), "x9^3"),
            (28, _upto(9, 5, 13), "z14^2"),
            (29, _upto(9, 5, 14), "0"),
            (30, _upto(9, 5, 14), "z15^2 + x10^3 + y6^5"),
        ]
        for level, zeroed, expected in rows:
            add(level, zeroed, expected, f"ladder level {level}")
    # E6/E7 are derived presets: no golden reduction lines, only invariants
    return tuple(lines)


def verify_congruence_table(preset: SingularityPreset) -> dict:
    sys = preset.system()
    results = []
    ok = True
    for line in golden_table(preset):
        computed = sys.derivative(line.level).reduce_mod_vars(frozenset(line.zeroed))
        want = parse_poly(line.expected, sys.field)
        match = computed == want
        if line.strict and not match:
            ok = False
        results.append(
            {
                "level": line.level,
                "label": line.label,
                "expected": line.expected,
                "computed": format_poly(computed),
                "match": match,
                "strict": line.strict,
            }
        )
    return {
        "preset": preset.label,
        "lines": results,
        "discrepancies": [r for r in results if not r["match"]],
        "ok": ok,
    }


# -- non-inclusion certificates ----------------------------------------------


@dataclass(frozen=True)
class WitnessCertificate:
    container: int  # component index whose closure is shown too small
    excluded: int  # component index shown not to be contained
    kind: str  # "unit-vs-zero" | "forced-vanishing"
    witness: Optional[str] = None  # vanishing polynomial (unit-vs-zero)
    evidence: str = ""
    target: Optional[Var] = None  # forced-vanishing data
    restriction: tuple[Var, ...] = ()
    level: Optional[int] = None


@dataclass(frozen=True)
class PairVerdict:
    excluded: int
    container: int
    resolved: bool
    certificate: Optional[WitnessCertificate]


def _is_unit_value(chart: Stratum, p: Polynomial) -> bool:
    """True when the simplified value is a nonzero constant times a monomial
    in declared-unit coordinates: identically nonvanishing on the chart."""
    if len(p.terms) != 1:
        return False
    mono = next(iter(p.terms))
    units = chart.unit_vars()
    return all(v in units for v in mono_vars(mono))


def _unit_vs_zero(
    sys: JetSystem, a: Stratum, b: Stratum, ai: int, bi: int
) -> Optional[WitnessCertificate]:
    """Evidence that component a is not inside component b: something that
    vanishes on all of b but not (at least generically) on a."""
    candidates: list[Polynomial] = [
        Polynomial.variable(sys.field, v)
        for v in sorted(b.zero_vars, key=lambda v: (v[1], v[0]))
    ]
    candidates.extend(b.equations)
    best: Optional[WitnessCertificate] = None
    for g in candidates:
        val = a.simplify(g)
        if val.is_zero():
            continue
        if _is_unit_value(a, val):
            return WitnessCertificate(
                container=bi,
                excluded=ai,
                kind="unit-vs-zero",
                witness=format_poly(g),
                evidence=f"reduces to the unit {format_poly(val)}",
            )
        if best is None and len(g.terms) == 1:
            v = next(iter(g.variables()))
            ev = nonvanishing_evidence(sys, a, v)
            if ev is not None:
                best = WitnessCertificate(
                    container=bi,
                    excluded=ai,
                    kind="unit-vs-zero",
                    witness=format_poly(g),
                    evidence=f"coordinate is {ev}",
                )
    return best


def _deficiency(chart: Stratum, m: int) -> int:
    """Codimension of the level-m truncation of the chart inside the full
    coordinate space of orders 1..m."""
    d = sum(1 for v in chart.zero_vars if 1 <= v[1] <= m)
    d += len(chart.equations)
    for rule in chart.rules:
        if m >= rule.start_level:
            d += m - rule.start_level + 1
    return d


def _equal_dimension_cert(
    sys: JetSystem, a: Stratum, b: Stratum, ai: int, bi: int, horizon: int
) -> Optional[WitnessCertificate]:
    """When two irreducible candidates have the same truncation dimension at
    every large level, a containment would force equality; one coordinate
    vanishing identically on one side and staying nonzero on the other rules
    equality out.  Applies only to single-relation (graph-like) charts."""
    if len(a.equations) > 1 or len(b.equations) > 1:
        return None
    if any(_deficiency(a, m) != _deficiency(b, m) for m in (horizon - 1, horizon)):
        return None
    for v in sorted(a.zero_vars, key=lambda v: (v[1], v[0])):
        ev = nonvanishing_evidence(sys, b, v)
        if ev in ("unit", "relation"):
            return WitnessCertificate(
                container=bi,
                excluded=ai,
                kind="equal-dimension",
                witness=var_name(v),
                evidence=(
                    f"same truncation dimension at levels {horizon - 1},{horizon}; "
                    f"{var_name(v)} vanishes on the excluded set but is {ev}-nonzero "
                    "on the container, so the two equidimensional irreducible sets differ"
                ),
            )
    return None


FORCED_SEARCH_WINDOW = 8


def _forced_vanishing_cert(
    sys: JetSystem, a: Stratum, b: Stratum, ai: int, bi: int, max_level: int
) -> Optional[WitnessCertificate]:
    """Evidence that a ⊄ b using one of b's elimination identities: find a
    coordinate solved on b, nonvanishing on a, whose defining numerator dies
    after restricting to a's vanishing set (minus the identity's own
    coefficient support)."""
    for rule in b.rules:
        coeff_vars = set(rule.coeff.variables())
        for m in range(rule.start_level, rule.start_level + FORCED_SEARCH_WINDOW):
            w = (rule.family, rule.solved_order(m))
            if w in b.zero_vars or w in a.zero_vars:
                continue
            ev = nonvanishing_evidence(sys, a, w)
            if ev is None:
                continue
            restriction = tuple(
                v
                for v in sorted(a.zero_vars, key=lambda v: (v[0], v[1]))
                if v not in coeff_vars
            )
            try:
                if forced_vanishing(sys, b, restriction, w, max_level=max_level):
                    return WitnessCertificate(
                        container=bi,
                        excluded=ai,
                        kind="forced-vanishing",
                        target=w,
                        restriction=restriction,
                        level=m,
                        evidence=f"target {ev} on the excluded chart",
                    )
            except RestrictionIncompatible:
                continue
    return None


def noninclusion_matrix(preset: SingularityPreset, tree: StratificationTree) -> dict:
    sys = preset.system()
    charts = {c.index: tree.chart_of(c).stratum for c in tree.components}
    verdicts: list[PairVerdict] = []
    unresolved: list[tuple[int, int]] = []
    for ai in sorted(charts):
        for bi in sorted(charts):
            if ai == bi:
                continue
            cert = _unit_vs_zero(sys, charts[ai], charts[bi], ai, bi)
            if cert is None:
                cert = _forced_vanishing_cert(
                    sys, charts[ai], charts[bi], ai, bi, preset.max_level
                )
            if cert is None:
                cert = _equal_dimension_cert(
                    sys, charts[ai], charts[bi], ai, bi, preset.max_level
                )
            ok = cert is not None
            if not ok:
                unresolved.append((ai, bi))
            verdicts.append(PairVerdict(ai, bi, ok, cert))
    return {
        "preset": preset.label,
        "pairs": verdicts,
        "unresolved": unresolved,
        "ok": not unresolved,
    }
