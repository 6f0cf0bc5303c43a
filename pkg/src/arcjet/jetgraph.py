"""The level graph of fiber components under truncation.

For each level ``m`` up to a window ``M`` the fiber over the origin is
decomposed by a depth-``m`` driver run; the closure-maximal leaves are the
level-``m`` components.  An edge joins a level-``m`` vertex to a
level-``m+1`` vertex when the deeper component truncates into the
shallower one's closure.  Every structural claim here is windowed to
``M``: the interesting qualitative fact is that beyond a finite threshold
the graph settles into one unbranching chain per component.

Containment of truncations is decided syntactically (zero sets,
rewriting by chart relations); when two same-level vertices stay distinct
syntactically but their small finite-field point sets agree, the pair is
flagged in the report rather than merged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .algebra import Field, Polynomial, format_poly, mono_vars, var_name
from .driver import Script, StratificationTree, run_driver
from .hasse import JetSystem
from .oracle import (
    TruncatedStratum,
    enumerate_fiber,
    stratum_membership,
    truncate_stratum,
)
from .strata import Stratum


def restrict_descriptor(d: TruncatedStratum, m: int) -> TruncatedStratum:
    """Forget every constraint mentioning an order above ``m``."""
    return TruncatedStratum(
        level=m,
        field=d.field,
        zero_vars=frozenset(v for v in d.zero_vars if v[1] <= m),
        zero_monomials=tuple(
            mm for mm in d.zero_monomials if all(v[1] <= m for v in mono_vars(mm))
        ),
        units=tuple(u for u in d.units if u.max_order() <= m),
        equations=tuple(e for e in d.equations if e.max_order() <= m),
    )


def descriptor_contains(b: TruncatedStratum, a: TruncatedStratum) -> bool:
    """Does the closure of ``b`` contain ``a``?  (Sound syntactic test:
    unit constraints of ``b`` drop away in the closure; every closed
    constraint of ``b`` must already hold on ``a``.)"""
    sa = Stratum(
        zero_vars=a.zero_vars,
        equations=a.equations,
        zero_monomials=a.zero_monomials,
    )
    f = a.field
    for v in b.zero_vars:
        if v not in a.zero_vars and sa.simplify(Polynomial.variable(f, v)):
            return False
    for mm in b.zero_monomials:
        if mm not in a.zero_monomials and sa.simplify(Polynomial.monomial(f, mm)):
            return False
    for e in b.equations:
        if e not in a.equations and sa.simplify(e):
            return False
    return True


def descriptor_key(d: TruncatedStratum) -> tuple:
    """Canonical, hashable, printable form of a truncated descriptor."""
    return (
        tuple(sorted(var_name(v) for v in d.zero_vars)),
        tuple(
            sorted(format_poly(Polynomial.monomial(d.field, mm)) for mm in d.zero_monomials)
        ),
        tuple(sorted(format_poly(u) for u in d.units)),
        tuple(sorted(format_poly(e) for e in d.equations)),
    )


def truncate(sys: JetSystem, s: Stratum, m: int) -> TruncatedStratum:
    """Descriptor of one component chart at level ``m`` (solved
    elimination instances below the level included as equations)."""
    return truncate_stratum(sys, s, m)


@dataclass(frozen=True)
class GraphVertex:
    vid: int
    level: int
    label: str
    component_ids: tuple[int, ...]  # stable components flowing through this vertex
    descriptor: tuple


@dataclass
class JetComponentGraph:
    schema: str
    max_level: int
    vertices: tuple[GraphVertex, ...]
    edges: tuple[tuple[int, int], ...]  # (lower vid, higher vid), level m -> m+1
    flags: tuple[str, ...] = ()

    def at_level(self, m: int) -> list[GraphVertex]:
        return [v for v in self.vertices if v.level == m]

    def children(self, vid: int) -> list[int]:
        return [b for a, b in self.edges if a == vid]

    def parents(self, vid: int) -> list[int]:
        return [a for a, b in self.edges if b == vid]


SCHEMA = "jet-component-graph/1"

# point-set probes are only worth running on small windows
_PROBE_BUDGET = 200_000


def _level_pieces(
    sys: JetSystem, script: Script, m: int
) -> list[tuple[object, TruncatedStratum]]:
    """Closure-maximal fiber pieces at level ``m`` with their component
    (if the depth-m run already charted one)."""
    tree = run_driver(sys, script, max_level=m)
    cands: list[tuple[object, TruncatedStratum]] = []
    for comp in tree.components:
        cands.append((comp.index, truncate_stratum(sys, tree.chart_of(comp).stratum, m)))
    for node in tree.leaves():
        if node.kind in ("stabilized", "residual") and node.component is None:
            if node.absorbed_into is not None:
                continue
            cands.append((None, truncate_stratum(sys, node.stratum, m)))
    # drop pieces strictly inside another piece's closure
    keep: list[tuple[object, TruncatedStratum]] = []
    for i, (ci, di) in enumerate(cands):
        dominated = False
        for j, (cj, dj) in enumerate(cands):
            if i == j:
                continue
            if descriptor_contains(dj, di) and not descriptor_contains(di, dj):
                dominated = True
                break
            if (
                descriptor_contains(di, dj)
                and descriptor_contains(dj, di)
                and j < i
            ):
                dominated = True  # mutual containment: keep the first
                break
        if not dominated:
            keep.append((ci, di))
    return keep


def _probe_primes(field: Field, primes: tuple[int, ...]) -> tuple[int, ...]:
    if field.char:
        return (field.char,)
    return primes


def build_graph(
    sys: JetSystem,
    script: Script,
    M: int,
    primes: tuple[int, ...] = (2, 3),
) -> JetComponentGraph:
    levels: dict[int, list[tuple[object, TruncatedStratum]]] = {}
    for m in range(1, M + 1):
        levels[m] = _level_pieces(sys, script, m)

    vertices: list[GraphVertex] = []
    edges: list[tuple[int, int]] = []
    flags: list[str] = []
    vid_of: dict[tuple[int, int], int] = {}  # (level, index within level) -> vid

    for m in range(1, M + 1):
        for idx, (comp, d) in enumerate(levels[m]):
            vid_of[(m, idx)] = len(vertices) + idx
        for idx, (comp, d) in enumerate(levels[m]):
            vertices.append(
                GraphVertex(
                    vid=vid_of[(m, idx)],
                    level=m,
                    label="",  # filled after component ids propagate
                    component_ids=(),
                    descriptor=descriptor_key(d),
                )
            )
        # edges down to level m-1
        if m > 1:
            for idx, (comp, d) in enumerate(levels[m]):
                cut = restrict_descriptor(d, m - 1)
                hits = [
                    pidx
                    for pidx, (_, pd) in enumerate(levels[m - 1])
                    if descriptor_contains(pd, cut)
                ]
                if not hits:
                    flags.append(
                        f"level {m} piece {idx} has no truncation target at {m - 1}"
                    )
                for pidx in hits:
                    edges.append((vid_of[(m - 1, pidx)], vid_of[(m, idx)]))
        # undecidable-merge probe: syntactically distinct same-level pieces
        # whose finite point sets agree
        ps = _probe_primes(sys.field, primes)
        for i in range(len(levels[m])):
            for j in range(i + 1, len(levels[m])):
                di, dj = levels[m][i][1], levels[m][j][1]
                agree_all = True
                tested = False
                for p in ps:
                    if p ** (3 * m) > _PROBE_BUDGET:
                        continue
                    try:
                        pts = enumerate_fiber(sys.f, p, m)
                    except Exception:
                        continue
                    tested = True
                    si = {pt for pt in pts if stratum_membership(pt, di)}
                    sj = {pt for pt in pts if stratum_membership(pt, dj)}
                    if si != sj:
                        agree_all = False
                        break
                if tested and agree_all:
                    flags.append(
                        f"level {m}: pieces {i} and {j} are syntactically distinct "
                        f"but share every tested F_p point set"
                    )

    # propagate stable component ids from the top level downward
    comp_ids: dict[int, set[int]] = {v.vid: set() for v in vertices}
    for idx, (comp, _) in enumerate(levels[M]):
        if comp is not None:
            comp_ids[vid_of[(M, idx)]].add(int(comp))
    for m in range(M, 1, -1):
        for a, b in edges:
            if vertices[b].level == m:
                comp_ids[a] |= comp_ids[b]
    out: list[GraphVertex] = []
    for v in vertices:
        ids = tuple(sorted(comp_ids[v.vid]))
        label = (f"K{ids[0] + 1}" if ids else f"V{v.vid}") + f"@{v.level}"
        out.append(
            GraphVertex(
                vid=v.vid,
                level=v.level,
                label=label,
                component_ids=ids,
                descriptor=v.descriptor,
            )
        )
    return JetComponentGraph(
        schema=SCHEMA,
        max_level=M,
        vertices=tuple(out),
        edges=tuple(sorted(edges)),
        flags=tuple(flags),
    )


def simple_branch_check(g: JetComponentGraph) -> dict:
    """Smallest level t such that no vertex at level >= t branches
    (has two or more next-level children) within the window."""
    branch_levels = [
        v.level for v in g.vertices if len(g.children(v.vid)) > 1
    ]
    threshold = max(branch_levels) + 1 if branch_levels else min(
        (v.level for v in g.vertices), default=1
    )
    chains = []
    if threshold <= g.max_level:
        for v in g.at_level(g.max_level):
            chains.append({"label": v.label, "component_ids": list(v.component_ids)})
    return {
        "ok": threshold <= g.max_level,
        "threshold": threshold if threshold <= g.max_level else None,
        "window": g.max_level,
        "chain_count": len(g.at_level(g.max_level)),
        "chains": chains,
        "flags": list(g.flags),
    }


def export(g: JetComponentGraph, fmt: str) -> str:
    if fmt == "dot":
        lines = ["digraph jet_components {"]
        for v in g.vertices:
            lines.append(f'  n{v.vid} [label="{v.label}"];')
        for a, b in g.edges:
            lines.append(f"  n{a} -> n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps(
            {
                "schema": g.schema,
                "max_level": g.max_level,
                "vertices": [
                    {
                        "vid": v.vid,
                        "level": v.level,
                        "label": v.label,
                        "component_ids": list(v.component_ids),
                        "descriptor": [list(part) for part in v.descriptor],
                    }
                    for v in g.vertices
                ],
                "edges": [list(e) for e in g.edges],
                "flags": list(g.flags),
            },
            indent=2,
            sort_keys=True,
        )
    raise ValueError(f"unknown export format {fmt!r}")


def import_json(text: str) -> JetComponentGraph:
    data = json.loads(text)
    if data["schema"] != SCHEMA:
        raise ValueError(f"unsupported schema {data['schema']!r}")
    return JetComponentGraph(
        schema=data["schema"],
        max_level=data["max_level"],
        vertices=tuple(
            GraphVertex(
                vid=v["vid"],
                level=v["level"],
                label=v["label"],
                component_ids=tuple(v["component_ids"]),
                descriptor=tuple(tuple(part) for part in v["descriptor"]),
            )
            for v in data["vertices"]
        ),
        edges=tuple((a, b) for a, b in data["edges"]),
        flags=tuple(data["flags"]),
    )
